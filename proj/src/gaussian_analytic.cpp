#include "coimpact/gaussian_analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "coimpact/errors.hpp"
#include "coimpact/specfun.hpp"

namespace coimpact {

namespace {

void require_panel(int n, double sigma_n, const char* who) {
  if (n < 2) throw DomainError(std::string(who) + ": n must be at least 2");
  if (!(sigma_n > 0.0) || !std::isfinite(sigma_n))
    throw DomainError(std::string(who) + ": sigma must be positive");
}

void require_levy(int n, double c, double alpha, const char* who) {
  if (n < 2) throw DomainError(std::string(who) + ": n must be at least 2");
  if (!(c > 0.0)) throw DomainError(std::string(who) + ": c must be positive");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw DomainError(std::string(who) + ": alpha must lie in (0, 2); use the Gaussian branch at alpha = 2");
}

double prefactor() { return gamma_fn(0.25) / (2.0 * std::sqrt(std::numbers::pi)); }

}  // namespace

void GaussianPanelModel::validate() const {
  if (n < 2) throw DomainError("GaussianPanelModel: n must be at least 2");
  if (!(second_moment > 0.0) || !std::isfinite(second_moment))
    throw DomainError("GaussianPanelModel: second moment must be positive");
  const double lower = -1.0 / static_cast<double>(n - 1);
  if (!(c_phi > lower && c_phi < 1.0))
    throw DomainError("GaussianPanelModel: c_phi must lie in (-1/(n-1), 1)");
}

double xi_constant() {
  return std::pow(2.0, 0.75) * gamma_fn(1.25) / std::sqrt(std::numbers::pi);
}

double iid_gaussian_impact(double phi, int n, double sigma_n) {
  require_panel(n, sigma_n, "iid_gaussian_impact");
  if (phi == 0.0) return 0.0;
  const double two_var = 2.0 * static_cast<double>(n - 1) * sigma_n * sigma_n;
  const double z = phi * phi / two_var;
  return prefactor() * phi / std::pow(two_var, 0.25) * kummer_1f1_scaled(1.25, 1.5, z);
}

double small_phi_slope(int n, double sigma_n) {
  require_panel(n, sigma_n, "small_phi_slope");
  const double pi = std::numbers::pi;
  return std::pow(2.0, 0.75) * gamma_fn(1.25) /
         std::pow(pi * pi * sigma_n * sigma_n * static_cast<double>(n - 1), 0.25);
}

double crossover_phi_star(int n, double sigma_n) {
  require_panel(n, sigma_n, "crossover_phi_star");
  return sigma_n * std::sqrt(static_cast<double>(n - 1)) / xi_constant();
}

double asymptote_intersection(int n, double sigma_n) {
  const double slope = small_phi_slope(n, sigma_n);
  // slope * phi - sqrt(phi) changes sign once on (0, inf); bisect in log phi.
  auto gap = [slope](double log_phi) { return std::log(slope) + 0.5 * log_phi; };
  double lo = -700.0;
  double hi = 700.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::fabs(lo + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double rescaled_impact(double phi_tilde) {
  if (phi_tilde == 0.0) return 0.0;
  return prefactor() * phi_tilde / std::pow(2.0, 0.25) *
         kummer_1f1_scaled(1.25, 1.5, 0.5 * phi_tilde * phi_tilde);
}

GaussianParams gaussian_params_from_moments(const GaussianPanelModel& model) {
  model.validate();
  const double c = model.c_phi;
  const double nd = static_cast<double>(model.n);
  const double denom = (1.0 - c) * (1.0 - c + nd * c) * model.second_moment;
  return {(1.0 - 2.0 * c + nd * c) / denom, nd * c / denom};
}

GaussianMoments moments_from_params(double a_n, double b_n, int n) {
  if (n < 2) throw DomainError("moments_from_params: n must be at least 2");
  const double nd = static_cast<double>(n);
  const double lambda1 = a_n + b_n / nd - b_n;
  const double lambda2 = a_n + b_n / nd;
  if (!(lambda1 > 0.0 && lambda2 > 0.0))
    throw DomainError("moments_from_params: requires B < A + B/N and A + B/N > 0");
  const double denom = lambda1 * lambda2;
  const double numerator = a_n + 2.0 * b_n / nd - b_n;
  GaussianMoments m;
  m.second_moment = numerator / denom;
  m.cross_moment = (b_n / nd) / denom;
  m.c_phi = (b_n / nd) / numerator;
  return m;
}

EigenTriple eigen_triple(const GaussianPanelModel& model) {
  model.validate();
  const double c = model.c_phi;
  const double e = model.second_moment;
  const double nd = static_cast<double>(model.n);
  const double collective = 1.0 - c + nd * c;
  return {1.0 / (e * collective), 1.0 / (e * (1.0 - c)), 1.0 / (e * collective * (1.0 - c))};
}

double correlated_gaussian_impact(double phi, const GaussianPanelModel& model) {
  const EigenTriple eig = eigen_triple(model);
  const double shift = 1.0 + static_cast<double>(model.n - 1) * model.c_phi;
  return iid_gaussian_impact(phi * shift, model.n, std::sqrt(1.0 / eig.lambda1_tilde));
}

double levy_linear_slope(int n, double c, double alpha) {
  require_levy(n, c, alpha, "levy_linear_slope");
  return gamma_fn(1.0 / (2.0 * alpha)) /
         (std::sqrt(2.0 * std::numbers::pi) * alpha *
          std::pow(c * static_cast<double>(n - 1), 1.0 / (2.0 * alpha)));
}

double levy_crossover(int n, double c, double alpha) {
  require_levy(n, c, alpha, "levy_crossover");
  return std::pow(c * static_cast<double>(n - 1), 1.0 / alpha);
}

}  // namespace coimpact
