#include "coimpact/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coimpact/errors.hpp"
#include "coimpact/gaussian_analytic.hpp"
#include "coimpact/impact_law.hpp"
#include "coimpact/numeric.hpp"
#include "coimpact/parallel.hpp"
#include "coimpact/sign_sim.hpp"

namespace coimpact {

namespace {

std::vector<double> arithmetic_grid(double first, double step, int count) {
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) grid.push_back(std::round((first + step * i) * 1e6) / 1e6);
  return grid;
}

struct Regression {
  double slope = 0.0;
  double ss_res = 0.0;
  double sxx = 0.0;
};

Regression through_origin(std::span<const double> x, std::span<const double> y) {
  std::vector<double> scratch(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scratch[i] = x[i] * y[i];
  const double sxy = exact_sum(scratch);
  for (std::size_t i = 0; i < x.size(); ++i) scratch[i] = x[i] * x[i];
  Regression reg;
  reg.sxx = exact_sum(scratch);
  if (!(reg.sxx > 0.0)) throw DegenerateRegressionError("regression: predictor is identically zero");
  reg.slope = sxy / reg.sxx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - reg.slope * x[i];
    scratch[i] = r * r;
  }
  reg.ss_res = exact_sum(scratch);
  return reg;
}

std::vector<double> returns_of(std::span<const DayPanel> panels) {
  std::vector<double> r;
  r.reserve(panels.size());
  for (const auto& p : panels) r.push_back(p.rescaled_return);
  return r;
}

std::vector<double> predictors(std::span<const DayPanel> panels, double alpha, double delta) {
  const AnsatzParams params{1.0, alpha, delta};
  std::vector<double> x;
  x.reserve(panels.size());
  for (const auto& p : panels) x.push_back(aggregate_impact(p.phis, params));
  return x;
}

double mean_of(std::span<const double> xs) {
  std::vector<double> copy(xs.begin(), xs.end());
  return exact_sum(copy) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

double sample_covariance(std::span<const double> xs, double mx, std::span<const double> ys, double my) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) ss += (xs[i] - mx) * (ys[i] - my);
  return ss / static_cast<double>(xs.size() - 1);
}

std::map<int, std::vector<DayPanel>> panels_by_n(std::span<const DayPanel> panels) {
  std::map<int, std::vector<DayPanel>> out;
  for (const auto& p : panels) out[static_cast<int>(p.n())].push_back(p);
  return out;
}

double panel_rho(const DayPanel& p) { return realized_sign_correlation(panel_signs(p)); }

}  // namespace

std::vector<double> default_alpha_grid() { return arithmetic_grid(0.1, 0.1, 20); }
std::vector<double> default_delta_grid() { return arithmetic_grid(0.1, 0.05, 19); }

GridFitResult fit_alpha_delta(std::span<const DayPanel> panels, std::span<const double> alpha_grid,
                              std::span<const double> delta_grid) {
  if (panels.size() < 2) throw InsufficientDataError("fit_alpha_delta: needs at least 2 panels");
  if (alpha_grid.empty() || delta_grid.empty()) throw DomainError("fit_alpha_delta: empty grid");
  for (double a : alpha_grid)
    if (!(a > 0.0 && a <= 2.0)) throw DomainError("fit_alpha_delta: alpha must lie in (0, 2]");
  for (double d : delta_grid)
    if (!(d > 0.0 && d <= 1.0)) throw DomainError("fit_alpha_delta: delta must lie in (0, 1]");

  const std::vector<double> r = returns_of(panels);
  const double r_mean = mean_of(r);
  std::vector<double> centered(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) centered[i] = (r[i] - r_mean) * (r[i] - r_mean);
  const double ss_tot = exact_sum(centered);
  if (!(ss_tot > 0.0)) throw DegenerateRegressionError("fit_alpha_delta: returns have zero variance");

  GridFitResult result;
  result.grid.resize(alpha_grid.size() * delta_grid.size());
  parallel_for(result.grid.size(), [&](std::size_t k) {
    const double alpha = alpha_grid[k / delta_grid.size()];
    const double delta = delta_grid[k % delta_grid.size()];
    const Regression reg = through_origin(predictors(panels, alpha, delta), r);
    result.grid[k] = {alpha, delta, reg.slope, 1.0 - reg.ss_res / ss_tot};
  });

  bool found = false;
  for (const auto& g : result.grid) {
    if (!(g.y_fit > 0.0)) continue;
    if (!found || g.r_squared > result.r2_max) {
      result.alpha_star = g.alpha;
      result.delta_star = g.delta;
      result.r2_max = g.r_squared;
      found = true;
    }
  }
  if (!found) throw DegenerateRegressionError("fit_alpha_delta: no grid point has a positive Y");
  return result;
}

YRatioFit fit_y_ratio(std::span<const DayPanel> panels, double alpha, double delta) {
  if (panels.size() < 2) throw InsufficientDataError("fit_y_ratio: needs at least 2 panels");
  const Regression reg = through_origin(predictors(panels, alpha, delta), returns_of(panels));
  YRatioFit fit;
  fit.y_ratio = reg.slope;
  fit.std_error = std::sqrt(reg.ss_res / static_cast<double>(panels.size() - 1) / reg.sxx);
  fit.panels = panels.size();
  return fit;
}

GammaEstimate gamma_from_rho(std::span<const double> rho) {
  if (rho.empty()) throw InsufficientDataError("gamma_from_rho: no panels");
  GammaEstimate e;
  e.panels = rho.size();
  e.mean_rho = mean_of(rho);
  e.rho_std_error = std::sqrt(sample_variance(rho, e.mean_rho) / static_cast<double>(rho.size()));
  e.clamped = e.mean_rho < 0.0;
  e.gamma = std::sqrt(std::max(0.0, e.mean_rho));
  e.std_error = e.gamma > 0.0 ? e.rho_std_error / (2.0 * e.gamma) : std::sqrt(e.rho_std_error);
  return e;
}

GammaFit fit_gamma_eps(std::span<const DayPanel> panels, std::size_t min_panels, int plateau_min_n) {
  GammaFit fit;
  fit.plateau_min_n = plateau_min_n;
  std::map<int, std::vector<double>> rho_by_n;
  for (const auto& p : panels)
    if (p.n() >= 2) rho_by_n[static_cast<int>(p.n())].push_back(panel_rho(p));

  std::vector<double> pooled;
  for (const auto& [n, rho] : rho_by_n) {
    if (rho.size() < std::max<std::size_t>(min_panels, 1)) continue;
    fit.by_n[n] = gamma_from_rho(rho);
    if (n >= plateau_min_n) pooled.insert(pooled.end(), rho.begin(), rho.end());
  }
  if (!pooled.empty()) fit.plateau = gamma_from_rho(pooled);
  return fit;
}

GmmFit gmm_from_moments(int n, double second_moment, double cross_moment) {
  if (n < 2) throw DomainError("gmm_from_moments: n must be at least 2");
  if (!(second_moment > 0.0))
    throw CalibrationInfeasibleError("gmm_from_moments: E[phi^2] must be positive at N=" + std::to_string(n));
  const double c = cross_moment / second_moment;
  if (!(c > -1.0 / (n - 1) && c < 1.0))
    throw CalibrationInfeasibleError("gmm_from_moments: C_phi=" + format_double(c) + " outside (-1/(N-1), 1) at N=" +
                                     std::to_string(n));
  const GaussianParams params = gaussian_params_from_moments({n, second_moment, c});
  if (!std::isfinite(params.a_n) || !std::isfinite(params.b_n))
    throw CalibrationInfeasibleError("gmm_from_moments: couplings overflow at N=" + std::to_string(n));

  GmmFit fit;
  fit.a_n = params.a_n;
  fit.b_n = params.b_n;
  fit.second_moment = second_moment;
  fit.cross_moment = cross_moment;
  fit.c_phi = c;

  GaussianMoments back;
  try {
    back = moments_from_params(params.a_n, params.b_n, n);
  } catch (const Error& e) {
    throw CalibrationInfeasibleError(std::string("gmm_from_moments: couplings not invertible: ") + e.what());
  }
  const double err_second = std::fabs(back.second_moment - second_moment) / second_moment;
  const double err_cross = std::fabs(back.cross_moment - cross_moment) / second_moment;
  if (!(err_second <= 1e-10 && err_cross <= 1e-10))
    throw CalibrationInfeasibleError("gmm_from_moments: moment round trip misses by " +
                                     format_double(std::max(err_second, err_cross)) + " at N=" + std::to_string(n));
  return fit;
}

GmmFit fit_gmm_at_n(std::span<const DayPanel> panels_at_n) {
  if (panels_at_n.empty()) throw InsufficientDataError("fit_gmm_at_n: no panels");
  const std::size_t n = panels_at_n.front().n();
  if (n < 2) throw DomainError("fit_gmm_at_n: panels need at least two metaorders");
  const double nd = static_cast<double>(n);

  std::vector<double> sq, cross;
  sq.reserve(panels_at_n.size());
  cross.reserve(panels_at_n.size());
  for (const auto& p : panels_at_n) {
    if (p.n() != n) throw DomainError("fit_gmm_at_n: panels must share N");
    std::vector<double> squares(n);
    for (std::size_t i = 0; i < n; ++i) squares[i] = p.phis[i] * p.phis[i];
    const double s2 = exact_sum(squares);
    const double s1 = exact_sum(p.phis);
    sq.push_back(s2 / nd);
    cross.push_back((s1 * s1 - s2) / (nd * (nd - 1.0)));
  }
  const double m_sq = mean_of(sq);
  const double m_cross = mean_of(cross);
  GmmFit fit = gmm_from_moments(static_cast<int>(n), m_sq, m_cross);
  fit.panels = panels_at_n.size();

  // Delta method for the ratio of means.
  const double count = static_cast<double>(panels_at_n.size());
  const double v_sq = sample_variance(sq, m_sq);
  const double v_cross = sample_variance(cross, m_cross);
  const double cov = sample_covariance(sq, m_sq, cross, m_cross);
  const double var = (v_cross / (m_sq * m_sq) - 2.0 * m_cross * cov / (m_sq * m_sq * m_sq) +
                      m_cross * m_cross * v_sq / (m_sq * m_sq * m_sq * m_sq)) /
                     count;
  fit.c_phi_std_error = std::sqrt(std::max(0.0, var));
  return fit;
}

PerN<GmmFit> fit_gmm_gaussian(std::span<const DayPanel> panels, std::size_t min_panels) {
  PerN<GmmFit> out;
  for (const auto& [n, at_n] : panels_by_n(panels)) {
    if (n < 2 || at_n.size() < std::max<std::size_t>(min_panels, 1)) continue;
    try {
      out.values[n] = fit_gmm_at_n(at_n);
    } catch (const CalibrationInfeasibleError& e) {
      out.failures[n] = e.what();
    }
  }
  return out;
}

ShiftedSqrtFit fit_shifted_sqrt(const ImpactCurve& curve) {
  const auto& bins = curve.bins;
  if (bins.size() < 3) throw InsufficientDataError("fit_shifted_sqrt: needs at least 3 bins");
  ShiftedSqrtFit fit;
  std::vector<double> w(bins.size(), 1.0);
  for (const auto& b : bins)
    if (!(b.std_error > 0.0)) fit.unit_weights = true;
  if (!fit.unit_weights)
    for (std::size_t i = 0; i < bins.size(); ++i) w[i] = 1.0 / (bins[i].std_error * bins[i].std_error);

  double b_max = 0.0;
  for (const auto& b : bins) {
    if (!(b.phi_center >= 0.0)) throw DomainError("fit_shifted_sqrt: bin centers must be non-negative");
    b_max = std::max(b_max, b.phi_center);
  }

  auto profile = [&](double shift, double& a_out) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const double s = std::sqrt(bins[i].phi_center + shift);
      num += w[i] * bins[i].mean_impact * s;
      den += w[i] * s * s;
    }
    a_out = den > 0.0 ? num / den : 0.0;
    double sse = 0.0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const double r = bins[i].mean_impact - a_out * std::sqrt(bins[i].phi_center + shift);
      sse += w[i] * r * r;
    }
    return sse;
  };

  constexpr double kTolerance = 1e-10;
  constexpr std::size_t kMaxIterations = 500;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = b_max, a = 0.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = profile(x1, a), f2 = profile(x2, a);
  std::size_t it = 0;
  while (hi - lo > kTolerance && it < kMaxIterations) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = profile(x1, a);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = profile(x2, a);
    }
    ++it;
  }
  if (hi - lo > kTolerance)
    throw FitFailureError("fit_shifted_sqrt: search over B did not converge after " + std::to_string(it) +
                          " iterations, bracket [" + format_double(lo) + ", " + format_double(hi) + "]");

  double best_b = 0.5 * (lo + hi);
  double best_a = 0.0;
  double best_sse = profile(best_b, best_a);
  double edge_a = 0.0;
  const double edge_sse = profile(0.0, edge_a);
  if (edge_sse <= best_sse) {
    best_b = 0.0;
    best_a = edge_a;
    best_sse = edge_sse;
  }
  if (!std::isfinite(best_a) || !std::isfinite(best_sse))
    throw FitFailureError("fit_shifted_sqrt: non-finite fit at B=" + format_double(best_b) +
                          ", A=" + format_double(best_a));
  fit.a = best_a;
  fit.b = best_b;
  fit.weighted_sse = best_sse;
  fit.iterations = it;
  return fit;
}

std::vector<SubsampleComparison> model_vs_empirical(std::span<const DayPanel> panels,
                                                    const ComparisonConfig& config,
                                                    const RngStream& stream) {
  if (!(config.rho_threshold > 0.0 && config.rho_threshold <= 1.0))
    throw DomainError("model_vs_empirical: rho threshold must lie in (0, 1]");
  if (config.n_min < 2 || config.n_max < config.n_min)
    throw DomainError("model_vs_empirical: need 2 <= n_min <= n_max");

  std::vector<DayPanel> high, low;
  for (const auto& p : panels) {
    const int n = static_cast<int>(p.n());
    if (n < config.n_min || n > config.n_max) continue;
    const double rho = panel_rho(p);
    if (config.rho_threshold >= 1.0)
      low.push_back(p);
    else if (rho >= config.rho_threshold)
      high.push_back(p);
    else if (std::fabs(rho) <= config.rho_threshold)
      low.push_back(p);
  }

  std::vector<std::pair<std::string, std::vector<DayPanel>*>> parts;
  if (config.rho_threshold >= 1.0) {
    parts.emplace_back("all", &low);
  } else {
    parts.emplace_back("high_rho", &high);
    parts.emplace_back("low_rho", &low);
  }

  std::vector<SubsampleComparison> out;
  for (std::size_t s = 0; s < parts.size(); ++s) {
    const auto& [label, members] = parts[s];
    if (members->empty())
      throw PartitionError("model_vs_empirical: sub-sample " + label + " is empty (threshold " +
                           format_double(config.rho_threshold) + ")");
    SubsampleComparison cmp;
    cmp.label = label;
    cmp.panels = members->size();
    cmp.y_ratio = fit_y_ratio(*members, 1.0, 0.5);
    if (!(cmp.y_ratio.y_ratio > 0.0))
      throw DegenerateRegressionError("model_vs_empirical: non-positive Y in sub-sample " + label);

    std::vector<SignedSample> samples;
    std::size_t metaorders = 0;
    for (const auto& [n, at_n] : panels_by_n(*members)) {
      std::vector<double> rho, phis;
      for (const auto& p : at_n) {
        rho.push_back(panel_rho(p));
        phis.insert(phis.end(), p.phis.begin(), p.phis.end());
        for (double phi : p.phis) samples.push_back({phi, p.rescaled_return});
      }
      cmp.gamma[n] = gamma_from_rho(rho).gamma;
      cmp.sigma[n] = std::sqrt(sample_variance(phis, mean_of(phis)));
      cmp.p_n[n] = static_cast<double>(phis.size());
      metaorders += phis.size();
    }
    for (auto& [n, p] : cmp.p_n) p /= static_cast<double>(metaorders);

    const ImpactCurve curve = binned_curve(samples, config.n_bins, config.min_count);
    const RngStream sub = stream.substream(s);
    for (const auto& bin : curve.bins) {
      ComparisonBin row;
      row.phi_center = bin.phi_center;
      row.count = bin.count;
      row.empirical = bin.mean_impact / cmp.y_ratio.y_ratio;
      row.empirical_se = bin.std_error / cmp.y_ratio.y_ratio;
      double var = 0.0;
      for (const auto& [n, p] : cmp.p_n) {
        const VolumeScheme volumes = HalfNormalVolumes{{SigmaScaling::Kind::kConstant, cmp.sigma[n]}};
        const McEstimate mc =
            mc_impact(bin.phi_center, n, SignModel{cmp.gamma[n]}, volumes, config.sim_samples, sub.substream(n));
        row.model += p * mc.mean;
        var += p * p * mc.std_error * mc.std_error;
      }
      row.model_se = std::sqrt(var);
      const double total_se = std::hypot(row.empirical_se, row.model_se);
      row.z = total_se > 0.0 ? (row.empirical - row.model) / total_se : 0.0;
      cmp.bins.push_back(row);
    }
    out.push_back(std::move(cmp));
  }
  return out;
}

}  // namespace coimpact
