#include "coimpact/impact_law.hpp"

#include <cmath>
#include <vector>

#include "coimpact/errors.hpp"
#include "coimpact/numeric.hpp"

namespace coimpact {

void AnsatzParams::validate() const {
  if (!(y_ratio > 0.0)) throw DomainError("AnsatzParams: y_ratio must be positive");
  if (!(alpha > 0.0)) throw DomainError("AnsatzParams: alpha must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("AnsatzParams: delta must lie in (0, 1]");
}

double sign_power(double x, double p) {
  if (!(p > 0.0)) throw DomainError("sign_power: exponent must be positive");
  if (x == 0.0) return 0.0;
  const double ax = std::fabs(x);
  const double magnitude = p == 1.0 ? ax : p == 0.5 ? std::sqrt(ax) : std::pow(ax, p);
  return x > 0.0 ? magnitude : -magnitude;
}

double sqrt_law(double phi, double y_ratio) { return y_ratio * sign_power(phi, 0.5); }

double aggregate_impact(std::span<const double> phis, const AnsatzParams& params) {
  params.validate();
  std::vector<double> powered(phis.size());
  for (std::size_t i = 0; i < phis.size(); ++i) powered[i] = sign_power(phis[i], params.alpha);
  return params.y_ratio * sign_power(exact_sum(powered), params.delta / params.alpha);
}

double global_impact(double net_flow, double y_ratio) { return y_ratio * sign_power(net_flow, 0.5); }

double shifted_sqrt(double phi, double a, double b) {
  const double arg = phi + b;
  if (arg < 0.0) throw DomainError("shifted_sqrt: phi + B must be non-negative");
  return a * std::sqrt(arg);
}

}  // namespace coimpact
