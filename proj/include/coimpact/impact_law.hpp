#pragma once

#include <span>

namespace coimpact {

/// Parameters of the N-metaorder aggregation law
/// I = Y * (sum_i phi_i^{.alpha})^{.delta/alpha}.
struct AnsatzParams {
  double y_ratio = 1.0;
  double alpha = 1.0;
  double delta = 0.5;

  /// Throws DomainError unless y_ratio > 0, alpha > 0, delta in (0, 1].
  void validate() const;
};

/// sign(x) * |x|^p, p > 0.
double sign_power(double x, double p);

/// Y * phi^{.1/2}
double sqrt_law(double phi, double y_ratio);

/// Aggregate impact of co-executed metaorders. The inner sum is exact, so the
/// result is invariant under any permutation of `phis`.
double aggregate_impact(std::span<const double> phis, const AnsatzParams& params);

/// Y * Phi^{.1/2}; equals aggregate_impact at alpha = 1, delta = 1/2.
double global_impact(double net_flow, double y_ratio);

/// A * sqrt(phi + B); throws DomainError when phi + B < 0.
double shifted_sqrt(double phi, double a, double b);

}  // namespace coimpact
