#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coimpact/core_domain.hpp"
#include "coimpact/estimators.hpp"
#include "coimpact/random.hpp"

namespace coimpact {

struct GridPoint {
  double alpha = 0.0;
  double delta = 0.0;
  double y_fit = 0.0;
  double r_squared = 0.0;
};

struct GridFitResult {
  std::vector<GridPoint> grid;  // alpha-major, in grid order
  double alpha_star = 0.0;
  double delta_star = 0.0;
  double r2_max = 0.0;
};

/// {0.1, 0.2, ..., 2.0}
std::vector<double> default_alpha_grid();
/// {0.1, 0.15, ..., 1.0}
std::vector<double> default_delta_grid();

/// Least-squares fit of rescaled_return = Y (sum phi^{.alpha})^{.delta/alpha}
/// at each grid point, Y profiled in closed form. The argmax is taken over
/// points with y_fit > 0. Sums are exact, so the result does not depend on
/// panel order. Throws DegenerateRegressionError when returns have zero
/// variance or no grid point has a positive Y.
GridFitResult fit_alpha_delta(std::span<const DayPanel> panels, std::span<const double> alpha_grid,
                              std::span<const double> delta_grid);

struct YRatioFit {
  double y_ratio = 0.0;
  double std_error = 0.0;
  std::size_t panels = 0;
};

/// Through-origin slope <pred ret> / <pred^2> with pred the unit-Y ansatz.
/// Throws DegenerateRegressionError when every predictor is zero.
YRatioFit fit_y_ratio(std::span<const DayPanel> panels, double alpha, double delta);

struct GammaEstimate {
  std::size_t panels = 0;
  double mean_rho = 0.0;
  double rho_std_error = 0.0;
  double gamma = 0.0;      // sqrt(max(0, mean_rho))
  double std_error = 0.0;  // rho_std_error / (2 gamma); sqrt(rho_std_error) at gamma = 0
  bool clamped = false;    // mean_rho < 0
};

struct GammaFit {
  std::map<int, GammaEstimate> by_n;
  std::optional<GammaEstimate> plateau;  // pooled over N >= plateau_min_n
  int plateau_min_n = 10;
};

inline constexpr int kDefaultPlateauMinN = 10;

GammaEstimate gamma_from_rho(std::span<const double> rho);

GammaFit fit_gamma_eps(std::span<const DayPanel> panels, std::size_t min_panels = kDefaultMinPanels,
                       int plateau_min_n = kDefaultPlateauMinN);

struct GmmFit {
  std::size_t panels = 0;
  double a_n = 0.0;
  double b_n = 0.0;
  double second_moment = 0.0;  // Sigma_N^2 = E[phi^2 | N]
  double cross_moment = 0.0;   // E[phi_i phi_j | N]
  double c_phi = 0.0;
  double c_phi_std_error = 0.0;
};

/// Couplings matching the given moments. Throws CalibrationInfeasibleError
/// when C_phi is outside (-1/(N-1), 1) or the couplings do not reproduce the
/// moments to 1e-10.
GmmFit gmm_from_moments(int n, double second_moment, double cross_moment);

/// GMM fit for panels sharing one N: per-panel mean of phi_i^2 and of
/// phi_i phi_j (i != j), averaged across panels.
GmmFit fit_gmm_at_n(std::span<const DayPanel> panels_at_n);

/// N >= 2 with at least min_panels panels; infeasible N are listed in failures.
PerN<GmmFit> fit_gmm_gaussian(std::span<const DayPanel> panels, std::size_t min_panels = kDefaultMinPanels);

struct ShiftedSqrtFit {
  double a = 0.0;
  double b = 0.0;
  double weighted_sse = 0.0;
  std::size_t iterations = 0;
  bool unit_weights = false;  // some bin had a zero standard error
};

/// Weighted least squares of A sqrt(phi + B) on bin means, weights
/// 1/std_error^2, A profiled per B and B by golden-section search on
/// [0, max phi_center]. Throws InsufficientDataError below 3 bins and
/// FitFailureError when the search does not converge.
ShiftedSqrtFit fit_shifted_sqrt(const ImpactCurve& curve);

struct ComparisonConfig {
  double rho_threshold = 0.05;
  int n_min = 2;
  int n_max = 10;
  std::size_t n_bins = 10;
  std::size_t min_count = kDefaultMinCount;
  std::size_t sim_samples = 100000;
};

struct ComparisonBin {
  double phi_center = 0.0;
  std::size_t count = 0;
  double empirical = 0.0;  // mean sign(phi) r / Y
  double empirical_se = 0.0;
  double model = 0.0;
  double model_se = 0.0;
  double z = 0.0;
};

struct SubsampleComparison {
  std::string label;  // "high_rho", "low_rho" or "all"
  std::size_t panels = 0;
  YRatioFit y_ratio;
  std::map<int, double> p_n;    // metaorder-weighted
  std::map<int, double> gamma;  // gamma_eps by N
  std::map<int, double> sigma;  // Sigma_N by N
  std::vector<ComparisonBin> bins;
};

/// Splits panels with N in [n_min, n_max] into rho >= threshold and
/// |rho| <= threshold, then compares each sub-sample's Y-normalized phi-curve
/// with sum_N p(N) I_N(phi) simulated from the sub-sample's own gamma_N,
/// Sigma_N (half-normal volumes) and p(N). A threshold of 1 leaves every
/// panel in one sub-sample labelled "all". Sub-sample s, size N uses
/// stream.substream(s).substream(N) for every bin. Throws PartitionError when
/// a sub-sample is empty.
std::vector<SubsampleComparison> model_vs_empirical(std::span<const DayPanel> panels,
                                                    const ComparisonConfig& config,
                                                    const RngStream& stream);

}  // namespace coimpact
