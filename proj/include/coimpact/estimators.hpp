#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coimpact/core_domain.hpp"

namespace coimpact {

/// Per-N results together with the N values that could not be estimated.
template <class T>
struct PerN {
  std::map<int, T> values;
  std::map<int, std::string> failures;
};

struct CurveBin {
  double phi_center = 0.0;   // geometric mean of |x| in the bin
  double mean_impact = 0.0;  // mean of sign(x) * r
  double std_error = 0.0;    // sample sd / sqrt(count)
  std::size_t count = 0;
};

/// Binned conditional expectation, bins ordered by phi_center.
struct ImpactCurve {
  std::vector<CurveBin> bins;
};

struct SignedSample {
  double x = 0.0;  // signed volume fraction (phi or Phi)
  double r = 0.0;  // rescaled return
};

inline constexpr std::size_t kDefaultMinCount = 50;
inline constexpr std::size_t kDefaultMinPanels = 2;

/// Symmetrized curve E[sign(x) r | |x|] over evenly populated bins of |x|.
/// Samples are ordered by (|x|, sign(x) r), so the result depends only on the
/// multiset of samples. Throws InsufficientDataError when there are fewer than
/// n_bins * min_count samples.
ImpactCurve binned_curve(std::span<const SignedSample> samples, std::size_t n_bins,
                         std::size_t min_count = kDefaultMinCount);

/// 2/(N(N-1)) sum_{i<j} eps_i eps_j. Throws DomainError for N < 2.
double realized_sign_correlation(std::span<const int> signs);

/// Signs of a panel's volume fractions.
std::vector<int> panel_signs(const DayPanel& panel);

struct SignCorrelationEstimate {
  std::size_t panels = 0;
  double mean_sign = 0.0;   // E[eps_i | N]
  double mean_rho = 0.0;    // E[eps_i eps_j | N], panel-weighted
  double c_eps = 0.0;
  double std_error = 0.0;
};

/// (E[eps_i eps_j|N] - E[eps_i|N]^2) / (1 - E[eps_i|N]^2) for panels sharing
/// one N; pairs are averaged within a panel, panels weighted equally.
/// Throws ZeroVarianceError when every sign is identical.
SignCorrelationEstimate sign_correlation(std::span<const DayPanel> panels_at_n);

/// N >= 2 with at least min_panels panels; degenerate N are listed in failures.
PerN<SignCorrelationEstimate> sign_correlation_by_n(std::span<const DayPanel> panels,
                                                    std::size_t min_panels = kDefaultMinPanels);

/// sum phi^2 / (sum |phi|)^2, in [1/N, 1]. Throws DomainError on all-zero input.
double herfindahl(std::span<const double> phis);

struct SigmaEstimate {
  std::size_t panels = 0;
  double sigma = 0.0;      // sd of phi at this N
  double phi_star = 0.0;   // sigma * sqrt(N - 1)
};

/// N with fewer than min_panels panels are omitted.
std::map<int, SigmaEstimate> sigma_by_n(std::span<const DayPanel> panels,
                                        std::size_t min_panels = kDefaultMinPanels);

struct MeanEstimate {
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

std::map<int, MeanEstimate> herfindahl_by_n(std::span<const DayPanel> panels,
                                            std::size_t min_panels = kDefaultMinPanels);

/// Panel counts by N.
std::map<int, std::size_t> n_histogram(std::span<const DayPanel> panels);

struct MetaorderStats {
  double participation = 0.0;      // pi = |Q| / (V(t_e) - V(t_s))
  double duration_voltime = 0.0;   // D = (V(t_e) - V(t_s)) / V(t_c)
  double daily_fraction = 0.0;     // |phi| = pi * D
};

/// Empty when the record carries no execution-interval volume.
std::optional<MetaorderStats> metaorder_stats(const MetaorderRecord& record);

struct PowerLawFit {
  double exponent = 0.0;
  double std_error = 0.0;
  std::size_t samples_in_window = 0;
  std::size_t bins_used = 0;
  std::string method = "log-binned least squares";
};

/// Density exponent from a least-squares line through log(count / width)
/// against log(bin center) on log-spaced bins in [x_min, x_max].
/// Throws InsufficientDataError with fewer than 100 samples in the window.
PowerLawFit powerlaw_tail_fit(std::span<const double> samples, double x_min, double x_max,
                              std::size_t n_bins = 20);

}  // namespace coimpact
