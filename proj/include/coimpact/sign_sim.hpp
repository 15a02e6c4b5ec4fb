#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "coimpact/core_domain.hpp"
#include "coimpact/random.hpp"

namespace coimpact {

/// Hidden-factor sign model: P(eps_i = +1 | h) = (1 + gamma h) / 2 with a
/// fair hidden sign h, giving pairwise sign correlation C_eps = gamma^2.
struct SignModel {
  double gamma_eps = 0.0;

  [[nodiscard]] double c_eps() const { return gamma_eps * gamma_eps; }
  void validate() const;
};

/// How Sigma_N depends on the number of co-executed metaorders.
struct SigmaScaling {
  enum class Kind { kConstant, kInverseN };
  Kind kind = Kind::kConstant;
  double value = 0.0;  // sigma for kConstant, c in Sigma_N = c / N for kInverseN

  [[nodiscard]] double at(int n) const;
};

/// |phi| ~ half-normal with scale Sigma_N.
struct HalfNormalVolumes {
  SigmaScaling sigma;
};

/// |phi| drawn from a piecewise-uniform density.
struct HistogramVolumes {
  std::vector<double> edges;   // strictly increasing, edges.front() >= 0
  std::vector<double> masses;  // one per bin, summing to 1
};

/// The N magnitudes are total_fraction times a flat Dirichlet draw.
struct DirichletVolumes {
  double total_fraction = 1.0;
};

/// |phi| = |X| with X symmetric alpha-stable, characteristic function
/// exp(-(scale |t|)^alpha).
struct StableVolumes {
  double alpha = 2.0;
  double scale = 0.0;
};

using VolumeScheme = std::variant<HalfNormalVolumes, HistogramVolumes, DirichletVolumes, StableVolumes>;

void validate_volume_scheme(const VolumeScheme& scheme);

/// Fills `out` with the magnitudes of a panel of `n` metaorders (out.size() <= n;
/// for the Dirichlet scheme the components are the first out.size() of n).
void draw_magnitudes(RngStream& stream, const VolumeScheme& scheme, int n, std::span<double> out);

struct SimConfig {
  std::map<int, double> p_n;  // probability mass over N >= 1
  SignModel sign_model;
  VolumeScheme volume_scheme = HalfNormalVolumes{};
  double y_ratio = 1.0;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError on invalid masses, parameters or scheme.
  void validate() const;
};

struct ConditionedSigns {
  int hidden = 1;
  std::vector<int> signs;  // signs[0] == +1 is the conditioning metaorder
};

/// Draws the hidden factor given eps_k = +1, then the other n - 1 signs.
ConditionedSigns sample_signs_conditioned(RngStream& stream, int n, const SignModel& model);

/// Unconditioned draw: fair hidden factor, then n signs.
std::vector<int> sample_signs(RngStream& stream, int n, const SignModel& model);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kDefaultMcSamples = 100000;
inline constexpr std::size_t kMcChunkSize = 4096;

/// Monte Carlo I_N(phi)/Y: fix eps_k = +1 and |phi_k| = phi, sample the other
/// N - 1 metaorders, average (sum_i phi_i)^{.1/2}.
///
/// Samples are split in fixed chunks, chunk j using stream.substream(j), and
/// chunk statistics are merged in index order, so the result does not depend
/// on the worker count.
McEstimate mc_impact(double phi, int n, const SignModel& sign_model, const VolumeScheme& volumes,
                     std::size_t n_samples, const RngStream& stream);

/// Central difference (I_N(h) - I_N(-h)) / (2h) with common random numbers.
McEstimate mc_small_phi_slope(double h, int n, const SignModel& sign_model,
                              const VolumeScheme& volumes, std::size_t n_samples,
                              const RngStream& stream);

/// sum_N p(N) I_N(phi); each N uses stream.substream(N).
McEstimate mixture_impact(double phi, const SimConfig& config, std::size_t n_samples,
                          const RngStream& stream);

/// Synthetic panels: N ~ p(N), fair hidden sign, correlated signs, magnitudes
/// from the volume scheme, return Y * Phi^{.1/2} + N(0, noise_sd^2).
/// Day d uses RngStream(seed, 0).substream(d).
std::vector<DayPanel> generate_synthetic_market(const SimConfig& config, std::size_t n_days);

/// Panels of n exchangeable Gaussian volumes with variance sigma^2 and pairwise
/// correlation c_phi; returns are Phi^{.1/2}.
std::vector<DayPanel> generate_gaussian_panels(int n, double sigma, double c_phi, std::size_t count,
                                               const RngStream& stream);

}  // namespace coimpact
