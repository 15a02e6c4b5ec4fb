#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace coimpact {

/// Deterministic random stream (xoshiro256**) identified by (seed, stream_id).
///
/// The state is derived by hashing both identifiers with SplitMix64, so equal
/// identifiers give the same sequence on every platform and distinct stream
/// ids give statistically independent sequences. A stream is not
/// thread-safe; give each worker its own substream.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const { return stream_id_; }

  /// Child stream keyed by `index`; independent of this stream's position.
  [[nodiscard]] RngStream substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Standard exponential.
  double exponential();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Symmetric alpha-stable draw with characteristic function
/// exp(-(scale |t|)^alpha) (Chambers-Mallows-Stuck).
double draw_stable_symmetric(RngStream& stream, double alpha, double scale);

std::vector<double> sample_gaussian(RngStream& stream, double mean, double sd, std::size_t count);
std::vector<double> sample_half_normal(RngStream& stream, double sigma, std::size_t count);
std::vector<double> sample_stable_symmetric(RngStream& stream, double alpha, double scale,
                                            std::size_t count);
/// One draw from Dir(1, ..., 1) with n components.
std::vector<double> sample_flat_dirichlet(RngStream& stream, std::size_t n);

}  // namespace coimpact
