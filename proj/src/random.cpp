#include "coimpact/random.hpp"

#include <cmath>
#include <numbers>

#include "coimpact/errors.hpp"

namespace coimpact {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a;
  const std::uint64_t ha = splitmix64(x);
  x = b ^ 0xD1B54A32D192ED03ULL;
  const std::uint64_t hb = splitmix64(x);
  x = ha ^ (hb + 0x9E3779B97F4A7C15ULL + (ha << 6) + (ha >> 2));
  return splitmix64(x);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t x = mix(seed, stream_id);
  for (auto& word : state_) word = splitmix64(x);
}

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(seed_, mix(stream_id_, index));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u = 0.0, v = 0.0, s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RngStream::exponential() { return -std::log(uniform_open()); }

double draw_stable_symmetric(RngStream& stream, double alpha, double scale) {
  const double v = std::numbers::pi * (stream.uniform_open() - 0.5);
  const double w = stream.exponential();
  if (alpha == 1.0) return scale * std::tan(v);
  const double x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  return scale * x;
}

std::vector<double> sample_gaussian(RngStream& stream, double mean, double sd, std::size_t count) {
  if (!(sd >= 0.0)) throw DomainError("sample_gaussian: sd must be non-negative");
  std::vector<double> out(count);
  for (auto& x : out) x = mean + sd * stream.normal();
  return out;
}

std::vector<double> sample_half_normal(RngStream& stream, double sigma, std::size_t count) {
  if (!(sigma > 0.0)) throw DomainError("sample_half_normal: sigma must be positive");
  std::vector<double> out(count);
  for (auto& x : out) {
    do {
      x = sigma * std::fabs(stream.normal());
    } while (x == 0.0);
  }
  return out;
}

std::vector<double> sample_stable_symmetric(RngStream& stream, double alpha, double scale,
                                            std::size_t count) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("sample_stable_symmetric: alpha must lie in (0, 2]");
  if (!(scale > 0.0)) throw DomainError("sample_stable_symmetric: scale must be positive");
  std::vector<double> out(count);
  for (auto& x : out) x = draw_stable_symmetric(stream, alpha, scale);
  return out;
}

std::vector<double> sample_flat_dirichlet(RngStream& stream, std::size_t n) {
  if (n == 0) throw DomainError("sample_flat_dirichlet: n must be at least 1");
  if (n == 1) return {1.0};
  std::vector<double> out(n);
  double total = 0.0;
  for (auto& x : out) {
    x = stream.exponential();
    total += x;
  }
  for (auto& x : out) x /= total;
  return out;
}

}  // namespace coimpact
