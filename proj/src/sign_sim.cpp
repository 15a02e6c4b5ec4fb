#include "coimpact/sign_sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "coimpact/errors.hpp"
#include "coimpact/impact_law.hpp"
#include "coimpact/parallel.hpp"

namespace coimpact {

namespace {

constexpr double kMassTolerance = 1e-9;

struct RunningMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const RunningMoments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double n_a = static_cast<double>(count);
    const double n_b = static_cast<double>(other.count);
    const double total = n_a + n_b;
    const double delta = other.mean - mean;
    mean += delta * n_b / total;
    m2 += other.m2 + delta * delta * n_a * n_b / total;
    count += other.count;
  }

  [[nodiscard]] McEstimate estimate() const {
    McEstimate e;
    e.mean = mean;
    e.samples = count;
    e.std_error = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
    return e;
  }
};

int draw_sign(RngStream& stream, double p_plus) { return stream.uniform() < p_plus ? 1 : -1; }

// Sum of the n - 1 other signed volumes given eps_k = +1.
double draw_conditioned_rest(RngStream& stream, int n, const SignModel& model,
                             const VolumeScheme& volumes, std::vector<double>& magnitudes) {
  const double gamma = model.gamma_eps;
  const int hidden = draw_sign(stream, 0.5 * (1.0 + gamma));
  const double p_plus = 0.5 * (1.0 + gamma * hidden);
  magnitudes.resize(static_cast<std::size_t>(n - 1));
  draw_magnitudes(stream, volumes, n, magnitudes);
  double rest = 0.0;
  for (int i = 0; i < n - 1; ++i) rest += draw_sign(stream, p_plus) * magnitudes[static_cast<std::size_t>(i)];
  return rest;
}

template <class Sample>
McEstimate chunked_estimate(std::size_t n_samples, const RngStream& stream, Sample sample) {
  const std::size_t chunks = (n_samples + kMcChunkSize - 1) / kMcChunkSize;
  std::vector<RunningMoments> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    RngStream local = stream.substream(c);
    const std::size_t begin = c * kMcChunkSize;
    const std::size_t end = std::min(n_samples, begin + kMcChunkSize);
    std::vector<double> scratch;
    RunningMoments acc;
    for (std::size_t s = begin; s < end; ++s) acc.add(sample(local, scratch));
    partial[c] = acc;
  });
  RunningMoments total;
  for (const auto& p : partial) total.merge(p);
  return total.estimate();
}

void require_mc(int n, std::size_t n_samples, const SignModel& sign_model, const VolumeScheme& volumes) {
  if (n < 1) throw DomainError("mc_impact: n must be at least 1");
  if (n_samples < 1000) throw DomainError("mc_impact: n_samples must be at least 1000");
  sign_model.validate();
  validate_volume_scheme(volumes);
}

}  // namespace

void SignModel::validate() const {
  if (!(gamma_eps >= 0.0 && gamma_eps <= 1.0)) throw ConfigError("SignModel: gamma_eps must lie in [0, 1]");
}

double SigmaScaling::at(int n) const {
  return kind == Kind::kConstant ? value : value / static_cast<double>(n);
}

void validate_volume_scheme(const VolumeScheme& scheme) {
  struct Visitor {
    void operator()(const HalfNormalVolumes& v) const {
      if (!(v.sigma.value > 0.0)) throw ConfigError("half-normal volumes: sigma must be positive");
    }
    void operator()(const HistogramVolumes& v) const {
      if (v.edges.size() < 2 || v.masses.size() + 1 != v.edges.size())
        throw ConfigError("histogram volumes: need one mass per bin");
      if (!(v.edges.front() >= 0.0)) throw ConfigError("histogram volumes: support must be positive");
      for (std::size_t i = 1; i < v.edges.size(); ++i)
        if (!(v.edges[i] > v.edges[i - 1])) throw ConfigError("histogram volumes: edges must increase");
      double total = 0.0;
      for (double m : v.masses) {
        if (!(m >= 0.0)) throw ConfigError("histogram volumes: masses must be non-negative");
        total += m;
      }
      if (std::fabs(total - 1.0) > kMassTolerance) throw ConfigError("histogram volumes: masses must sum to 1");
    }
    void operator()(const DirichletVolumes& v) const {
      if (!(v.total_fraction > 0.0 && v.total_fraction <= 1.0))
        throw ConfigError("dirichlet volumes: total fraction must lie in (0, 1]");
    }
    void operator()(const StableVolumes& v) const {
      if (!(v.alpha > 0.0 && v.alpha <= 2.0)) throw ConfigError("stable volumes: alpha must lie in (0, 2]");
      if (!(v.scale > 0.0)) throw ConfigError("stable volumes: scale must be positive");
    }
  };
  std::visit(Visitor{}, scheme);
}

void draw_magnitudes(RngStream& stream, const VolumeScheme& scheme, int n, std::span<double> out) {
  struct Visitor {
    RngStream& stream;
    int n;
    std::span<double> out;

    void operator()(const HalfNormalVolumes& v) const {
      const double sigma = v.sigma.at(n);
      for (auto& x : out) {
        do {
          x = sigma * std::fabs(stream.normal());
        } while (x == 0.0);
      }
    }
    void operator()(const HistogramVolumes& v) const {
      for (auto& x : out) {
        const double u = stream.uniform();
        double cumulative = 0.0;
        std::size_t bin = v.masses.size() - 1;
        for (std::size_t b = 0; b < v.masses.size(); ++b) {
          cumulative += v.masses[b];
          if (u < cumulative) {
            bin = b;
            break;
          }
        }
        do {
          x = v.edges[bin] + stream.uniform() * (v.edges[bin + 1] - v.edges[bin]);
        } while (x == 0.0);
      }
    }
    void operator()(const DirichletVolumes& v) const {
      const auto shares = sample_flat_dirichlet(stream, static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = v.total_fraction * shares[i];
    }
    void operator()(const StableVolumes& v) const {
      for (auto& x : out) {
        do {
          x = std::fabs(draw_stable_symmetric(stream, v.alpha, v.scale));
        } while (x == 0.0);
      }
    }
  };
  std::visit(Visitor{stream, n, out}, scheme);
}

void SimConfig::validate() const {
  if (p_n.empty()) throw ConfigError("p_n must not be empty");
  double total = 0.0;
  for (const auto& [n, p] : p_n) {
    if (n < 1) throw ConfigError("p_n keys must be at least 1");
    if (!(p >= 0.0)) throw ConfigError("p_n masses must be non-negative");
    total += p;
  }
  if (std::fabs(total - 1.0) > kMassTolerance) throw ConfigError("p_n masses must sum to 1");
  sign_model.validate();
  validate_volume_scheme(volume_scheme);
  if (!(y_ratio > 0.0)) throw ConfigError("y_ratio must be positive");
  if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be non-negative");
}

ConditionedSigns sample_signs_conditioned(RngStream& stream, int n, const SignModel& model) {
  if (n < 1) throw DomainError("sample_signs_conditioned: n must be at least 1");
  model.validate();
  ConditionedSigns out;
  out.hidden = draw_sign(stream, 0.5 * (1.0 + model.gamma_eps));
  const double p_plus = 0.5 * (1.0 + model.gamma_eps * out.hidden);
  out.signs.assign(static_cast<std::size_t>(n), 1);
  for (int i = 1; i < n; ++i) out.signs[static_cast<std::size_t>(i)] = draw_sign(stream, p_plus);
  return out;
}

std::vector<int> sample_signs(RngStream& stream, int n, const SignModel& model) {
  if (n < 1) throw DomainError("sample_signs: n must be at least 1");
  model.validate();
  const int hidden = draw_sign(stream, 0.5);
  const double p_plus = 0.5 * (1.0 + model.gamma_eps * hidden);
  std::vector<int> signs(static_cast<std::size_t>(n));
  for (auto& s : signs) s = draw_sign(stream, p_plus);
  return signs;
}

McEstimate mc_impact(double phi, int n, const SignModel& sign_model, const VolumeScheme& volumes,
                     std::size_t n_samples, const RngStream& stream) {
  if (!(phi >= 0.0)) throw DomainError("mc_impact: phi must be non-negative");
  require_mc(n, n_samples, sign_model, volumes);
  return chunked_estimate(n_samples, stream, [&](RngStream& local, std::vector<double>& scratch) {
    const double rest = draw_conditioned_rest(local, n, sign_model, volumes, scratch);
    return sign_power(phi + rest, 0.5);
  });
}

McEstimate mc_small_phi_slope(double h, int n, const SignModel& sign_model, const VolumeScheme& volumes,
                              std::size_t n_samples, const RngStream& stream) {
  if (!(h > 0.0)) throw DomainError("mc_small_phi_slope: h must be positive");
  require_mc(n, n_samples, sign_model, volumes);
  return chunked_estimate(n_samples, stream, [&](RngStream& local, std::vector<double>& scratch) {
    const double rest = draw_conditioned_rest(local, n, sign_model, volumes, scratch);
    return (sign_power(rest + h, 0.5) - sign_power(rest - h, 0.5)) / (2.0 * h);
  });
}

McEstimate mixture_impact(double phi, const SimConfig& config, std::size_t n_samples,
                          const RngStream& stream) {
  config.validate();
  McEstimate out;
  double variance = 0.0;
  for (const auto& [n, p] : config.p_n) {
    if (p == 0.0) continue;
    const McEstimate e =
        mc_impact(phi, n, config.sign_model, config.volume_scheme, n_samples, stream.substream(static_cast<std::uint64_t>(n)));
    out.mean += p * e.mean;
    variance += p * p * e.std_error * e.std_error;
    out.samples += e.samples;
  }
  out.std_error = std::sqrt(variance);
  return out;
}

std::vector<DayPanel> generate_synthetic_market(const SimConfig& config, std::size_t n_days) {
  config.validate();
  if (n_days < 1) throw ConfigError("generate_synthetic_market: n_days must be at least 1");
  const RngStream root(config.seed, 0);
  const std::chrono::sys_days first_day = Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{3}};

  std::vector<std::pair<int, double>> cumulative;
  double running = 0.0;
  for (const auto& [n, p] : config.p_n) {
    running += p;
    cumulative.emplace_back(n, running);
  }

  std::vector<DayPanel> panels(n_days);
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (n_days + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> magnitudes;
    for (std::size_t d = b * kBlock; d < std::min(n_days, (b + 1) * kBlock); ++d) {
      RngStream stream = root.substream(d);
      const double u = stream.uniform() * running;
      int n = cumulative.back().first;
      for (const auto& [candidate, cum] : cumulative) {
        if (u < cum) {
          n = candidate;
          break;
        }
      }
      const auto signs = sample_signs(stream, n, config.sign_model);
      magnitudes.resize(static_cast<std::size_t>(n));
      draw_magnitudes(stream, config.volume_scheme, n, magnitudes);
      std::vector<double> phis(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < phis.size(); ++i) phis[i] = signs[i] * magnitudes[i];
      const double noise = config.noise_sd > 0.0 ? config.noise_sd * stream.normal() : 0.0;
      DayPanel panel = make_panel("SYN", Date{first_day + std::chrono::days{static_cast<long>(d)}},
                                  std::move(phis), 0.0);
      panel.rescaled_return = global_impact(panel.net_flow, config.y_ratio) + noise;
      panels[d] = std::move(panel);
    }
  });
  return panels;
}

std::vector<DayPanel> generate_gaussian_panels(int n, double sigma, double c_phi, std::size_t count,
                                               const RngStream& stream) {
  if (n < 2) throw DomainError("generate_gaussian_panels: n must be at least 2");
  if (!(sigma > 0.0)) throw DomainError("generate_gaussian_panels: sigma must be positive");
  if (!(c_phi > -1.0 / (n - 1) && c_phi < 1.0))
    throw DomainError("generate_gaussian_panels: c_phi must lie in (-1/(n-1), 1)");
  const double spread = std::sqrt(1.0 - c_phi);
  const double common = std::sqrt(1.0 + (n - 1) * c_phi);
  const std::chrono::sys_days first_day = Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{3}};
  std::vector<DayPanel> panels;
  panels.reserve(count);
  for (std::size_t d = 0; d < count; ++d) {
    RngStream local = stream.substream(d);
    std::vector<double> z(static_cast<std::size_t>(n));
    double mean = 0.0;
    for (auto& v : z) {
      v = local.normal();
      mean += v;
    }
    mean /= n;
    std::vector<double> phis(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) phis[i] = sigma * (spread * (z[i] - mean) + common * mean);
    DayPanel panel = make_panel("GAUSS", Date{first_day + std::chrono::days{static_cast<long>(d)}},
                                std::move(phis), 0.0);
    panel.rescaled_return = global_impact(panel.net_flow, 1.0);
    panels.push_back(std::move(panel));
  }
  return panels;
}

}  // namespace coimpact
