#include "coimpact/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coimpact/errors.hpp"

namespace coimpact {

namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::map<int, std::vector<const DayPanel*>> group_by_n(std::span<const DayPanel> panels) {
  std::map<int, std::vector<const DayPanel*>> groups;
  for (const auto& p : panels) groups[static_cast<int>(p.n())].push_back(&p);
  return groups;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

Moments moments_of(std::span<const double> xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    for (double x : xs) m.variance += (x - m.mean) * (x - m.mean);
    m.variance /= static_cast<double>(xs.size() - 1);
  }
  return m;
}

}  // namespace

ImpactCurve binned_curve(std::span<const SignedSample> samples, std::size_t n_bins, std::size_t min_count) {
  if (n_bins < 1) throw DomainError("binned_curve: n_bins must be at least 1");
  if (samples.empty() || samples.size() < n_bins * std::max<std::size_t>(min_count, 1))
    throw InsufficientDataError("binned_curve: " + std::to_string(samples.size()) +
                                " samples cannot fill " + std::to_string(n_bins) + " bins of " +
                                std::to_string(min_count));

  struct Point {
    double magnitude;
    double signed_return;
  };
  std::vector<Point> points;
  points.reserve(samples.size());
  for (const auto& s : samples) points.push_back({std::fabs(s.x), sign_of(s.x) * s.r});
  std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    if (a.magnitude != b.magnitude) return a.magnitude < b.magnitude;
    return a.signed_return < b.signed_return;
  });

  ImpactCurve curve;
  const std::size_t total = points.size();
  std::size_t begin = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    // Bin sizes differ by at most one.
    const std::size_t end = total * (b + 1) / n_bins;
    CurveBin bin;
    bin.count = end - begin;
    double log_sum = 0.0;
    std::size_t positive = 0;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      if (points[i].magnitude > 0.0) {
        log_sum += std::log(points[i].magnitude);
        ++positive;
      }
      sum += points[i].signed_return;
    }
    bin.phi_center = positive > 0 ? std::exp(log_sum / static_cast<double>(positive)) : 0.0;
    bin.mean_impact = sum / static_cast<double>(bin.count);
    if (bin.count > 1) {
      double ss = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const double d = points[i].signed_return - bin.mean_impact;
        ss += d * d;
      }
      bin.std_error = std::sqrt(ss / static_cast<double>(bin.count - 1) / static_cast<double>(bin.count));
    }
    curve.bins.push_back(bin);
    begin = end;
  }
  return curve;
}

double realized_sign_correlation(std::span<const int> signs) {
  const std::size_t n = signs.size();
  if (n < 2) throw DomainError("realized_sign_correlation: needs at least two metaorders");
  long long total = 0;
  for (int s : signs) total += s;
  const double nd = static_cast<double>(n);
  return (static_cast<double>(total * total) - nd) / (nd * (nd - 1.0));
}

std::vector<int> panel_signs(const DayPanel& panel) {
  std::vector<int> signs;
  signs.reserve(panel.n());
  for (double phi : panel.phis) signs.push_back(phi > 0.0 ? 1 : -1);
  return signs;
}

SignCorrelationEstimate sign_correlation(std::span<const DayPanel> panels_at_n) {
  if (panels_at_n.empty()) throw InsufficientDataError("sign_correlation: no panels");
  const std::size_t n = panels_at_n.front().n();
  if (n < 2) throw DomainError("sign_correlation: panels need at least two metaorders");

  std::vector<double> rho;
  std::vector<double> mean_sign;
  for (const auto& p : panels_at_n) {
    if (p.n() != n) throw DomainError("sign_correlation: panels must share N");
    const auto signs = panel_signs(p);
    rho.push_back(realized_sign_correlation(signs));
    mean_sign.push_back(std::accumulate(signs.begin(), signs.end(), 0.0) / static_cast<double>(n));
  }
  const Moments r = moments_of(rho);
  const Moments m = moments_of(mean_sign);
  const double denom = 1.0 - m.mean * m.mean;
  if (!(denom > 0.0))
    throw ZeroVarianceError("sign_correlation: all signs identical at N=" + std::to_string(n));

  SignCorrelationEstimate e;
  e.panels = panels_at_n.size();
  e.mean_sign = m.mean;
  e.mean_rho = r.mean;
  e.c_eps = (r.mean - m.mean * m.mean) / denom;

  // Delta method on (mean rho, mean sign).
  const double count = static_cast<double>(rho.size());
  double cov = 0.0;
  if (rho.size() > 1) {
    for (std::size_t i = 0; i < rho.size(); ++i) cov += (rho[i] - r.mean) * (mean_sign[i] - m.mean);
    cov /= count - 1.0;
  }
  const double d_rho = 1.0 / denom;
  const double d_m = 2.0 * m.mean * (r.mean - 1.0) / (denom * denom);
  const double var = (d_rho * d_rho * r.variance + 2.0 * d_rho * d_m * cov + d_m * d_m * m.variance) / count;
  e.std_error = std::sqrt(std::max(0.0, var));
  return e;
}

PerN<SignCorrelationEstimate> sign_correlation_by_n(std::span<const DayPanel> panels, std::size_t min_panels) {
  PerN<SignCorrelationEstimate> out;
  for (const auto& [n, members] : group_by_n(panels)) {
    if (n < 2 || members.size() < min_panels) continue;
    std::vector<DayPanel> at_n;
    at_n.reserve(members.size());
    for (const DayPanel* p : members) at_n.push_back(*p);
    try {
      out.values[n] = sign_correlation(at_n);
    } catch (const ZeroVarianceError& e) {
      out.failures[n] = e.what();
    }
  }
  return out;
}

double herfindahl(std::span<const double> phis) {
  double squares = 0.0;
  double gross = 0.0;
  for (double phi : phis) {
    squares += phi * phi;
    gross += std::fabs(phi);
  }
  if (!(gross > 0.0)) throw DomainError("herfindahl: needs at least one nonzero volume fraction");
  return squares / (gross * gross);
}

std::map<int, SigmaEstimate> sigma_by_n(std::span<const DayPanel> panels, std::size_t min_panels) {
  std::map<int, SigmaEstimate> out;
  for (const auto& [n, members] : group_by_n(panels)) {
    if (members.size() < std::max<std::size_t>(min_panels, 1)) continue;
    std::vector<double> phis;
    for (const DayPanel* p : members) phis.insert(phis.end(), p->phis.begin(), p->phis.end());
    if (phis.size() < 2) continue;
    SigmaEstimate e;
    e.panels = members.size();
    e.sigma = std::sqrt(moments_of(phis).variance);
    e.phi_star = e.sigma * std::sqrt(static_cast<double>(n - 1));
    out[n] = e;
  }
  return out;
}

std::map<int, MeanEstimate> herfindahl_by_n(std::span<const DayPanel> panels, std::size_t min_panels) {
  std::map<int, MeanEstimate> out;
  for (const auto& [n, members] : group_by_n(panels)) {
    if (members.size() < std::max<std::size_t>(min_panels, 1)) continue;
    std::vector<double> zeta;
    for (const DayPanel* p : members) zeta.push_back(herfindahl(p->phis));
    const Moments m = moments_of(zeta);
    out[n] = {zeta.size(), m.mean, std::sqrt(m.variance / static_cast<double>(zeta.size()))};
  }
  return out;
}

std::map<int, std::size_t> n_histogram(std::span<const DayPanel> panels) {
  std::map<int, std::size_t> out;
  for (const auto& p : panels) ++out[static_cast<int>(p.n())];
  return out;
}

std::optional<MetaorderStats> metaorder_stats(const MetaorderRecord& record) {
  if (!record.exec_interval_volume || !(*record.exec_interval_volume > 0.0)) return std::nullopt;
  const double interval = *record.exec_interval_volume;
  MetaorderStats s;
  s.participation = record.shares / interval;
  s.duration_voltime = interval / record.day_volume;
  s.daily_fraction = record.shares / record.day_volume;
  return s;
}

PowerLawFit powerlaw_tail_fit(std::span<const double> samples, double x_min, double x_max, std::size_t n_bins) {
  if (!(x_min > 0.0 && x_max > x_min)) throw DomainError("powerlaw_tail_fit: need 0 < x_min < x_max");
  if (n_bins < 3) throw DomainError("powerlaw_tail_fit: need at least 3 bins");
  const double log_min = std::log(x_min);
  const double log_step = (std::log(x_max) - log_min) / static_cast<double>(n_bins);

  std::vector<std::size_t> counts(n_bins, 0);
  std::size_t inside = 0;
  for (double x : samples) {
    if (!(x >= x_min && x <= x_max)) continue;
    auto bin = static_cast<std::size_t>((std::log(x) - log_min) / log_step);
    counts[std::min(bin, n_bins - 1)]++;
    ++inside;
  }
  if (inside < 100)
    throw InsufficientDataError("powerlaw_tail_fit: " + std::to_string(inside) + " samples in the fit window");

  std::vector<double> lx, ly;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (counts[b] == 0) continue;
    const double lo = std::exp(log_min + log_step * static_cast<double>(b));
    const double hi = std::exp(log_min + log_step * static_cast<double>(b + 1));
    lx.push_back(log_min + log_step * (static_cast<double>(b) + 0.5));
    ly.push_back(std::log(static_cast<double>(counts[b]) / (hi - lo)));
  }
  if (lx.size() < 3) throw InsufficientDataError("powerlaw_tail_fit: fewer than 3 populated bins");

  const Moments mx = moments_of(lx);
  const Moments my = moments_of(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx.mean) * (lx[i] - mx.mean);
    sxy += (lx[i] - mx.mean) * (ly[i] - my.mean);
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my.mean - fit.exponent * mx.mean;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - intercept - fit.exponent * lx[i];
    ss_res += r * r;
  }
  fit.std_error = lx.size() > 2 ? std::sqrt(ss_res / static_cast<double>(lx.size() - 2) / sxx) : 0.0;
  fit.samples_in_window = inside;
  fit.bins_used = lx.size();
  return fit;
}

}  // namespace coimpact
