#include "coimpact/core_domain.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>
#include <utility>

#include "coimpact/errors.hpp"
#include "coimpact/numeric.hpp"

namespace coimpact {

namespace {

constexpr double kFractionTolerance = 1e-9;

int parse_fixed_digits(std::string_view text, std::string_view what) {
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw DataError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

double MetaorderRecord::signed_fraction() const {
  return static_cast<double>(sign) * shares / day_volume;
}

void validate_record(const MetaorderRecord& r) {
  auto fail = [&](const std::string& why) {
    throw DataError("metaorder " + r.symbol + " " + format_date(r.date) + " " +
                    r.broker_id + ": " + why);
  };
  if (r.symbol.empty()) fail("empty symbol");
  if (!r.date.ok()) fail("invalid date");
  if (r.sign != 1 && r.sign != -1) fail("sign must be +1 or -1");
  if (!(r.shares > 0.0)) fail("shares must be positive");
  if (!(r.day_volume > 0.0)) fail("day_volume must be positive");
  if (r.shares > r.day_volume) fail("shares exceed day_volume");
  if (r.exec_interval_volume && !(*r.exec_interval_volume > 0.0))
    fail("exec_volume must be positive when present");
  if (!(r.start_time < r.end_time)) fail("start_time must precede end_time");
  if (!(r.open > 0.0 && r.high > 0.0 && r.low > 0.0 && r.close > 0.0))
    fail("prices must be positive");
  if (r.high < std::max(r.open, r.close)) fail("high below open/close");
  if (r.low > std::min(r.open, r.close)) fail("low above open/close");
}

DayPanel make_panel(std::string symbol, Date date, std::vector<double> phis,
                    double rescaled_return) {
  if (phis.empty()) throw DataError("panel " + symbol + " " + format_date(date) + " has no metaorders");
  double gross = 0.0;
  for (double phi : phis) {
    if (!std::isfinite(phi) || phi == 0.0 || std::fabs(phi) > 1.0)
      throw DataError("panel " + symbol + " " + format_date(date) + ": volume fraction out of range");
    gross += std::fabs(phi);
  }
  if (gross > 1.0 + kFractionTolerance)
    throw DataError("panel " + symbol + " " + format_date(date) +
                    ": metaorders exceed the day's volume");
  if (!std::isfinite(rescaled_return))
    throw DataError("panel " + symbol + " " + format_date(date) + ": non-finite return");
  DayPanel panel;
  panel.symbol = std::move(symbol);
  panel.date = date;
  panel.net_flow = exact_sum(phis);
  panel.phis = std::move(phis);
  panel.rescaled_return = rescaled_return;
  return panel;
}

void FilterConfig::validate() const {
  if (!(max_participation > 0.0 && max_participation <= 1.0))
    throw ConfigError("max_participation must lie in (0, 1]");
  if (min_duration.count() < 0) throw ConfigError("min_duration must be non-negative");
}

double rescale_return(double open, double high, double low, double close) {
  if (!(open > 0.0 && high > 0.0 && low > 0.0 && close > 0.0))
    throw DomainError("rescale_return: prices must be positive");
  const double sigma = (high - low) / open;
  if (!(sigma > 0.0))
    throw DataError("rescale_return: degenerate volatility (high == low)");
  return (std::log(close) - std::log(open)) / sigma;
}

FilterResult apply_filters(std::span<const MetaorderRecord> records,
                           const FilterConfig& config) {
  config.validate();
  FilterResult result;
  result.report.input = records.size();
  for (const auto& r : records) {
    if (config.symbol_whitelist && !config.symbol_whitelist->contains(r.symbol)) {
      ++result.report.filter_1;
      continue;
    }
    if (!(r.end_time < config.latest_end)) {
      ++result.report.filter_2;
      continue;
    }
    if (!(r.end_time - r.start_time > config.min_duration)) {
      ++result.report.filter_3;
      continue;
    }
    if (r.exec_interval_volume) {
      const double participation = r.shares / *r.exec_interval_volume;
      if (!(participation < config.max_participation)) {
        ++result.report.filter_4;
        continue;
      }
    } else {
      ++result.report.filter_4_unchecked;
    }
    result.kept.push_back(r);
  }
  result.report.kept = result.kept.size();
  return result;
}

std::vector<DayPanel> build_panels(std::span<const MetaorderRecord> records) {
  using Key = std::pair<std::string, Date>;
  std::map<Key, std::vector<const MetaorderRecord*>> groups;
  for (const auto& r : records) groups[{r.symbol, r.date}].push_back(&r);

  std::vector<DayPanel> panels;
  panels.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    const MetaorderRecord& first = *members.front();
    std::vector<double> phis;
    phis.reserve(members.size());
    for (const MetaorderRecord* r : members) {
      if (std::tie(r->open, r->high, r->low, r->close, r->day_volume) !=
          std::tie(first.open, first.high, first.low, first.close, first.day_volume)) {
        throw DataError("inconsistent prices or day volume for " + key.first + " " +
                        format_date(key.second));
      }
      phis.push_back(r->signed_fraction());
    }
    double ret = 0.0;
    try {
      ret = rescale_return(first.open, first.high, first.low, first.close);
    } catch (const DataError& e) {
      throw DataError(key.first + " " + format_date(key.second) + ": " + e.what());
    }
    panels.push_back(make_panel(key.first, key.second, std::move(phis), ret));
  }
  return panels;
}

std::string format_date(Date date) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw DataError("invalid date (expected YYYY-MM-DD): '" + std::string(text) + "'");
  const int y = parse_fixed_digits(text.substr(0, 4), "date");
  const int m = parse_fixed_digits(text.substr(5, 2), "date");
  const int d = parse_fixed_digits(text.substr(8, 2), "date");
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) throw DataError("invalid calendar date: '" + std::string(text) + "'");
  return date;
}

std::string format_clock(ClockTime time) {
  const long long s = time.count();
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld", s / 3600, (s / 60) % 60, s % 60);
  return buf;
}

ClockTime parse_clock(std::string_view text) {
  if (text.size() != 8 || text[2] != ':' || text[5] != ':')
    throw DataError("invalid time (expected HH:MM:SS): '" + std::string(text) + "'");
  const int h = parse_fixed_digits(text.substr(0, 2), "time");
  const int m = parse_fixed_digits(text.substr(3, 2), "time");
  const int s = parse_fixed_digits(text.substr(6, 2), "time");
  if (h > 23 || m > 59 || s > 59) throw DataError("invalid time: '" + std::string(text) + "'");
  return std::chrono::hours(h) + std::chrono::minutes(m) + std::chrono::seconds(s);
}

}  // namespace coimpact
