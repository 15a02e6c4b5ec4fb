#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coimpact {

using Date = std::chrono::year_month_day;
/// Exchange-local wall-clock time, timezone-naive.
using ClockTime = std::chrono::seconds;

/// One reported metaorder: a single investor's executions through one broker,
/// on one symbol, one direction, within one day.
struct MetaorderRecord {
  std::string symbol;
  Date date;
  std::string broker_id;
  int sign = 1;                // +1 buy, -1 sell
  double shares = 0.0;         // |Q|
  ClockTime start_time{};      // t_s
  ClockTime end_time{};        // t_e
  double day_volume = 0.0;     // V(t_c), total volume traded that day
  std::optional<double> exec_interval_volume;  // V(t_e) - V(t_s)
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;

  /// phi = sign * shares / day_volume
  [[nodiscard]] double signed_fraction() const;
};

/// Throws DataError if the record breaks a field invariant.
void validate_record(const MetaorderRecord& record);

/// All metaorders executed on one (symbol, date).
struct DayPanel {
  std::string symbol;
  Date date;
  std::vector<double> phis;     // signed volume fractions
  double net_flow = 0.0;        // Phi = sum of phis
  double rescaled_return = 0.0; // s_close - s_open

  [[nodiscard]] std::size_t n() const { return phis.size(); }
};

/// Builds a panel, computing the net flow with exact summation and checking
/// the fraction bounds.
DayPanel make_panel(std::string symbol, Date date, std::vector<double> phis,
                    double rescaled_return);

struct FilterConfig {
  std::optional<std::set<std::string>> symbol_whitelist;
  ClockTime latest_end = std::chrono::hours(16) + std::chrono::minutes(1);
  ClockTime min_duration = std::chrono::minutes(2);
  double max_participation = 0.30;

  void validate() const;
};

/// Rejections are attributed to the first filter a record fails, in order.
struct FilterReport {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::size_t filter_1 = 0;  // symbol not whitelisted
  std::size_t filter_2 = 0;  // ends at or after latest_end
  std::size_t filter_3 = 0;  // duration not longer than min_duration
  std::size_t filter_4 = 0;  // participation rate not below max_participation
  std::size_t filter_4_unchecked = 0;  // kept without intraday volume
};

struct FilterResult {
  std::vector<MetaorderRecord> kept;
  FilterReport report;
};

/// (log close - log open) / sigma with sigma = (high - low) / open.
double rescale_return(double open, double high, double low, double close);

FilterResult apply_filters(std::span<const MetaorderRecord> records,
                           const FilterConfig& config);

/// One panel per (symbol, date), sorted by (symbol, date); fractions keep
/// input order.
std::vector<DayPanel> build_panels(std::span<const MetaorderRecord> records);

std::string format_date(Date date);
Date parse_date(std::string_view text);
std::string format_clock(ClockTime time);
ClockTime parse_clock(std::string_view text);

}  // namespace coimpact
