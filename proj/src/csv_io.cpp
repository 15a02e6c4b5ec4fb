#include "coimpact/csv_io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "coimpact/errors.hpp"
#include "coimpact/numeric.hpp"

namespace coimpact {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

std::vector<MetaorderRecord> read_metaorder_csv(std::istream& in) {
  std::vector<MetaorderRecord> records;
  std::string line;
  if (!next_line(in, line)) return records;
  if (line != kMetaorderHeader)
    throw DataError("line 1: bad header; expected columns: " + std::string(kMetaorderHeader));

  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      const auto f = split(line, ',');
      if (f.size() != 13)
        throw DataError("expected 13 fields, found " + std::to_string(f.size()));
      MetaorderRecord r;
      r.date = parse_date(f[0]);
      r.symbol = std::string(f[1]);
      r.broker_id = std::string(f[2]);
      r.sign = static_cast<int>(parse_integer(f[3], "sign"));
      r.shares = parse_double(f[4], "shares");
      r.start_time = parse_clock(f[5]);
      r.end_time = parse_clock(f[6]);
      r.day_volume = parse_double(f[7], "day_volume");
      if (!f[8].empty()) r.exec_interval_volume = parse_double(f[8], "exec_volume");
      r.open = parse_double(f[9], "open");
      r.high = parse_double(f[10], "high");
      r.low = parse_double(f[11], "low");
      r.close = parse_double(f[12], "close");
      validate_record(r);
      records.push_back(std::move(r));
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return records;
}

void write_panel_csv(std::ostream& out, std::span<const DayPanel> panels) {
  out << kPanelHeader << '\n';
  for (const auto& p : panels) {
    out << p.symbol << ',' << format_date(p.date) << ',' << p.n() << ','
        << format_double(p.net_flow) << ',' << format_double(p.rescaled_return) << ',';
    for (std::size_t i = 0; i < p.phis.size(); ++i) {
      if (i) out << ';';
      out << format_double(p.phis[i]);
    }
    out << '\n';
  }
}

std::vector<DayPanel> read_panel_csv(std::istream& in) {
  std::vector<DayPanel> panels;
  std::string line;
  if (!next_line(in, line)) return panels;
  if (line != kPanelHeader)
    throw DataError("line 1: bad header; expected columns: " + std::string(kPanelHeader));

  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      const auto f = split(line, ',');
      if (f.size() != 6) throw DataError("expected 6 fields, found " + std::to_string(f.size()));
      const long long n = parse_integer(f[2], "n");
      std::vector<double> phis;
      for (auto token : split(f[5], ';')) phis.push_back(parse_double(token, "phis"));
      if (n < 1 || static_cast<std::size_t>(n) != phis.size())
        throw DataError("n does not match the number of phis");
      DayPanel panel = make_panel(std::string(f[0]), parse_date(f[1]), std::move(phis),
                                  parse_double(f[4], "rescaled_return"));
      const double stated = parse_double(f[3], "net_flow");
      if (std::fabs(stated - panel.net_flow) > 1e-12)
        throw DataError("net_flow does not equal the sum of phis");
      panels.push_back(std::move(panel));
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return panels;
}

}  // namespace coimpact
