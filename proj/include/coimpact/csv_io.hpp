#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "coimpact/core_domain.hpp"

namespace coimpact {

inline constexpr std::string_view kMetaorderHeader =
    "date,symbol,broker_id,sign,shares,start_time,end_time,day_volume,exec_volume,open,high,low,close";
inline constexpr std::string_view kPanelHeader = "symbol,date,n,net_flow,rescaled_return,phis";

/// Parses the metaorder CSV. An empty stream yields no records; a wrong
/// header or malformed row throws DataError naming the line.
std::vector<MetaorderRecord> read_metaorder_csv(std::istream& in);

void write_panel_csv(std::ostream& out, std::span<const DayPanel> panels);
std::vector<DayPanel> read_panel_csv(std::istream& in);

}  // namespace coimpact
