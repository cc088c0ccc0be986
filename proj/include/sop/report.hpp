#pragma once

#include <map>
#include <string>
#include <string_view>

#include "sop/search.hpp"

namespace sop {

/// {"<level>": "pass"|"fail"|"unknown", ..., "well_formed": bool,
///  "stats": {...}, "witnesses": {"<level>": "<edge list>"}}
std::string report_json(const ConformityReport& report, bool witnesses = true);

/// One "<level>: <verdict>" line per level, then a stats line.
std::string report_text(const ConformityReport& report, bool witnesses = false);

struct ReportDocument {
  std::map<std::string, Verdict> verdicts;
  std::map<std::string, std::string> witnesses;
  SearchStats stats;
  bool well_formed = true;
};

ReportDocument parse_report_json(std::string_view text);

std::optional<Verdict> parse_verdict(std::string_view s);

}  // namespace sop
