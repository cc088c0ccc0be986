#include "sop/report.hpp"

#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sop {

using Json = nlohmann::ordered_json;

std::optional<Verdict> parse_verdict(std::string_view s) {
  for (auto v : {Verdict::Pass, Verdict::Fail, Verdict::Unknown}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::string report_json(const ConformityReport& report, bool witnesses) {
  Json doc = Json::object();
  Json wit = Json::object();
  for (const auto& r : report.results) {
    const std::string name(cli_name(r.level.id));
    doc[name] = std::string(to_string(r.verdict));
    if (witnesses && r.witness) wit[name] = witness_text(r.witness->dag, r.witness->rf);
  }
  doc["well_formed"] = report.well_formed;
  doc["stats"] = {{"states_explored", report.stats.states_explored},
                  {"chunks_drained", report.stats.chunks_drained},
                  {"elapsed_ns", report.stats.elapsed_ns}};
  if (witnesses) doc["witnesses"] = wit;
  return doc.dump(2) + "\n";
}

std::string report_text(const ConformityReport& report, bool witnesses) {
  std::ostringstream os;
  for (const auto& r : report.results) {
    os << cli_name(r.level.id) << ": " << to_string(r.verdict);
    if (r.inferred) os << " (inferred)";
    os << "\n";
  }
  if (!report.well_formed) os << "note: some read returned a value that was never written\n";
  os << "stats: states_explored=" << report.stats.states_explored
     << " chunks_drained=" << report.stats.chunks_drained
     << " elapsed_ms=" << report.stats.elapsed_ns / 1'000'000 << "\n";
  if (witnesses) {
    for (const auto& r : report.results) {
      if (!r.witness || r.inferred) continue;
      os << "\nwitness " << cli_name(r.level.id) << ":\n"
         << witness_text(r.witness->dag, r.witness->rf);
    }
  }
  return os.str();
}

ReportDocument parse_report_json(std::string_view text) {
  const Json doc = Json::parse(text);
  ReportDocument out;
  for (const auto& [name, value] : doc.items()) {
    if (name == "stats") {
      out.stats.states_explored = value.at("states_explored").get<std::uint64_t>();
      out.stats.chunks_drained = value.at("chunks_drained").get<std::uint64_t>();
      out.stats.elapsed_ns = value.at("elapsed_ns").get<std::int64_t>();
    } else if (name == "witnesses") {
      for (const auto& [level, w] : value.items()) out.witnesses[level] = w.get<std::string>();
    } else if (name == "well_formed") {
      out.well_formed = value.get<bool>();
    } else {
      if (!parse_level_name(name)) throw std::runtime_error("unknown level in report: " + name);
      auto v = parse_verdict(value.get<std::string>());
      if (!v) throw std::runtime_error("bad verdict for " + name);
      out.verdicts[name] = *v;
    }
  }
  return out;
}

}  // namespace sop
