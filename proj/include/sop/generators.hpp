#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "sop/history.hpp"
#include "sop/levels.hpp"

namespace sop {

struct GenParams {
  /// Linearizability, Sequential, CausalPlus, PRAM or Eventual.
  LevelId level = LevelId::Linearizability;
  std::size_t clients = 2;
  std::size_t keys = 2;
  std::size_t ops = 10;
  double read_fraction = 0.5;
  double cas_fraction = 0.1;
  std::uint64_t seed = 0;
  TimeNs mean_replication_delay = 200;
  TimeNs clock_skew = 0;
  /// Written values are drawn from 1..max_value; 0 means every write is fresh.
  Value max_value = 0;

  void validate() const;
};

/// Simulates a cluster that provides `params.level` and records its history.
std::vector<HistoryEvent> generate(const GenParams& params);

enum class Violation : std::uint8_t { RT, CASL, WFR, MW, MR, RMW, WellFormedness };

std::string_view to_string(Violation v);
std::optional<Violation> parse_violation(std::string_view name);

/// Perturbs a history so that it breaks the named constraint. Apart from
/// WellFormedness (which rewrites an observed value) the breaking pattern is
/// appended on fresh clients and keys after the existing history.
std::vector<HistoryEvent> inject_violation(const std::vector<HistoryEvent>& history,
                                           Violation violation);

}  // namespace sop
