#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sop/constraints.hpp"

namespace sop {

enum class LevelId : std::uint8_t {
  Linearizability,
  RegularSequential,
  Sequential,
  BoundedStaleness,
  RealTimeCausal,
  CausalPlus,
  Causal,
  PRAM,
  PerKeySequential,
  Eventual,
  Weak,
};

inline constexpr std::size_t kLevelCount = 11;

/// Bound used for bounded staleness when none is given.
StalenessBound default_staleness_bound();

struct ConsistencyLevel {
  LevelId id = LevelId::Weak;
  StalenessBound bound = default_staleness_bound();  // BoundedStaleness only

  friend bool operator==(const ConsistencyLevel&, const ConsistencyLevel&) = default;
};

struct Constraints {
  Convergence convergence;
  Relationship relationship;
};

enum class AvailabilityBound : std::uint8_t {
  WeaklyAvailable,
  StickyAvailable,
  TotallyAvailable,
};

std::string_view to_string(AvailabilityBound a);

/// All eleven levels in declaration order.
std::vector<ConsistencyLevel> all_levels(
    const StalenessBound& bound = default_staleness_bound());

Constraints constraints_of(const ConsistencyLevel& level);
AvailabilityBound availability_upper_bound(const ConsistencyLevel& level);

bool stronger_or_equal(Convergence a, Convergence b);
bool stronger_or_equal(const Relationship& a, const Relationship& b);
bool implies(const ConsistencyLevel& a, const ConsistencyLevel& b);

/// Display name, e.g. "Linearizability".
std::string_view level_name(LevelId id);
/// Command-line name, e.g. "linearizable".
std::string_view cli_name(LevelId id);
std::optional<LevelId> parse_level_name(std::string_view name);
std::string valid_level_names();

/// Availability bounds for the session guarantees, which are checkable
/// predicates but not levels.
struct SessionGuaranteeBound {
  SessionGuarantee guarantee;
  AvailabilityBound availability;
};
std::vector<SessionGuaranteeBound> session_guarantee_bounds();

/// Direct test of a candidate ordering against a level.
bool satisfies(const ConsistencyLevel& level, const Timeline& timeline,
               const OrderingDag& dag, const ReadsFrom& rf);

/// {0} ∪ written values covers every reader's observation (a failed Cas
/// needs some value other than its expected one).
bool well_formed(const Timeline& timeline);

}  // namespace sop
