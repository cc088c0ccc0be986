#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sop/history.hpp"
#include "sop/ordering.hpp"

namespace sop {

/// Bounded staleness limits; a read must see a write once any enabled bound
/// is exceeded.
struct StalenessBound {
  std::optional<std::int64_t> max_writer_ops;   // j
  std::optional<std::int64_t> max_key_updates;  // k
  std::optional<TimeNs> max_delay;              // t

  bool valid() const;
  friend bool operator==(const StalenessBound&, const StalenessBound&) = default;
};

std::string to_string(const StalenessBound& b);

enum class RelationshipKind : std::uint8_t {
  RT,
  RTWandCASLR,
  RTPrimeCASL,  // RT′ conjoined with CASL
  RTPrime,
  BoundedCasl,
  CASL,
  FIFO,
  CaslPerKey,
  None,
};

struct Relationship {
  RelationshipKind kind = RelationshipKind::None;
  StalenessBound bound;  // BoundedCasl only

  friend bool operator==(const Relationship&, const Relationship&) = default;
};

std::string to_string(const Relationship& r);

enum class SessionGuarantee : std::uint8_t { RMW, MW, MR, WFR };

std::string_view to_string(SessionGuarantee g);

using OpPairs = std::vector<std::pair<OpId, OpId>>;

/// (a, b) whenever a ends strictly before b starts, plus same-client program
/// order. Indeterminate spans never come first.
OpPairs realtime_pairs(const Timeline& timeline);

/// Transitive closure of program order and reads-from.
OpPairs causal_pairs(const Timeline& timeline, const ReadsFrom& rf);

bool check_rt(const OrderingDag& dag, const Timeline& timeline);
bool check_rt_prime(const OrderingDag& dag, const Timeline& timeline);
bool check_casl(const OrderingDag& dag, const Timeline& timeline,
                const ReadsFrom& rf);
bool check_session_guarantees(const OrderingDag& dag, const Timeline& timeline,
                              const ReadsFrom& rf,
                              const std::set<SessionGuarantee>& which);
bool check_fifo(const OrderingDag& dag, const Timeline& timeline,
                const ReadsFrom& rf);
bool check_rtw_caslr(const OrderingDag& dag, const Timeline& timeline,
                     const ReadsFrom& rf);

/// Pairs (w, r) that a bounded-staleness ordering must contain.
OpPairs staleness_pairs(const Timeline& timeline, const StalenessBound& bound);

bool check_bounded_casl(const OrderingDag& dag, const Timeline& timeline,
                        const ReadsFrom& rf, const StalenessBound& bound);
bool check_casl_per_key(const OrderingDag& dag, const Timeline& timeline,
                        const ReadsFrom& rf);

bool check_relationship(const Relationship& rel, const OrderingDag& dag,
                        const Timeline& timeline, const ReadsFrom& rf);

/// Every acknowledged op is a node; indeterminate ops may or may not be.
bool covers_effective_ops(const OrderingDag& dag, const Timeline& timeline);

}  // namespace sop
