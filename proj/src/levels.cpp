#include "sop/levels.hpp"

#include <array>

namespace sop {

namespace {

struct LevelRow {
  LevelId id;
  std::string_view name;
  std::string_view cli;
  Convergence convergence;
  RelationshipKind relationship;
  AvailabilityBound availability;
};

using enum LevelId;
using C = Convergence;
using R = RelationshipKind;
using A = AvailabilityBound;

constexpr std::array<LevelRow, kLevelCount> kRows{{
    {Linearizability, "Linearizability", "linearizable", C::SO, R::RT, A::WeaklyAvailable},
    {RegularSequential, "Regular Sequential", "regular-sequential", C::SO, R::RTWandCASLR,
     A::WeaklyAvailable},
    {Sequential, "Sequential", "sequential", C::SO, R::CASL, A::WeaklyAvailable},
    {BoundedStaleness, "Bounded Staleness", "bounded-staleness", C::NPO, R::BoundedCasl,
     A::WeaklyAvailable},
    {RealTimeCausal, "Real-time Causal", "real-time-causal", C::CPO, R::RTPrimeCASL,
     A::StickyAvailable},
    {CausalPlus, "Causal+", "causal+", C::CPO, R::CASL, A::StickyAvailable},
    {Causal, "Causal", "causal", C::NPO, R::CASL, A::StickyAvailable},
    {PRAM, "PRAM", "pram", C::NPO, R::FIFO, A::StickyAvailable},
    {PerKeySequential, "Per-key Sequential", "per-key-sequential", C::CPO, R::CaslPerKey,
     A::StickyAvailable},
    {Eventual, "Eventual", "eventual", C::CPO, R::None, A::TotallyAvailable},
    {Weak, "Weak", "weak", C::NPO, R::None, A::TotallyAvailable},
}};

const LevelRow& row(LevelId id) { return kRows[static_cast<std::size_t>(id)]; }

constexpr std::size_t kKinds = 9;

// Direct "stronger than" edges between relationship kinds.
constexpr std::array<std::pair<R, R>, 14> kStronger{{
    {R::RT, R::RTWandCASLR},
    {R::RT, R::RTPrimeCASL},
    {R::RT, R::RTPrime},
    {R::RT, R::BoundedCasl},
    {R::RTWandCASLR, R::CASL},
    {R::RTPrimeCASL, R::CASL},
    {R::RTPrimeCASL, R::RTPrime},
    {R::BoundedCasl, R::CASL},
    {R::CASL, R::FIFO},
    {R::CASL, R::CaslPerKey},
    {R::FIFO, R::None},
    {R::CaslPerKey, R::None},
    {R::RTPrime, R::None},
    {R::CASL, R::None},
}};

using KindMatrix = std::array<std::array<bool, kKinds>, kKinds>;

KindMatrix kind_closure() {
  KindMatrix m{};
  for (std::size_t i = 0; i < kKinds; ++i) m[i][i] = true;
  for (auto [a, b] : kStronger)
    m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
  for (std::size_t k = 0; k < kKinds; ++k)
    for (std::size_t i = 0; i < kKinds; ++i)
      for (std::size_t j = 0; j < kKinds; ++j)
        if (m[i][k] && m[k][j]) m[i][j] = true;
  return m;
}

bool bound_at_most(const std::optional<std::int64_t>& a,
                   const std::optional<std::int64_t>& b) {
  if (!b) return true;
  return a && *a <= *b;
}

int rank(Convergence c) {
  switch (c) {
    case C::SO: return 2;
    case C::CPO: return 1;
    case C::NPO: return 0;
  }
  return 0;
}

}  // namespace

StalenessBound default_staleness_bound() {
  StalenessBound b;
  b.max_key_updates = 1;
  return b;
}

std::string_view to_string(AvailabilityBound a) {
  switch (a) {
    case A::WeaklyAvailable: return "Weakly Available";
    case A::StickyAvailable: return "Sticky Available";
    case A::TotallyAvailable: return "Totally Available";
  }
  return "?";
}

std::vector<ConsistencyLevel> all_levels(const StalenessBound& bound) {
  std::vector<ConsistencyLevel> out;
  for (const auto& r : kRows) out.push_back({r.id, bound});
  return out;
}

Constraints constraints_of(const ConsistencyLevel& level) {
  const auto& r = row(level.id);
  Relationship rel{r.relationship, {}};
  if (r.relationship == R::BoundedCasl) rel.bound = level.bound;
  return {r.convergence, rel};
}

AvailabilityBound availability_upper_bound(const ConsistencyLevel& level) {
  return row(level.id).availability;
}

bool stronger_or_equal(Convergence a, Convergence b) { return rank(a) >= rank(b); }

bool stronger_or_equal(const Relationship& a, const Relationship& b) {
  static const KindMatrix m = kind_closure();
  if (a.kind == R::BoundedCasl && b.kind == R::BoundedCasl) {
    return bound_at_most(a.bound.max_writer_ops, b.bound.max_writer_ops) &&
           bound_at_most(a.bound.max_key_updates, b.bound.max_key_updates) &&
           bound_at_most(a.bound.max_delay, b.bound.max_delay);
  }
  return m[static_cast<std::size_t>(a.kind)][static_cast<std::size_t>(b.kind)];
}

bool implies(const ConsistencyLevel& a, const ConsistencyLevel& b) {
  if (a.id == b.id && a.id != BoundedStaleness) return true;
  const auto ca = constraints_of(a);
  const auto cb = constraints_of(b);
  // CASL covers only the causal half of CASL-per-key; the per-key serial
  // order has to come from an SO ordering.
  if (cb.relationship.kind == RelationshipKind::CaslPerKey &&
      ca.relationship.kind != RelationshipKind::CaslPerKey && ca.convergence != Convergence::SO)
    return false;
  return stronger_or_equal(ca.convergence, cb.convergence) &&
         stronger_or_equal(ca.relationship, cb.relationship);
}

std::string_view level_name(LevelId id) { return row(id).name; }
std::string_view cli_name(LevelId id) { return row(id).cli; }

std::optional<LevelId> parse_level_name(std::string_view name) {
  for (const auto& r : kRows) {
    if (r.cli == name) return r.id;
  }
  return std::nullopt;
}

std::string valid_level_names() {
  std::string out;
  for (const auto& r : kRows) {
    if (!out.empty()) out += ", ";
    out += r.cli;
  }
  return out;
}

std::vector<SessionGuaranteeBound> session_guarantee_bounds() {
  return {
      {SessionGuarantee::RMW, A::StickyAvailable},
      {SessionGuarantee::WFR, A::TotallyAvailable},
      {SessionGuarantee::MR, A::TotallyAvailable},
      {SessionGuarantee::MW, A::TotallyAvailable},
  };
}

bool satisfies(const ConsistencyLevel& level, const Timeline& timeline,
               const OrderingDag& dag, const ReadsFrom& rf) {
  if (level.id == Weak) return true;
  const auto c = constraints_of(level);
  if (!covers_effective_ops(dag, timeline)) return false;
  if (!validate_read_materialization(timeline, dag, rf, c.convergence)) return false;
  if (c.convergence == C::SO && !is_serial_order(timeline, dag)) return false;
  return check_relationship(c.relationship, dag, timeline, rf);
}

bool well_formed(const Timeline& timeline) {
  for (const auto& op : timeline.ops()) {
    if (!op.is_reader() || op.indeterminate()) continue;
    const auto values = written_values(timeline, op.key);
    bool ok = false;
    for (Value v : values) {
      if (op.accepts(v)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace sop
