#include "sop/constraints.hpp"

#include <algorithm>
#include <sstream>

namespace sop {

namespace {

bool before(const OrderingDag& dag, OpId a, OpId b) {
  return dag.contains(a) && dag.contains(b) && dag.ordered_before(a, b);
}

bool both_in(const OrderingDag& dag, OpId a, OpId b) {
  return dag.contains(a) && dag.contains(b);
}

bool all_ordered(const OrderingDag& dag, const OpPairs& pairs) {
  return std::all_of(pairs.begin(), pairs.end(), [&](const auto& p) {
    return !both_in(dag, p.first, p.second) || dag.ordered_before(p.first, p.second);
  });
}

// Closure of program order and reads-from, optionally projected onto one key.
OpPairs closure_pairs(const Timeline& timeline, const ReadsFrom& rf,
                      std::optional<KeyId> key) {
  const std::size_t n = timeline.size();
  auto keep = [&](OpId id) { return !key || timeline.op(id).key == *key; };
  std::vector<std::vector<OpId>> adj(n);
  for (const auto& queue : timeline.queues()) {
    std::optional<OpId> prev;
    for (OpId id : queue) {
      if (!keep(id)) continue;
      if (prev) adj[*prev].push_back(id);
      prev = id;
    }
  }
  for (auto [r, s] : rf.entries()) {
    if (s == kInitialSource || r >= n || s >= n) continue;
    if (keep(r) && keep(s)) adj[s].push_back(r);
  }

  OpPairs out;
  std::vector<char> seen(n);
  std::vector<OpId> stack;
  for (OpId a = 0; a < n; ++a) {
    if (!keep(a)) continue;
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(adj[a].begin(), adj[a].end());
    while (!stack.empty()) {
      OpId x = stack.back();
      stack.pop_back();
      if (seen[x]) continue;
      seen[x] = 1;
      out.emplace_back(a, x);
      for (OpId y : adj[x]) stack.push_back(y);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

bool StalenessBound::valid() const {
  if (!max_writer_ops && !max_key_updates && !max_delay) return false;
  if (max_writer_ops && *max_writer_ops <= 0) return false;
  if (max_key_updates && *max_key_updates <= 0) return false;
  if (max_delay && *max_delay <= 0) return false;
  return true;
}

std::string to_string(const StalenessBound& b) {
  std::ostringstream os;
  const char* sep = "";
  if (b.max_delay) {
    os << "t=" << *b.max_delay;
    sep = ",";
  }
  if (b.max_writer_ops) {
    os << sep << "j=" << *b.max_writer_ops;
    sep = ",";
  }
  if (b.max_key_updates) os << sep << "k=" << *b.max_key_updates;
  return os.str();
}

std::string to_string(const Relationship& r) {
  switch (r.kind) {
    case RelationshipKind::RT: return "RT";
    case RelationshipKind::RTWandCASLR: return "RT-W & CASL-R";
    case RelationshipKind::RTPrimeCASL: return "RT' & CASL";
    case RelationshipKind::RTPrime: return "RT'";
    case RelationshipKind::BoundedCasl: return "Bounded-CASL(" + to_string(r.bound) + ")";
    case RelationshipKind::CASL: return "CASL";
    case RelationshipKind::FIFO: return "FIFO";
    case RelationshipKind::CaslPerKey: return "CASL-per-key";
    case RelationshipKind::None: return "None";
  }
  return "?";
}

std::string_view to_string(SessionGuarantee g) {
  switch (g) {
    case SessionGuarantee::RMW: return "read-my-writes";
    case SessionGuarantee::MW: return "monotonic-writes";
    case SessionGuarantee::MR: return "monotonic-reads";
    case SessionGuarantee::WFR: return "writes-follow-reads";
  }
  return "?";
}

OpPairs realtime_pairs(const Timeline& timeline) {
  OpPairs out;
  for (const auto& a : timeline.ops()) {
    if (a.indeterminate()) continue;
    for (const auto& b : timeline.ops()) {
      if (a.id == b.id) continue;
      if (*a.end < b.start || timeline.program_order(a.id, b.id))
        out.emplace_back(a.id, b.id);
    }
  }
  return out;
}

OpPairs causal_pairs(const Timeline& timeline, const ReadsFrom& rf) {
  return closure_pairs(timeline, rf, std::nullopt);
}

bool check_rt(const OrderingDag& dag, const Timeline& timeline) {
  return all_ordered(dag, realtime_pairs(timeline));
}

bool check_rt_prime(const OrderingDag& dag, const Timeline& timeline) {
  for (auto [a, b] : realtime_pairs(timeline)) {
    if (before(dag, b, a)) return false;
  }
  return true;
}

bool check_casl(const OrderingDag& dag, const Timeline& timeline,
                const ReadsFrom& rf) {
  return all_ordered(dag, causal_pairs(timeline, rf));
}

bool check_session_guarantees(const OrderingDag& dag, const Timeline& timeline,
                              const ReadsFrom& rf,
                              const std::set<SessionGuarantee>& which) {
  const bool rmw = which.count(SessionGuarantee::RMW) > 0;
  const bool mw = which.count(SessionGuarantee::MW) > 0;
  const bool mr = which.count(SessionGuarantee::MR) > 0;
  const bool wfr = which.count(SessionGuarantee::WFR) > 0;

  for (const auto& queue : timeline.queues()) {
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (std::size_t j = i + 1; j < queue.size(); ++j) {
        const auto& a = timeline.op(queue[i]);
        const auto& b = timeline.op(queue[j]);
        if (!both_in(dag, a.id, b.id)) continue;

        if (mw && a.is_update() && b.is_update() && !dag.ordered_before(a.id, b.id))
          return false;

        if (wfr && a.is_reader() && b.is_update() && !dag.ordered_before(a.id, b.id))
          return false;

        if (rmw && a.is_update() && b.is_reader() && a.key == b.key) {
          if (!dag.ordered_before(a.id, b.id)) return false;
          auto src = rf.source(b.id);
          if (!src || *src == kInitialSource) return false;
          if (before(dag, *src, a.id)) return false;
        }

        if (mr && a.is_reader() && b.is_reader()) {
          auto sa = rf.source(a.id);
          auto sb = rf.source(b.id);
          if (!sa || !sb) return false;
          if (*sa != kInitialSource && !before(dag, *sa, b.id)) return false;
          if (a.key == b.key && *sa != kInitialSource) {
            if (*sb == kInitialSource || before(dag, *sb, *sa)) return false;
          }
        }
      }
    }
  }
  return true;
}

bool check_fifo(const OrderingDag& dag, const Timeline& timeline,
                const ReadsFrom& rf) {
  return check_session_guarantees(
      dag, timeline, rf,
      {SessionGuarantee::RMW, SessionGuarantee::MW, SessionGuarantee::MR});
}

bool check_rtw_caslr(const OrderingDag& dag, const Timeline& timeline,
                     const ReadsFrom& rf) {
  if (!check_casl(dag, timeline, rf)) return false;
  for (auto [a, b] : realtime_pairs(timeline)) {
    if (!timeline.op(a).is_update() || !timeline.op(b).is_update()) continue;
    if (both_in(dag, a, b) && !dag.ordered_before(a, b)) return false;
  }
  return true;
}

OpPairs staleness_pairs(const Timeline& timeline, const StalenessBound& bound) {
  OpPairs out;
  const auto ops = timeline.ops();
  for (const auto& w : ops) {
    if (!w.is_update() || w.indeterminate()) continue;
    const TimeNs acked = *w.end;
    for (const auto& r : ops) {
      if (r.id == w.id || !r.is_reader() || r.key != w.key) continue;
      bool forced = bound.max_delay && r.start > acked + *bound.max_delay;
      if (!forced && bound.max_writer_ops) {
        std::int64_t later = 0;
        for (const auto& u : ops) {
          if (u.is_update() && !u.indeterminate() &&
              timeline.program_order(w.id, u.id) && *u.end < r.start)
            ++later;
        }
        forced = later >= *bound.max_writer_ops;
      }
      if (!forced && bound.max_key_updates) {
        std::int64_t later = 0;
        for (const auto& u : ops) {
          if (u.id != w.id && u.key == w.key && u.is_update() &&
              !u.indeterminate() && u.start > acked && *u.end < r.start)
            ++later;
        }
        forced = later >= *bound.max_key_updates;
      }
      if (forced) out.emplace_back(w.id, r.id);
    }
  }
  return out;
}

bool check_bounded_casl(const OrderingDag& dag, const Timeline& timeline,
                        const ReadsFrom& rf, const StalenessBound& bound) {
  return check_casl(dag, timeline, rf) &&
         all_ordered(dag, staleness_pairs(timeline, bound));
}

bool check_casl_per_key(const OrderingDag& dag, const Timeline& timeline,
                        const ReadsFrom& rf) {
  const auto& nodes = dag.nodes();
  for (KeyId key = 0; key < timeline.keys().size(); ++key) {
    std::vector<OpId> members;
    for (OpId id : nodes) {
      if (timeline.op(id).key == key) members.push_back(id);
    }
    auto updates_before = [&](OpId r) {
      std::vector<OpId> out;
      for (OpId w : members) {
        if (timeline.op(w).is_update() && dag.ordered_before(w, r)) out.push_back(w);
      }
      return out;
    };
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const OpId a = members[i];
        const OpId b = members[j];
        if (!dag.unordered(a, b)) continue;
        if (!timeline.op(a).is_pure_read() || !timeline.op(b).is_pure_read())
          return false;
        if (updates_before(a) != updates_before(b)) return false;
      }
    }
    if (!all_ordered(dag, closure_pairs(timeline, rf, key))) return false;
  }
  return true;
}

bool check_relationship(const Relationship& rel, const OrderingDag& dag,
                        const Timeline& timeline, const ReadsFrom& rf) {
  switch (rel.kind) {
    case RelationshipKind::RT: return check_rt(dag, timeline);
    case RelationshipKind::RTWandCASLR: return check_rtw_caslr(dag, timeline, rf);
    case RelationshipKind::RTPrimeCASL:
      return check_rt_prime(dag, timeline) && check_casl(dag, timeline, rf);
    case RelationshipKind::RTPrime: return check_rt_prime(dag, timeline);
    case RelationshipKind::BoundedCasl:
      return check_bounded_casl(dag, timeline, rf, rel.bound);
    case RelationshipKind::CASL: return check_casl(dag, timeline, rf);
    case RelationshipKind::FIFO: return check_fifo(dag, timeline, rf);
    case RelationshipKind::CaslPerKey: return check_casl_per_key(dag, timeline, rf);
    case RelationshipKind::None: return true;
  }
  return false;
}

bool covers_effective_ops(const OrderingDag& dag, const Timeline& timeline) {
  for (OpId id : dag.nodes()) {
    if (id >= timeline.size()) return false;
  }
  for (const auto& op : timeline.ops()) {
    if (!op.indeterminate() && !dag.contains(op.id)) return false;
  }
  return true;
}

}  // namespace sop
