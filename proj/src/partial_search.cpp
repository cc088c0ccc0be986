// Search for partial orders: pick which indeterminate updates took effect,
// assign a reads-from source to every reader, keep the closure of the edges
// those choices force, and prune as soon as an anti-monotone condition
// breaks. Under CPO, equal-view readers that disagree are separated by
// adding one more update below one of them.

#include <algorithm>
#include <atomic>
#include <functional>
#include <unordered_set>

#include "search_internal.hpp"

namespace sop {

namespace {

using Row = std::vector<std::uint64_t>;

bool any_common(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  for (std::size_t w = 0; w < a.size(); ++w)
    if (a[w] & b[w]) return true;
  return false;
}

bool any_common(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                std::span<const std::uint64_t> c) {
  for (std::size_t w = 0; w < a.size(); ++w)
    if (a[w] & b[w] & c[w]) return true;
  return false;
}

void set_bit(Row& row, std::size_t i) { row[i / 64] |= std::uint64_t{1} << (i % 64); }

struct DagHash {
  std::size_t operator()(const OrderingDag& d) const { return d.hash(); }
};

struct RelFlags {
  bool casl = false;      // program order and reads-from edges
  bool fifo = false;      // RMW, MW, MR
  bool rt_prime = false;  // no real-time inversion
  bool bounded = false;
};

RelFlags flags_for(const Relationship& rel) {
  RelFlags f;
  switch (rel.kind) {
    case RelationshipKind::CASL: f.casl = true; break;
    case RelationshipKind::RTPrimeCASL: f.casl = f.rt_prime = true; break;
    case RelationshipKind::RTPrime: f.rt_prime = true; break;
    case RelationshipKind::BoundedCasl: f.casl = f.bounded = true; break;
    case RelationshipKind::FIFO: f.fifo = true; break;
    case RelationshipKind::None: break;
    default:
      throw std::invalid_argument("relationship " + to_string(rel) +
                                  " is not handled by the partial search");
  }
  return f;
}

/// Everything fixed once the set of effective ops is chosen.
struct Context {
  std::vector<OpId> nodes;
  OrderingDag base;
  bool feasible = true;
  std::vector<OpId> readers;                 // assignment order
  std::vector<std::vector<OpId>> candidates; // per entry of readers
  std::vector<Row> key_writers;              // per key, dense bits
  std::vector<Row> own_prior;                // per reader id: own earlier same-key updates
  std::vector<Row> rt_before;                // per dense node: a with (a, node) real-time
  std::vector<std::vector<OpId>> same_client_readers;  // per reader id, in program order
  std::vector<std::pair<OpId, OpId>> mr_same_key;      // (r1, r2) same client, same key
};

class PartialSearch {
 public:
  PartialSearch(const Timeline& timeline, Convergence conv, const Relationship& rel,
                const SearchOptions& options)
      : tl_(timeline), conv_(conv), flags_(flags_for(rel)), bound_(rel.bound),
        options_(options), deadline_(detail::deadline_for(options.budget)) {}

  SearchResult run();

 private:
  struct Branch {
    std::size_t context;
    std::optional<std::size_t> first_choice;
  };
  struct BranchResult {
    Verdict verdict = Verdict::Fail;
    std::optional<Witness> witness;
    std::uint64_t states = 0;
  };
  class Budget {};

  Context make_context(const std::vector<OpId>& nodes) const;
  BranchResult run_branch(const Context& ctx, const Branch& b) const;

  const Timeline& tl_;
  Convergence conv_;
  RelFlags flags_;
  StalenessBound bound_;
  SearchOptions options_;
  detail::Clock::time_point deadline_;
};

Context PartialSearch::make_context(const std::vector<OpId>& nodes) const {
  Context ctx;
  ctx.nodes = nodes;
  ctx.base = OrderingDag(nodes);
  const std::size_t n = nodes.size();
  const std::size_t words = ctx.base.words();
  const std::size_t ids = tl_.size();
  auto in = [&](OpId id) { return ctx.base.contains(id); };
  auto add = [&](OpId a, OpId b) {
    if (!ctx.base.add_edge(a, b)) ctx.feasible = false;
  };

  // Client queues restricted to the chosen ops.
  std::vector<std::vector<OpId>> queues;
  for (const auto& q : tl_.queues()) {
    auto& out = queues.emplace_back();
    for (OpId id : q)
      if (in(id)) out.push_back(id);
  }

  if (flags_.casl) {
    for (const auto& q : queues)
      for (std::size_t i = 1; i < q.size(); ++i) add(q[i - 1], q[i]);
  }
  ctx.own_prior.assign(ids, Row(words, 0));
  ctx.same_client_readers.assign(ids, {});
  if (flags_.fifo) {
    for (const auto& q : queues) {
      std::optional<OpId> last_update;
      std::vector<OpId> readers;
      for (std::size_t i = 0; i < q.size(); ++i) {
        const auto& op = tl_.op(q[i]);
        if (op.is_update()) {
          if (last_update) add(*last_update, op.id);
          last_update = op.id;
        }
        if (op.is_reader()) {
          readers.push_back(op.id);
          for (std::size_t j = 0; j < i; ++j) {
            const auto& w = tl_.op(q[j]);
            if (w.is_update() && w.key == op.key) {
              add(w.id, op.id);
              set_bit(ctx.own_prior[op.id], ctx.base.index_of(w.id));
            }
          }
        }
      }
      for (OpId r : readers) ctx.same_client_readers[r] = readers;
      for (std::size_t i = 0; i < readers.size(); ++i)
        for (std::size_t j = i + 1; j < readers.size(); ++j)
          if (tl_.op(readers[i]).key == tl_.op(readers[j]).key)
            ctx.mr_same_key.emplace_back(readers[i], readers[j]);
    }
  }
  if (flags_.bounded) {
    for (auto [w, r] : staleness_pairs(tl_, bound_))
      if (in(w) && in(r)) add(w, r);
  }
  ctx.rt_before.assign(n, Row(words, 0));
  if (flags_.rt_prime) {
    for (auto [a, b] : realtime_pairs(tl_))
      if (in(a) && in(b)) set_bit(ctx.rt_before[ctx.base.index_of(b)], ctx.base.index_of(a));
  }

  ctx.key_writers.assign(tl_.keys().size(), Row(words, 0));
  for (OpId id : nodes) {
    const auto& op = tl_.op(id);
    if (op.is_update()) set_bit(ctx.key_writers[op.key], ctx.base.index_of(id));
  }

  std::vector<std::pair<OpId, std::vector<OpId>>> readers;
  for (OpId r : nodes) {
    const auto& op = tl_.op(r);
    if (!op.is_reader()) continue;
    std::vector<OpId> cands;
    for (OpId s : nodes) {
      const auto& w = tl_.op(s);
      if (s != r && w.is_update() && w.key == op.key && op.accepts(w.written_value()))
        cands.push_back(s);
    }
    std::stable_sort(cands.begin(), cands.end(), [&](OpId a, OpId b) {
      const bool sa = tl_.op(a).client == op.client;
      const bool sb = tl_.op(b).client == op.client;
      if (sa != sb) return sa;
      return tl_.op(a).end_or_max() < tl_.op(b).end_or_max();
    });
    if (op.accepts(kInitialValue)) cands.push_back(kInitialSource);
    if (cands.empty()) ctx.feasible = false;
    readers.emplace_back(r, std::move(cands));
  }
  std::stable_sort(readers.begin(), readers.end(), [](const auto& a, const auto& b) {
    if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
    return a.first < b.first;
  });
  for (auto& [r, c] : readers) {
    ctx.readers.push_back(r);
    ctx.candidates.push_back(std::move(c));
  }
  return ctx;
}

PartialSearch::BranchResult PartialSearch::run_branch(const Context& ctx,
                                                      const Branch& branch) const {
  BranchResult out;
  detail::Meter meter(options_.budget.max_states, deadline_);
  ReadsFrom rf(tl_.size());
  std::vector<char> assigned(tl_.size(), 0);
  const std::size_t n = ctx.nodes.size();

  auto tick = [&] {
    if (!meter.tick()) throw Budget{};
  };

  // Conditions that, once broken, stay broken as edges are added.
  auto sound = [&](const OrderingDag& dag) {
    for (OpId r : ctx.readers) {
      if (!assigned[r]) continue;
      const auto& op = tl_.op(r);
      const std::size_t ir = dag.index_of(r);
      const OpId s = *rf.source(r);
      const auto& writers = ctx.key_writers[op.key];
      if (s == kInitialSource) {
        if (any_common(dag.predecessors(ir), writers)) return false;
        continue;
      }
      const std::size_t is = dag.index_of(s);
      if (any_common(dag.successors(is), dag.predecessors(ir), writers)) return false;
      if (flags_.fifo && any_common(dag.successors(is), ctx.own_prior[r])) return false;
    }
    if (flags_.fifo) {
      for (auto [r1, r2] : ctx.mr_same_key) {
        if (!assigned[r1] || !assigned[r2]) continue;
        const OpId s1 = *rf.source(r1);
        const OpId s2 = *rf.source(r2);
        if (s1 == kInitialSource) continue;
        if (s2 == kInitialSource || dag.ordered_before(s2, s1)) return false;
      }
    }
    if (flags_.rt_prime) {
      for (std::size_t b = 0; b < n; ++b)
        if (any_common(dag.successors(b), ctx.rt_before[b])) return false;
    }
    return true;
  };

  auto link = [&](OrderingDag& dag, OpId r, OpId s) {
    if (s != kInitialSource && !dag.add_edge(s, r)) return false;
    if (flags_.fifo) {
      const auto& mine = ctx.same_client_readers[r];
      bool after = false;
      for (OpId other : mine) {
        if (other == r) {
          after = true;
          continue;
        }
        if (!assigned[other]) continue;
        if (!after) {
          const OpId so = *rf.source(other);
          if (so != kInitialSource && !dag.add_edge(so, r)) return false;
        } else if (s != kInitialSource && !dag.add_edge(s, other)) {
          return false;
        }
      }
    }
    return true;
  };

  std::unordered_set<OrderingDag, DagHash> visited;

  // Separates equal-view readers that return different values.
  std::function<bool(const OrderingDag&)> converge = [&](const OrderingDag& dag) -> bool {
    tick();
    if (!visited.insert(dag).second) return false;

    for (std::size_t i = 0; i < ctx.readers.size(); ++i) {
      const OpId r1 = ctx.readers[i];
      const auto& op1 = tl_.op(r1);
      const auto& writers = ctx.key_writers[op1.key];
      const std::size_t i1 = dag.index_of(r1);
      const Value v1 = source_value(tl_, *rf.source(r1));
      for (std::size_t j = i + 1; j < ctx.readers.size(); ++j) {
        const OpId r2 = ctx.readers[j];
        const auto& op2 = tl_.op(r2);
        if (op2.key != op1.key || source_value(tl_, *rf.source(r2)) == v1) continue;
        const std::size_t i2 = dag.index_of(r2);
        bool same = true;
        for (std::size_t w = 0; w < dag.words() && same; ++w)
          same = (dag.predecessors(i1)[w] & writers[w]) == (dag.predecessors(i2)[w] & writers[w]);
        if (!same) continue;

        for (std::size_t wi = 0; wi < n; ++wi) {
          if (!((writers[wi / 64] >> (wi % 64)) & 1U)) continue;
          if (dag.reaches(wi, i1)) continue;
          for (OpId target : {r1, r2}) {
            OrderingDag next = dag;
            if (!next.add_edge(ctx.nodes[wi], target) || !sound(next)) continue;
            if (converge(next)) return true;
          }
        }
        return false;
      }
    }
    out.witness = Witness{dag, rf};
    return true;
  };

  std::function<bool(std::size_t, const OrderingDag&)> assign =
      [&](std::size_t k, const OrderingDag& dag) -> bool {
    tick();
    if (k == ctx.readers.size()) {
      if (conv_ == Convergence::CPO) {
        visited.clear();
        return converge(dag);
      }
      out.witness = Witness{dag, rf};
      return true;
    }
    const OpId r = ctx.readers[k];
    const auto& cands = ctx.candidates[k];
    std::size_t lo = 0;
    std::size_t hi = cands.size();
    if (k == 0 && branch.first_choice) {
      lo = *branch.first_choice;
      hi = lo + 1;
    }
    for (std::size_t c = lo; c < hi; ++c) {
      OrderingDag next = dag;
      if (!link(next, r, cands[c])) continue;
      rf.set(r, cands[c]);
      assigned[r] = 1;
      const bool ok = sound(next) && assign(k + 1, next);
      if (ok) return true;
      assigned[r] = 0;
      rf.clear(r);
    }
    return false;
  };

  try {
    out.verdict = sound(ctx.base) && assign(0, ctx.base) ? Verdict::Pass : Verdict::Fail;
  } catch (const Budget&) {
    out.verdict = Verdict::Unknown;
    out.witness.reset();
  }
  out.states = meter.states();
  return out;
}

SearchResult PartialSearch::run() {
  const auto started = detail::Clock::now();
  SearchResult result;

  std::vector<OpId> fixed;
  std::vector<OpId> optional;
  for (const auto& op : tl_.ops()) (op.indeterminate() ? optional : fixed).push_back(op.id);

  constexpr std::size_t kMaxOptional = 12;
  bool capped = optional.size() > kMaxOptional;
  const std::size_t subsets = capped ? 0 : std::size_t{1} << optional.size();

  std::vector<Context> contexts;
  std::vector<Branch> branches;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::vector<OpId> nodes = fixed;
    for (std::size_t i = 0; i < optional.size(); ++i)
      if ((mask >> i) & 1U) nodes.push_back(optional[i]);
    std::sort(nodes.begin(), nodes.end());
    Context ctx = make_context(nodes);
    if (!ctx.feasible) continue;
    const std::size_t index = contexts.size();
    if (ctx.readers.empty()) {
      branches.push_back({index, std::nullopt});
    } else {
      for (std::size_t c = 0; c < ctx.candidates[0].size(); ++c) branches.push_back({index, c});
    }
    contexts.push_back(std::move(ctx));
  }

  std::vector<BranchResult> outcomes(branches.size());
  std::atomic<std::size_t> first_pass{branches.size()};
  auto work = [&](std::size_t i) {
    if (first_pass.load(std::memory_order_relaxed) < i) return;
    outcomes[i] = run_branch(contexts[branches[i].context], branches[i]);
    if (outcomes[i].verdict == Verdict::Pass) {
      std::size_t cur = first_pass.load();
      while (i < cur && !first_pass.compare_exchange_weak(cur, i)) {
      }
    }
  };
  const auto count = static_cast<std::int64_t>(branches.size());
  if (options_.threads > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(options_.threads)
    for (std::int64_t i = 0; i < count; ++i) work(static_cast<std::size_t>(i));
  } else {
    for (std::int64_t i = 0; i < count; ++i) {
      work(static_cast<std::size_t>(i));
      if (outcomes[i].verdict == Verdict::Pass) break;
    }
  }

  bool unknown = capped;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    result.stats.states_explored += outcomes[i].states;
    if (i > first_pass.load()) continue;
    if (outcomes[i].verdict == Verdict::Unknown) unknown = true;
  }
  if (first_pass.load() < branches.size()) {
    result.verdict = Verdict::Pass;
    result.witness = std::move(outcomes[first_pass.load()].witness);
  } else {
    result.verdict = unknown ? Verdict::Unknown : Verdict::Fail;
  }
  result.stats.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                detail::Clock::now() - started)
                                .count();
  return result;
}

}  // namespace

SearchResult check_partial_level(const Timeline& timeline, Convergence convergence,
                                 const Relationship& relationship,
                                 const SearchOptions& options) {
  return PartialSearch(timeline, convergence, relationship, options).run();
}

}  // namespace sop
