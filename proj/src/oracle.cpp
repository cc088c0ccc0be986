#include "sop/oracle.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <mutex>

namespace sop {

namespace {

// Extends each order on n-1 elements with a new element n-1 placed above a
// down-closed set and below an up-closed set.
std::vector<Poset> extend(const std::vector<Poset>& smaller, std::size_t n) {
  std::vector<Poset> out;
  const std::size_t m = n - 1;
  const std::uint32_t full = (1U << m) - 1;
  for (const auto& p : smaller) {
    std::vector<std::uint32_t> below(m, 0);  // elements below i
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if ((p.above[i] >> j) & 1U) below[j] |= 1U << i;

    for (std::uint32_t down = 0; down <= full; ++down) {
      bool ideal = true;
      for (std::size_t i = 0; i < m && ideal; ++i)
        if (((down >> i) & 1U) && (below[i] & ~down)) ideal = false;
      if (!ideal) continue;
      for (std::uint32_t up = 0; up <= full; ++up) {
        if (up & down) continue;
        bool filter = true;
        for (std::size_t i = 0; i < m && filter; ++i)
          if (((up >> i) & 1U) && (p.above[i] & ~up)) filter = false;
        if (!filter) continue;
        bool below_all = true;
        for (std::size_t i = 0; i < m && below_all; ++i)
          if (((down >> i) & 1U) && (up & ~p.above[i])) below_all = false;
        if (!below_all) continue;

        Poset q;
        q.above.assign(n, 0);
        for (std::size_t i = 0; i < m; ++i) {
          q.above[i] = p.above[i];
          if ((down >> i) & 1U) q.above[i] |= static_cast<std::uint8_t>(1U << m);
        }
        q.above[m] = static_cast<std::uint8_t>(up);
        out.push_back(std::move(q));
      }
    }
  }
  return out;
}

}  // namespace

const std::vector<Poset>& labeled_posets(std::size_t n) {
  static std::mutex mu;
  static std::vector<std::vector<Poset>> cache{{Poset{}}};
  if (n > 7) throw OracleTooLarge("posets are enumerated for at most 7 elements");
  std::lock_guard<std::mutex> lock(mu);
  while (cache.size() <= n) cache.push_back(extend(cache.back(), cache.size()));
  return cache[n];
}

namespace {

struct Evaluation {
  const Timeline& tl;
  const std::vector<ConsistencyLevel>& levels;
  std::vector<Constraints> constraints;
};

// Tests one (ordering, reads-from) candidate against every level still open.
void evaluate(const Evaluation& ev, const OrderingDag& dag, const ReadsFrom& rf,
              std::vector<std::atomic<bool>>& passed) {
  std::array<int, 3> materialized{-1, -1, -1};
  int serial = -1;
  for (std::size_t i = 0; i < ev.levels.size(); ++i) {
    if (passed[i].load(std::memory_order_relaxed)) continue;
    if (ev.levels[i].id == LevelId::Weak) {
      passed[i] = true;
      continue;
    }
    const auto& c = ev.constraints[i];
    auto& m = materialized[static_cast<std::size_t>(c.convergence)];
    if (m < 0) m = validate_read_materialization(ev.tl, dag, rf, c.convergence) ? 1 : 0;
    if (!m) continue;
    if (c.convergence == Convergence::SO) {
      if (serial < 0) serial = is_serial_order(ev.tl, dag) ? 1 : 0;
      if (!serial) continue;
    }
    if (check_relationship(c.relationship, dag, ev.tl, rf)) passed[i] = true;
  }
}

bool all_passed(const std::vector<std::atomic<bool>>& passed) {
  for (const auto& p : passed)
    if (!p.load(std::memory_order_relaxed)) return false;
  return true;
}

// Visits every reads-from assignment over one ordering; stops when `fn` does.
template <class Fn>
bool visit_poset(const Timeline& tl, const std::vector<OpId>& nodes,
                 const std::vector<OpId>& readers, const Poset& p, Fn&& fn) {
  OrderingDag dag(nodes);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if ((p.above[i] >> j) & 1U) dag.add_edge(nodes[i], nodes[j]);

  // Sources that could possibly materialize: matching value and ordered
  // before the reader (or the initial value).
  std::vector<std::vector<OpId>> options(readers.size());
  for (std::size_t k = 0; k < readers.size(); ++k) {
    const auto& r = tl.op(readers[k]);
    for (OpId s : nodes) {
      const auto& w = tl.op(s);
      if (w.is_update() && w.key == r.key && s != r.id && r.accepts(w.written_value()) &&
          dag.ordered_before(s, r.id))
        options[k].push_back(s);
    }
    if (r.accepts(kInitialValue)) options[k].push_back(kInitialSource);
    if (options[k].empty()) return false;
  }
  std::vector<std::size_t> pick(readers.size(), 0);
  ReadsFrom rf(tl.size());
  while (true) {
    for (std::size_t k = 0; k < readers.size(); ++k) rf.set(readers[k], options[k][pick[k]]);
    if (fn(dag, rf)) return true;
    std::size_t k = 0;
    while (k < readers.size() && ++pick[k] == options[k].size()) pick[k++] = 0;
    if (k == readers.size()) return false;
  }
}

// Runs `fn` over every candidate of every choice of effective ops until
// `done()` holds.
template <class Fn, class Done>
void sweep_all(const Timeline& tl, int threads, Fn&& fn, Done&& done) {
  std::vector<OpId> fixed;
  std::vector<OpId> optional;
  for (const auto& op : tl.ops()) (op.indeterminate() ? optional : fixed).push_back(op.id);
  for (std::size_t mask = 0; mask < (std::size_t{1} << optional.size()) && !done(); ++mask) {
    std::vector<OpId> nodes = fixed;
    for (std::size_t i = 0; i < optional.size(); ++i)
      if ((mask >> i) & 1U) nodes.push_back(optional[i]);
    std::sort(nodes.begin(), nodes.end());
    std::vector<OpId> readers;
    for (OpId id : nodes)
      if (tl.op(id).is_reader()) readers.push_back(id);

    const auto& posets = labeled_posets(nodes.size());
    const auto count = static_cast<std::int64_t>(posets.size());
    auto one = [&](std::int64_t i) {
      visit_poset(tl, nodes, readers, posets[static_cast<std::size_t>(i)], [&](auto& d, auto& r) {
        fn(d, r);
        return done();
      });
    };
    if (threads > 1) {
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
      for (std::int64_t i = 0; i < count; ++i) {
        if (!done()) one(i);
      }
    } else {
      for (std::int64_t i = 0; i < count && !done(); ++i) one(i);
    }
  }
}

void check_size(const Timeline& timeline, const OracleOptions& options) {
  if (timeline.size() > options.max_ops)
    throw OracleTooLarge("history has " + std::to_string(timeline.size()) +
                         " operations; the oracle handles at most " +
                         std::to_string(options.max_ops));
}

}  // namespace

std::vector<Verdict> oracle_check_all(const Timeline& timeline,
                                      const std::vector<ConsistencyLevel>& levels,
                                      const OracleOptions& options) {
  check_size(timeline, options);
  Evaluation ev{timeline, levels, {}};
  for (const auto& l : levels) ev.constraints.push_back(constraints_of(l));
  std::vector<std::atomic<bool>> passed(levels.size());
  for (auto& p : passed) p = false;

  sweep_all(
      timeline, options.threads,
      [&](const OrderingDag& dag, const ReadsFrom& rf) { evaluate(ev, dag, rf, passed); },
      [&] { return all_passed(passed); });

  std::vector<Verdict> out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    // Weak holds even when no candidate could be formed.
    const bool ok = passed[i] || levels[i].id == LevelId::Weak;
    out.push_back(ok ? Verdict::Pass : Verdict::Fail);
  }
  return out;
}

bool oracle_any(const Timeline& timeline, const CandidatePredicate& predicate,
                const OracleOptions& options) {
  check_size(timeline, options);
  std::atomic<bool> found{false};
  sweep_all(
      timeline, options.threads,
      [&](const OrderingDag& dag, const ReadsFrom& rf) {
        if (predicate(dag, rf)) found = true;
      },
      [&] { return found.load(std::memory_order_relaxed); });
  return found;
}

Verdict oracle_check(const Timeline& timeline, const ConsistencyLevel& level,
                     const OracleOptions& options) {
  return oracle_check_all(timeline, {level}, options).front();
}

}  // namespace sop
