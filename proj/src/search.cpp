#include "sop/search.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <unordered_set>

#include "search_internal.hpp"

namespace sop {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

const LevelResult* ConformityReport::find(LevelId id) const {
  for (const auto& r : results) {
    if (r.level.id == id) return &r;
  }
  return nullptr;
}

Verdict ConformityReport::verdict(LevelId id) const {
  const auto* r = find(id);
  return r ? r->verdict : Verdict::Unknown;
}

Chunk drain_concurrent_chunk(const Timeline& timeline,
                             const std::vector<std::size_t>& cursor) {
  const auto& queues = timeline.queues();
  std::vector<const OperationSpan*> heads(queues.size(), nullptr);
  std::optional<std::size_t> first;
  for (std::size_t c = 0; c < queues.size(); ++c) {
    if (cursor[c] >= queues[c].size()) continue;
    heads[c] = &timeline.op(queues[c][cursor[c]]);
    if (!first || heads[c]->start < heads[*first]->start) first = c;
  }
  Chunk chunk{{}, cursor};
  if (!first) return chunk;

  auto overlap = [](const OperationSpan& a, const OperationSpan& b) {
    return !(a.end_or_max() < b.start) && !(b.end_or_max() < a.start);
  };
  std::vector<char> in(queues.size(), 0);
  std::vector<std::size_t> stack{*first};
  in[*first] = 1;
  while (!stack.empty()) {
    const std::size_t c = stack.back();
    stack.pop_back();
    for (std::size_t d = 0; d < queues.size(); ++d) {
      if (in[d] || !heads[d] || !overlap(*heads[c], *heads[d])) continue;
      in[d] = 1;
      stack.push_back(d);
    }
  }
  for (std::size_t c = 0; c < queues.size(); ++c) {
    if (!in[c]) continue;
    chunk.ops.push_back(heads[c]->id);
    ++chunk.cursor[c];
  }
  std::sort(chunk.ops.begin(), chunk.ops.end());
  return chunk;
}

namespace {

bool strictly_stronger(const ConsistencyLevel& a, const ConsistencyLevel& b) {
  return implies(a, b) && !implies(b, a);
}

// Strongest first; among incomparable levels, declaration order.
std::vector<std::size_t> strongest_first(const std::vector<ConsistencyLevel>& levels) {
  std::vector<std::size_t> pending(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) pending[i] = i;
  std::stable_sort(pending.begin(), pending.end(), [&](std::size_t a, std::size_t b) {
    return levels[a].id < levels[b].id;
  });
  std::vector<std::size_t> order;
  while (!pending.empty()) {
    auto pick = std::find_if(pending.begin(), pending.end(), [&](std::size_t i) {
      return std::none_of(pending.begin(), pending.end(), [&](std::size_t j) {
        return strictly_stronger(levels[j], levels[i]);
      });
    });
    order.push_back(*pick);
    pending.erase(pick);
  }
  return order;
}

SearchResult search_level(const Timeline& timeline, const ConsistencyLevel& level,
                          const SearchOptions& options) {
  switch (level.id) {
    case LevelId::Linearizability:
      return check_serial_level(timeline, SerialMode::RealTime, options);
    case LevelId::RegularSequential:
      return check_serial_level(timeline, SerialMode::RealTimeW, options);
    case LevelId::Sequential:
      return check_serial_level(timeline, SerialMode::None, options);
    case LevelId::PerKeySequential:
      return check_per_key_serial(timeline, options);
    case LevelId::Weak: {
      SearchResult r;
      r.verdict = Verdict::Pass;
      return r;
    }
    default: {
      const auto c = constraints_of(level);
      return check_partial_level(timeline, c.convergence, c.relationship, options);
    }
  }
}

}  // namespace

ConformityReport check(const Timeline& timeline,
                       const std::vector<ConsistencyLevel>& levels,
                       const SearchOptions& options) {
  const auto started = detail::Clock::now();
  ConformityReport report;
  report.results.reserve(levels.size());
  for (const auto& l : levels) report.results.push_back({l, Verdict::Unknown, false, {}});
  report.well_formed = well_formed(timeline);

  std::vector<char> decided(levels.size(), 0);
  SearchOptions opts = options;
  const auto deadline = detail::deadline_for(options.budget);

  for (std::size_t i : strongest_first(levels)) {
    auto& res = report.results[i];
    if (decided[i]) continue;
    SearchResult found;
    if (!report.well_formed) {
      found.verdict = res.level.id == LevelId::Weak ? Verdict::Pass : Verdict::Fail;
    } else {
      const auto left = deadline - detail::Clock::now();
      opts.budget.wall_timeout = std::max(
          std::chrono::nanoseconds(0),
          std::chrono::duration_cast<std::chrono::nanoseconds>(left));
      found = search_level(timeline, res.level, opts);
      report.stats += found.stats;
    }
    res.verdict = found.verdict;
    res.witness = std::move(found.witness);
    decided[i] = found.verdict != Verdict::Unknown;

    for (std::size_t j = 0; j < levels.size(); ++j) {
      if (j == i) continue;
      auto& other = report.results[j];
      if (found.verdict == Verdict::Pass && !decided[j] && implies(res.level, other.level)) {
        other.verdict = Verdict::Pass;
        other.inferred = true;
        other.witness = other.level.id == LevelId::Weak ? std::nullopt : res.witness;
        decided[j] = 1;
      }
      if (found.verdict == Verdict::Fail && other.verdict != Verdict::Fail &&
          implies(other.level, res.level)) {
        other.verdict = Verdict::Fail;
        other.inferred = true;
        other.witness.reset();
        decided[j] = 1;
      }
    }
  }
  report.stats.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                detail::Clock::now() - started)
                                .count();
  return report;
}

}  // namespace sop
