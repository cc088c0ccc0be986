// Total-order search in the style of Wing and Gong: extend a prefix one
// client head at a time, track register values, memoize failed frontiers.

#include <algorithm>
#include <map>
#include <unordered_set>

#include "search_internal.hpp"

namespace sop {

namespace {

using detail::applies;

struct KeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::size_t h = v.size();
    for (auto x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ULL;
    return h;
  }
};
using Memo = std::unordered_set<std::vector<std::int64_t>, KeyHash>;

constexpr std::int64_t kDead = std::numeric_limits<std::int64_t>::min();

class SerialSearch {
 public:
  SerialSearch(const Timeline& timeline, std::vector<std::vector<OpId>> queues,
               SerialMode mode, bool chunked, const SearchOptions& options)
      : tl_(timeline),
        queues_(std::move(queues)),
        mode_(mode),
        meter_(options.budget.max_states, detail::deadline_for(options.budget)) {
    const std::size_t clients = queues_.size();
    next_update_.resize(clients);
    for (std::size_t c = 0; c < clients; ++c) {
      const auto& q = queues_[c];
      next_update_[c].assign(q.size() + 1, q.size());
      for (std::size_t i = q.size(); i-- > 0;) {
        next_update_[c][i] = tl_.op(q[i]).is_update() ? i : next_update_[c][i + 1];
      }
    }
    needs_.resize(tl_.keys().size());
    makers_.resize(tl_.keys().size());
    for (std::size_t c = 0; c < clients; ++c) {
      for (std::size_t i = 0; i < queues_[c].size(); ++i) {
        const auto& op = tl_.op(queues_[c][i]);
        const Slot at{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(i)};
        if (op.is_update()) makers_[op.key][op.written_value()].push_back(at);
        if (op.indeterminate() || !op.is_reader() || op.outcome == Outcome::CasFailed) continue;
        const Value v = op.kind.type == OpType::Read ? *op.observed : op.kind.expected;
        needs_[op.key].push_back({at, v});
      }
    }
    if (chunked && mode_ == SerialMode::RealTime && queues_ == tl_.queues()) {
      build_segments();
    } else {
      std::vector<std::size_t> end(clients);
      for (std::size_t c = 0; c < clients; ++c) end[c] = queues_[c].size();
      segments_.push_back(std::move(end));
    }
  }

  SearchResult run();

 private:
  struct Move {
    std::uint32_t client;
    bool effect;
  };
  struct Slot {
    std::uint32_t client;
    std::uint32_t pos;
  };
  struct Need {
    Slot at;
    Value value;
  };
  struct Frame {
    std::vector<std::uint32_t> pos;
    std::vector<Value> values;
    std::vector<std::uint32_t> pending;  // unplaced readers per key
    std::size_t segment = 0;
    bool boundary = false;
    OpId via = 0;
    bool via_effect = false;
    bool expanded = false;
    std::vector<Move> moves;
    std::size_t next = 0;
  };

  void build_segments();
  bool segment_done(const Frame& f) const;
  std::vector<std::int64_t> memo_key(const Frame& f) const;
  bool time_ok(const Frame& f, std::size_t c, const OperationSpan& b) const;
  bool stranded(const Frame& f, KeyId key) const;
  void expand(Frame& f) const;
  Frame child(const Frame& f, Move m) const;
  Witness witness(const std::vector<Frame>& stack) const;

  const Timeline& tl_;
  std::vector<std::vector<OpId>> queues_;
  SerialMode mode_;
  detail::Meter meter_;
  std::vector<std::vector<std::size_t>> next_update_;
  std::vector<std::vector<std::size_t>> segments_;  // per-client end positions
  std::vector<std::vector<Need>> needs_;                   // per key
  std::vector<std::map<Value, std::vector<Slot>>> makers_;  // per key, by value
  std::uint64_t chunks_ = 0;
};

void SerialSearch::build_segments() {
  const std::size_t clients = queues_.size();
  std::vector<std::size_t> cursor(clients, 0);
  auto remaining = [&] {
    for (std::size_t c = 0; c < clients; ++c)
      if (cursor[c] < queues_[c].size()) return true;
    return false;
  };
  // Latest end per client within the open segment.
  std::vector<TimeNs> last_end(clients, std::numeric_limits<TimeNs>::min());
  while (remaining()) {
    Chunk chunk = drain_concurrent_chunk(tl_, cursor);
    ++chunks_;
    for (OpId id : chunk.ops) {
      const auto& op = tl_.op(id);
      last_end[op.client] = std::max(last_end[op.client], op.end_or_max());
    }
    cursor = chunk.cursor;
    bool cut = true;
    for (std::size_t d = 0; d < clients && cut; ++d) {
      if (cursor[d] >= queues_[d].size()) continue;
      const TimeNs start = tl_.op(queues_[d][cursor[d]]).start;
      for (std::size_t c = 0; c < clients; ++c) {
        if (c != d && last_end[c] >= start) {
          cut = false;
          break;
        }
      }
    }
    if (cut || !remaining()) {
      segments_.push_back(cursor);
      std::fill(last_end.begin(), last_end.end(), std::numeric_limits<TimeNs>::min());
    }
  }
  if (segments_.empty()) segments_.push_back(cursor);
}

bool SerialSearch::segment_done(const Frame& f) const {
  const auto& end = segments_[f.segment];
  for (std::size_t c = 0; c < end.size(); ++c)
    if (f.pos[c] < end[c]) return false;
  return true;
}

std::vector<std::int64_t> SerialSearch::memo_key(const Frame& f) const {
  std::vector<std::int64_t> key(f.pos.begin(), f.pos.end());
  for (std::size_t k = 0; k < f.values.size(); ++k)
    key.push_back(f.pending[k] ? f.values[k] : kDead);
  return key;
}

bool SerialSearch::time_ok(const Frame& f, std::size_t c, const OperationSpan& b) const {
  const auto& end = segments_[f.segment];
  switch (mode_) {
    case SerialMode::None: return true;
    case SerialMode::RealTime:
      for (std::size_t d = 0; d < queues_.size(); ++d) {
        if (d == c || f.pos[d] >= end[d]) continue;
        const auto& h = tl_.op(queues_[d][f.pos[d]]);
        if (!h.indeterminate() && *h.end < b.start) return false;
      }
      return true;
    case SerialMode::RealTimeW:
      if (!b.is_update()) return true;
      for (std::size_t d = 0; d < queues_.size(); ++d) {
        if (d == c) continue;
        const std::size_t i = next_update_[d][f.pos[d]];
        if (i >= queues_[d].size()) continue;
        const auto& u = tl_.op(queues_[d][i]);
        if (!u.indeterminate() && *u.end < b.start) return false;
      }
      return true;
  }
  return true;
}

// Some unplaced reader of `key` wants a value that is gone and that no
// remaining update able to precede it can bring back.
bool SerialSearch::stranded(const Frame& f, KeyId key) const {
  const Value cur = f.values[key];
  for (const auto& n : needs_[key]) {
    if (n.at.pos < f.pos[n.at.client] || n.value == cur) continue;
    bool back = false;
    auto it = makers_[key].find(n.value);
    if (it != makers_[key].end()) {
      for (const auto& w : it->second) {
        if (w.pos < f.pos[w.client]) continue;
        if (w.client == n.at.client && w.pos >= n.at.pos) continue;
        back = true;
        break;
      }
    }
    if (!back) return true;
  }
  return false;
}

void SerialSearch::expand(Frame& f) const {
  f.expanded = true;
  const auto& end = segments_[f.segment];
  std::vector<std::pair<TimeNs, Move>> ranked;
  for (std::size_t c = 0; c < queues_.size(); ++c) {
    if (f.pos[c] >= end[c]) continue;
    const auto& b = tl_.op(queues_[c][f.pos[c]]);
    const bool fits = applies(b, f.values[b.key]) && time_ok(f, c, b);
    if (fits && b.is_pure_read()) {
      // Placing a matching read now never hurts.
      f.moves = {{static_cast<std::uint32_t>(c), true}};
      return;
    }
    if (fits) ranked.push_back({b.end_or_max(), {static_cast<std::uint32_t>(c), true}});
    if (b.indeterminate())
      ranked.push_back({std::numeric_limits<TimeNs>::max(),
                        {static_cast<std::uint32_t>(c), false}});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& r : ranked) f.moves.push_back(r.second);
}

SerialSearch::Frame SerialSearch::child(const Frame& f, Move m) const {
  Frame n;
  n.pos = f.pos;
  n.values = f.values;
  n.pending = f.pending;
  n.segment = f.segment;
  const OpId id = queues_[m.client][n.pos[m.client]];
  const auto& op = tl_.op(id);
  ++n.pos[m.client];
  if (op.is_reader()) --n.pending[op.key];
  if (m.effect && op.is_update()) n.values[op.key] = op.written_value();
  n.via = id;
  n.via_effect = m.effect;
  while (segment_done(n) && n.segment + 1 < segments_.size()) {
    ++n.segment;
    n.boundary = true;
  }
  return n;
}

Witness SerialSearch::witness(const std::vector<Frame>& stack) const {
  std::vector<OpId> order;
  for (std::size_t i = 1; i < stack.size(); ++i) {
    if (stack[i].via_effect) order.push_back(stack[i].via);
  }
  std::vector<OpId> nodes = order;
  std::sort(nodes.begin(), nodes.end());
  Witness w{OrderingDag(nodes), ReadsFrom(tl_.size())};
  std::vector<OpId> last(tl_.keys().size(), kInitialSource);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& op = tl_.op(order[i]);
    if (i > 0) w.dag.add_edge(order[i - 1], order[i]);
    if (op.is_reader()) w.rf.set(op.id, last[op.key]);
    if (op.is_update()) last[op.key] = op.id;
  }
  return w;
}

SearchResult SerialSearch::run() {
  SearchResult result;
  result.stats.chunks_drained = chunks_;
  const auto started = detail::Clock::now();
  auto finish = [&](Verdict v) {
    result.verdict = v;
    result.stats.states_explored = meter_.states();
    result.stats.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                  detail::Clock::now() - started)
                                  .count();
    return result;
  };

  Frame root;
  root.pos.assign(queues_.size(), 0);
  root.values.assign(tl_.keys().size(), kInitialValue);
  root.pending.assign(tl_.keys().size(), 0);
  for (const auto& q : queues_)
    for (OpId id : q)
      if (tl_.op(id).is_reader()) ++root.pending[tl_.op(id).key];
  while (segment_done(root) && root.segment + 1 < segments_.size()) ++root.segment;

  std::vector<Memo> memo(segments_.size());
  Memo boundary_memo;
  std::vector<Frame> stack;
  stack.push_back(std::move(root));
  meter_.tick();

  while (!stack.empty()) {
    Frame& f = stack.back();
    if (!f.expanded) {
      if (f.segment + 1 == segments_.size() && segment_done(f)) {
        result.witness = witness(stack);
        return finish(Verdict::Pass);
      }
      expand(f);
    }
    if (f.next < f.moves.size()) {
      const Move m = f.moves[f.next++];
      Frame n = child(f, m);
      const auto& placed = tl_.op(n.via);
      if (m.effect && placed.is_update() && stranded(n, placed.key)) continue;
      const auto key = memo_key(n);
      if (n.boundary ? boundary_memo.count(key) : memo[n.segment].count(key)) continue;
      if (!meter_.tick()) return finish(Verdict::Unknown);
      stack.push_back(std::move(n));
      continue;
    }
    auto key = memo_key(f);
    if (f.boundary) {
      boundary_memo.insert(std::move(key));
      memo[f.segment].clear();
    } else {
      memo[f.segment].insert(std::move(key));
    }
    stack.pop_back();
  }
  return finish(Verdict::Fail);
}

}  // namespace

SearchResult check_serial_level(const Timeline& timeline, SerialMode mode,
                                const SearchOptions& options) {
  return SerialSearch(timeline, timeline.queues(), mode, options.chunked, options).run();
}

SearchResult check_per_key_serial(const Timeline& timeline,
                                  const SearchOptions& options) {
  SearchResult total;
  total.verdict = Verdict::Pass;
  std::vector<Witness> parts;
  for (KeyId key = 0; key < timeline.keys().size(); ++key) {
    std::vector<std::vector<OpId>> queues;
    for (const auto& q : timeline.queues()) {
      auto& out = queues.emplace_back();
      for (OpId id : q)
        if (timeline.op(id).key == key) out.push_back(id);
    }
    auto r = SerialSearch(timeline, std::move(queues), SerialMode::None, false, options).run();
    total.stats += r.stats;
    if (r.verdict == Verdict::Fail) {
      total.verdict = Verdict::Fail;
      break;
    }
    if (r.verdict == Verdict::Unknown) total.verdict = Verdict::Unknown;
    if (r.witness) parts.push_back(std::move(*r.witness));
  }
  if (total.verdict != Verdict::Pass) return total;

  std::vector<OpId> nodes;
  for (const auto& p : parts) nodes.insert(nodes.end(), p.dag.nodes().begin(), p.dag.nodes().end());
  std::sort(nodes.begin(), nodes.end());
  Witness w{OrderingDag(nodes), ReadsFrom(timeline.size())};
  for (const auto& p : parts) {
    for (auto [a, b] : p.dag.edges()) w.dag.add_edge(a, b);
    for (auto [r, s] : p.rf.entries()) w.rf.set(r, s);
  }
  total.witness = std::move(w);
  return total;
}

}  // namespace sop
