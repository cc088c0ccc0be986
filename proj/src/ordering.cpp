#include "sop/ordering.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace sop {

namespace {

inline void set_bit(std::uint64_t* row, std::size_t j) {
  row[j / 64] |= std::uint64_t{1} << (j % 64);
}

template <typename F>
void for_each_bit(std::span<const std::uint64_t> row, F&& f) {
  for (std::size_t w = 0; w < row.size(); ++w) {
    std::uint64_t bits = row[w];
    while (bits) {
      f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
}

}  // namespace

std::string_view to_string(Convergence c) {
  switch (c) {
    case Convergence::SO: return "SO";
    case Convergence::CPO: return "CPO";
    case Convergence::NPO: return "NPO";
  }
  return "?";
}

OrderingDag::OrderingDag(std::vector<OpId> nodes) : nodes_(std::move(nodes)) {
  OpId max_id = 0;
  for (auto id : nodes_) max_id = std::max(max_id, id);
  index_.assign(nodes_.empty() ? 0 : max_id + 1, kAbsent);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (index_[nodes_[i]] != kAbsent)
      throw std::invalid_argument("duplicate node in ordering");
    index_[nodes_[i]] = static_cast<std::uint32_t>(i);
  }
  words_ = (nodes_.size() + 63) / 64;
  succ_.assign(nodes_.size() * words_, 0);
  pred_.assign(nodes_.size() * words_, 0);
}

std::optional<OrderingDag> OrderingDag::from_edges(
    std::vector<OpId> nodes, std::span<const std::pair<OpId, OpId>> edges) {
  OrderingDag dag(std::move(nodes));
  for (auto [a, b] : edges) {
    if (!dag.add_edge(a, b)) return std::nullopt;
  }
  return dag;
}

std::size_t OrderingDag::index_of(OpId id) const {
  if (!contains(id))
    throw std::out_of_range("op " + std::to_string(id) + " is not in the ordering");
  return index_[id];
}

bool OrderingDag::ordered_before(OpId a, OpId b) const {
  return reaches(index_of(a), index_of(b));
}

bool OrderingDag::add_edge(OpId a, OpId b) {
  const std::size_t ia = index_of(a);
  const std::size_t ib = index_of(b);
  if (ia == ib || reaches(ib, ia)) return false;
  if (reaches(ia, ib)) return true;

  // Everything at or before a now reaches everything at or after b.
  std::vector<std::uint64_t> down(pred_.begin() + ia * words_,
                                  pred_.begin() + (ia + 1) * words_);
  set_bit(down.data(), ia);
  std::vector<std::uint64_t> up(succ_.begin() + ib * words_,
                                succ_.begin() + (ib + 1) * words_);
  set_bit(up.data(), ib);

  for_each_bit(down, [&](std::size_t x) {
    auto* row = succ_.data() + x * words_;
    for (std::size_t w = 0; w < words_; ++w) row[w] |= up[w];
  });
  for_each_bit(up, [&](std::size_t y) {
    auto* row = pred_.data() + y * words_;
    for (std::size_t w = 0; w < words_; ++w) row[w] |= down[w];
  });
  return true;
}

std::vector<std::pair<OpId, OpId>> OrderingDag::edges() const {
  std::vector<std::pair<OpId, OpId>> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for_each_bit(successors(i), [&](std::size_t j) {
      // Covering pair: nothing strictly between i and j.
      auto si = successors(i);
      auto pj = predecessors(j);
      for (std::size_t w = 0; w < words_; ++w) {
        if (si[w] & pj[w]) return;
      }
      out.emplace_back(nodes_[i], nodes_[j]);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t OrderingDag::hash() const {
  std::size_t h = nodes_.size();
  for (auto w : succ_) h = h * 1099511628211ULL ^ std::hash<std::uint64_t>{}(w);
  return h;
}

void ReadsFrom::set(OpId reader, OpId source) {
  if (reader >= source_.size()) source_.resize(reader + 1, kUnassigned);
  source_[reader] = source;
}

void ReadsFrom::clear(OpId reader) {
  if (reader < source_.size()) source_[reader] = kUnassigned;
}

std::optional<OpId> ReadsFrom::source(OpId reader) const {
  if (reader >= source_.size() || source_[reader] == kUnassigned)
    return std::nullopt;
  return source_[reader];
}

std::vector<std::pair<OpId, OpId>> ReadsFrom::entries() const {
  std::vector<std::pair<OpId, OpId>> out;
  for (OpId r = 0; r < source_.size(); ++r) {
    if (source_[r] != kUnassigned) out.emplace_back(r, source_[r]);
  }
  return out;
}

Value source_value(const Timeline& timeline, OpId source) {
  if (source == kInitialSource) return kInitialValue;
  return timeline.op(source).written_value();
}

std::vector<OpId> immediate_predecessors(const Timeline& timeline,
                                         const OrderingDag& dag, OpId r) {
  const auto& reader = timeline.op(r);
  if (!reader.is_reader())
    throw std::invalid_argument("op " + std::to_string(r) + " does not read");
  const std::size_t ir = dag.index_of(r);

  std::vector<std::size_t> before;
  for_each_bit(dag.predecessors(ir), [&](std::size_t i) {
    const auto& op = timeline.op(dag.nodes()[i]);
    if (op.key == reader.key && op.is_update()) before.push_back(i);
  });
  std::vector<OpId> out;
  for (auto w : before) {
    bool shadowed = std::any_of(before.begin(), before.end(), [&](std::size_t v) {
      return dag.reaches(w, v);
    });
    if (!shadowed) out.push_back(dag.nodes()[w]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool validate_read_materialization(const Timeline& timeline,
                                   const OrderingDag& dag, const ReadsFrom& rf,
                                   Convergence mode) {
  struct Seen {
    KeyId key;
    std::vector<OpId> preds;
    Value value;
  };
  std::vector<Seen> seen;

  for (OpId r : dag.nodes()) {
    const auto& reader = timeline.op(r);
    if (!reader.is_reader()) continue;
    auto src = rf.source(r);
    if (!src) return false;
    if (*src != kInitialSource) {
      if (!dag.contains(*src)) return false;
      const auto& w = timeline.op(*src);
      if (w.key != reader.key || !w.is_update()) return false;
    }
    const Value v = source_value(timeline, *src);
    if (!reader.accepts(v)) return false;

    auto preds = immediate_predecessors(timeline, dag, r);
    if (*src == kInitialSource) {
      if (!preds.empty()) return false;
    } else if (!std::binary_search(preds.begin(), preds.end(), *src)) {
      return false;
    }
    if (mode == Convergence::SO && preds.size() > 1) return false;
    if (mode == Convergence::CPO) seen.push_back({reader.key, std::move(preds), v});
  }

  if (mode == Convergence::CPO) {
    for (std::size_t i = 0; i < seen.size(); ++i) {
      for (std::size_t j = i + 1; j < seen.size(); ++j) {
        if (seen[i].key == seen[j].key && seen[i].preds == seen[j].preds &&
            seen[i].value != seen[j].value)
          return false;
      }
    }
  }
  return true;
}

bool is_serial_order(const Timeline& timeline, const OrderingDag& dag) {
  const auto& nodes = dag.nodes();
  auto updates_before = [&](std::size_t i) {
    std::vector<std::uint64_t> row(dag.predecessors(i).begin(),
                                   dag.predecessors(i).end());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (!timeline.op(nodes[j]).is_update()) row[j / 64] &= ~(std::uint64_t{1} << (j % 64));
    }
    return row;
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (dag.reaches(i, j) || dag.reaches(j, i)) continue;
      const auto& a = timeline.op(nodes[i]);
      const auto& b = timeline.op(nodes[j]);
      if (!a.is_pure_read() || !b.is_pure_read()) return false;
      if (updates_before(i) != updates_before(j)) return false;
    }
  }
  return true;
}

std::string witness_text(const OrderingDag& dag, const ReadsFrom& rf) {
  std::ostringstream os;
  for (auto [a, b] : dag.edges()) os << a << " -> " << b << "\n";
  for (auto [r, s] : rf.entries()) {
    if (!dag.contains(r)) continue;
    os << r << " <- ";
    if (s == kInitialSource) {
      os << "init";
    } else {
      os << s;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace sop
