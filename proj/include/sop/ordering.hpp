#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sop/history.hpp"

namespace sop {

enum class Convergence : std::uint8_t { SO, CPO, NPO };

std::string_view to_string(Convergence c);

/// Candidate ordering: a DAG over op ids with its transitive closure kept
/// up to date as edges are added. Values are cheap to copy, which is how the
/// search extends candidates.
class OrderingDag {
 public:
  OrderingDag() = default;
  explicit OrderingDag(std::vector<OpId> nodes);

  /// Builds from an edge list; nullopt if the edges contain a cycle.
  static std::optional<OrderingDag> from_edges(
      std::vector<OpId> nodes, std::span<const std::pair<OpId, OpId>> edges);

  const std::vector<OpId>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(OpId id) const {
    return id < index_.size() && index_[id] != kAbsent;
  }
  std::size_t index_of(OpId id) const;

  /// a ⇝ b: b is reachable from a. Irreflexive.
  bool ordered_before(OpId a, OpId b) const;
  bool unordered(OpId a, OpId b) const {
    return !ordered_before(a, b) && !ordered_before(b, a);
  }

  /// Adds a → b. Returns false and leaves the DAG untouched if that would
  /// close a cycle (including a == b).
  bool add_edge(OpId a, OpId b);

  /// Transitive reduction, sorted by (source, target).
  std::vector<std::pair<OpId, OpId>> edges() const;

  // Dense-index access for hot loops. Bit j of row i is set iff
  // node i ⇝ node j (successors) or node j ⇝ node i (predecessors).
  std::size_t words() const { return words_; }
  std::span<const std::uint64_t> successors(std::size_t i) const {
    return {succ_.data() + i * words_, words_};
  }
  std::span<const std::uint64_t> predecessors(std::size_t i) const {
    return {pred_.data() + i * words_, words_};
  }
  bool reaches(std::size_t i, std::size_t j) const {
    return (succ_[i * words_ + j / 64] >> (j % 64)) & 1U;
  }

  std::size_t hash() const;
  friend bool operator==(const OrderingDag& a, const OrderingDag& b) {
    return a.nodes_ == b.nodes_ && a.succ_ == b.succ_;
  }

 private:
  static constexpr std::uint32_t kAbsent = std::numeric_limits<std::uint32_t>::max();

  std::vector<OpId> nodes_;
  std::vector<std::uint32_t> index_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> succ_;
  std::vector<std::uint64_t> pred_;
};

inline constexpr OpId kInitialSource = std::numeric_limits<OpId>::max();

/// Which update each reader took its value from; kInitialSource stands for
/// the object's initial value.
class ReadsFrom {
 public:
  ReadsFrom() = default;
  explicit ReadsFrom(std::size_t id_space) : source_(id_space, kUnassigned) {}

  void set(OpId reader, OpId source);
  void clear(OpId reader);
  std::optional<OpId> source(OpId reader) const;
  std::vector<std::pair<OpId, OpId>> entries() const;

  friend bool operator==(const ReadsFrom&, const ReadsFrom&) = default;

 private:
  static constexpr OpId kUnassigned = kInitialSource - 1;
  std::vector<OpId> source_;
};

/// Value a source provides: the update's written value, or 0 for the
/// initial source.
Value source_value(const Timeline& timeline, OpId source);

/// Updates on key(r) that are ordered before r with no other update on the
/// same key in between. Empty means r sees the initial value.
std::vector<OpId> immediate_predecessors(const Timeline& timeline,
                                         const OrderingDag& dag, OpId r);

/// Checks that every reader's value is materialized by the ordering under
/// the given convergence mode.
bool validate_read_materialization(const Timeline& timeline,
                                   const OrderingDag& dag, const ReadsFrom& rf,
                                   Convergence mode);

/// Total order, except that pure reads seeing the same set of updates may be
/// left unordered with each other.
bool is_serial_order(const Timeline& timeline, const OrderingDag& dag);

/// "a -> b" lines for the reduced edge set, then "r <- s" reads-from lines
/// ("init" for the initial value), each sorted by op id.
std::string witness_text(const OrderingDag& dag, const ReadsFrom& rf);

}  // namespace sop
