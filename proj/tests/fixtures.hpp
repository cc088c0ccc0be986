#pragma once

// Worked timelines used across the suites.

#include <optional>
#include <stdexcept>

#include "sop/ordering.hpp"
#include "support.hpp"

namespace sop::fixtures {

using testing::HistoryBuilder;

/// c: W(x,1), W(x,3), R(y); d: R(x), W(y,2).
inline Timeline two_client_workload() {
  return HistoryBuilder()
      .write("c", "x", 1, 0, 15)
      .read("d", "x", 1, 10, 22)
      .write("c", "x", 3, 25, 35)
      .write("d", "y", 2, 32, 45)
      .read("c", "y", 2, 48, 58)
      .timeline();
}

/// c: W(x,1), W(x,2); d: R(x)=dx, W(y,3); e: W(x,3), R(y)=3.
inline Timeline three_client_timeline(Value dx) {
  return HistoryBuilder()
      .write("c", "x", 1, 0, 12)
      .write("e", "x", 3, 7, 19)
      .write("c", "x", 2, 15, 27)
      .read("d", "x", dx, 30, 38)
      .write("d", "y", 3, 42, 54)
      .read("e", "y", 3, 57, 65)
      .timeline();
}

/// c: W(x,1); d: W(x,2), R(x)=v.
inline Timeline register_pair(Value v) {
  return HistoryBuilder()
      .write("c", "x", 1, 0, 12)
      .write("d", "x", 2, 20, 32)
      .read("d", "x", v, 36, 46)
      .timeline();
}

/// Each client writes both keys and reads back the other client's value.
inline Timeline non_local() {
  return HistoryBuilder()
      .write("c", "x", 1, 0, 12)
      .write("d", "y", 2, 0, 12)
      .write("c", "y", 1, 17, 29)
      .write("d", "x", 2, 17, 29)
      .read("c", "y", 2, 34, 46)
      .read("d", "x", 1, 34, 46)
      .timeline();
}

/// c stores a photo (s=1), then links it from the album (a=1); d follows
/// the link and reads the store, seeing `photo`.
inline Timeline photo_album(Value photo) {
  return HistoryBuilder()
      .write("c", "s", 1, 0, 15)
      .write("c", "a", 1, 20, 38)
      .read("d", "a", 1, 42, 52)
      .read("d", "s", photo, 55, 65)
      .timeline();
}

/// c writes 1 then 2 and reads back 1 while d writes 3.
inline Timeline own_write_reorder() {
  return HistoryBuilder()
      .write("c", "x", 1, 0, 12)
      .write("d", "x", 3, 15, 27)
      .write("c", "x", 2, 16, 28)
      .read("c", "x", 1, 34, 44)
      .timeline();
}

/// c's read returns its own older write after d's write completed.
inline Timeline read_travels_back() {
  return HistoryBuilder()
      .write("c", "x", 1, 0, 12)
      .write("d", "x", 2, 16, 28)
      .read("c", "x", 1, 32, 42)
      .timeline();
}

/// Two concurrent writes of 7 and 8, each client reading afterwards.
inline Timeline reminder(Value c_reads, Value d_reads) {
  return HistoryBuilder()
      .write("c", "t", 7, 0, 15)
      .write("d", "t", 8, 3, 18)
      .read("c", "t", c_reads, 24, 34)
      .read("d", "t", d_reads, 24, 34)
      .timeline();
}

/// c: W(x,1), W(y,1); d: W(x,2), R(y)=3; e: R(x)=ex, W(y,3).
inline Timeline causal_plus_timeline(Value ex) {
  return HistoryBuilder()
      .write("c", "x", 1, 0, 12)
      .write("d", "x", 2, 16, 28)
      .write("c", "y", 1, 17, 29)
      .read("e", "x", ex, 24, 34)
      .write("e", "y", 3, 37, 49)
      .read("d", "y", 3, 45, 55)
      .timeline();
}

/// Op id of the first op matching client, kind and key (value for writes).
inline OpId find_op(const Timeline& tl, std::string_view client, OpType type,
                    std::string_view key, std::optional<Value> value = std::nullopt) {
  for (const auto& op : tl.ops()) {
    if (tl.clients()[op.client] != client || tl.keys()[op.key] != key) continue;
    if (op.kind.type != type) continue;
    if (value && type == OpType::Write && op.kind.value != *value) continue;
    return op.id;
  }
  throw std::out_of_range("no such op");
}

inline OpId W(const Timeline& tl, std::string_view c, std::string_view k, Value v) {
  return find_op(tl, c, OpType::Write, k, v);
}
inline OpId R(const Timeline& tl, std::string_view c, std::string_view k) {
  return find_op(tl, c, OpType::Read, k);
}

/// Chain DAG over ids in the given order.
inline OrderingDag chain(std::vector<OpId> order) {
  std::vector<OpId> nodes = order;
  std::sort(nodes.begin(), nodes.end());
  OrderingDag d(nodes);
  for (std::size_t i = 1; i < order.size(); ++i) d.add_edge(order[i - 1], order[i]);
  return d;
}

/// Reads-from that takes each reader's source from its immediate
/// predecessor with the observed value.
inline ReadsFrom natural_rf(const Timeline& tl, const OrderingDag& dag) {
  ReadsFrom rf(tl.size());
  for (OpId id : dag.nodes()) {
    const auto& op = tl.op(id);
    if (!op.is_reader()) continue;
    OpId src = kInitialSource;
    for (OpId p : immediate_predecessors(tl, dag, id))
      if (op.accepts(tl.op(p).written_value())) src = p;
    rf.set(id, src);
  }
  return rf;
}

}  // namespace sop::fixtures
