#pragma once

#include <chrono>
#include <cstdint>

#include "sop/search.hpp"

namespace sop::detail {

using Clock = std::chrono::steady_clock;

/// Counts states against the budget and watches the wall clock.
class Meter {
 public:
  Meter(std::uint64_t max_states, Clock::time_point deadline)
      : max_states_(max_states), deadline_(deadline) {}

  /// False once the budget is gone.
  bool tick() {
    ++states_;
    if (states_ > max_states_) return false;
    if ((states_ & 0xFF) == 0 && Clock::now() > deadline_) return false;
    return true;
  }
  std::uint64_t states() const { return states_; }

 private:
  std::uint64_t states_ = 0;
  std::uint64_t max_states_;
  Clock::time_point deadline_;
};

inline Clock::time_point deadline_for(const SearchBudget& b) {
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(b.wall_timeout);
}

inline bool applies(const OperationSpan& op, Value current) {
  switch (op.kind.type) {
    case OpType::Read: return op.observed && *op.observed == current;
    case OpType::Write: return true;
    case OpType::Cas:
      return op.outcome == Outcome::CasFailed ? current != op.kind.expected
                                              : current == op.kind.expected;
  }
  return false;
}

}  // namespace sop::detail
