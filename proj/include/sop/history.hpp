#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sop {

using Value = std::int64_t;
using TimeNs = std::int64_t;
using OpId = std::uint32_t;
using ClientId = std::uint32_t;
using KeyId = std::uint32_t;

/// Every object starts out holding this value.
inline constexpr Value kInitialValue = 0;

enum class OpType : std::uint8_t { Read, Write, Cas };

/// Read, Write(value) or Cas(expected, new).
struct OpKind {
  OpType type = OpType::Read;
  Value value = 0;     // written value for Write
  Value expected = 0;  // Cas only
  Value desired = 0;   // Cas only

  static OpKind read() { return {}; }
  static OpKind write(Value v) { return {OpType::Write, v, 0, 0}; }
  static OpKind cas(Value expected, Value desired) {
    return {OpType::Cas, 0, expected, desired};
  }

  friend bool operator==(const OpKind&, const OpKind&) = default;
};

enum class Phase : std::uint8_t { Invoke, Ok, Fail, Info };

struct HistoryEvent {
  std::int64_t index = 0;
  std::string client;
  Phase phase = Phase::Invoke;
  OpKind kind;
  std::string key;
  std::optional<Value> value;  // observed value on a read completion
  TimeNs time = 0;

  friend bool operator==(const HistoryEvent&, const HistoryEvent&) = default;
};

enum class Outcome : std::uint8_t { Ok, CasFailed, Indeterminate };

/// One client operation between its invocation and acknowledgment.
struct OperationSpan {
  OpId id = 0;
  ClientId client = 0;
  KeyId key = 0;
  OpKind kind;
  TimeNs start = 0;
  std::optional<TimeNs> end;
  Outcome outcome = Outcome::Ok;
  std::optional<Value> observed;

  bool indeterminate() const { return outcome == Outcome::Indeterminate; }

  /// Write, or a Cas that installs its new value when it takes effect.
  bool is_update() const {
    return kind.type == OpType::Write ||
           (kind.type == OpType::Cas && outcome != Outcome::CasFailed);
  }
  /// Read, or any Cas (a failed Cas is a read constrained to differ from
  /// its expected value).
  bool is_reader() const { return kind.type != OpType::Write; }
  bool is_pure_read() const { return !is_update(); }

  /// Value installed by an update.
  Value written_value() const {
    return kind.type == OpType::Write ? kind.value : kind.desired;
  }

  /// Whether a source holding `v` can explain what this reader returned.
  bool accepts(Value v) const;

  /// Effective end for real-time comparisons; an indeterminate span never ends.
  TimeNs end_or_max() const;
};

class HistoryError : public std::runtime_error {
 public:
  HistoryError(std::size_t line, const std::string& what);
  explicit HistoryError(const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

/// Physical timeline: per-client queues of spans over a shared object pool.
/// Op ids are dense and follow invocation order.
class Timeline {
 public:
  Timeline() = default;
  Timeline(std::vector<OperationSpan> ops, std::vector<std::string> clients,
           std::vector<std::string> keys);

  std::span<const OperationSpan> ops() const { return ops_; }
  const OperationSpan& op(OpId id) const { return ops_.at(id); }
  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }

  const std::vector<std::vector<OpId>>& queues() const { return queues_; }
  const std::vector<std::string>& clients() const { return clients_; }
  const std::vector<std::string>& keys() const { return keys_; }
  std::optional<KeyId> find_key(std::string_view name) const;

  /// Position of an op within its client's queue.
  std::size_t position(OpId id) const { return position_.at(id); }

  /// True iff a comes before b in the same client's queue.
  bool program_order(OpId a, OpId b) const;

 private:
  std::vector<OperationSpan> ops_;
  std::vector<std::string> clients_;
  std::vector<std::string> keys_;
  std::vector<std::vector<OpId>> queues_;
  std::vector<std::size_t> position_;
};

std::vector<HistoryEvent> parse_history(std::string_view text);
std::string serialize_history(std::span<const HistoryEvent> events);

std::vector<HistoryEvent> read_history_file(const std::string& path);
void write_history_file(const std::string& path,
                        std::span<const HistoryEvent> events);

Timeline build_timeline(std::span<const HistoryEvent> events);

/// {0} plus every value any update on `key` may have installed, including
/// indeterminate updates.
std::set<Value> written_values(const Timeline& timeline, KeyId key);

std::string_view to_string(Phase phase);
std::string_view to_string(OpType type);
std::string describe(const Timeline& timeline, OpId id);

}  // namespace sop
