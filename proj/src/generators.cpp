#include "sop/generators.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <stdexcept>

namespace sop {

void GenParams::validate() const {
  switch (level) {
    case LevelId::Linearizability:
    case LevelId::Sequential:
    case LevelId::CausalPlus:
    case LevelId::PRAM:
    case LevelId::Eventual:
      break;
    default:
      throw std::invalid_argument("no generator for level " + std::string(level_name(level)));
  }
  if (clients == 0 || keys == 0) throw std::invalid_argument("clients and keys must be positive");
  if (read_fraction < 0 || cas_fraction < 0 || read_fraction + cas_fraction > 1)
    throw std::invalid_argument("read and cas fractions must be non-negative and sum to at most 1");
  if (mean_replication_delay <= 0) throw std::invalid_argument("replication delay must be positive");
  if (clock_skew < 0 || max_value < 0) throw std::invalid_argument("skew and max value must be non-negative");
}

namespace {

using Stamp = std::pair<std::uint64_t, std::uint32_t>;  // (lamport, client)

struct Message {
  ClientId origin;
  std::uint64_t seq;  // per-origin sequence number, from 1
  KeyId key;
  Value value;
  Stamp stamp;
  std::vector<std::uint64_t> clock;
  bool from_cas = false;
};

struct Replica {
  std::vector<Value> value;
  std::vector<Stamp> stamp;
  std::vector<std::uint64_t> clock;  // updates applied per origin
  std::uint64_t lamport = 0;
  std::vector<std::size_t> buffer;
};

enum class Step : std::uint8_t { Invoke, Effect, Complete, Deliver };

struct Scheduled {
  TimeNs time;
  std::uint64_t order;
  Step step;
  std::size_t who;
  std::size_t message = 0;

  bool operator>(const Scheduled& o) const {
    return std::tie(time, order) > std::tie(o.time, o.order);
  }
};

struct Pending {
  OpKind kind;
  KeyId key = 0;
  std::optional<Value> observed;
  bool failed = false;
  TimeNs invoked = 0;
};

class Simulation {
 public:
  explicit Simulation(const GenParams& p) : p_(p), rng_(p.seed) {
    const std::size_t c = p.clients;
    const std::size_t k = p.keys;
    pending_.resize(c);
    last_seen_.assign(c, std::vector<Value>(k, kInitialValue));
    skew_.assign(c, 0);
    if (p.level != LevelId::Linearizability && p.clock_skew > 0) {
      for (auto& s : skew_) s = uniform(0, p.clock_skew);
    }
    store_.assign(k, kInitialValue);
    key_log_.assign(k, {});
    frontier_.assign(c, 0);
    replicas_.resize(c);
    for (auto& r : replicas_) {
      r.value.assign(k, kInitialValue);
      r.stamp.assign(k, {0, 0});
      r.clock.assign(c, 0);
    }
    sent_.assign(c, 0);
  }

  std::vector<HistoryEvent> run();

 private:
  TimeNs uniform(TimeNs lo, TimeNs hi) {
    return std::uniform_int_distribution<TimeNs>(lo, hi)(rng_);
  }
  double unit() { return std::uniform_real_distribution<double>(0, 1)(rng_); }
  TimeNs delay() {
    std::exponential_distribution<double> d(1.0 / static_cast<double>(p_.mean_replication_delay));
    return 1 + static_cast<TimeNs>(d(rng_));
  }
  Value next_value() {
    if (p_.max_value > 0) return uniform(1, p_.max_value);
    return ++fresh_;
  }
  void schedule(TimeNs t, Step s, std::size_t who, std::size_t msg = 0) {
    queue_.push({t, order_++, s, who, msg});
  }
  void record(std::size_t client, Phase phase, const Pending& op, TimeNs t,
              std::optional<Value> value) {
    HistoryEvent ev;
    ev.client = "c" + std::to_string(client);
    ev.phase = phase;
    ev.kind = op.kind;
    ev.key = "k" + std::to_string(op.key);
    ev.value = value;
    ev.time = t + skew_[client];
    events_.push_back(std::move(ev));
  }

  void invoke(std::size_t c, TimeNs now);
  void effect(std::size_t c, TimeNs now);
  void effect_linearizable(Pending& op);
  void effect_sequential(std::size_t c, Pending& op);
  void effect_replica(std::size_t c, Pending& op, TimeNs now);
  void local_update(std::size_t c, KeyId key, Value v, TimeNs now, bool apply_now,
                    bool from_cas = false);
  void deliver(std::size_t replica, std::size_t msg);
  bool deliverable(const Replica& r, const Message& m) const;
  void apply(Replica& r, const Message& m);

  GenParams p_;
  std::mt19937_64 rng_;
  std::priority_queue<Scheduled, std::vector<Scheduled>, std::greater<>> queue_;
  std::uint64_t order_ = 0;
  std::size_t issued_ = 0;
  Value fresh_ = 0;
  std::vector<Pending> pending_;
  std::vector<std::vector<Value>> last_seen_;
  std::vector<TimeNs> skew_;
  std::vector<HistoryEvent> events_;

  std::vector<Value> store_;  // linearizable
  // sequential: per key, (log length after the update, value)
  std::vector<std::vector<std::pair<std::size_t, Value>>> key_log_;
  std::size_t log_size_ = 0;
  std::vector<std::size_t> frontier_;

  std::vector<Replica> replicas_;
  std::vector<Message> messages_;
  std::vector<std::uint64_t> sent_;
};

void Simulation::invoke(std::size_t c, TimeNs now) {
  if (issued_ >= p_.ops) return;
  ++issued_;
  Pending op;
  op.key = static_cast<KeyId>(uniform(0, static_cast<TimeNs>(p_.keys) - 1));
  const double roll = unit();
  if (roll < p_.read_fraction) {
    op.kind = OpKind::read();
  } else if (roll < p_.read_fraction + p_.cas_fraction) {
    const Value expected = unit() < 0.75 ? last_seen_[c][op.key]
                                         : (p_.max_value > 0 ? uniform(0, p_.max_value)
                                                             : uniform(0, fresh_));
    op.kind = OpKind::cas(expected, next_value());
  } else {
    op.kind = OpKind::write(next_value());
  }
  op.invoked = now;
  pending_[c] = op;
  record(c, Phase::Invoke, op, now, std::nullopt);
  schedule(now + uniform(1, 100), Step::Effect, c);
}

void Simulation::effect_linearizable(Pending& op) {
  Value& cur = store_[op.key];
  switch (op.kind.type) {
    case OpType::Read: op.observed = cur; break;
    case OpType::Write: cur = op.kind.value; break;
    case OpType::Cas:
      if (cur == op.kind.expected) {
        cur = op.kind.desired;
      } else {
        op.failed = true;
      }
      break;
  }
}

void Simulation::effect_sequential(std::size_t c, Pending& op) {
  auto& log = key_log_[op.key];
  auto value_at = [&](std::size_t prefix) {
    Value v = kInitialValue;
    for (const auto& [pos, val] : log) {
      if (pos > prefix) break;
      v = val;
    }
    return v;
  };
  auto append = [&](Value v) {
    log.emplace_back(++log_size_, v);
    frontier_[c] = log_size_;
  };
  switch (op.kind.type) {
    case OpType::Read: {
      const std::size_t slack = log_size_ - frontier_[c];
      const auto back = static_cast<std::size_t>(
          uniform(0, static_cast<TimeNs>(std::min<std::size_t>(slack, 4))));
      frontier_[c] = log_size_ - back;
      op.observed = value_at(frontier_[c]);
      break;
    }
    case OpType::Write: append(op.kind.value); break;
    case OpType::Cas:
      if (value_at(log_size_) == op.kind.expected) {
        append(op.kind.desired);
      } else {
        op.failed = true;
        frontier_[c] = log_size_;
      }
      break;
  }
}

bool Simulation::deliverable(const Replica& r, const Message& m) const {
  switch (p_.level) {
    case LevelId::PRAM:
      // A Cas depends on whatever it read, so it waits for its origin's view.
      if (!m.from_cas) return m.seq == r.clock[m.origin] + 1;
      [[fallthrough]];
    case LevelId::CausalPlus:
      for (std::size_t k = 0; k < m.clock.size(); ++k) {
        if (k == m.origin) {
          if (m.clock[k] != r.clock[k] + 1) return false;
        } else if (m.clock[k] > r.clock[k]) {
          return false;
        }
      }
      return true;
    default: return true;
  }
}

void Simulation::apply(Replica& r, const Message& m) {
  r.clock[m.origin] = std::max(r.clock[m.origin], m.seq);
  r.lamport = std::max(r.lamport, m.stamp.first);
  if (m.stamp > r.stamp[m.key]) {
    r.value[m.key] = m.value;
    r.stamp[m.key] = m.stamp;
  }
}

void Simulation::deliver(std::size_t replica, std::size_t msg) {
  Replica& r = replicas_[replica];
  r.buffer.push_back(msg);
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < r.buffer.size(); ++i) {
      const Message& m = messages_[r.buffer[i]];
      if (!deliverable(r, m)) continue;
      apply(r, m);
      r.buffer.erase(r.buffer.begin() + static_cast<std::ptrdiff_t>(i));
      progress = true;
      break;
    }
  }
}

void Simulation::local_update(std::size_t c, KeyId key, Value v, TimeNs now, bool apply_now,
                              bool from_cas) {
  Replica& r = replicas_[c];
  Message m;
  m.origin = static_cast<ClientId>(c);
  m.seq = ++sent_[c];
  m.key = key;
  m.value = v;
  m.from_cas = from_cas;
  m.stamp = {++r.lamport, static_cast<std::uint32_t>(c)};
  const std::size_t id = messages_.size();
  if (apply_now) {
    r.clock[c] = m.seq;
    r.value[key] = v;
    r.stamp[key] = m.stamp;
  }
  m.clock = r.clock;
  if (!apply_now) m.clock[c] = m.seq;
  messages_.push_back(std::move(m));
  for (std::size_t d = 0; d < replicas_.size(); ++d) {
    if (d != c || !apply_now) schedule(now + delay(), Step::Deliver, d, id);
  }
}

void Simulation::effect_replica(std::size_t c, Pending& op, TimeNs now) {
  Replica& r = replicas_[c];
  switch (op.kind.type) {
    case OpType::Read: op.observed = r.value[op.key]; break;
    case OpType::Write:
      local_update(c, op.key, op.kind.value, now, p_.level != LevelId::Eventual);
      break;
    case OpType::Cas:
      if (r.value[op.key] == op.kind.expected) {
        local_update(c, op.key, op.kind.desired, now, true, true);
      } else {
        op.failed = true;
      }
      break;
  }
}

void Simulation::effect(std::size_t c, TimeNs now) {
  Pending& op = pending_[c];
  switch (p_.level) {
    case LevelId::Linearizability: effect_linearizable(op); break;
    case LevelId::Sequential: effect_sequential(c, op); break;
    default: effect_replica(c, op, now); break;
  }
  if (op.observed) last_seen_[c][op.key] = *op.observed;
  if (op.kind.type == OpType::Write) last_seen_[c][op.key] = op.kind.value;
  if (op.kind.type == OpType::Cas && !op.failed) last_seen_[c][op.key] = op.kind.desired;
  schedule(now + uniform(1, 100), Step::Complete, c);
}

std::vector<HistoryEvent> Simulation::run() {
  for (std::size_t c = 0; c < p_.clients; ++c) schedule(uniform(0, 20), Step::Invoke, c);
  while (!queue_.empty()) {
    const Scheduled s = queue_.top();
    queue_.pop();
    switch (s.step) {
      case Step::Invoke: invoke(s.who, s.time); break;
      case Step::Effect: effect(s.who, s.time); break;
      case Step::Complete: {
        const Pending& op = pending_[s.who];
        record(s.who, op.failed ? Phase::Fail : Phase::Ok, op, s.time, op.observed);
        schedule(s.time + uniform(0, 50), Step::Invoke, s.who);
        break;
      }
      case Step::Deliver: deliver(s.who, s.message); break;
    }
  }
  std::stable_sort(events_.begin(), events_.end(),
                   [](const HistoryEvent& a, const HistoryEvent& b) { return a.time < b.time; });
  for (std::size_t i = 0; i < events_.size(); ++i) events_[i].index = static_cast<std::int64_t>(i);
  return events_;
}

// Builds appended patterns on fresh clients and keys.
class Appender {
 public:
  explicit Appender(std::vector<HistoryEvent> base) : events_(std::move(base)) {
    for (const auto& e : events_) {
      time_ = std::max(time_, e.time);
      index_ = std::max(index_, e.index);
    }
  }

  std::string client(std::string_view role) { return "inject-" + std::string(role); }
  std::string key(std::string_view role) { return "inject-" + std::string(role); }

  // Runs the op alone: invoke and complete strictly after everything so far.
  void op(const std::string& client, OpKind kind, const std::string& key,
          std::optional<Value> observed = std::nullopt) {
    HistoryEvent inv;
    inv.client = client;
    inv.phase = Phase::Invoke;
    inv.kind = kind;
    inv.key = key;
    inv.index = ++index_;
    inv.time = (time_ += 10);
    events_.push_back(inv);
    HistoryEvent done = inv;
    done.phase = Phase::Ok;
    done.value = observed;
    done.index = ++index_;
    done.time = (time_ += 10);
    events_.push_back(done);
  }

  std::vector<HistoryEvent> take() { return std::move(events_); }

 private:
  std::vector<HistoryEvent> events_;
  TimeNs time_ = 0;
  std::int64_t index_ = -1;
};

}  // namespace

std::vector<HistoryEvent> generate(const GenParams& params) {
  params.validate();
  if (params.ops == 0) return {};
  return Simulation(params).run();
}

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::RT: return "rt";
    case Violation::CASL: return "casl";
    case Violation::WFR: return "wfr";
    case Violation::MW: return "mw";
    case Violation::MR: return "mr";
    case Violation::RMW: return "rmw";
    case Violation::WellFormedness: return "well-formedness";
  }
  return "?";
}

std::optional<Violation> parse_violation(std::string_view name) {
  for (auto v : {Violation::RT, Violation::CASL, Violation::WFR, Violation::MW, Violation::MR,
                 Violation::RMW, Violation::WellFormedness}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

std::vector<HistoryEvent> inject_violation(const std::vector<HistoryEvent>& history,
                                           Violation violation) {
  if (history.empty()) throw std::invalid_argument("history too small to inject a violation");

  if (violation == Violation::WellFormedness) {
    Value top = kInitialValue;
    for (const auto& e : history) {
      if (e.kind.type == OpType::Write) top = std::max(top, e.kind.value);
      if (e.kind.type == OpType::Cas) top = std::max({top, e.kind.expected, e.kind.desired});
      if (e.value) top = std::max(top, *e.value);
    }
    auto out = history;
    for (auto& e : out) {
      if (e.phase == Phase::Ok && e.kind.type == OpType::Read && e.value) {
        e.value = top + 1000;
        return out;
      }
    }
    throw std::invalid_argument("history too small: no completed read to corrupt");
  }

  Appender a(history);
  const auto w = OpKind::write(1);
  const auto w2 = OpKind::write(2);
  const auto r = OpKind::read();
  switch (violation) {
    case Violation::RT: {
      // The read starts after 2 is acknowledged yet returns 1.
      const auto x = a.key("rt");
      a.op(a.client("rt-writer"), w, x);
      a.op(a.client("rt-writer"), w2, x);
      a.op(a.client("rt-reader"), r, x, 1);
      break;
    }
    case Violation::MW: {
      const auto x = a.key("mw");
      a.op(a.client("mw-writer"), w, x);
      a.op(a.client("mw-writer"), w2, x);
      a.op(a.client("mw-reader"), r, x, 2);
      a.op(a.client("mw-reader"), r, x, 1);
      break;
    }
    case Violation::MR: {
      const auto x = a.key("mr");
      a.op(a.client("mr-writer"), w, x);
      a.op(a.client("mr-reader"), r, x, 1);
      a.op(a.client("mr-reader"), r, x, 0);
      break;
    }
    case Violation::RMW: {
      const auto x = a.key("rmw");
      a.op(a.client("rmw"), w, x);
      a.op(a.client("rmw"), r, x, 0);
      break;
    }
    case Violation::WFR: {
      const auto x = a.key("wfr-x");
      const auto y = a.key("wfr-y");
      a.op(a.client("wfr-writer"), w, x);
      a.op(a.client("wfr-relay"), r, x, 1);
      a.op(a.client("wfr-relay"), w, y);
      a.op(a.client("wfr-reader"), r, y, 1);
      a.op(a.client("wfr-reader"), r, x, 0);
      break;
    }
    case Violation::CASL: {
      const auto x = a.key("casl-x");
      const auto y = a.key("casl-y");
      const auto z = a.key("casl-z");
      a.op(a.client("casl-a"), w, x);
      a.op(a.client("casl-a"), w, y);
      a.op(a.client("casl-b"), r, y, 1);
      a.op(a.client("casl-b"), w, z);
      a.op(a.client("casl-c"), r, z, 1);
      a.op(a.client("casl-c"), r, x, 0);
      break;
    }
    case Violation::WellFormedness: break;
  }
  return a.take();
}

}  // namespace sop
