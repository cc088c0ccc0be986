#include "sop/history.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace sop {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kFields[] = {"index", "f", "client", "phase",
                                        "key", "value", "time"};

Phase parse_phase(const std::string& s, std::size_t line) {
  if (s == "invoke") return Phase::Invoke;
  if (s == "ok") return Phase::Ok;
  if (s == "fail") return Phase::Fail;
  if (s == "info") return Phase::Info;
  throw HistoryError(line, "unknown phase \"" + s + "\"");
}

std::int64_t require_int(const Json& j, std::string_view field,
                         std::size_t line) {
  if (!j.is_number_integer())
    throw HistoryError(line, "field \"" + std::string(field) +
                                 "\" must be an integer");
  return j.get<std::int64_t>();
}

HistoryEvent parse_event(std::string_view text, std::size_t line) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw HistoryError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw HistoryError(line, "expected a JSON object");
  for (const auto& [name, _] : j.items()) {
    if (std::find(std::begin(kFields), std::end(kFields), name) ==
        std::end(kFields))
      throw HistoryError(line, "unexpected field \"" + name + "\"");
  }
  for (auto name : kFields) {
    if (!j.contains(name))
      throw HistoryError(line, "missing field \"" + std::string(name) + "\"");
  }

  HistoryEvent ev;
  ev.index = require_int(j["index"], "index", line);
  ev.time = require_int(j["time"], "time", line);
  if (!j["client"].is_string()) throw HistoryError(line, "client must be a string");
  if (!j["key"].is_string()) throw HistoryError(line, "key must be a string");
  if (!j["phase"].is_string()) throw HistoryError(line, "phase must be a string");
  if (!j["f"].is_string()) throw HistoryError(line, "f must be a string");
  ev.client = j["client"].get<std::string>();
  ev.key = j["key"].get<std::string>();
  ev.phase = parse_phase(j["phase"].get<std::string>(), line);

  const auto f = j["f"].get<std::string>();
  const Json& value = j["value"];
  if (f == "read") {
    ev.kind = OpKind::read();
    if (!value.is_null()) ev.value = require_int(value, "value", line);
  } else if (f == "write") {
    ev.kind = OpKind::write(require_int(value, "value", line));
  } else if (f == "cas") {
    if (!value.is_array() || value.size() != 2)
      throw HistoryError(line, "cas value must be [expected, new]");
    ev.kind = OpKind::cas(require_int(value[0], "value", line),
                          require_int(value[1], "value", line));
  } else {
    throw HistoryError(line, "unknown operation \"" + f + "\"");
  }
  return ev;
}

Json event_to_json(const HistoryEvent& ev) {
  Json j;
  j["index"] = ev.index;
  j["client"] = ev.client;
  j["phase"] = std::string(to_string(ev.phase));
  j["f"] = std::string(to_string(ev.kind.type));
  j["key"] = ev.key;
  switch (ev.kind.type) {
    case OpType::Read:
      j["value"] = ev.value ? Json(*ev.value) : Json(nullptr);
      break;
    case OpType::Write:
      j["value"] = ev.kind.value;
      break;
    case OpType::Cas:
      j["value"] = Json::array({ev.kind.expected, ev.kind.desired});
      break;
  }
  j["time"] = ev.time;
  return j;
}

}  // namespace

HistoryError::HistoryError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

HistoryError::HistoryError(const std::string& what)
    : std::runtime_error(what) {}

bool OperationSpan::accepts(Value v) const {
  switch (kind.type) {
    case OpType::Read:
      return observed && *observed == v;
    case OpType::Write:
      return false;
    case OpType::Cas:
      return outcome == Outcome::CasFailed ? v != kind.expected
                                           : v == kind.expected;
  }
  return false;
}

TimeNs OperationSpan::end_or_max() const {
  return end ? *end : std::numeric_limits<TimeNs>::max();
}

Timeline::Timeline(std::vector<OperationSpan> ops,
                   std::vector<std::string> clients,
                   std::vector<std::string> keys)
    : ops_(std::move(ops)),
      clients_(std::move(clients)),
      keys_(std::move(keys)),
      queues_(clients_.size()),
      position_(ops_.size()) {
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (ops_[i].id != i) throw HistoryError("op ids must be dense and ordered");
    auto& q = queues_.at(ops_[i].client);
    position_[i] = q.size();
    q.push_back(static_cast<OpId>(i));
  }
}

std::optional<KeyId> Timeline::find_key(std::string_view name) const {
  auto it = std::find(keys_.begin(), keys_.end(), name);
  if (it == keys_.end()) return std::nullopt;
  return static_cast<KeyId>(it - keys_.begin());
}

bool Timeline::program_order(OpId a, OpId b) const {
  return ops_.at(a).client == ops_.at(b).client && position_[a] < position_[b];
}

std::vector<HistoryEvent> parse_history(std::string_view text) {
  std::vector<HistoryEvent> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    auto ev = parse_event(line, line_no);
    if (!events.empty()) {
      if (ev.index == events.back().index)
        throw HistoryError(line_no, "duplicate index " + std::to_string(ev.index));
      if (ev.index < events.back().index)
        throw HistoryError(line_no, "index " + std::to_string(ev.index) +
                                        " is not increasing");
      if (ev.time < events.back().time)
        throw HistoryError(line_no, "time regression");
    }
    events.push_back(std::move(ev));
  }
  return events;
}

std::string serialize_history(std::span<const HistoryEvent> events) {
  std::string out;
  for (const auto& ev : events) {
    out += event_to_json(ev).dump();
    out += '\n';
  }
  return out;
}

std::vector<HistoryEvent> read_history_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HistoryError("cannot open history file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_history(buf.str());
}

void write_history_file(const std::string& path,
                        std::span<const HistoryEvent> events) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw HistoryError("cannot write history file " + path);
  out << serialize_history(events);
}

Timeline build_timeline(std::span<const HistoryEvent> events) {
  struct Pending {
    const HistoryEvent* invoke = nullptr;
    bool retired = false;  // an indeterminate op was the client's last
  };
  struct Draft {
    OperationSpan span;
    std::int64_t invoke_index;
  };

  std::map<std::string, ClientId> client_ids;
  std::vector<std::string> clients;
  std::map<std::string, KeyId> key_ids;
  std::vector<std::string> keys;
  std::vector<Pending> pending;
  std::vector<Draft> drafts;

  auto intern_client = [&](const std::string& name) {
    auto [it, inserted] =
        client_ids.emplace(name, static_cast<ClientId>(clients.size()));
    if (inserted) {
      clients.push_back(name);
      pending.emplace_back();
    }
    return it->second;
  };
  auto intern_key = [&](const std::string& name) {
    auto [it, inserted] = key_ids.emplace(name, static_cast<KeyId>(keys.size()));
    if (inserted) keys.push_back(name);
    return it->second;
  };
  auto make_span = [&](const HistoryEvent& inv, ClientId c) {
    OperationSpan s;
    s.client = c;
    s.key = intern_key(inv.key);
    s.kind = inv.kind;
    s.start = inv.time;
    return s;
  };
  auto retire_indeterminate = [&](const HistoryEvent& inv, ClientId c) {
    // An unacknowledged read constrains nothing; updates may have landed.
    if (inv.kind.type != OpType::Read) {
      auto s = make_span(inv, c);
      s.outcome = Outcome::Indeterminate;
      drafts.push_back({s, inv.index});
    }
    pending[c].retired = true;
  };

  for (const auto& ev : events) {
    const ClientId c = intern_client(ev.client);
    auto& p = pending[c];
    const std::string where = "event " + std::to_string(ev.index) +
                              " (client " + ev.client + ")";
    if (ev.phase == Phase::Invoke) {
      if (p.invoke)
        throw HistoryError(where + ": invoked while another operation is "
                                   "outstanding (closed-loop violation)");
      if (p.retired)
        throw HistoryError(where + ": client invoked again after an "
                                   "indeterminate operation");
      p.invoke = &ev;
      continue;
    }
    if (!p.invoke)
      throw HistoryError(where + ": completion without a matching invoke");
    const HistoryEvent& inv = *p.invoke;
    p.invoke = nullptr;
    if (inv.kind.type != ev.kind.type || inv.key != ev.key)
      throw HistoryError(where + ": completion does not match its invoke");
    if (ev.kind.type != OpType::Read && !(ev.kind == inv.kind))
      throw HistoryError(where + ": completion arguments differ from invoke");

    if (ev.phase == Phase::Info) {
      retire_indeterminate(inv, c);
      continue;
    }
    if (ev.time <= inv.time)
      throw HistoryError(where + ": completion must be later than its invoke");
    if (ev.phase == Phase::Fail && inv.kind.type != OpType::Cas) continue;

    auto s = make_span(inv, c);
    s.end = ev.time;
    if (ev.phase == Phase::Fail) {
      s.outcome = Outcome::CasFailed;
    } else if (inv.kind.type == OpType::Read) {
      if (!ev.value)
        throw HistoryError(where + ": read completion must carry a value");
      s.observed = ev.value;
    } else if (inv.kind.type == OpType::Cas) {
      s.observed = inv.kind.expected;
    }
    drafts.push_back({s, inv.index});
  }
  for (ClientId c = 0; c < pending.size(); ++c) {
    if (pending[c].invoke) retire_indeterminate(*pending[c].invoke, c);
  }

  std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    return a.invoke_index < b.invoke_index;
  });
  std::vector<OperationSpan> ops;
  ops.reserve(drafts.size());
  for (auto& d : drafts) {
    d.span.id = static_cast<OpId>(ops.size());
    ops.push_back(d.span);
  }
  return Timeline(std::move(ops), std::move(clients), std::move(keys));
}

std::set<Value> written_values(const Timeline& timeline, KeyId key) {
  std::set<Value> out{kInitialValue};
  for (const auto& op : timeline.ops()) {
    if (op.key == key && op.is_update()) out.insert(op.written_value());
  }
  return out;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Invoke: return "invoke";
    case Phase::Ok: return "ok";
    case Phase::Fail: return "fail";
    case Phase::Info: return "info";
  }
  return "?";
}

std::string_view to_string(OpType type) {
  switch (type) {
    case OpType::Read: return "read";
    case OpType::Write: return "write";
    case OpType::Cas: return "cas";
  }
  return "?";
}

std::string describe(const Timeline& timeline, OpId id) {
  const auto& op = timeline.op(id);
  std::ostringstream os;
  const auto& client = timeline.clients().at(op.client);
  const auto& key = timeline.keys().at(op.key);
  switch (op.kind.type) {
    case OpType::Read:
      os << "R(" << client << "," << key << ")=" << *op.observed;
      break;
    case OpType::Write:
      os << "W(" << client << "," << key << "," << op.kind.value << ")";
      break;
    case OpType::Cas:
      os << "CAS(" << client << "," << key << "," << op.kind.expected << "->"
         << op.kind.desired << ")";
      if (op.outcome == Outcome::CasFailed) os << "!";
      break;
  }
  if (op.indeterminate()) os << "?";
  return os.str();
}

}  // namespace sop
