#pragma once

// Helpers shared by the unit tests, the acceptance binary and the bench.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "sop/history.hpp"

namespace sop::testing {

/// Collects operations as (client, key, span) and emits a well-ordered event
/// stream. Times are integers; ties keep insertion order.
class HistoryBuilder {
 public:
  HistoryBuilder& write(std::string c, std::string k, Value v, TimeNs s, TimeNs e) {
    return add(std::move(c), std::move(k), OpKind::write(v), s, e, Phase::Ok, std::nullopt);
  }
  HistoryBuilder& read(std::string c, std::string k, Value v, TimeNs s, TimeNs e) {
    return add(std::move(c), std::move(k), OpKind::read(), s, e, Phase::Ok, v);
  }
  HistoryBuilder& cas(std::string c, std::string k, Value from, Value to, TimeNs s, TimeNs e,
                      bool ok = true) {
    return add(std::move(c), std::move(k), OpKind::cas(from, to), s, e,
               ok ? Phase::Ok : Phase::Fail, std::nullopt);
  }
  /// Operation whose outcome was never learned.
  HistoryBuilder& unknown(std::string c, std::string k, OpKind kind, TimeNs s, TimeNs e) {
    return add(std::move(c), std::move(k), kind, s, e, Phase::Info, std::nullopt);
  }

  std::vector<HistoryEvent> events() const {
    std::vector<HistoryEvent> out = raw_;
    std::stable_sort(out.begin(), out.end(),
                     [](const HistoryEvent& a, const HistoryEvent& b) { return a.time < b.time; });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<std::int64_t>(i);
    return out;
  }
  Timeline timeline() const {
    auto ev = events();
    return build_timeline(ev);
  }

 private:
  HistoryBuilder& add(std::string c, std::string k, OpKind kind, TimeNs s, TimeNs e, Phase done,
                      std::optional<Value> observed) {
    HistoryEvent inv;
    inv.client = c;
    inv.key = k;
    inv.kind = kind;
    inv.time = s;
    HistoryEvent fin = inv;
    fin.phase = done;
    fin.time = e;
    fin.value = observed;
    inv.phase = Phase::Invoke;
    raw_.push_back(inv);
    raw_.push_back(fin);
    return *this;
  }

  std::vector<HistoryEvent> raw_;
};

struct RandomShape {
  std::size_t max_ops = 6;
  std::size_t clients = 2;
  std::size_t keys = 2;
  Value max_value = 2;
  double cas_fraction = 0.15;
  double unknown_fraction = 0.05;
};

/// Closed-loop history with random overlaps and values drawn from 0..max_value.
/// Updates write 1..max_value; reads may return anything in 0..max_value, so
/// some histories are ill-formed.
inline Timeline random_timeline(std::uint64_t seed, const RandomShape& shape = {}) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  const std::size_t n = static_cast<std::size_t>(uniform(1, static_cast<std::int64_t>(shape.max_ops)));
  std::vector<TimeNs> clock(shape.clients, 0);
  std::vector<bool> retired(shape.clients, false);
  HistoryBuilder h;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(shape.clients) - 1));
    if (retired[c]) {
      auto it = std::find(retired.begin(), retired.end(), false);
      if (it == retired.end()) break;
      c = static_cast<std::size_t>(it - retired.begin());
    }
    const std::string client = "c" + std::to_string(c);
    const std::string key = "k" + std::to_string(uniform(0, static_cast<std::int64_t>(shape.keys) - 1));
    const TimeNs start = clock[c] + uniform(0, 6);
    const TimeNs end = start + uniform(1, 8);
    clock[c] = end + 1;
    const double roll = std::uniform_real_distribution<double>(0, 1)(rng);
    if (coin(shape.unknown_fraction)) {
      h.unknown(client, key, roll < 0.5 ? OpKind::write(uniform(1, shape.max_value))
                                        : OpKind::cas(uniform(0, shape.max_value), uniform(1, shape.max_value)),
                start, end);
      retired[c] = true;
    } else if (roll < shape.cas_fraction) {
      h.cas(client, key, uniform(0, shape.max_value), uniform(1, shape.max_value), start, end,
            coin(0.6));
    } else if (roll < 0.5 + shape.cas_fraction / 2) {
      h.read(client, key, uniform(0, shape.max_value), start, end);
    } else {
      h.write(client, key, uniform(1, shape.max_value), start, end);
    }
  }
  return h.timeline();
}

}  // namespace sop::testing
