// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "sop/constraints.hpp"
#include "sop/generators.hpp"
#include "sop/levels.hpp"
#include "sop/oracle.hpp"
#include "sop/search.hpp"

using namespace sop;
using L = LevelId;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Verdict> verdicts(const ConformityReport& r) {
  std::vector<Verdict> out;
  for (const auto& lr : r.results) out.push_back(lr.verdict);
  return out;
}

ConsistencyLevel lvl(L id) { return {id, default_staleness_bound()}; }

int failures = 0;

void report(int n, bool ok, const std::string& what) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Counts Pass-above-Fail pairs in a verdict vector over all_levels().
int monotonicity_violations(const std::vector<Verdict>& v) {
  const auto levels = all_levels();
  int bad = 0;
  for (std::size_t a = 0; a < levels.size(); ++a)
    for (std::size_t b = 0; b < levels.size(); ++b)
      if (implies(levels[a], levels[b]) && v[a] == Verdict::Pass && v[b] == Verdict::Fail) ++bad;
  return bad;
}

struct Golden {
  std::string name;
  Timeline tl;
  std::vector<std::pair<L, Verdict>> expect;
};

std::vector<Golden> golden_cases() {
  using namespace sop::fixtures;
  std::vector<Golden> g;
  g.push_back({"a/R=2", register_pair(2), {{L::Linearizability, Verdict::Pass}}});
  g.push_back({"a/R=1", register_pair(1),
               {{L::Linearizability, Verdict::Fail}, {L::Sequential, Verdict::Pass}}});
  g.push_back({"b", non_local(), {{L::Sequential, Verdict::Fail}, {L::PerKeySequential, Verdict::Pass}}});
  g.push_back({"c", photo_album(0), {{L::CausalPlus, Verdict::Fail}, {L::Eventual, Verdict::Pass}}});
  g.push_back({"d", own_write_reorder(), {{L::Eventual, Verdict::Pass}, {L::PRAM, Verdict::Fail}}});
  g.push_back({"e", read_travels_back(),
               {{L::RegularSequential, Verdict::Pass}, {L::Linearizability, Verdict::Fail}}});
  Golden f{"f", register_pair(9), {}};
  for (const auto& l : all_levels())
    f.expect.push_back({l.id, l.id == L::Weak ? Verdict::Pass : Verdict::Fail});
  g.push_back(std::move(f));
  return g;
}

struct Suite {
  std::vector<std::vector<Verdict>> check;
  std::vector<std::vector<Verdict>> oracle;
};

void golden(Suite& suite) {
  bool ok = true;
  double slowest = 0;
  std::ostringstream notes;
  for (const auto& g : golden_cases()) {
    const auto t0 = Clock::now();
    auto r = check(g.tl, all_levels());
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    if (dt >= 1.0) {
      ok = false;
      notes << " " << g.name << " took " << dt << "s";
    }
    for (auto [id, want] : g.expect) {
      if (r.verdict(id) != want) {
        ok = false;
        notes << " " << g.name << " " << cli_name(id) << "=" << to_string(r.verdict(id));
      }
    }
    auto o = oracle_check_all(g.tl, all_levels());
    if (o != verdicts(r)) {
      ok = false;
      notes << " " << g.name << " disagrees with oracle";
    }
    suite.check.push_back(verdicts(r));
    suite.oracle.push_back(std::move(o));
  }
  std::ostringstream msg;
  msg << "golden examples a-f, slowest check " << slowest * 1000 << " ms" << notes.str();
  report(1, ok, msg.str());
}

void oracle_equivalence(Suite& suite) {
  constexpr std::uint64_t kSeeds = 1200;
  const auto levels = all_levels();
  const auto t0 = Clock::now();
  std::uint64_t mismatched = 0;
  std::uint64_t unknown = 0;
  std::uint64_t first_bad = 0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    auto tl = sop::testing::random_timeline(seed);
    auto c = verdicts(check(tl, levels));
    auto o = oracle_check_all(tl, levels);
    for (auto v : c)
      if (v == Verdict::Unknown) ++unknown;
    if (c != o && mismatched++ == 0) first_bad = seed;
    suite.check.push_back(std::move(c));
    suite.oracle.push_back(std::move(o));
  }
  const double dt = seconds_since(t0);
  std::ostringstream msg;
  msg << kSeeds << " random histories x 11 levels, " << mismatched << " mismatches, " << unknown
      << " unknown, " << dt << " s";
  if (mismatched) msg << " (first seed " << first_bad << ")";
  report(2, mismatched == 0 && unknown == 0 && dt <= 600, msg.str());
}

void monotonicity(const Suite& suite) {
  int bad = 0;
  for (const auto& v : suite.check) bad += monotonicity_violations(v);
  for (const auto& v : suite.oracle) bad += monotonicity_violations(v);
  std::ostringstream msg;
  msg << suite.check.size() << " histories, check and oracle vectors, " << bad << " violations";
  report(3, bad == 0, msg.str());
}

GenParams gen(L level, std::size_t clients, std::size_t keys, std::size_t ops, TimeNs delay,
              std::uint64_t seed) {
  GenParams p;
  p.level = level;
  p.clients = clients;
  p.keys = keys;
  p.ops = ops;
  p.mean_replication_delay = delay;
  p.seed = seed;
  return p;
}

void generators() {
  const L targets[] = {L::Linearizability, L::Sequential, L::CausalPlus, L::PRAM, L::Eventual};
  std::ostringstream notes;
  int misses = 0;
  for (L level : targets) {
    const bool serial = constraints_of(lvl(level)).convergence == Convergence::SO;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      // Small enough for the oracle, then large enough to need the search.
      auto small = build_timeline(generate(gen(level, 2, 2, 6, 200, seed)));
      auto big_p = serial ? gen(level, 4, 3, 200, 200, seed) : gen(level, 3, 2, 40, 200, seed);
      auto big = build_timeline(generate(big_p));
      const bool ok_small = oracle_check(small, lvl(level)) == Verdict::Pass;
      const bool ok_big = check(big, {lvl(level)}).verdict(level) == Verdict::Pass;
      if (!ok_small || !ok_big) {
        ++misses;
        notes << " " << cli_name(level) << "#" << seed << (ok_small ? "" : "(6 ops)")
              << (ok_big ? "" : "(large)");
      }
    }
  }

  struct Pair {
    L weaker, stronger;
    std::size_t ops;
    TimeNs delay;
  };
  const Pair pairs[] = {{L::Sequential, L::Linearizability, 30, 200},
                        {L::CausalPlus, L::Sequential, 20, 300},
                        {L::Eventual, L::CausalPlus, 20, 300}};
  std::ostringstream found;
  bool all_found = true;
  for (const auto& pr : pairs) {
    int first = -1;
    for (std::uint64_t seed = 0; seed < 100 && first < 0; ++seed) {
      auto tl = build_timeline(generate(gen(pr.weaker, 3, 2, pr.ops, pr.delay, seed)));
      auto r = check(tl, {lvl(pr.weaker), lvl(pr.stronger)});
      if (r.verdict(pr.weaker) == Verdict::Pass && r.verdict(pr.stronger) == Verdict::Fail)
        first = static_cast<int>(seed);
    }
    if (first < 0) all_found = false;
    found << " " << cli_name(pr.weaker) << "<" << cli_name(pr.stronger) << "@"
          << (first < 0 ? std::string("none") : std::to_string(first));
  }
  std::ostringstream msg;
  msg << "5 levels x 50 seeds, " << misses << " non-conforming" << notes.str()
      << "; discriminating seeds" << found.str();
  report(4, misses == 0 && all_found, msg.str());
}

void serial_performance() {
  double slowest = 0;
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto tl = build_timeline(generate(gen(L::Linearizability, 10, 3, 1000, 200, seed)));
    const auto t0 = Clock::now();
    auto r = check(tl, {lvl(L::Linearizability)});
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    ok = ok && r.verdict(L::Linearizability) == Verdict::Pass && dt <= 5.0;
  }
  std::ostringstream msg;
  msg << "linearizability on 10 clients x 1000 ops, 3 seeds, slowest " << slowest * 1000
      << " ms";
  report(5, ok, msg.str());
}

void session_guarantees() {
  using G = SessionGuarantee;
  const std::set<G> four{G::RMW, G::MW, G::MR, G::WFR};
  const std::set<G> three{G::RMW, G::MW, G::MR};
  constexpr std::uint64_t kSeeds = 400;
  int existential = 0;
  std::uint64_t per_candidate = 0;
  std::uint64_t candidates = 0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    auto tl = sop::testing::random_timeline(seed);
    auto valid = [&](const OrderingDag& d, const ReadsFrom& rf) {
      return validate_read_materialization(tl, d, rf, Convergence::NPO);
    };
    auto exists = [&](std::function<bool(const OrderingDag&, const ReadsFrom&)> pred) {
      return oracle_any(tl, [&](const OrderingDag& d, const ReadsFrom& rf) {
        return valid(d, rf) && pred(d, rf);
      });
    };
    const bool casl = exists([&](auto& d, auto& rf) { return check_casl(d, tl, rf); });
    const bool sg4 = exists([&](auto& d, auto& rf) { return check_session_guarantees(d, tl, rf, four); });
    const bool fifo = exists([&](auto& d, auto& rf) { return check_fifo(d, tl, rf); });
    const bool sg3 = exists([&](auto& d, auto& rf) { return check_session_guarantees(d, tl, rf, three); });
    if (casl != sg4) ++existential;
    if (fifo != sg3) ++existential;
    // Every materialized candidate that meets CASL (FIFO) also meets the
    // four (three) guarantees.
    oracle_any(tl, [&](const OrderingDag& d, const ReadsFrom& rf) {
      if (!valid(d, rf)) return false;
      ++candidates;
      if (check_casl(d, tl, rf) && !check_session_guarantees(d, tl, rf, four)) ++per_candidate;
      if (check_fifo(d, tl, rf) && !check_session_guarantees(d, tl, rf, three)) ++per_candidate;
      return false;
    });
  }
  std::ostringstream msg;
  msg << kSeeds << " random histories: " << existential
      << " existential mismatches (CASL vs 4 guarantees, FIFO vs 3); " << per_candidate
      << " per-candidate violations over " << candidates << " materialized candidates";
  report(6, existential == 0 && per_candidate == 0, msg.str());
}

void registry() {
  using C = Convergence;
  using R = RelationshipKind;
  using A = AvailabilityBound;
  struct Row {
    L id;
    C conv;
    R rel;
    A avail;
  };
  const Row table[] = {
      {L::Linearizability, C::SO, R::RT, A::WeaklyAvailable},
      {L::RegularSequential, C::SO, R::RTWandCASLR, A::WeaklyAvailable},
      {L::Sequential, C::SO, R::CASL, A::WeaklyAvailable},
      {L::BoundedStaleness, C::NPO, R::BoundedCasl, A::WeaklyAvailable},
      {L::RealTimeCausal, C::CPO, R::RTPrimeCASL, A::StickyAvailable},
      {L::CausalPlus, C::CPO, R::CASL, A::StickyAvailable},
      {L::Causal, C::NPO, R::CASL, A::StickyAvailable},
      {L::PRAM, C::NPO, R::FIFO, A::StickyAvailable},
      {L::PerKeySequential, C::CPO, R::CaslPerKey, A::StickyAvailable},
      {L::Eventual, C::CPO, R::None, A::TotallyAvailable},
      {L::Weak, C::NPO, R::None, A::TotallyAvailable},
  };
  int bad = 0;
  for (const auto& row : table) {
    const auto c = constraints_of(lvl(row.id));
    if (c.convergence != row.conv || c.relationship.kind != row.rel) ++bad;
    if (availability_upper_bound(lvl(row.id)) != row.avail) ++bad;
  }
  for (const auto& sg : session_guarantee_bounds()) {
    const A want = sg.guarantee == SessionGuarantee::RMW ? A::StickyAvailable : A::TotallyAvailable;
    if (sg.availability != want) ++bad;
  }
  if (all_levels().size() != std::size(table)) ++bad;
  std::ostringstream msg;
  msg << "11 level rows and 4 session-guarantee rows, " << bad << " mismatches";
  report(7, bad == 0, msg.str());
}

}  // namespace

int main() {
  Suite suite;
  golden(suite);
  oracle_equivalence(suite);
  monotonicity(suite);
  generators();
  serial_performance();
  session_guarantees();
  registry();
  std::printf("%s\n", failures == 0 ? "all criteria passed" : "some criteria failed");
  return failures == 0 ? 0 : 1;
}
