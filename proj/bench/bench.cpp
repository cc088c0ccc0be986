// Serial reference (threads=1) against the OpenMP kernels (threads=N).

#include <benchmark/benchmark.h>

#include <algorithm>
#include <thread>

#include "../tests/support.hpp"
#include "sop/generators.hpp"
#include "sop/levels.hpp"
#include "sop/oracle.hpp"
#include "sop/search.hpp"

using namespace sop;

namespace {

int wide() { return static_cast<int>(std::max(2U, std::thread::hardware_concurrency())); }

void thread_args(benchmark::internal::Benchmark* b) {
  b->Arg(1)->Arg(wide())->Unit(benchmark::kMillisecond);
}

const std::vector<Timeline>& oracle_corpus() {
  static const auto corpus = [] {
    std::vector<Timeline> out;
    for (std::uint64_t seed = 0; out.size() < 16; ++seed) {
      auto tl = sop::testing::random_timeline(seed);
      if (tl.size() >= 5) out.push_back(std::move(tl));
    }
    return out;
  }();
  return corpus;
}

// Eventual histories checked for Causal+: most fail, so every branch is
// explored.
const std::vector<Timeline>& partial_corpus() {
  static const auto corpus = [] {
    std::vector<Timeline> out;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      GenParams p;
      p.level = LevelId::Eventual;
      p.clients = 3;
      p.ops = 30;
      p.max_value = 2;
      p.mean_replication_delay = 300;
      p.seed = seed;
      out.push_back(build_timeline(generate(p)));
    }
    return out;
  }();
  return corpus;
}

void BM_OracleSweep(benchmark::State& state) {
  OracleOptions o;
  o.threads = static_cast<int>(state.range(0));
  const auto levels = all_levels();
  for (auto _ : state)
    for (const auto& tl : oracle_corpus()) benchmark::DoNotOptimize(oracle_check_all(tl, levels, o));
}
BENCHMARK(BM_OracleSweep)->Apply(thread_args);

void BM_PartialSearch(benchmark::State& state) {
  SearchOptions o;
  o.threads = static_cast<int>(state.range(0));
  const Relationship casl{RelationshipKind::CASL, {}};
  for (auto _ : state)
    for (const auto& tl : partial_corpus())
      benchmark::DoNotOptimize(check_partial_level(tl, Convergence::CPO, casl, o).verdict);
}
BENCHMARK(BM_PartialSearch)->Apply(thread_args);

void BM_CheckAllLevels(benchmark::State& state) {
  SearchOptions o;
  o.threads = static_cast<int>(state.range(0));
  const auto levels = all_levels();
  for (auto _ : state)
    for (const auto& tl : oracle_corpus()) benchmark::DoNotOptimize(check(tl, levels, o));
}
BENCHMARK(BM_CheckAllLevels)->Apply(thread_args);

void BM_Linearizability1000(benchmark::State& state) {
  GenParams p;
  p.level = LevelId::Linearizability;
  p.clients = 10;
  p.keys = 3;
  p.ops = 1000;
  const auto tl = build_timeline(generate(p));
  const std::vector<ConsistencyLevel> lin{{LevelId::Linearizability}};
  for (auto _ : state) benchmark::DoNotOptimize(check(tl, lin));
}
BENCHMARK(BM_Linearizability1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
