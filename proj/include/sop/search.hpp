#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sop/levels.hpp"

namespace sop {

enum class Verdict : std::uint8_t { Pass, Fail, Unknown };

std::string_view to_string(Verdict v);

struct SearchBudget {
  std::uint64_t max_states = 2'000'000;
  std::chrono::nanoseconds wall_timeout = std::chrono::seconds(60);
  std::size_t max_oracle_ops = 6;
};

struct SearchStats {
  std::uint64_t states_explored = 0;
  std::uint64_t chunks_drained = 0;
  std::int64_t elapsed_ns = 0;

  SearchStats& operator+=(const SearchStats& o) {
    states_explored += o.states_explored;
    chunks_drained += o.chunks_drained;
    elapsed_ns += o.elapsed_ns;
    return *this;
  }
};

struct Witness {
  OrderingDag dag;
  ReadsFrom rf;
};

struct SearchResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<Witness> witness;
  SearchStats stats;
};

struct SearchOptions {
  SearchBudget budget;
  int threads = 1;
  /// Split real-time constrained serial searches at real-time cuts.
  bool chunked = true;
};

struct LevelResult {
  ConsistencyLevel level;
  Verdict verdict = Verdict::Unknown;
  /// True when the verdict followed from another level's.
  bool inferred = false;
  std::optional<Witness> witness;
};

struct ConformityReport {
  std::vector<LevelResult> results;
  SearchStats stats;
  bool well_formed = true;

  const LevelResult* find(LevelId id) const;
  Verdict verdict(LevelId id) const;
};

ConformityReport check(const Timeline& timeline,
                       const std::vector<ConsistencyLevel>& levels,
                       const SearchOptions& options = {});

/// Which real-time obligations a serial search honors.
enum class SerialMode : std::uint8_t {
  None,        // program order only
  RealTime,    // every real-time pair
  RealTimeW,   // real-time pairs between updates only
};

SearchResult check_serial_level(const Timeline& timeline, SerialMode mode,
                                const SearchOptions& options = {});

/// Serial search run separately on each key.
SearchResult check_per_key_serial(const Timeline& timeline,
                                  const SearchOptions& options = {});

SearchResult check_partial_level(const Timeline& timeline, Convergence convergence,
                                 const Relationship& relationship,
                                 const SearchOptions& options = {});

/// Result of draining one batch of concurrent operations.
struct Chunk {
  std::vector<OpId> ops;
  std::vector<std::size_t> cursor;
};

/// Starting from a per-client progress vector, takes the queue heads whose
/// spans overlap (transitively) the earliest-starting head.
Chunk drain_concurrent_chunk(const Timeline& timeline,
                             const std::vector<std::size_t>& cursor);

}  // namespace sop
