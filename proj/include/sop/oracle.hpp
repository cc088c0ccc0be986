#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sop/levels.hpp"
#include "sop/search.hpp"

namespace sop {

/// A strict partial order on {0..n-1}: bit j of above[i] is set iff i < j.
struct Poset {
  std::vector<std::uint8_t> above;
};

/// Every labeled poset on n elements (n ≤ 7), built once and cached.
const std::vector<Poset>& labeled_posets(std::size_t n);

class OracleTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleOptions {
  std::size_t max_ops = 6;
  int threads = 1;
};

/// Brute force: every ordering over every choice of effective ops, every
/// reads-from assignment, each tested directly against the level.
std::vector<Verdict> oracle_check_all(const Timeline& timeline,
                                      const std::vector<ConsistencyLevel>& levels,
                                      const OracleOptions& options = {});

Verdict oracle_check(const Timeline& timeline, const ConsistencyLevel& level,
                     const OracleOptions& options = {});

using CandidatePredicate = std::function<bool(const OrderingDag&, const ReadsFrom&)>;

/// True iff some candidate (ordering, reads-from) the oracle would enumerate
/// satisfies `predicate`. Must be thread-safe when options.threads > 1.
bool oracle_any(const Timeline& timeline, const CandidatePredicate& predicate,
                const OracleOptions& options = {});

}  // namespace sop
