#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "presto/bsde.hpp"
#include "presto/process.hpp"

namespace presto {

enum class InstantMode { Doubled, Grid };

struct EnumerationBudget {
  std::int64_t max_stopping_times = 1000000;
  InstantMode mode = InstantMode::Doubled;
};

/// Closed-form count of previsible stopping rules from stage S: product over
/// the per-atom decision trees (2 + prod children below the horizon, 2 at the
/// horizon; grid mode drops the left instants). Saturates at
/// 2^63-1 to keep budget checks safe.
std::int64_t count_stopping_times(const FiltrationTree& tree, int from_stage, InstantMode mode);

/// Visits every previsible stopping rule >= from_stage exactly once, in a
/// fixed depth-first order (stop-at-left, stop-at-value, then continue into
/// the subtree; atoms in index order). Throws BUDGET_EXCEEDED up front when
/// the closed-form count is over budget.
void for_each_stopping_time(const FiltrationTree& tree, int from_stage,
                            const EnumerationBudget& budget,
                            const std::function<void(const ExtendedStoppingTime&)>& fn);

std::vector<ExtendedStoppingTime> enumerate_stopping_times(const FiltrationTree& tree,
                                                           int from_stage,
                                                           const EnumerationBudget& budget);

struct BruteForceResult {
  Array values;                         // per G_S atom: max over enumerated rules
  std::vector<std::vector<int>> argmax;  // per atom, indices into enumeration order; ties kept
  std::int64_t count = 0;               // rules enumerated
};

/// Ground truth by exhaustion: maximizes the nonlinear evaluation of the
/// obstacle over every enumerated stopping rule, independently of the
/// reflected solver.
BruteForceResult brute_force_value(const FiltrationTree& tree, const Driver& driver,
                                   const LadlagProcess& obstacle, int from_stage,
                                   const EnumerationBudget& budget);

}  // namespace presto
