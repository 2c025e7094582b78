#include "presto/oracle.hpp"

#include <algorithm>
#include <limits>

namespace presto {

namespace {

constexpr std::int64_t kSaturated = std::numeric_limits<std::int64_t>::max();

std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a > kSaturated - b) return kSaturated;
  return a + b;
}

// Stage k+1 pre-atoms descending from a pre-atom at stage k (contiguous by
// parent-major construction).
std::pair<int, int> next_pre_range(const FiltrationTree& tree, int stage, int atom) {
  if (stage == 0) return {0, tree.n_pre(1)};
  auto [pb, pe] = tree.post_children(stage, atom);
  auto [lo, unused] = tree.pre_children(stage, pb);
  auto [unused2, hi] = tree.pre_children(stage, pe - 1);
  (void)unused;
  (void)unused2;
  return {lo, hi};
}

std::int64_t count_from_atom(const FiltrationTree& tree, int stage, int atom, int from_stage,
                             InstantMode mode) {
  const int n = tree.n_stages();
  const bool left_allowed = mode == InstantMode::Doubled && stage > from_stage && stage > 0;
  const std::int64_t stops = left_allowed ? 2 : 1;
  if (stage == n) return stops;
  auto [lo, hi] = next_pre_range(tree, stage, atom);
  std::int64_t continuation = 1;
  for (int c = lo; c < hi && continuation < kSaturated; ++c)
    continuation = sat_mul(continuation, count_from_atom(tree, stage + 1, c, from_stage, mode));
  return sat_add(stops, continuation);
}

struct Enumerator {
  const FiltrationTree& tree;
  InstantMode mode;
  int from_stage;
  const std::function<void(const ExtendedStoppingTime&)>& fn;
  ExtendedStoppingTime tau;

  // Depth-first over a work list of undecided atoms; continuing an atom
  // splices its stage k+1 descendants right after it.
  void run(std::vector<std::pair<int, int>>& pending, std::size_t index) {
    if (index == pending.size()) {
      fn(tau);
      return;
    }
    auto [stage, atom] = pending[index];
    const int n = tree.n_stages();
    const bool allow_left = mode == InstantMode::Doubled && stage > from_stage && stage > 0;
    const bool allow_continue = stage < n;

    if (allow_left) {
      tau.set(stage, atom, StopDecision::StopAtLeft);
      run(pending, index + 1);
    }
    tau.set(stage, atom, StopDecision::StopAtValue);
    run(pending, index + 1);
    if (allow_continue) {
      tau.set(stage, atom, StopDecision::Continue);
      auto [lo, hi] = next_pre_range(tree, stage, atom);
      std::vector<std::pair<int, int>> extended;
      extended.reserve(pending.size() + (hi - lo));
      extended.insert(extended.end(), pending.begin(), pending.begin() + index + 1);
      for (int c = lo; c < hi; ++c) extended.push_back({stage + 1, c});
      extended.insert(extended.end(), pending.begin() + index + 1, pending.end());
      run(extended, index + 1);
    }
    tau.set(stage, atom, StopDecision::Continue);  // leave a clean slate
  }
};

}  // namespace

std::int64_t count_stopping_times(const FiltrationTree& tree, int from_stage, InstantMode mode) {
  if (from_stage < 0 || from_stage > tree.n_stages())
    throw Error(ErrorCode::BadArgument, "from_stage out of range");
  std::int64_t total = 1;
  for (int i = 0; i < tree.n_atoms(from_stage) && total < kSaturated; ++i)
    total = sat_mul(total, count_from_atom(tree, from_stage, i, from_stage, mode));
  return total;
}

void for_each_stopping_time(const FiltrationTree& tree, int from_stage,
                            const EnumerationBudget& budget,
                            const std::function<void(const ExtendedStoppingTime&)>& fn) {
  if (budget.max_stopping_times <= 0)
    throw Error(ErrorCode::BadArgument, "budget must be positive");
  const std::int64_t count = count_stopping_times(tree, from_stage, budget.mode);
  if (count > budget.max_stopping_times)
    throw Error(ErrorCode::BudgetExceeded,
                std::to_string(count) + " stopping rules exceed budget " +
                    std::to_string(budget.max_stopping_times));

  Enumerator enumerator{tree, budget.mode, from_stage, fn, {}};
  enumerator.tau.from_stage = from_stage;
  enumerator.tau.decision.resize(tree.n_stages() + 1);
  for (int k = 0; k <= tree.n_stages(); ++k)
    enumerator.tau.decision[k].assign(tree.n_atoms(k), StopDecision::Continue);

  std::vector<std::pair<int, int>> pending;
  for (int i = 0; i < tree.n_atoms(from_stage); ++i) pending.push_back({from_stage, i});
  enumerator.run(pending, 0);
}

std::vector<ExtendedStoppingTime> enumerate_stopping_times(const FiltrationTree& tree,
                                                           int from_stage,
                                                           const EnumerationBudget& budget) {
  std::vector<ExtendedStoppingTime> out;
  for_each_stopping_time(tree, from_stage, budget,
                         [&](const ExtendedStoppingTime& tau) { out.push_back(tau); });
  return out;
}

BruteForceResult brute_force_value(const FiltrationTree& tree, const Driver& driver,
                                   const LadlagProcess& obstacle, int from_stage,
                                   const EnumerationBudget& budget) {
  check_shape(tree, obstacle);
  if (!(driver.lipschitz * tree.dt() < 1.0))
    throw Error(ErrorCode::NoContraction, "K*dt >= 1");

  BruteForceResult result;
  const int atoms = tree.n_atoms(from_stage);
  result.values = Array::Constant(atoms, -std::numeric_limits<double>::infinity());
  result.argmax.assign(atoms, {});
  const Payoff payoff = payoff_from(obstacle);

  int index = 0;
  for_each_stopping_time(tree, from_stage, budget, [&](const ExtendedStoppingTime& tau) {
    Array values = g_expectation(tree, driver, from_stage, tau, payoff);
    for (int i = 0; i < atoms; ++i) {
      if (values[i] > result.values[i]) {
        result.values[i] = values[i];
        result.argmax[i].clear();
        result.argmax[i].push_back(index);
      } else if (values[i] == result.values[i]) {
        result.argmax[i].push_back(index);
      }
    }
    ++index;
  });
  result.count = index;
  return result;
}

}  // namespace presto
