#pragma once

#include <cstdint>

#include "presto/driver.hpp"
#include "presto/process.hpp"
#include "presto/rng.hpp"
#include "presto/tree.hpp"

namespace presto {

/// Knobs for the seeded instance generator used by sweeps and the
/// verification suites. Flags carve out the subpopulations on which the
/// hypothesis-conditioned properties are exact.
struct InstanceOptions {
  int max_stages = 3;
  int max_w_branches = 2;
  int max_marks = 2;
  double dt_min = 0.25;
  double dt_max = 1.0;

  bool single_mark = false;      // quasi-left-continuous trees
  bool lusc_obstacle = false;    // left values never above values
  bool nonneg_obstacle = false;  // obstacle in [0, 1] instead of [-1, 1]
  bool right_dominated = false;  // xi_k <= E[xi_{(k+1)-} | G_k]
  bool zero_driver = false;
  bool nonneg_driver = false;    // g >= 0 wherever y >= 0 (positive framework)
  double k_budget = 0.5;         // K * (dt + max|dW|) stays below this
};

struct Instance {
  FiltrationTree tree;
  LadlagProcess obstacle;
  Driver driver;
};

LadlagProcess random_obstacle(Rng& rng, const FiltrationTree& tree, const InstanceOptions& opt);

Driver random_driver(Rng& rng, const FiltrationTree& tree, const InstanceOptions& opt);

Instance random_instance(std::uint64_t seed, const InstanceOptions& opt);

}  // namespace presto
