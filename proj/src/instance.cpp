#include "presto/instance.hpp"

#include <cmath>

namespace presto {

LadlagProcess random_obstacle(Rng& rng, const FiltrationTree& tree, const InstanceOptions& opt) {
  const double lo = opt.nonneg_obstacle ? 0.0 : -1.0;
  LadlagProcess xi = LadlagProcess::zeros(tree);
  for (int k = tree.n_stages(); k >= 0; --k) {
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      xi.left[k][i] = rng.uniform(lo, 1.0);
      xi.value[k][i] = rng.uniform(lo, 1.0);
    }
    if (opt.right_dominated && k < tree.n_stages()) {
      Array bound = expect_given_pre(tree, k, expect_given_post(tree, k, xi.left[k + 1]));
      for (int i = 0; i < tree.n_atoms(k); ++i)
        xi.value[k][i] = bound[i] - rng.uniform(0.0, 0.5);
    }
    if (opt.lusc_obstacle)
      for (int i = 0; i < tree.n_atoms(k); ++i)
        xi.left[k][i] = std::min(xi.left[k][i], xi.value[k][i]);
  }
  xi.left[0][0] = xi.value[0][0];
  return xi;
}

Driver random_driver(Rng& rng, const FiltrationTree& tree, const InstanceOptions& opt) {
  if (opt.zero_driver) return make_driver("zero");
  const double k_cap = opt.k_budget / (tree.dt() + tree.max_abs_dw());
  const double k = rng.uniform(0.0, k_cap);
  const int pick = rng.uniform_int(0, 3);
  if (opt.nonneg_driver) {
    // stay nonnegative on {y >= 0}: constant+linear growth or |z|-ambiguity
    if (pick % 2 == 0)
      return make_driver("affine", {{"a", rng.uniform(0.0, 0.3)}, {"b", k}, {"c", 0.0}});
    return make_driver("ambiguity", {{"rho", 0.0}, {"kappa", k}});
  }
  switch (pick) {
    case 0: return make_driver("zero");
    case 1: {
      const double b_share = rng.uniform(0.0, 1.0);
      const double b = (rng.uniform() < 0.5 ? -1.0 : 1.0) * k * b_share;
      const double c = (rng.uniform() < 0.5 ? -1.0 : 1.0) * k * (1.0 - b_share);
      return make_driver("affine", {{"a", rng.uniform(-0.3, 0.3)}, {"b", b}, {"c", c}});
    }
    case 2: return make_driver("discount", {{"rho", k}});
    default: {
      const double rho_share = rng.uniform(0.0, 1.0);
      return make_driver("ambiguity",
                         {{"rho", k * rho_share}, {"kappa", k * (1.0 - rho_share)}});
    }
  }
}

Instance random_instance(std::uint64_t seed, const InstanceOptions& opt) {
  Rng rng(seed);
  const int stages = rng.uniform_int(1, opt.max_stages);
  const double dt = rng.uniform(opt.dt_min, opt.dt_max);
  const int marks = opt.single_mark ? 1 : opt.max_marks;
  FiltrationTree tree = build_random_tree(rng.bits(), stages, opt.max_w_branches, marks, dt);
  LadlagProcess obstacle = random_obstacle(rng, tree, opt);
  Driver driver = random_driver(rng, tree, opt);
  return Instance{std::move(tree), std::move(obstacle), std::move(driver)};
}

}  // namespace presto
