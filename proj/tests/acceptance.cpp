// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code; the seeded instance
// populations are fixed so reruns are bit-identical.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "presto/instance.hpp"
#include "presto/io.hpp"
#include "presto/oracle.hpp"
#include "presto/snell.hpp"
#include "presto/stopping.hpp"

using namespace presto;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  if (!ok) ++failures;
}

struct Fixtures {
  FiltrationTree tree_a = build_lattice(2, 0.5, {{std::sqrt(0.5), 0.5}, {-std::sqrt(0.5), 0.5}},
                                        {{"m", 1.0}});
  FiltrationTree tree_b = build_lattice(1, 1.0, {{1.0, 0.5}, {-1.0, 0.5}}, {{"m", 1.0}});

  LadlagProcess obstacle_b(double x0) const {
    LadlagProcess xi = LadlagProcess::zeros(tree_b);
    xi.left[0][0] = xi.value[0][0] = x0;
    xi.left[1][0] = xi.value[1][0] = 1.0;
    xi.left[1][1] = xi.value[1][1] = 0.0;
    return xi;
  }
  LadlagProcess obstacle_d() const {
    LadlagProcess xi = obstacle_b(0.0);
    xi.left[1][0] = 2.0;
    return xi;
  }
};

FiltrationTree make_tree_c() {
  std::vector<std::vector<PreNode>> pre(3);
  std::vector<std::vector<PostNode>> post(3);
  post[0].push_back(PostNode{-1, "", 1.0});
  pre[1] = {PreNode{0, 1.0, 0.5}, PreNode{0, -1.0, 0.5}};
  post[1] = {PostNode{0, "u", 0.5}, PostNode{0, "d", 0.5}, PostNode{1, "u", 0.5},
             PostNode{1, "d", 0.5}};
  for (int parent = 0; parent < 4; ++parent) {
    pre[2].push_back(PreNode{parent, 1.0, 0.5});
    pre[2].push_back(PreNode{parent, -1.0, 0.5});
  }
  for (int parent = 0; parent < 8; ++parent) post[2].push_back(PostNode{parent, "m", 1.0});
  return FiltrationTree(2, 1.0, std::move(pre), std::move(post));
}

// Criterion-1 population: seeds scanned in order, instances kept while the
// stopping-rule family stays enumerable within the budget.
std::vector<Instance> criterion1_instances(int wanted, std::int64_t budget) {
  std::vector<Instance> out;
  InstanceOptions opt;  // N <= 3, <= 2 W branches, <= 2 marks, K*(dt+|dW|) <= 0.5
  for (std::uint64_t seed = 1; static_cast<int>(out.size()) < wanted && seed < 100000; ++seed) {
    Instance inst = random_instance(seed, opt);
    if (count_stopping_times(inst.tree, 0, InstantMode::Doubled) > budget) continue;
    out.push_back(std::move(inst));
  }
  return out;
}

bool criterion_1_and_5_and_7(const std::vector<Instance>& instances, std::int64_t budget) {
  bool oracle_ok = true, grid_ok = true;
  bool picard_ok = true;
  bool equivalence_ok = true;
  int n3 = 0, multimark = 0;
  std::int64_t rules_checked = 0;

  for (const auto& inst : instances) {
    if (inst.tree.n_stages() == 3) ++n3;
    if (!inst.tree.single_mark()) ++multimark;
    RbsdeSolution sol = solve_rbsde(inst.tree, inst.driver, inst.obstacle);

    for (int S : {0, 1}) {
      if (S > inst.tree.n_stages()) continue;
      BruteForceResult oracle = brute_force_value(inst.tree, inst.driver, inst.obstacle, S,
                                                  {budget, InstantMode::Doubled});
      oracle_ok = oracle_ok && (sol.y.value[S] - oracle.values).abs().maxCoeff() <= 1e-9;
      BruteForceResult grid = brute_force_value(inst.tree, inst.driver, inst.obstacle, S,
                                                {budget, InstantMode::Grid});
      grid_ok = grid_ok && (grid.values <= sol.y.value[S] + 1e-12).all();
    }

    PicardResult picard = solve_rbsde_picard(inst.tree, inst.driver, inst.obstacle, 1e-12, 50);
    double gap = 0.0;
    for (int k = 0; k <= inst.tree.n_stages(); ++k) {
      gap = std::max(gap, (picard.solution.y.value[k] - sol.y.value[k]).abs().maxCoeff());
      gap = std::max(gap, (picard.solution.y.left[k] - sol.y.left[k]).abs().maxCoeff());
    }
    picard_ok = picard_ok && gap <= 1e-8 && picard.iterations <= 50;

    // equivalence of the three optimality assertions for every enumerable
    // rule (instances with small families keep the sweep exhaustive)
    if (count_stopping_times(inst.tree, 0, InstantMode::Doubled) <= 2000) {
      for_each_stopping_time(inst.tree, 0, {2000, InstantMode::Doubled},
                             [&](const ExtendedStoppingTime& tau) {
                               ++rules_checked;
                               StoppingDiagnostics diag =
                                   optimality_report(inst.tree, inst.driver, sol, 0, tau);
                               equivalence_ok = equivalence_ok && diag.crit_a == diag.crit_b &&
                                                diag.crit_b == diag.crit_c;
                               equivalence_ok =
                                   equivalence_ok && diag.gap.minCoeff() >= -1e-10;
                             });
    }
  }

  const bool population_ok = n3 > 0 && multimark > 0;
  report(1, oracle_ok && grid_ok && population_ok,
         "oracle equivalence on " + std::to_string(instances.size()) +
             " seeded instances (doubled exact to 1e-9, grid never above)");
  report(5, picard_ok, "Picard fixed point matches the direct solve within 1e-8 in <= 50 rounds");
  report(7, equivalence_ok,
         "optimality assertions (a)(b)(c) flip together over " + std::to_string(rules_checked) +
             " enumerated rules");
  return oracle_ok && grid_ok && population_ok && picard_ok && equivalence_ok;
}

bool criterion_2_3_4() {
  bool structure_ok = true;
  bool martingale_ok = true;
  bool regularity_ok = true;
  double max_identity = 0.0, max_residual = 0.0;

  InstanceOptions opt;
  opt.max_stages = 6;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    Instance inst = random_instance(seed * 7919 + 13, opt);
    const FiltrationTree& tree = inst.tree;
    const int n = tree.n_stages();
    RbsdeSolution sol = solve_rbsde(tree, inst.driver, inst.obstacle);

    for (int k = 0; k <= n; ++k) {
      structure_ok = structure_ok && (sol.da[k] >= 0.0).all() && (sol.db[k] >= 0.0).all();
      for (int i = 0; i < tree.n_atoms(k); ++i) {
        structure_ok = structure_ok &&
                       sol.db[k][i] * (sol.y.value[k][i] - inst.obstacle.value[k][i]) == 0.0 &&
                       sol.da[k][i] * (sol.y.left[k][i] - inst.obstacle.left[k][i]) == 0.0;
      }
      if (k < n)
        max_identity = std::max(
            max_identity,
            (sol.y.value[k] - inst.obstacle.value[k].max(sol.p_y_plus[k])).abs().maxCoeff());
      if (k > 0)
        max_identity = std::max(
            max_identity,
            (sol.y.left[k] - inst.obstacle.left[k].max(sol.y.value[k])).abs().maxCoeff());
    }
    SkorokhodReport skorokhod = verify_rbsde(tree, inst.driver, sol);
    structure_ok = structure_ok && skorokhod.empty();
    max_identity = std::max(max_identity, skorokhod.max_identity_residual);

    for (int k = 0; k < n; ++k) {
      Array meta_mean = expect_given_pre(tree, k, sol.dmeta.value[k]);
      max_residual = std::max(max_residual, meta_mean.abs().maxCoeff());
      for (int a = 0; a < tree.n_post(k); ++a) {
        auto [b, e] = tree.pre_children(k, a);
        double mean = 0.0, ortho = 0.0;
        for (int c = b; c < e; ++c) {
          mean += tree.pre(k + 1, c).p * sol.dmw[k + 1][c];
          ortho += tree.pre(k + 1, c).p * sol.dmw[k + 1][c] * tree.pre(k + 1, c).dw;
        }
        max_residual = std::max(max_residual, std::max(std::abs(mean), std::abs(ortho)));
      }
      if (tree.single_mark())
        martingale_ok = martingale_ok && sol.dmeta.value[k].abs().maxCoeff() == 0.0;
    }
  }
  structure_ok = structure_ok && max_identity <= 1e-10;
  martingale_ok = martingale_ok && max_residual <= 1e-12;

  InstanceOptions lusc;
  lusc.max_stages = 5;
  lusc.lusc_obstacle = true;
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    Instance inst = random_instance(seed * 104729 + 7, lusc);
    if (!regularity_report(inst.tree, inst.obstacle).lusc) {
      regularity_ok = false;
      continue;
    }
    RbsdeSolution sol = solve_rbsde(inst.tree, inst.driver, inst.obstacle);
    for (const auto& layer : sol.da)
      regularity_ok = regularity_ok && layer.abs().maxCoeff() == 0.0;
  }
  InstanceOptions dominated;
  dominated.max_stages = 5;
  dominated.right_dominated = true;
  dominated.zero_driver = true;
  dominated.single_mark = true;
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    Instance inst = random_instance(seed * 15485863 + 11, dominated);
    RbsdeSolution sol = solve_rbsde(inst.tree, inst.driver, inst.obstacle);
    for (const auto& layer : sol.db)
      regularity_ok = regularity_ok && layer.abs().maxCoeff() == 0.0;
  }

  report(2, structure_ok,
         "structural exactness on 500 instances (N <= 6): reflections, Skorokhod, recursions, "
         "telescoped identity");
  report(3, martingale_ok,
         "martingale structure: residuals <= 1e-12, single-mark trees jump-free");
  report(4, regularity_ok,
         "regularity consequences: left-regular => dA == 0, dominated zero-driver => dB == 0");
  return structure_ok && martingale_ok && regularity_ok;
}

bool criterion_6(const Fixtures& fx) {
  bool tau_alpha_ok = true, theta_ok = true, tilde_ok = true;

  // tau_alpha and theta_alpha live in the positive framework
  InstanceOptions positive;
  positive.nonneg_obstacle = true;
  positive.nonneg_driver = true;
  positive.max_stages = 3;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Instance inst = random_instance(seed * 2654435761 + 3, positive);
    RbsdeSolution sol = solve_rbsde(inst.tree, inst.driver, inst.obstacle);
    for (double alpha : {0.3, 0.7, 0.95}) {
      ExtendedStoppingTime tau = tau_alpha(inst.tree, inst.driver, sol, 0, alpha);
      for (const auto& [instant, atom] : stop_points(inst.tree, tau)) {
        tau_alpha_ok = tau_alpha_ok && sol.a_between(inst.tree, 0, instant, atom) == 0.0 &&
                       sol.b_between(inst.tree, 0, instant, atom) == 0.0;
      }
      tau_alpha_ok = tau_alpha_ok && is_martingale_interval(inst.tree, inst.driver, sol, 0, tau);
    }
    for (double alpha : {0.25, 0.8, 1.0}) {
      ExtendedStoppingTime theta = theta_alpha(inst.tree, sol, 0, alpha);
      for (const auto& [instant, atom] : stop_points(inst.tree, theta))
        theta_ok = theta_ok &&
                   alpha * sol.y.at(instant, atom) <= sol.obstacle.at(instant, atom) + 1e-10;
    }
  }

  // tau_tilde needs no hypotheses on the doubled grid
  InstanceOptions any;
  any.max_stages = 3;
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    Instance inst = random_instance(seed * 413158511 + 1, any);
    RbsdeSolution sol = solve_rbsde(inst.tree, inst.driver, inst.obstacle);
    ExtendedStoppingTime best = tau_tilde(inst.tree, sol, 0);
    for (const auto& [instant, atom] : stop_points(inst.tree, best))
      tilde_ok = tilde_ok &&
                 std::abs(sol.y.at(instant, atom) - sol.obstacle.at(instant, atom)) <= 1e-10;
    Array attained = g_expectation(inst.tree, inst.driver, 0, best, payoff_from(sol.obstacle));
    tilde_ok = tilde_ok && (attained - sol.y.value[0]).abs().maxCoeff() <= 1e-9;
  }

  // documented grid-mode counterexample: the left obstacle spike violates
  // the right-domination hypothesis and grid stopping strictly loses value
  bool counterexample_ok = false;
  {
    LadlagProcess xi = fx.obstacle_d();
    const bool hypothesis_violated = !regularity_report(fx.tree_b, xi).p_right_dominated;
    RbsdeSolution sol = solve_rbsde(fx.tree_b, make_driver("zero"), xi);
    ExtendedStoppingTime grid = tau_tilde(fx.tree_b, sol, 0, InstantMode::Grid);
    const double attained =
        g_expectation(fx.tree_b, make_driver("zero"), 0, grid, payoff_from(xi))[0];
    counterexample_ok = hypothesis_violated && attained < sol.y.value[0][0] - 0.5;
  }

  const bool ok = tau_alpha_ok && theta_ok && tilde_ok && counterexample_ok;
  report(6, ok,
         "stopping rules: tau_alpha flat reflections + martingale window, theta_alpha contact, "
         "tau_tilde optimal (doubled), grid counterexample strictly suboptimal");
  return ok;
}

bool criterion_8(const std::vector<Instance>& instances) {
  bool consistency_ok = true, monotonic_ok = true, decreasing_ok = true;
  bool projection_ok = true, localization_ok = true, bellman_ok = true;

  int used = 0;
  for (const auto& inst : instances) {
    if (used >= 60) break;
    ++used;
    const FiltrationTree& tree = inst.tree;
    const int n = tree.n_stages();
    RbsdeSolution sol = solve_rbsde(tree, inst.driver, inst.obstacle);
    const Payoff xi_payoff = payoff_from(inst.obstacle);
    const Payoff y_payoff = payoff_from(sol.y);
    ExtendedStoppingTime horizon = ExtendedStoppingTime::always_at(tree, 0, Instant{n, false});

    // consistency through every intermediate stage
    LadlagProcess inner = g_expectation_table(tree, inst.driver, horizon, xi_payoff, 0);
    Array direct = inner.value[0];
    for (int mid = 0; mid <= n; ++mid) {
      ExtendedStoppingTime sigma = clip_at(tree, horizon, Instant{mid, false});
      Array nested = g_expectation(tree, inst.driver, 0, sigma, payoff_from(inner));
      consistency_ok = consistency_ok && (nested - direct).abs().maxCoeff() <= 1e-10;
    }

    // monotonicity in the payoff
    Rng rng(used * 31 + 1);
    LadlagProcess bumped = inst.obstacle;
    for (int k = 0; k <= n; ++k)
      for (int i = 0; i < tree.n_atoms(k); ++i) {
        bumped.left[k][i] += rng.uniform(0.0, 0.5);
        bumped.value[k][i] += rng.uniform(0.0, 0.5);
      }
    Array lo = g_expectation(tree, inst.driver, 0, horizon, xi_payoff);
    Array hi = g_expectation(tree, inst.driver, 0, horizon, payoff_from(bumped));
    monotonic_ok = monotonic_ok && (lo <= hi + 1e-12).all();

    // the evaluation of the solution is nonincreasing along nested rules
    double previous = sol.y.value[0][0] + 1e-10;
    for (int m = 0; m <= n; ++m) {
      for (int pass = (m > 0 ? 1 : 0); pass >= 0; --pass) {
        ExtendedStoppingTime tau = clip_at(tree, horizon, Instant{m, pass == 1});
        const double value = g_expectation(tree, inst.driver, 0, tau, y_payoff)[0];
        decreasing_ok = decreasing_ok && value <= previous + 1e-10;
        previous = value;
      }
    }

    // the projected right limit is dominated and dominates later starts
    for (int k = 0; k < n; ++k)
      projection_ok = projection_ok && (sol.p_y_plus[k] <= sol.y.value[k]).all();
    for (int S = 0; S < n; ++S) {
      ExtendedStoppingTime later = ExtendedStoppingTime::always_at(tree, S, Instant{S + 1, true});
      Array value = g_expectation(tree, inst.driver, S, later, y_payoff);
      projection_ok = projection_ok && (value <= sol.p_y_plus[S] + 1e-10).all();
    }

    // indicator localization, plain and reflected
    const int S = n >= 2 ? 1 : 0;
    std::vector<char> event(tree.n_atoms(S), 0);
    event[0] = 1;
    if (tree.n_atoms(S) > 1) event[tree.n_atoms(S) - 1] = 1;
    Array plain = g_expectation(tree, inst.driver, S, horizon, xi_payoff);
    Array localized = g_expectation_localized(tree, inst.driver, S, horizon, xi_payoff, event);
    for (int i = 0; i < tree.n_atoms(S); ++i)
      localization_ok = localization_ok && localized[i] == (event[i] ? plain[i] : 0.0);
    RbsdeSolution local = solve_rbsde_localized(tree, inst.driver, inst.obstacle, S, event);
    for (int k = S; k <= n; ++k)
      for (int i = 0; i < tree.n_atoms(k); ++i) {
        const double m = event[ancestor_atom(tree, k, i, S)] ? 1.0 : 0.0;
        localization_ok = localization_ok && local.y.value[k][i] == m * sol.y.value[k][i];
        if (k > S)
          localization_ok = localization_ok && local.y.left[k][i] == m * sol.y.left[k][i];
      }

    // linear value-family algebra
    if (count_stopping_times(tree, 0, InstantMode::Doubled) <= 2000) {
      const int theta = std::min(1, n);
      Rng arng(used * 57 + 3);
      Array alpha(tree.n_post(theta));
      for (int i = 0; i < tree.n_atoms(theta); ++i) {
        const double value = arng.uniform(0.0, 2.0);
        if (theta == 0) {
          alpha[0] = value;
        } else {
          auto [b, e] = tree.post_children(theta, i);
          for (int c = b; c < e; ++c) alpha[c] = value;
        }
      }
      std::vector<char> root_event(tree.n_post(0), 1);
      BellmanReport bell = bellman_check(tree, inst.obstacle, 0, theta, alpha, root_event, 2000);
      bellman_ok = bellman_ok && bell.bellman_ok && bell.scaling_ok && bell.localization_ok &&
                   bell.supermartingale_ok;
    }
  }

  const bool ok = consistency_ok && monotonic_ok && decreasing_ok && projection_ok &&
                  localization_ok && bellman_ok;
  report(8, ok,
         "operator algebra: consistency, monotonicity, nonincreasing evaluations, projected "
         "right limit, localization, value-family identities");
  return ok;
}

bool criterion_9(const Fixtures& fx) {
  bool ok = true;
  const Driver zero = make_driver("zero");
  const Driver discount = make_driver("discount", {{"rho", 0.1}});

  // Oracles run first; solver values are accepted only after the exhaustive
  // maximization reproduces the frozen numbers.
  {
    LadlagProcess xi = LadlagProcess::constant(fx.tree_a, 1.0);
    BruteForceResult oracle = brute_force_value(fx.tree_a, zero, xi, 0, {});
    ok = ok && std::abs(oracle.values[0] - 1.0) <= 1e-14;
    RbsdeSolution sol = solve_rbsde(fx.tree_a, zero, xi);
    ok = ok && std::abs(sol.y.value[0][0] - 1.0) <= 1e-14;
    for (int k = 0; k < 2; ++k)
      ok = ok && sol.pi.value[k].abs().maxCoeff() == 0.0 &&
           sol.dmeta.value[k].abs().maxCoeff() == 0.0 && sol.dmw[k + 1].abs().maxCoeff() == 0.0;
    for (int k = 0; k <= 2; ++k)
      ok = ok && sol.da[k].abs().maxCoeff() == 0.0 && sol.db[k].abs().maxCoeff() == 0.0;
  }
  {
    LadlagProcess xi = fx.obstacle_b(0.2);
    BruteForceResult oracle = brute_force_value(fx.tree_b, zero, xi, 0, {});
    ok = ok && oracle.count == 5 && std::abs(oracle.values[0] - 0.5) <= 1e-14 &&
         oracle.argmax[0].size() == 4;
    RbsdeSolution sol = solve_rbsde(fx.tree_b, zero, xi);
    ok = ok && std::abs(sol.y.value[0][0] - 0.5) <= 1e-14 &&
         std::abs(sol.pi.value[0][0] - 0.5) <= 1e-14;
  }
  {
    LadlagProcess xi = fx.obstacle_b(0.8);
    BruteForceResult oracle = brute_force_value(fx.tree_b, zero, xi, 0, {});
    ok = ok && std::abs(oracle.values[0] - 0.8) <= 1e-14;
    RbsdeSolution sol = solve_rbsde(fx.tree_b, zero, xi);
    ok = ok && std::abs(sol.y.value[0][0] - 0.8) <= 1e-14 &&
         std::abs(sol.db[0][0] - 0.3) <= 1e-14 && std::abs(sol.pi.value[0][0] - 0.5) <= 1e-14;
  }
  {
    FiltrationTree tree_c = make_tree_c();
    LadlagProcess xi = LadlagProcess::zeros(tree_c);
    for (int j = 0; j < tree_c.n_pre(2); ++j)
      if (tree_c.post(1, tree_c.pre(2, j).parent).mark == "u") xi.value[2][j] = 1.0;
    BruteForceResult oracle = brute_force_value(tree_c, zero, xi, 0, {});
    ok = ok && std::abs(oracle.values[0] - 0.5) <= 1e-14;
    RbsdeSolution sol = solve_rbsde(tree_c, zero, xi);
    ok = ok && std::abs(sol.y.value[0][0] - 0.5) <= 1e-14;
    ok = ok && std::abs(sol.y.value[1][0] - 0.5) <= 1e-14;
    for (int a = 0; a < tree_c.n_post(1); ++a) {
      const double expected = tree_c.post(1, a).mark == "u" ? 0.5 : -0.5;
      ok = ok && std::abs(sol.dmeta.value[1][a] - expected) <= 1e-14;
    }
  }
  {
    LadlagProcess xi = fx.obstacle_d();
    BruteForceResult oracle = brute_force_value(fx.tree_b, zero, xi, 0, {});
    ok = ok && std::abs(oracle.values[0] - 1.0) <= 1e-14;
    RbsdeSolution sol = solve_rbsde(fx.tree_b, zero, xi);
    ok = ok && std::abs(sol.y.left[1][0] - 2.0) <= 1e-14 &&
         std::abs(sol.da[1][0] - 1.0) <= 1e-14 && sol.da[1][1] == 0.0 &&
         std::abs(sol.y.value[0][0] - 1.0) <= 1e-14;
  }
  {
    LadlagProcess xi = fx.obstacle_b(0.2);
    BruteForceResult oracle = brute_force_value(fx.tree_b, discount, xi, 0, {});
    ok = ok && std::abs(oracle.values[0] - 0.5 / 1.1) <= 1e-12;
    RbsdeSolution sol = solve_rbsde(fx.tree_b, discount, xi);
    ok = ok && std::abs(sol.y.value[0][0] - 0.5 / 1.1) <= 1e-12;
    ok = ok && std::abs(step_solve(0.5, 0.0, 0.0, discount, 1.0) - 0.5 / 1.1) <= 1e-13;
  }

  report(9, ok, "fixtures reproduce the frozen values, oracle first");
  return ok;
}

bool criterion_10() {
  const std::string cli = PRESTO_CLI_PATH;
  const fs::path base = fs::temp_directory_path() / "presto_acceptance_determinism";
  std::error_code ec;
  fs::remove_all(base, ec);
  fs::create_directories(base / "run1");
  fs::create_directories(base / "run2");
  const std::string args = " sweep --seed 11 --count 6 --stages 3 --budget 5000 --out ";
  bool ok = std::system((cli + args + (base / "run1").string() + " > /dev/null").c_str()) == 0;
  ok = ok && std::system((cli + args + (base / "run2").string() + " > /dev/null").c_str()) == 0;
  if (ok) {
    int files = 0;
    for (const auto& entry : fs::directory_iterator(base / "run1")) {
      ++files;
      const fs::path other = base / "run2" / entry.path().filename();
      ok = ok && fs::exists(other) && read_file(entry.path().string()) == read_file(other.string());
    }
    ok = ok && files >= 6 * 3 + 1;
  }
  report(10, ok, "sweep reruns are byte-identical (trees, solutions, reports)");
  return ok;
}

}  // namespace

int main() {
  Fixtures fx;

  // the oracle gate runs first: fixture values are confirmed by exhaustion
  // before any solver output is trusted
  criterion_9(fx);

  std::vector<Instance> c1 = criterion1_instances(200, 20000);
  criterion_1_and_5_and_7(c1, 20000);
  criterion_2_3_4();
  criterion_6(fx);
  criterion_8(c1);
  criterion_10();

  if (failures == 0) {
    std::printf("all acceptance criteria hold\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return 1;
}
