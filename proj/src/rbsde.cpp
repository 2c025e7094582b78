#include "presto/rbsde.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace presto {

namespace {

LadlagProcess negate(const LadlagProcess& p) {
  LadlagProcess out = p;
  for (auto& a : out.left) a = -a;
  for (auto& a : out.value) a = -a;
  return out;
}

Driver mirror_driver(const Driver& driver) {
  Driver out = driver;
  out.name = driver.name + "~mirror";
  auto g = driver.g;
  out.g = [g](double t, double y, double z) { return -g(t, -y, -z); };
  return out;
}

std::string atom_name(int stage, int i) {
  return "atom[" + std::to_string(stage) + "][" + std::to_string(i) + "]";
}

// Index of the G_k atom above a post node (0 at the root stage).
int pre_parent(const FiltrationTree& tree, int stage, int post_atom) {
  return stage == 0 ? 0 : tree.post(stage, post_atom).parent;
}

using StepFn = std::function<double(int stage, int post_atom, double e, double pi)>;

// Shared backward recursion. Per stage: Brownian substep toward the next
// left value, predictable projection of the right limit, reflection at the
// value instant, reflection at the left instant (skipped at the base).
RbsdeSolution solve_lower_impl(const FiltrationTree& tree, const LadlagProcess& obstacle,
                               int from_stage, const StepFn& step) {
  const int n = tree.n_stages();
  check_shape(tree, obstacle);
  if (from_stage < 0 || from_stage > n)
    throw Error(ErrorCode::BadArgument, "from_stage out of range");

  RbsdeSolution sol;
  sol.side = BarrierSide::Lower;
  sol.from_stage = from_stage;
  sol.obstacle = obstacle;
  sol.y = LadlagProcess::zeros(tree);
  sol.y_plus = AdaptedProcess::zeros(tree, n - 1);
  sol.pi = AdaptedProcess::zeros(tree, n - 1);
  sol.dmeta = AdaptedProcess::zeros(tree, n - 1);
  sol.dmw.assign(n + 1, Array());
  for (int k = 1; k <= n; ++k) sol.dmw[k] = Array::Zero(tree.n_pre(k));
  sol.da.resize(n + 1);
  sol.db.resize(n + 1);
  sol.p_y_plus.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    sol.da[k] = Array::Zero(tree.n_atoms(k));
    sol.db[k] = Array::Zero(tree.n_atoms(k));
    sol.p_y_plus[k] = Array::Zero(tree.n_atoms(k));
  }

  const double dt = tree.dt();
  for (int k = n; k >= from_stage; --k) {
    if (k == n) {
      sol.y.value[n] = obstacle.value[n];
      sol.p_y_plus[n] = sol.y.value[n];
    } else {
      const Array& target = sol.y.left[k + 1];
      Array e_post = expect_given_post(tree, k, target);
      for (int a = 0; a < tree.n_post(k); ++a) {
        auto [b, e] = tree.pre_children(k, a);
        double acc = 0.0;
        for (int c = b; c < e; ++c)
          acc += tree.pre(k + 1, c).p * target[c] * tree.pre(k + 1, c).dw;
        sol.pi.value[k][a] = acc / dt;
        sol.y_plus.value[k][a] = step(k, a, e_post[a], sol.pi.value[k][a]);
      }
      for (int j = 0; j < tree.n_pre(k + 1); ++j) {
        const int a = tree.pre(k + 1, j).parent;
        sol.dmw[k + 1][j] =
            target[j] - e_post[a] - sol.pi.value[k][a] * tree.pre(k + 1, j).dw;
      }
      sol.p_y_plus[k] = expect_given_pre(tree, k, sol.y_plus.value[k]);
      sol.y.value[k] = obstacle.value[k].max(sol.p_y_plus[k]);
      sol.db[k] = sol.y.value[k] - sol.p_y_plus[k];
      for (int a = 0; a < tree.n_post(k); ++a)
        sol.dmeta.value[k][a] =
            sol.y_plus.value[k][a] - sol.p_y_plus[k][pre_parent(tree, k, a)];
    }
    if (k > from_stage) {
      sol.y.left[k] = obstacle.left[k].max(sol.y.value[k]);
      sol.da[k] = sol.y.left[k] - sol.y.value[k];
    } else {
      sol.y.left[k] = sol.y.value[k];
    }
  }
  return sol;
}

RbsdeSolution solve_lower(const FiltrationTree& tree, const Driver& driver,
                          const LadlagProcess& obstacle, int from_stage, double tol) {
  if (!(driver.lipschitz * tree.dt() < 1.0))
    throw Error(ErrorCode::NoContraction,
                "K*dt = " + std::to_string(driver.lipschitz * tree.dt()) + " >= 1");
  return solve_lower_impl(tree, obstacle, from_stage,
                          [&](int k, int, double e, double pi) {
                            return step_solve(e, pi, tree.time(k), driver, tree.dt(), tol);
                          });
}

RbsdeSolution mirror_solution(RbsdeSolution sol, LadlagProcess original_obstacle) {
  sol.side = BarrierSide::Upper;
  sol.obstacle = std::move(original_obstacle);
  sol.y = negate(sol.y);
  for (auto& a : sol.y_plus.value) a = -a;
  for (auto& a : sol.pi.value) a = -a;
  for (auto& a : sol.dmw) a = -a;
  for (auto& a : sol.dmeta.value) a = -a;
  for (auto& a : sol.p_y_plus) a = -a;
  return sol;  // da and db stay: the reflections remain nondecreasing
}

}  // namespace

double RbsdeSolution::a_between(const FiltrationTree& tree, int from, Instant instant,
                                int atom) const {
  // A_tau - A_S: left jumps at stages in (from, m] for a value stop at m,
  // (from, m-1] for a left stop at m.
  double acc = 0.0;
  int stage = instant.stage;
  int current = atom;
  if (instant.left) {
    if (stage <= from) return 0.0;
    const int post = tree.pre(stage, current).parent;
    current = pre_parent(tree, stage - 1, post);
    --stage;
  }
  while (stage > from) {
    acc += da[stage][current];
    const int post = tree.pre(stage, current).parent;
    current = pre_parent(tree, stage - 1, post);
    --stage;
  }
  return acc;
}

double RbsdeSolution::b_between(const FiltrationTree& tree, int from, Instant instant,
                                int atom) const {
  // B_{tau-} - B_{S-}: right jumps at stages in [from, m-1] regardless of
  // which of the two instants at m the stop uses.
  double acc = 0.0;
  int stage = instant.stage;
  int current = atom;
  while (stage > from) {
    const int post = tree.pre(stage, current).parent;
    current = pre_parent(tree, stage - 1, post);
    --stage;
    acc += db[stage][current];
  }
  return acc;
}

RbsdeSolution solve_rbsde(const FiltrationTree& tree, const Driver& driver,
                          const LadlagProcess& obstacle, BarrierSide side, double tol) {
  return solve_rbsde_window(tree, driver, obstacle, 0, side, tol);
}

RbsdeSolution solve_rbsde_window(const FiltrationTree& tree, const Driver& driver,
                                 const LadlagProcess& obstacle, int from_stage,
                                 BarrierSide side, double tol) {
  if (side == BarrierSide::Lower)
    return solve_lower(tree, driver, obstacle, from_stage, tol);
  RbsdeSolution mirrored =
      solve_lower(tree, mirror_driver(driver), negate(obstacle), from_stage, tol);
  return mirror_solution(std::move(mirrored), obstacle);
}

RbsdeSolution solve_rbsde_localized(const FiltrationTree& tree, const Driver& driver,
                                    const LadlagProcess& obstacle, int from_stage,
                                    const std::vector<char>& event_at_base, double tol) {
  if (static_cast<int>(event_at_base.size()) != tree.n_atoms(from_stage))
    throw Error(ErrorCode::ShapeMismatch, "event must live on the G_S atoms");
  if (!(driver.lipschitz * tree.dt() < 1.0))
    throw Error(ErrorCode::NoContraction, "K*dt >= 1");
  LadlagProcess masked = obstacle;
  for (int k = 0; k <= tree.n_stages(); ++k) {
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      const bool keep = k >= from_stage && event_at_base[ancestor_atom(tree, k, i, from_stage)];
      if (!keep) {
        masked.left[k][i] = 0.0;
        masked.value[k][i] = 0.0;
      }
    }
  }
  return solve_lower_impl(tree, masked, from_stage, [&](int k, int a, double e, double pi) {
    if (!event_at_base[ancestor_atom_of_post(tree, k, a, from_stage)]) return e;
    return step_solve(e, pi, tree.time(k), driver, tree.dt(), tol);
  });
}

PicardResult solve_rbsde_picard(const FiltrationTree& tree, const Driver& driver,
                                const LadlagProcess& obstacle, double tol, int max_iter) {
  const int n = tree.n_stages();
  check_shape(tree, obstacle);
  if (!(driver.lipschitz * tree.dt() < 1.0))
    throw Error(ErrorCode::NoContraction,
                "K*dt = " + std::to_string(driver.lipschitz * tree.dt()) + " >= 1");

  AdaptedProcess frozen = AdaptedProcess::zeros(tree, n - 1);
  RbsdeSolution current;
  for (int iter = 1; iter <= max_iter; ++iter) {
    RbsdeSolution next = solve_lower_impl(
        tree, obstacle, 0,
        [&](int k, int a, double e, double) { return e + frozen.value[k][a] * tree.dt(); });
    double change = 0.0;
    if (iter > 1) {
      for (int k = 0; k <= n; ++k) {
        change = std::max(change, (next.y.value[k] - current.y.value[k]).abs().maxCoeff());
        change = std::max(change, (next.y.left[k] - current.y.left[k]).abs().maxCoeff());
      }
      for (int k = 0; k < n; ++k)
        change = std::max(change, (next.pi.value[k] - current.pi.value[k]).abs().maxCoeff());
    }
    current = std::move(next);
    // With a zero Lipschitz constant the frozen driver is already exact.
    if (driver.lipschitz == 0.0 || (iter > 1 && change <= tol))
      return PicardResult{std::move(current), iter};
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < tree.n_post(k); ++a)
        frozen.value[k][a] =
            driver.g(tree.time(k), current.y_plus.value[k][a], current.pi.value[k][a]);
  }
  throw Error(ErrorCode::NoConvergence,
              "Picard iteration did not settle in " + std::to_string(max_iter) + " rounds");
}

SkorokhodReport verify_rbsde(const FiltrationTree& tree, const Driver& driver,
                             const RbsdeSolution& sol, double tol) {
  if (sol.side == BarrierSide::Upper) {
    // Check the mirrored system in lower form.
    RbsdeSolution lower = sol;
    lower.side = BarrierSide::Lower;
    lower.obstacle = negate(sol.obstacle);
    lower.y = negate(sol.y);
    for (auto& a : lower.y_plus.value) a = -a;
    for (auto& a : lower.pi.value) a = -a;
    for (auto& a : lower.dmw) a = -a;
    for (auto& a : lower.dmeta.value) a = -a;
    for (auto& a : lower.p_y_plus) a = -a;
    return verify_rbsde(tree, mirror_driver(driver), lower, tol);
  }

  SkorokhodReport report;
  const int n = tree.n_stages();
  const int from = sol.from_stage;
  const double dt = tree.dt();
  const double martingale_tol = 1e-12;
  auto flag = [&](const std::string& node, const char* rule, double magnitude) {
    report.violations.push_back({node, rule, magnitude});
  };
  auto residual = [&](double r) {
    report.max_identity_residual = std::max(report.max_identity_residual, std::abs(r));
  };

  for (int i = 0; i < tree.n_atoms(n); ++i)
    if (std::abs(sol.y.value[n][i] - sol.obstacle.value[n][i]) > tol)
      flag(atom_name(n, i), "TERMINAL", std::abs(sol.y.value[n][i] - sol.obstacle.value[n][i]));

  for (int k = from; k <= n; ++k) {
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      const double y = sol.y.value[k][i];
      const double yl = sol.y.left[k][i];
      const double xi = sol.obstacle.value[k][i];
      const double xil = sol.obstacle.left[k][i];
      const double a = sol.da[k][i];
      const double b = sol.db[k][i];
      if (y < xi - tol) flag(atom_name(k, i), "DOMINATION_VALUE", xi - y);
      if (a < 0.0) flag(atom_name(k, i), "NONNEG_A", -a);
      if (b < 0.0) flag(atom_name(k, i), "NONNEG_B", -b);
      if (k > from) {
        if (yl < xil - tol) flag(atom_name(k, i), "DOMINATION_LEFT", xil - yl);
        if (std::abs(yl - std::max(xil, y)) > tol)
          flag(atom_name(k, i), "RECURSION_LEFT", std::abs(yl - std::max(xil, y)));
        if (std::abs(a - (yl - y)) > tol) flag(atom_name(k, i), "JUMP_A", std::abs(a - (yl - y)));
        if (std::abs(a * (yl - xil)) > tol)
          flag(atom_name(k, i), "SKOROKHOD_A", std::abs(a * (yl - xil)));
        residual(yl - std::max(xil, y));
      }
      if (k < n) {
        const double pyp = sol.p_y_plus[k][i];
        if (std::abs(y - std::max(xi, pyp)) > tol)
          flag(atom_name(k, i), "RECURSION_VALUE", std::abs(y - std::max(xi, pyp)));
        if (std::abs(b - (y - pyp)) > tol) flag(atom_name(k, i), "JUMP_B", std::abs(b - (y - pyp)));
        if (std::abs(b * (y - xi)) > tol)
          flag(atom_name(k, i), "SKOROKHOD_B", std::abs(b * (y - xi)));
        if (y < pyp - tol) flag(atom_name(k, i), "DOMINATION_RIGHT", pyp - y);
        residual(y - std::max(xi, pyp));
      }
    }
  }

  for (int k = from; k < n; ++k) {
    // predictable projection of the right limit
    Array pyp = expect_given_pre(tree, k, sol.y_plus.value[k]);
    for (int i = 0; i < tree.n_atoms(k); ++i)
      if (std::abs(pyp[i] - sol.p_y_plus[k][i]) > tol)
        flag(atom_name(k, i), "PRED_PROJECTION", std::abs(pyp[i] - sol.p_y_plus[k][i]));
    // mark-level jump has zero predictable projection
    Array dmeta_mean = expect_given_pre(tree, k, sol.dmeta.value[k]);
    for (int i = 0; i < tree.n_atoms(k); ++i)
      if (std::abs(dmeta_mean[i]) > martingale_tol)
        flag(atom_name(k, i), "MARTINGALE_META", std::abs(dmeta_mean[i]));
    for (int a = 0; a < tree.n_post(k); ++a) {
      auto [b, e] = tree.pre_children(k, a);
      double mean = 0.0, ortho = 0.0;
      for (int c = b; c < e; ++c) {
        mean += tree.pre(k + 1, c).p * sol.dmw[k + 1][c];
        ortho += tree.pre(k + 1, c).p * sol.dmw[k + 1][c] * tree.pre(k + 1, c).dw;
      }
      if (std::abs(mean) > martingale_tol)
        flag("post[" + std::to_string(k) + "][" + std::to_string(a) + "]", "MARTINGALE_MEAN",
             std::abs(mean));
      if (std::abs(ortho) > martingale_tol)
        flag("post[" + std::to_string(k) + "][" + std::to_string(a) + "]", "MARTINGALE_ORTHO",
             std::abs(ortho));
    }
    // telescoped one-step identity through every stage k+1 pre node
    for (int j = 0; j < tree.n_pre(k + 1); ++j) {
      const int a = tree.pre(k + 1, j).parent;
      const int atom = pre_parent(tree, k, a);
      const double g_term =
          driver.g(tree.time(k), sol.y_plus.value[k][a], sol.pi.value[k][a]) * dt;
      const double rhs = sol.y.value[k + 1][j] + g_term -
                         sol.pi.value[k][a] * tree.pre(k + 1, j).dw - sol.dmw[k + 1][j] -
                         sol.dmeta.value[k][a] + sol.da[k + 1][j] + sol.db[k][atom];
      const double r = sol.y.value[k][atom] - rhs;
      residual(r);
      if (std::abs(r) > tol)
        flag("pre[" + std::to_string(k + 1) + "][" + std::to_string(j) + "]", "TELESCOPE",
             std::abs(r));
    }
  }
  return report;
}

}  // namespace presto
