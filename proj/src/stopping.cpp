#include "presto/stopping.hpp"

#include <cmath>
#include <limits>

namespace presto {

namespace {

int pre_parent(const FiltrationTree& tree, int stage, int post_atom) {
  return stage == 0 ? 0 : tree.post(stage, post_atom).parent;
}

// Running pathwise integral of g evaluated at the right-limit state, per
// G_k atom: G[k][i] = sum_{j<k} g(t_j, Y_{j+}, pi_j) dt along the ancestry.
std::vector<Array> running_cost(const FiltrationTree& tree, const Driver& driver,
                                const RbsdeSolution& sol) {
  const int n = tree.n_stages();
  std::vector<Array> g_at(n + 1);
  g_at[0] = Array::Zero(1);
  for (int k = 0; k < n; ++k) {
    Array through_interval(tree.n_post(k));
    for (int a = 0; a < tree.n_post(k); ++a)
      through_interval[a] =
          g_at[k][pre_parent(tree, k, a)] +
          driver.g(tree.time(k), sol.y_plus.value[k][a], sol.pi.value[k][a]) * tree.dt();
    g_at[k + 1] = Array(tree.n_pre(k + 1));
    for (int j = 0; j < tree.n_pre(k + 1); ++j)
      g_at[k + 1][j] = through_interval[tree.pre(k + 1, j).parent];
  }
  return g_at;
}

ExtendedStoppingTime blank_rule(const FiltrationTree& tree, int S) {
  ExtendedStoppingTime tau;
  tau.from_stage = S;
  tau.decision.resize(tree.n_stages() + 1);
  for (int k = 0; k <= tree.n_stages(); ++k)
    tau.decision[k].assign(tree.n_atoms(k), StopDecision::Continue);
  return tau;
}

// Builds a first-hit rule from per-instant predicates (atom-measurable, so
// the rule is previsible); defaults to the horizon.
ExtendedStoppingTime first_hit(const FiltrationTree& tree, int S,
                               const std::function<bool(Instant, int)>& hit) {
  const int n = tree.n_stages();
  ExtendedStoppingTime tau = blank_rule(tree, S);
  for (int k = S; k <= n; ++k) {
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      if (k > S && hit(Instant{k, true}, i))
        tau.set(k, i, StopDecision::StopAtLeft);
      else if (k == n || hit(Instant{k, false}, i))
        tau.set(k, i, StopDecision::StopAtValue);
    }
  }
  tau.normalize(tree);
  return tau;
}

}  // namespace

Array value_function(const FiltrationTree& tree, const Driver& driver,
                     const LadlagProcess& obstacle, int S) {
  if (S < 0 || S > tree.n_stages()) throw Error(ErrorCode::BadArgument, "stage out of range");
  RbsdeSolution sol = solve_rbsde(tree, driver, obstacle);
  return sol.y.value[S];
}

ExtendedStoppingTime tau_alpha(const FiltrationTree& tree, const Driver& driver,
                               const RbsdeSolution& sol, int S, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::InvalidAlpha, "alpha must lie in (0,1)");
  std::vector<Array> cost = running_cost(tree, driver, sol);
  return first_hit(tree, S, [&](Instant instant, int atom) {
    const double y = sol.y.at(instant, atom);
    const double xi = sol.obstacle.at(instant, atom);
    return alpha * y + (alpha - 1.0) * cost[instant.stage][atom] <= xi;
  });
}

ExtendedStoppingTime theta_alpha(const FiltrationTree& tree, const RbsdeSolution& sol, int S,
                                 double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidAlpha, "alpha must be positive");
  return first_hit(tree, S, [&](Instant instant, int atom) {
    return alpha * sol.y.at(instant, atom) <= sol.obstacle.at(instant, atom);
  });
}

ExtendedStoppingTime tau_tilde(const FiltrationTree& tree, const RbsdeSolution& sol, int S,
                               InstantMode mode) {
  const int n = tree.n_stages();
  if (mode == InstantMode::Doubled) {
    return first_hit(tree, S, [&](Instant instant, int atom) {
      if (instant.left) return sol.da[instant.stage][atom] > 0.0;
      return instant.stage < n && sol.db[instant.stage][atom] > 0.0;
    });
  }
  // Grid mode: stop at the value instant as soon as continuing would pick up
  // a dB here or a dA at any successor atom (the union is G_k-measurable).
  ExtendedStoppingTime tau = blank_rule(tree, S);
  for (int k = S; k <= n; ++k) {
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      bool stop = k == n;
      if (!stop && sol.db[k][i] > 0.0) stop = true;
      if (!stop) {
        auto [pb, pe] = k == 0 ? std::pair<int, int>{0, 1} : tree.post_children(k, i);
        for (int a = pb; a < pe && !stop; ++a) {
          auto [lo, hi] = tree.pre_children(k, a);
          for (int c = lo; c < hi && !stop; ++c)
            if (sol.da[k + 1][c] > 0.0) stop = true;
        }
      }
      if (stop) tau.set(k, i, StopDecision::StopAtValue);
    }
  }
  tau.normalize(tree);
  return tau;
}

bool is_martingale_interval(const FiltrationTree& tree, const Driver& driver,
                            const RbsdeSolution& sol, int S, const ExtendedStoppingTime& tau) {
  (void)driver;
  if (!validate_stopping_time(tree, tau, S).empty())
    throw Error(ErrorCode::BadStoppingTime, "rule invalid or stops before S");
  for (const auto& [instant, atom] : stop_points(tree, tau)) {
    if (sol.a_between(tree, S, instant, atom) != 0.0) return false;
    if (sol.b_between(tree, S, instant, atom) != 0.0) return false;
  }
  return true;
}

bool is_martingale_interval_direct(const FiltrationTree& tree, const Driver& driver,
                                   const RbsdeSolution& sol, int S,
                                   const ExtendedStoppingTime& tau, double tol) {
  // E^{p,g}_{sigma,mu}(Y_mu) must reproduce Y_sigma for clipped sub-rules
  // sigma <= mu inside the window.
  const int n = tree.n_stages();
  for (int m = S; m <= n; ++m) {
    for (int pass = 0; pass < (m > S ? 2 : 1); ++pass) {
      ExtendedStoppingTime mu = clip_at(tree, tau, Instant{m, pass == 1});
      for (int j = S; j <= m; ++j) {
        ExtendedStoppingTime sigma = clip_at(tree, mu, Instant{j, false});
        auto [excess, absdiff] = evaluation_gap(tree, driver, sol.y, sigma, mu);
        (void)excess;
        if (absdiff > tol) return false;
      }
    }
  }
  return true;
}

StoppingDiagnostics optimality_report(const FiltrationTree& tree, const Driver& driver,
                                      const RbsdeSolution& sol, int S,
                                      const ExtendedStoppingTime& tau_star, double tol) {
  if (!validate_stopping_time(tree, tau_star, S).empty())
    throw Error(ErrorCode::BadStoppingTime, "rule invalid or stops before S");

  StoppingDiagnostics diag;
  diag.tau = tau_star;
  const Payoff xi_payoff = payoff_from(sol.obstacle);
  const Payoff y_payoff = payoff_from(sol.y);

  diag.attained = g_expectation(tree, driver, S, tau_star, xi_payoff);
  diag.gap = sol.y.value[S] - diag.attained;
  diag.crit_a = diag.gap.abs().maxCoeff() <= tol;

  bool contact = true;
  for (const auto& [instant, atom] : stop_points(tree, tau_star))
    contact = contact &&
              std::abs(sol.y.at(instant, atom) - sol.obstacle.at(instant, atom)) <= tol;
  ExtendedStoppingTime at_s = ExtendedStoppingTime::always_at(tree, 0, Instant{S, false});
  const double value_at_0_via_s = g_expectation(tree, driver, 0, at_s, y_payoff)[0];
  const double y_at_0_via_tau = g_expectation(tree, driver, 0, tau_star, y_payoff)[0];
  const double xi_at_0_via_tau = g_expectation(tree, driver, 0, tau_star, xi_payoff)[0];
  diag.crit_b = contact && std::abs(value_at_0_via_s - y_at_0_via_tau) <= tol;
  diag.crit_c = std::abs(value_at_0_via_s - xi_at_0_via_tau) <= tol;
  return diag;
}

std::pair<double, double> evaluation_gap(const FiltrationTree& tree, const Driver& driver,
                                         const LadlagProcess& u, const ExtendedStoppingTime& sigma,
                                         const ExtendedStoppingTime& mu) {
  if (!pointwise_leq(tree, sigma, mu))
    throw Error(ErrorCode::BadStoppingTime, "sigma must not stop after mu");
  LadlagProcess table =
      g_expectation_table(tree, driver, mu, payoff_from(u), sigma.from_stage);
  double excess = -std::numeric_limits<double>::infinity();
  double absdiff = 0.0;
  for (const auto& [instant, atom] : stop_points(tree, sigma)) {
    const double diff = table.at(instant, atom) - u.at(instant, atom);
    excess = std::max(excess, diff);
    absdiff = std::max(absdiff, std::abs(diff));
  }
  return {excess, absdiff};
}

}  // namespace presto
