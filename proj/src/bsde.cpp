#include "presto/bsde.hpp"

#include <cmath>

namespace presto {

double step_solve(double e, double pi, double t, const Driver& driver, double dt, double tol) {
  if (!(driver.lipschitz * dt < 1.0))
    throw Error(ErrorCode::NoContraction,
                "K*dt = " + std::to_string(driver.lipschitz * dt) + " >= 1");
  double y = e;
  for (int iter = 0; iter < 200; ++iter) {
    const double next = e + driver.g(t, y, pi) * dt;
    if (std::abs(next - y) <= tol) return next;
    y = next;
  }
  throw Error(ErrorCode::NoConvergence, "implicit step did not converge in 200 iterations");
}

namespace {

// One Brownian substep of the backward recursion: regression of the stage
// k+1 target on dW gives the integrand, the implicit step gives the right
// limit, and the regression residual is the W-orthogonal martingale part.
struct DiffuseStep {
  Array e_post;   // E[target | F_k]
  Array pi;       // regression coefficient on post_nodes[k]
  Array x_plus;   // implicit-step value on post_nodes[k]
  Array dmw;      // residual on pre_nodes[k+1]
};

DiffuseStep diffuse_substep(const FiltrationTree& tree, int k, const Array& target,
                            const std::function<double(int post_atom, double e, double pi)>& step) {
  DiffuseStep out;
  const double dt = tree.dt();
  out.e_post = expect_given_post(tree, k, target);
  out.pi = Array(tree.n_post(k));
  for (int a = 0; a < tree.n_post(k); ++a) {
    auto [b, e] = tree.pre_children(k, a);
    double acc = 0.0;
    for (int c = b; c < e; ++c) acc += tree.pre(k + 1, c).p * target[c] * tree.pre(k + 1, c).dw;
    out.pi[a] = acc / dt;
  }
  out.x_plus = Array(tree.n_post(k));
  for (int a = 0; a < tree.n_post(k); ++a) out.x_plus[a] = step(a, out.e_post[a], out.pi[a]);
  out.dmw = Array(tree.n_pre(k + 1));
  for (int j = 0; j < tree.n_pre(k + 1); ++j) {
    const int a = tree.pre(k + 1, j).parent;
    out.dmw[j] = target[j] - out.e_post[a] - out.pi[a] * tree.pre(k + 1, j).dw;
  }
  return out;
}

double martingale_residual(const FiltrationTree& tree, int k, const Array& dmw,
                           const Array& dmeta_prev) {
  double worst = 0.0;
  for (int a = 0; a < tree.n_post(k); ++a) {
    auto [b, e] = tree.pre_children(k, a);
    double mean = 0.0, ortho = 0.0;
    for (int c = b; c < e; ++c) {
      mean += tree.pre(k + 1, c).p * dmw[c];
      ortho += tree.pre(k + 1, c).p * dmw[c] * tree.pre(k + 1, c).dw;
    }
    worst = std::max(worst, std::max(std::abs(mean), std::abs(ortho)));
  }
  if (dmeta_prev.size() > 0) {
    Array projected = expect_given_pre(tree, k, dmeta_prev);
    worst = std::max(worst, projected.abs().maxCoeff());
  }
  return worst;
}

}  // namespace

BsdeSolution solve_bsde(const FiltrationTree& tree, const Driver& driver, const Array& terminal,
                        double tol) {
  const int n = tree.n_stages();
  if (terminal.size() != tree.n_atoms(n))
    throw Error(ErrorCode::ShapeMismatch, "terminal condition must live on the G_N atoms");
  if (!(driver.lipschitz * tree.dt() < 1.0))
    throw Error(ErrorCode::NoContraction, "K*dt >= 1");

  BsdeSolution sol;
  sol.x = LadlagProcess::zeros(tree);
  sol.x_plus = AdaptedProcess::zeros(tree, n - 1);
  sol.pi = AdaptedProcess::zeros(tree, n - 1);
  sol.dmeta = AdaptedProcess::zeros(tree, n - 1);
  sol.dmw.assign(n + 1, Array());

  sol.x.value[n] = terminal;
  for (int k = n - 1; k >= 0; --k) {
    const double t = tree.time(k);
    DiffuseStep step = diffuse_substep(
        tree, k, sol.x.value[k + 1],
        [&](int, double e, double pi) { return step_solve(e, pi, t, driver, tree.dt(), tol); });
    sol.x_plus.value[k] = step.x_plus;
    sol.pi.value[k] = step.pi;
    sol.dmw[k + 1] = step.dmw;
    sol.x.value[k] = expect_given_pre(tree, k, step.x_plus);
    for (int a = 0; a < tree.n_post(k); ++a) {
      const int parent = k == 0 ? 0 : tree.post(k, a).parent;
      sol.dmeta.value[k][a] = step.x_plus[a] - sol.x.value[k][parent];
    }
    sol.max_martingale_residual =
        std::max(sol.max_martingale_residual,
                 martingale_residual(tree, k, step.dmw, sol.dmeta.value[k]));
  }
  sol.x.left = sol.x.value;  // the first component has no left jumps
  return sol;
}

Payoff payoff_from(const LadlagProcess& process) {
  return [process](Instant instant, int atom) { return process.at(instant, atom); };
}

Payoff payoff_const(double c) {
  return [c](Instant, int) { return c; };
}

namespace {

LadlagProcess evaluation_table(const FiltrationTree& tree, const ExtendedStoppingTime& tau,
                               const Payoff& payoff, int base_stage,
                               const std::function<double(int stage, int post_atom, double e,
                                                          double pi)>& step) {
  const int n = tree.n_stages();
  if (base_stage < 0 || base_stage > n)
    throw Error(ErrorCode::BadArgument, "base stage out of range");
  if (!validate_stopping_time(tree, tau, base_stage).empty())
    throw Error(ErrorCode::BadStoppingTime, "stopping rule invalid or stops before the base stage");

  LadlagProcess table = LadlagProcess::zeros(tree);
  for (int k = n; k >= base_stage; --k) {
    Array continuation;
    if (k < n) {
      DiffuseStep substep = diffuse_substep(
          tree, k, table.left[k + 1],
          [&](int a, double e, double pi) { return step(k, a, e, pi); });
      continuation = expect_given_pre(tree, k, substep.x_plus);
    }
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      const StopDecision d = k >= tau.from_stage ? tau.at(k, i) : StopDecision::Continue;
      double value;
      if (d == StopDecision::StopAtValue || (k == 0 && d == StopDecision::StopAtLeft)) {
        value = payoff(Instant{k, false}, i);
      } else if (k < n) {
        value = continuation[i];
      } else {
        // stage N filler on paths that stopped earlier (never read)
        value = payoff(Instant{k, false}, i);
      }
      table.value[k][i] = value;
      table.left[k][i] =
          d == StopDecision::StopAtLeft && k > 0 ? payoff(Instant{k, true}, i) : value;
    }
  }
  return table;
}

}  // namespace

LadlagProcess g_expectation_table(const FiltrationTree& tree, const Driver& driver,
                                  const ExtendedStoppingTime& tau, const Payoff& payoff,
                                  int base_stage, double tol) {
  if (!(driver.lipschitz * tree.dt() < 1.0))
    throw Error(ErrorCode::NoContraction, "K*dt >= 1");
  return evaluation_table(tree, tau, payoff, base_stage,
                          [&](int k, int, double e, double pi) {
                            return step_solve(e, pi, tree.time(k), driver, tree.dt(), tol);
                          });
}

Array g_expectation(const FiltrationTree& tree, const Driver& driver, int from_stage,
                    const ExtendedStoppingTime& tau, const Payoff& payoff, double tol) {
  return g_expectation_table(tree, driver, tau, payoff, from_stage, tol).value[from_stage];
}

Array g_expectation_localized(const FiltrationTree& tree, const Driver& driver, int from_stage,
                              const ExtendedStoppingTime& tau, const Payoff& payoff,
                              const std::vector<char>& event_at_base,
                              double tol) {
  if (static_cast<int>(event_at_base.size()) != tree.n_atoms(from_stage))
    throw Error(ErrorCode::ShapeMismatch, "event must live on the G_S atoms");
  if (!(driver.lipschitz * tree.dt() < 1.0))
    throw Error(ErrorCode::NoContraction, "K*dt >= 1");
  const Payoff masked = [&](Instant instant, int atom) {
    return event_at_base[ancestor_atom(tree, instant.stage, atom, from_stage)]
               ? payoff(instant, atom)
               : 0.0;
  };
  LadlagProcess table = evaluation_table(
      tree, tau, masked, from_stage, [&](int k, int a, double e, double pi) {
        if (!event_at_base[ancestor_atom_of_post(tree, k, a, from_stage)]) return e;
        return step_solve(e, pi, tree.time(k), driver, tree.dt(), tol);
      });
  return table.value[from_stage];
}

}  // namespace presto
