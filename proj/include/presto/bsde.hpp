#pragma once

#include <functional>

#include "presto/driver.hpp"
#include "presto/process.hpp"
#include "presto/tree.hpp"

namespace presto {

/// Solves the per-node implicit equation y = e + g(t, y, pi) * dt by
/// fixed-point iteration (contractive while K*dt < 1).
double step_solve(double e, double pi, double t, const Driver& driver, double dt,
                  double tol = 1e-14);

/// Solution of the plain backward equation on the tree. The first component
/// is left continuous (left values equal values); the martingale part is
/// split into the Brownian-substep residual dmw and the jump dmeta at the
/// predictable grid times, with E[dmw | F_k] = E[dmw dW | F_k] =
/// E[dmeta | G_k] = 0.
struct BsdeSolution {
  LadlagProcess x;
  AdaptedProcess x_plus;       // right limits, k = 0..N-1
  AdaptedProcess pi;           // integrand on (t_k, t_{k+1}], k = 0..N-1
  std::vector<Array> dmw;      // [k] on pre_nodes[k], k = 1..N ([0] empty)
  AdaptedProcess dmeta;        // [k] on post_nodes[k], k = 0..N-1
  double max_martingale_residual = 0.0;
};

/// Backward solve with terminal condition on the G_N atoms (the terminal
/// value is measurable just before the horizon).
BsdeSolution solve_bsde(const FiltrationTree& tree, const Driver& driver, const Array& terminal,
                        double tol = 1e-14);

/// Payoff sampled at (instant, atom). Must be total; the evaluation engine
/// only reads it where a stopping rule stops.
using Payoff = std::function<double(Instant, int)>;

Payoff payoff_from(const LadlagProcess& process);
Payoff payoff_const(double c);

/// Backward table of the nonlinear evaluation with terminal time tau: entry
/// (instant, atom) holds the value at that instant on paths where tau has
/// not yet stopped; entries strictly after a stop are filler and must not be
/// read. Stopping at a left instant k- terminates before the mark substep of
/// stage k. Rows below base_stage are left at zero.
LadlagProcess g_expectation_table(const FiltrationTree& tree, const Driver& driver,
                                  const ExtendedStoppingTime& tau, const Payoff& payoff,
                                  int base_stage, double tol = 1e-14);

/// E^{p,g}_{S,tau}(payoff at tau) on the G_S atoms, S a stage.
Array g_expectation(const FiltrationTree& tree, const Driver& driver, int from_stage,
                    const ExtendedStoppingTime& tau, const Payoff& payoff, double tol = 1e-14);

/// Evaluation with both the driver and the payoff masked by an event that is
/// a union of G_S atoms: off the event the generator and the payoff are
/// zero. Equals the masked plain evaluation exactly (zero-one law).
Array g_expectation_localized(const FiltrationTree& tree, const Driver& driver, int from_stage,
                              const ExtendedStoppingTime& tau, const Payoff& payoff,
                              const std::vector<char>& event_at_base, double tol = 1e-14);

}  // namespace presto
