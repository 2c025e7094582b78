#pragma once

#include "presto/oracle.hpp"
#include "presto/rbsde.hpp"

namespace presto {

/// The per-atom value of the stopping problem at stage S: the reflected
/// solution read at the value instant. Equals the exhaustive supremum over
/// previsible rules whenever the scheme is monotone
/// (K * (dt + max|dW|) < 1).
Array value_function(const FiltrationTree& tree, const Driver& driver,
                     const LadlagProcess& obstacle, int S);

/// First doubled instant >= S at which
///   alpha * Y + (alpha - 1) * int_0^t g <= obstacle,
/// the running integral accumulating g at the right-limit state. Defaults to
/// the horizon when never hit.
ExtendedStoppingTime tau_alpha(const FiltrationTree& tree, const Driver& driver,
                               const RbsdeSolution& sol, int S, double alpha);

/// Earliest doubled instant >= S with alpha * Y <= obstacle (horizon when
/// none).
ExtendedStoppingTime theta_alpha(const FiltrationTree& tree, const RbsdeSolution& sol, int S,
                                 double alpha);

/// Largest rule keeping both reflections flat: advance until entering the
/// next instant would pick up a dB (stop at the value instant) or a dA (stop
/// at the next left instant). Grid mode restricts stops to value instants,
/// stopping as soon as any successor carries a dA.
ExtendedStoppingTime tau_tilde(const FiltrationTree& tree, const RbsdeSolution& sol, int S,
                               InstantMode mode = InstantMode::Doubled);

/// True iff the reflections are pathwise flat over [S, tau]: no dA inside
/// the window and no dB strictly before the stop stage.
bool is_martingale_interval(const FiltrationTree& tree, const Driver& driver,
                            const RbsdeSolution& sol, int S, const ExtendedStoppingTime& tau);

/// Direct check of the same property: the solution restricted to the window
/// reproduces itself under the nonlinear evaluation, sampled over clipped
/// sub-rules. Must agree with is_martingale_interval.
bool is_martingale_interval_direct(const FiltrationTree& tree, const Driver& driver,
                                   const RbsdeSolution& sol, int S,
                                   const ExtendedStoppingTime& tau, double tol = 1e-10);

struct StoppingDiagnostics {
  ExtendedStoppingTime tau;
  Array attained;  // per G_S atom: nonlinear evaluation of the obstacle at tau
  Array gap;       // Y_S - attained (never < -1e-10 under the monotone scheme)
  bool crit_a = false;  // attained equals Y_S per atom
  bool crit_b = false;  // Y = obstacle at the stop atoms and value preserved to 0
  bool crit_c = false;  // evaluation at 0 via tau equals evaluation of Y_S
};

/// Evaluates the three equivalent optimality assertions for a candidate
/// rule.
StoppingDiagnostics optimality_report(const FiltrationTree& tree, const Driver& driver,
                                      const RbsdeSolution& sol, int S,
                                      const ExtendedStoppingTime& tau_star, double tol = 1e-9);

/// Max of E^{p,g}_{sigma,mu}(U_mu) - U_sigma over sigma's stop atoms
/// (signed; <= tol everywhere is the supermartingale property, |.| <= tol
/// the martingale property). U is read at both instants.
std::pair<double, double> evaluation_gap(const FiltrationTree& tree, const Driver& driver,
                                         const LadlagProcess& u, const ExtendedStoppingTime& sigma,
                                         const ExtendedStoppingTime& mu);

}  // namespace presto
