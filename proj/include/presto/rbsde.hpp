#pragma once

#include "presto/bsde.hpp"
#include "presto/driver.hpp"
#include "presto/process.hpp"
#include "presto/tree.hpp"

namespace presto {

enum class BarrierSide { Lower, Upper };

/// Reflected solution quintuple on the doubled grid. At each backward stage:
/// a Brownian substep targets the next left value, the mark average gives the
/// predictable projection of the right limit, the value instant reflects
/// through dB = Y_k - E[Y_{k+}|G_k], and the left instant reflects through
/// dA = Y_{k-} - Y_k. Both reflections are exact maxima, so the Skorokhod
/// products vanish identically.
struct RbsdeSolution {
  BarrierSide side = BarrierSide::Lower;
  int from_stage = 0;  // stages below hold zeros (windowed solves)

  LadlagProcess obstacle;  // the barrier the solve ran against
  LadlagProcess y;
  AdaptedProcess y_plus;      // k = 0..N-1
  AdaptedProcess pi;          // k = 0..N-1
  std::vector<Array> dmw;     // [k] on pre_nodes[k], k = 1..N
  AdaptedProcess dmeta;       // k = 0..N-1
  std::vector<Array> da;      // [k] on atoms(k); da[from_stage] = 0
  std::vector<Array> db;      // [k] on atoms(k); db[N] = 0
  std::vector<Array> p_y_plus;  // [k] on atoms(k); [N] repeats y.value[N]

  /// Cumulative reflection picked up strictly inside (S, instant]: the A
  /// part of the window, per path ending at the given atom.
  double a_between(const FiltrationTree& tree, int from, Instant instant, int atom) const;
  /// Cumulative dB over [S, instant), matching B_{tau-} - B_{S-}.
  double b_between(const FiltrationTree& tree, int from, Instant instant, int atom) const;
};

RbsdeSolution solve_rbsde(const FiltrationTree& tree, const Driver& driver,
                          const LadlagProcess& obstacle,
                          BarrierSide side = BarrierSide::Lower, double tol = 1e-14);

/// Same recursion truncated at a base stage: no left-instant step at the
/// base, stages below untouched. The values on [S, N] coincide with the
/// full solve (the recursion is backward).
RbsdeSolution solve_rbsde_window(const FiltrationTree& tree, const Driver& driver,
                                 const LadlagProcess& obstacle, int from_stage,
                                 BarrierSide side = BarrierSide::Lower, double tol = 1e-14);

/// Windowed solve with the obstacle and the driver masked by an event that
/// is a union of G_S atoms. The whole quintuple equals the masked original
/// exactly: off the event everything is zero, on the event nothing changes.
RbsdeSolution solve_rbsde_localized(const FiltrationTree& tree, const Driver& driver,
                                    const LadlagProcess& obstacle, int from_stage,
                                    const std::vector<char>& event_at_base, double tol = 1e-14);

struct PicardResult {
  RbsdeSolution solution;
  int iterations = 0;
};

/// Fixed-point variant: repeatedly solves the linear reflected problem with
/// the driver frozen at the previous iterate until the sup-change of (Y, pi)
/// is below tol.
PicardResult solve_rbsde_picard(const FiltrationTree& tree, const Driver& driver,
                                const LadlagProcess& obstacle, double tol = 1e-12,
                                int max_iter = 50);

struct SkorokhodReport {
  std::vector<Violation> violations;
  double max_identity_residual = 0.0;
  bool empty() const { return violations.empty(); }
};

/// Re-derives every structural identity of a solution: nonnegativity and
/// Skorokhod products of dA/dB, jump identities, domination, martingale
/// residuals, the value/left recursions, and the telescoped one-step
/// equation. Reports; never throws.
SkorokhodReport verify_rbsde(const FiltrationTree& tree, const Driver& driver,
                             const RbsdeSolution& sol, double tol = 1e-10);

}  // namespace presto
