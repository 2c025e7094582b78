#pragma once

#include "presto/rbsde.hpp"

namespace presto {

/// Value process of the linear stopping problem (zero driver): the smallest
/// supermartingale system dominating the reward at both instants, with its
/// decomposition increments.
struct SnellEnvelope {
  LadlagProcess v;
  AdaptedProcess v_plus;     // k = 0..N-1
  RbsdeSolution decomposition;  // zero-driver reflected solution (same data)
};

SnellEnvelope snell_envelope(const FiltrationTree& tree, const LadlagProcess& obstacle);

/// Martingale increments and reflection increments reproducing a
/// supermartingale of envelope form: V at any instant equals V_0 plus the
/// accumulated martingale increments strictly before the instant minus the
/// reflections picked up on the way.
struct MertensDecomposition {
  std::vector<Array> dn_w;   // [k] on pre_nodes[k], k = 1..N: Brownian-substep increment
  AdaptedProcess dn_meta;    // [k] on post_nodes[k], k = 0..N-1: jump at t_k
  std::vector<Array> da;     // [k] on atoms(k)
  std::vector<Array> db;     // [k] on atoms(k)
};

/// Derives the decomposition from (V, V_plus). Requires the diffuse substep
/// to be drift free (all interval drift in this model sits in the instant
/// reflections); rejects negative reflections and interval drift with
/// NOT_A_SUPERMARTINGALE.
MertensDecomposition mertens_decompose(const FiltrationTree& tree, const LadlagProcess& v,
                                       const AdaptedProcess& v_plus, double tol = 1e-10);

/// Reconstructs V at an instant from the decomposition by telescoping along
/// the path to the given atom (for verification).
double mertens_reconstruct(const FiltrationTree& tree, const MertensDecomposition& dec,
                           double v0, Instant instant, int atom);

struct BellmanReport {
  bool bellman_ok = true;        // conditional value identity at (S, theta)
  bool scaling_ok = true;        // envelope of the scaled reward = scaled envelope
  bool localization_ok = true;   // envelope of the masked reward = masked envelope
  bool supermartingale_ok = true;
  double max_bellman_gap = 0.0;
  double max_scaling_gap = 0.0;
  double max_localization_gap = 0.0;
  double max_supermartingale_excess = 0.0;
};

/// Linear-case value-family algebra on one instance: the conditional value
/// identity E[alpha V_theta | G_S] = sup_tau E[alpha xi_tau | G_S], reward
/// scaling, indicator localization, and the supermartingale system property
/// over a sampled set of nested previsible rules. alpha lives on the F_theta
/// atoms and the event on the F_S atoms; both must be constant across marks
/// within each G-atom (MEASURABILITY otherwise).
BellmanReport bellman_check(const FiltrationTree& tree, const LadlagProcess& obstacle, int S,
                            int theta, const Array& alpha_post,
                            const std::vector<char>& event_post,
                            std::int64_t max_stopping_times = 1000000, double tol = 1e-10);

}  // namespace presto
