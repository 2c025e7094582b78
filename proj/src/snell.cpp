#include "presto/snell.hpp"

#include <cmath>
#include <limits>

#include "presto/oracle.hpp"

namespace presto {

SnellEnvelope snell_envelope(const FiltrationTree& tree, const LadlagProcess& obstacle) {
  SnellEnvelope env;
  env.decomposition = solve_rbsde(tree, make_driver("zero"), obstacle);
  env.v = env.decomposition.y;
  env.v_plus = env.decomposition.y_plus;
  return env;
}

MertensDecomposition mertens_decompose(const FiltrationTree& tree, const LadlagProcess& v,
                                       const AdaptedProcess& v_plus, double tol) {
  const int n = tree.n_stages();
  check_shape(tree, v);
  check_shape(tree, v_plus, n - 1);

  MertensDecomposition dec;
  dec.dn_w.assign(n + 1, Array());
  dec.dn_meta = AdaptedProcess::zeros(tree, n - 1);
  dec.da.resize(n + 1);
  dec.db.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    dec.da[k] = Array::Zero(tree.n_atoms(k));
    dec.db[k] = Array::Zero(tree.n_atoms(k));
  }

  for (int k = 1; k <= n; ++k) {
    dec.da[k] = v.left[k] - v.value[k];
    if ((dec.da[k] < -tol).any())
      throw Error(ErrorCode::NotASupermartingale,
                  "negative left reflection at stage " + std::to_string(k));
  }
  for (int k = 0; k < n; ++k) {
    // drift-free diffuse substep: all interval drift in this model sits in
    // the instant reflections
    Array e_post = expect_given_post(tree, k, v.left[k + 1]);
    for (int a = 0; a < tree.n_post(k); ++a) {
      const double drift = v_plus.value[k][a] - e_post[a];
      if (std::abs(drift) > tol)
        throw Error(ErrorCode::NotASupermartingale,
                    drift > 0 ? "interval drift (continuous reflection) is outside this model"
                              : "submartingale drift over an interval");
    }
    dec.dn_w[k + 1] = Array(tree.n_pre(k + 1));
    for (int j = 0; j < tree.n_pre(k + 1); ++j)
      dec.dn_w[k + 1][j] = v.left[k + 1][j] - e_post[tree.pre(k + 1, j).parent];

    Array pvp = expect_given_pre(tree, k, v_plus.value[k]);
    dec.db[k] = v.value[k] - pvp;
    if ((dec.db[k] < -tol).any())
      throw Error(ErrorCode::NotASupermartingale,
                  "negative right reflection at stage " + std::to_string(k));
    for (int a = 0; a < tree.n_post(k); ++a) {
      const int parent = k == 0 ? 0 : tree.post(k, a).parent;
      dec.dn_meta.value[k][a] = v_plus.value[k][a] - pvp[parent];
    }
  }
  return dec;
}

double mertens_reconstruct(const FiltrationTree& tree, const MertensDecomposition& dec,
                           double v0, Instant instant, int atom) {
  const int m = instant.stage;
  std::vector<int> pre_path(m + 1, -1);
  int current = atom;
  for (int k = m; k >= 1; --k) {
    pre_path[k] = current;
    const int post = tree.pre(k, current).parent;
    current = k == 1 ? 0 : tree.post(k - 1, post).parent;
  }
  double acc = v0;
  for (int k = 1; k <= m; ++k) {
    const int i = pre_path[k];
    const int post_parent = tree.pre(k, i).parent;
    const int atom_above = k == 1 ? 0 : tree.post(k - 1, post_parent).parent;
    acc += dec.dn_meta.value[k - 1][post_parent];  // martingale jump at t_{k-1}
    acc -= dec.db[k - 1][atom_above];              // right reflection at t_{k-1}
    acc += dec.dn_w[k][i];                         // Brownian substep into stage k
    if (k < m || !instant.left) acc -= dec.da[k][i];
  }
  return acc;
}

namespace {

// alpha and events enter as F-measurable data; constancy across the marks
// of each G-atom is what makes them usable at the pre level.
Array reduce_to_atoms(const FiltrationTree& tree, int stage, const Array& post_values,
                      const char* what) {
  if (post_values.size() != tree.n_post(stage))
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + " must live on the F-stage atoms");
  if (stage == 0) return post_values;
  Array out(tree.n_atoms(stage));
  for (int i = 0; i < tree.n_atoms(stage); ++i) {
    auto [b, e] = tree.post_children(stage, i);
    out[i] = post_values[b];
    for (int c = b; c < e; ++c)
      if (post_values[c] != post_values[b])
        throw Error(ErrorCode::Measurability,
                    std::string(what) + " is not constant on the G-atom at stage " +
                        std::to_string(stage));
  }
  return out;
}

Array broadcast_down(const FiltrationTree& tree, int base, int stage, const Array& values) {
  if (stage == base) return values;
  Array out(tree.n_atoms(stage));
  for (int i = 0; i < tree.n_atoms(stage); ++i)
    out[i] = values[ancestor_atom(tree, stage, i, base)];
  return out;
}

// E[X | G_base] for X measurable at the G_stage atoms.
Array condexp_to(const FiltrationTree& tree, int stage, int base, Array values) {
  for (int k = stage; k > base; --k)
    values = expect_given_pre(tree, k - 1, expect_given_post(tree, k - 1, values));
  return values;
}

}  // namespace

BellmanReport bellman_check(const FiltrationTree& tree, const LadlagProcess& obstacle, int S,
                            int theta, const Array& alpha_post,
                            const std::vector<char>& event_post,
                            std::int64_t max_stopping_times, double tol) {
  if (S < 0 || theta < S || theta > tree.n_stages())
    throw Error(ErrorCode::BadArgument, "need 0 <= S <= theta <= N");
  check_shape(tree, obstacle);

  Array alpha = reduce_to_atoms(tree, theta, alpha_post, "alpha");
  if ((alpha < 0.0).any()) throw Error(ErrorCode::BadArgument, "alpha must be nonnegative");
  Array event_arr(static_cast<Eigen::Index>(event_post.size()));
  for (Eigen::Index i = 0; i < event_arr.size(); ++i) event_arr[i] = event_post[i] ? 1.0 : 0.0;
  Array event = reduce_to_atoms(tree, S, event_arr, "event");

  const Driver zero = make_driver("zero");
  SnellEnvelope env = snell_envelope(tree, obstacle);
  BellmanReport report;

  // (1) E[alpha V_theta | G_S] = sup over rules >= theta of E[alpha xi_tau | G_S]
  {
    Array lhs = condexp_to(tree, theta, S, alpha * env.v.value[theta]);
    Array rhs = Array::Constant(tree.n_atoms(S), -std::numeric_limits<double>::infinity());
    EnumerationBudget budget{max_stopping_times, InstantMode::Doubled};
    const Payoff payoff = payoff_from(obstacle);
    const Payoff scaled = [&tree, &alpha, &payoff, theta](Instant instant, int atom) {
      return alpha[ancestor_atom(tree, instant.stage, atom, theta)] * payoff(instant, atom);
    };
    for_each_stopping_time(tree, theta, budget, [&](const ExtendedStoppingTime& tau) {
      rhs = rhs.max(g_expectation(tree, zero, S, tau, scaled));
    });
    report.max_bellman_gap = (lhs - rhs).abs().maxCoeff();
    report.bellman_ok = report.max_bellman_gap <= tol;
  }

  // (2) envelope of the scaled reward (window [theta, N]) = alpha * envelope
  {
    LadlagProcess scaled = obstacle;
    for (int k = theta; k <= tree.n_stages(); ++k) {
      Array factor = broadcast_down(tree, theta, k, alpha);
      scaled.left[k] *= factor;
      scaled.value[k] *= factor;
    }
    RbsdeSolution scaled_env = solve_rbsde_window(tree, zero, scaled, theta);
    double gap = 0.0;
    for (int k = theta; k <= tree.n_stages(); ++k) {
      Array factor = broadcast_down(tree, theta, k, alpha);
      gap = std::max(gap, (scaled_env.y.value[k] - factor * env.v.value[k]).abs().maxCoeff());
      if (k > theta)
        gap = std::max(gap, (scaled_env.y.left[k] - factor * env.v.left[k]).abs().maxCoeff());
    }
    report.max_scaling_gap = gap;
    report.scaling_ok = gap <= tol;
  }

  // (3) envelope of the masked reward (window [S, N]) = mask * envelope, exactly
  {
    LadlagProcess masked = obstacle;
    for (int k = S; k <= tree.n_stages(); ++k) {
      Array factor = broadcast_down(tree, S, k, event);
      masked.left[k] = (factor > 0.5).select(masked.left[k], 0.0);
      masked.value[k] = (factor > 0.5).select(masked.value[k], 0.0);
    }
    RbsdeSolution masked_env = solve_rbsde_window(tree, zero, masked, S);
    double gap = 0.0;
    for (int k = S; k <= tree.n_stages(); ++k) {
      Array factor = broadcast_down(tree, S, k, event);
      Array expected_value = (factor > 0.5).select(env.v.value[k], 0.0);
      gap = std::max(gap, (masked_env.y.value[k] - expected_value).abs().maxCoeff());
      if (k > S) {
        Array expected_left = (factor > 0.5).select(env.v.left[k], 0.0);
        gap = std::max(gap, (masked_env.y.left[k] - expected_left).abs().maxCoeff());
      }
    }
    report.max_localization_gap = gap;
    report.localization_ok = gap == 0.0;
  }

  // (4) supermartingale system: E[V at a clipped later rule | G at stage j]
  //     never exceeds V at stage j
  {
    const Payoff v_payoff = payoff_from(env.v);
    double excess = 0.0;
    ExtendedStoppingTime horizon =
        ExtendedStoppingTime::always_at(tree, S, Instant{tree.n_stages(), false});
    for (int m = S; m <= tree.n_stages(); ++m) {
      for (int pass = 0; pass < (m > S ? 2 : 1); ++pass) {
        const bool left = pass == 1;
        ExtendedStoppingTime mu = clip_at(tree, horizon, Instant{m, left});
        LadlagProcess table = g_expectation_table(tree, zero, mu, v_payoff, S);
        const int last_valid = left ? m - 1 : m;
        for (int j = S; j <= last_valid; ++j)
          excess = std::max(excess, (table.value[j] - env.v.value[j]).maxCoeff());
      }
    }
    report.max_supermartingale_excess = excess;
    report.supermartingale_ok = excess <= tol;
  }
  return report;
}

}  // namespace presto
