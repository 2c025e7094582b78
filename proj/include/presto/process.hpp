#pragma once

#include <cstdint>
#include <vector>

#include "presto/tree.hpp"

namespace presto {

/// A time point on the doubled grid {0, 1-, 1, 2-, 2, ...}. Stage 0 has a
/// single instant (F_0 is trivial, so 0- and 0 coincide).
struct Instant {
  int stage = 0;
  bool left = false;

  /// Strict order key: 0 < 1- < 1 < 2- < ...
  int key() const { return 2 * stage - (left ? 1 : 0); }
  friend bool operator==(const Instant& a, const Instant& b) { return a.key() == b.key(); }
  friend bool operator<(const Instant& a, const Instant& b) { return a.key() < b.key(); }
  friend bool operator<=(const Instant& a, const Instant& b) { return a.key() <= b.key(); }
};

/// Predictable ladlag process sampled at the doubled instants: for each
/// stage k >= 1 a left value (at k-) and a value (at k) on the G_k atoms.
/// Stage 0 holds singleton arrays with the convention x_{0-} = x_0.
struct LadlagProcess {
  std::vector<Array> left;   // [k] on atoms(k), k = 0..N
  std::vector<Array> value;  // [k] on atoms(k), k = 0..N

  static LadlagProcess zeros(const FiltrationTree& tree);
  static LadlagProcess constant(const FiltrationTree& tree, double c);

  double x0() const { return value[0][0]; }
  int n_stages() const { return static_cast<int>(value.size()) - 1; }
  double at(const Instant& instant, int atom) const {
    return instant.left ? left[instant.stage][atom] : value[instant.stage][atom];
  }
};

/// Process sampled on the F_k atoms (post-nodes), k = 0..N. Houses right
/// limits, integrands on the open intervals, and mark-level martingale
/// increments.
struct AdaptedProcess {
  std::vector<Array> value;  // [k] on post_nodes[k]

  static AdaptedProcess zeros(const FiltrationTree& tree, int last_stage);
  int n_stages() const { return static_cast<int>(value.size()) - 1; }
};

enum class StopDecision : std::uint8_t { Continue = 0, StopAtLeft = 1, StopAtValue = 2 };

/// Previsible stopping rule over the doubled instants: one decision per
/// G_k atom reached without a prior stop. Decisions being attached to
/// G_k atoms is exactly the discrete previsibility requirement.
struct ExtendedStoppingTime {
  int from_stage = 0;                               // stops are >= this stage
  std::vector<std::vector<StopDecision>> decision;  // [k] per atom; [0] has one entry

  static ExtendedStoppingTime always_at(const FiltrationTree& tree, int from_stage,
                                        Instant instant);

  StopDecision at(int stage, int atom) const { return decision[stage][atom]; }
  void set(int stage, int atom, StopDecision d) { decision[stage][atom] = d; }

  /// Resets decisions on atoms that can never be reached to Continue so
  /// that equal stopping times compare equal.
  void normalize(const FiltrationTree& tree);
};

bool operator==(const ExtendedStoppingTime& a, const ExtendedStoppingTime& b);

/// Stop instant of tau on the path through the given stage-N post-node
/// ancestry; walks from tau.from_stage forward.
Instant stop_instant_on_path(const FiltrationTree& tree, const ExtendedStoppingTime& tau,
                             const std::vector<int>& pre_atom_per_stage);

/// Per-atom reachability and stop sets of a stopping time: for each stage,
/// which atoms are reached undecided and what decision applies.
struct StopProfile {
  // stop_at[k][i] holds the instant at which the path through atom i of
  // stage k is already stopped (key <= 2k), or -1 if still running at the
  // value instant of stage k.
  std::vector<std::vector<int>> stopped_key;
};

StopProfile stop_profile(const FiltrationTree& tree, const ExtendedStoppingTime& tau);

/// Pointwise (pathwise) maximum of two stopping rules with the same
/// from_stage; the result is again previsible.
ExtendedStoppingTime pointwise_max(const FiltrationTree& tree, const ExtendedStoppingTime& a,
                                   const ExtendedStoppingTime& b);

/// Pointwise minimum (the earlier stop on every path).
ExtendedStoppingTime pointwise_min(const FiltrationTree& tree, const ExtendedStoppingTime& a,
                                   const ExtendedStoppingTime& b);

/// tau stopped no later than the given instant.
ExtendedStoppingTime clip_at(const FiltrationTree& tree, const ExtendedStoppingTime& tau,
                             Instant instant);

/// True when a stops no later than b on every path.
bool pointwise_leq(const FiltrationTree& tree, const ExtendedStoppingTime& a,
                   const ExtendedStoppingTime& b);

/// All (instant, atom) pairs at which tau actually stops.
std::vector<std::pair<Instant, int>> stop_points(const FiltrationTree& tree,
                                                 const ExtendedStoppingTime& tau);

struct RegularityReport {
  bool lusc = true;               // left value <= value everywhere
  bool p_right_dominated = true;  // E[xi_{(k+1)-} | G_k] <= xi_k everywhere
  bool constant_left = true;      // left value == value everywhere
  std::vector<Violation> lusc_violations;
  std::vector<Violation> right_violations;
};

RegularityReport regularity_report(const FiltrationTree& tree, const LadlagProcess& obstacle);

/// Checks the stopping-time invariants and tau >= S; reports, never throws.
ValidationReport validate_stopping_time(const FiltrationTree& tree,
                                        const ExtendedStoppingTime& tau, int from_stage);

enum class BetaNormKind { SupSquare, TimeIntegral };

/// Weighted second-moment diagnostics: E[max_k e^{beta t_k} X_k^2] or
/// E[sum_k e^{beta t_k} X_k^2 dt] over the finite tree.
double beta_norm(const FiltrationTree& tree, const LadlagProcess& process, double beta,
                 BetaNormKind kind);
double beta_norm(const FiltrationTree& tree, const AdaptedProcess& process, double beta,
                 BetaNormKind kind);

/// Shape/finiteness validation helpers (throw ShapeMismatch/BadArgument).
void check_shape(const FiltrationTree& tree, const LadlagProcess& process);
void check_shape(const FiltrationTree& tree, const AdaptedProcess& process, int last_stage);

}  // namespace presto
