#include "presto/process.hpp"

#include <algorithm>
#include <cmath>

namespace presto {

LadlagProcess LadlagProcess::zeros(const FiltrationTree& tree) {
  LadlagProcess out;
  out.left.resize(tree.n_stages() + 1);
  out.value.resize(tree.n_stages() + 1);
  for (int k = 0; k <= tree.n_stages(); ++k) {
    out.left[k] = Array::Zero(tree.n_atoms(k));
    out.value[k] = Array::Zero(tree.n_atoms(k));
  }
  return out;
}

LadlagProcess LadlagProcess::constant(const FiltrationTree& tree, double c) {
  LadlagProcess out = zeros(tree);
  for (int k = 0; k <= tree.n_stages(); ++k) {
    out.left[k].setConstant(c);
    out.value[k].setConstant(c);
  }
  return out;
}

AdaptedProcess AdaptedProcess::zeros(const FiltrationTree& tree, int last_stage) {
  AdaptedProcess out;
  out.value.resize(last_stage + 1);
  for (int k = 0; k <= last_stage; ++k) out.value[k] = Array::Zero(tree.n_post(k));
  return out;
}

ExtendedStoppingTime ExtendedStoppingTime::always_at(const FiltrationTree& tree, int from_stage,
                                                     Instant instant) {
  ExtendedStoppingTime tau;
  tau.from_stage = from_stage;
  tau.decision.resize(tree.n_stages() + 1);
  for (int k = 0; k <= tree.n_stages(); ++k)
    tau.decision[k].assign(tree.n_atoms(k), StopDecision::Continue);
  for (int i = 0; i < tree.n_atoms(instant.stage); ++i)
    tau.decision[instant.stage][i] =
        instant.left && instant.stage > 0 ? StopDecision::StopAtLeft : StopDecision::StopAtValue;
  return tau;
}

StopProfile stop_profile(const FiltrationTree& tree, const ExtendedStoppingTime& tau) {
  StopProfile profile;
  const int n = tree.n_stages();
  profile.stopped_key.resize(n + 1);
  auto own_key = [&](int stage, StopDecision d) -> int {
    switch (d) {
      case StopDecision::StopAtLeft: return stage == 0 ? 0 : 2 * stage - 1;
      case StopDecision::StopAtValue: return 2 * stage;
      case StopDecision::Continue: return -1;
    }
    return -1;
  };
  profile.stopped_key[0] = {tau.from_stage == 0 ? own_key(0, tau.at(0, 0)) : -1};
  for (int k = 1; k <= n; ++k) {
    profile.stopped_key[k].assign(tree.n_atoms(k), -1);
    for (int i = 0; i < tree.n_pre(k); ++i) {
      const int post_parent = tree.pre(k, i).parent;
      const int pre_parent = k == 1 ? 0 : tree.post(k - 1, post_parent).parent;
      const int inherited = profile.stopped_key[k - 1][pre_parent];
      if (inherited >= 0) {
        profile.stopped_key[k][i] = inherited;
      } else if (k >= tau.from_stage) {
        profile.stopped_key[k][i] = own_key(k, tau.at(k, i));
      }
    }
  }
  return profile;
}

void ExtendedStoppingTime::normalize(const FiltrationTree& tree) {
  StopProfile profile = stop_profile(tree, *this);
  for (int k = 1; k <= tree.n_stages(); ++k) {
    for (int i = 0; i < tree.n_pre(k); ++i) {
      const int post_parent = tree.pre(k, i).parent;
      const int pre_parent = k == 1 ? 0 : tree.post(k - 1, post_parent).parent;
      const bool deciding = k >= from_stage && profile.stopped_key[k - 1][pre_parent] < 0;
      if (!deciding) decision[k][i] = StopDecision::Continue;
    }
  }
  if (from_stage > 0) decision[0][0] = StopDecision::Continue;
}

bool operator==(const ExtendedStoppingTime& a, const ExtendedStoppingTime& b) {
  return a.from_stage == b.from_stage && a.decision == b.decision;
}

Instant stop_instant_on_path(const FiltrationTree& tree, const ExtendedStoppingTime& tau,
                             const std::vector<int>& pre_atom_per_stage) {
  StopProfile profile = stop_profile(tree, tau);
  for (int k = std::max(1, tau.from_stage); k <= tree.n_stages(); ++k) {
    const int key = profile.stopped_key[k][pre_atom_per_stage[k]];
    if (key >= 0) return Instant{(key + 1) / 2, key % 2 == 1};
  }
  if (tau.from_stage == 0 && profile.stopped_key[0][0] == 0) return Instant{0, false};
  throw Error(ErrorCode::BadStoppingTime, "path never stops");
}

namespace {

// Combines two stop profiles pathwise: the later stop for Max, the earlier
// for Min. Stops landing at stage k become decisions at that atom.
enum class CombineRule { Max, Min };

ExtendedStoppingTime combine(const FiltrationTree& tree, const ExtendedStoppingTime& a,
                             const ExtendedStoppingTime& b, CombineRule rule) {
  if (a.from_stage != b.from_stage)
    throw Error(ErrorCode::BadArgument, "combining stopping rules requires equal from_stage");
  StopProfile pa = stop_profile(tree, a);
  StopProfile pb = stop_profile(tree, b);
  ExtendedStoppingTime out;
  out.from_stage = a.from_stage;
  out.decision.resize(tree.n_stages() + 1);
  for (int k = 0; k <= tree.n_stages(); ++k)
    out.decision[k].assign(tree.n_atoms(k), StopDecision::Continue);
  for (int k = a.from_stage; k <= tree.n_stages(); ++k) {
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      const int ka = pa.stopped_key[k][i];
      const int kb = pb.stopped_key[k][i];
      int key;
      if (rule == CombineRule::Max) {
        if (ka < 0 || kb < 0) continue;  // still running past this stage
        key = std::max(ka, kb);
      } else {
        if (ka < 0 && kb < 0) continue;
        key = ka < 0 ? kb : (kb < 0 ? ka : std::min(ka, kb));
      }
      if (key == 2 * k)
        out.decision[k][i] = StopDecision::StopAtValue;
      else if (key == 2 * k - 1 && k > 0)
        out.decision[k][i] = StopDecision::StopAtLeft;
      // earlier keys were handled at the ancestor where the combined rule stopped
    }
  }
  out.normalize(tree);
  return out;
}

}  // namespace

ExtendedStoppingTime pointwise_max(const FiltrationTree& tree, const ExtendedStoppingTime& a,
                                   const ExtendedStoppingTime& b) {
  return combine(tree, a, b, CombineRule::Max);
}

ExtendedStoppingTime pointwise_min(const FiltrationTree& tree, const ExtendedStoppingTime& a,
                                   const ExtendedStoppingTime& b) {
  return combine(tree, a, b, CombineRule::Min);
}

ExtendedStoppingTime clip_at(const FiltrationTree& tree, const ExtendedStoppingTime& tau,
                             Instant instant) {
  return pointwise_min(tree, tau,
                       ExtendedStoppingTime::always_at(tree, tau.from_stage, instant));
}

std::vector<std::pair<Instant, int>> stop_points(const FiltrationTree& tree,
                                                 const ExtendedStoppingTime& tau) {
  StopProfile profile = stop_profile(tree, tau);
  std::vector<std::pair<Instant, int>> out;
  if (tau.from_stage == 0 && profile.stopped_key[0][0] == 0) {
    out.push_back({Instant{0, false}, 0});
    return out;
  }
  for (int k = std::max(1, tau.from_stage); k <= tree.n_stages(); ++k) {
    for (int i = 0; i < tree.n_pre(k); ++i) {
      const int key = profile.stopped_key[k][i];
      if (key == 2 * k)
        out.push_back({Instant{k, false}, i});
      else if (key == 2 * k - 1)
        out.push_back({Instant{k, true}, i});
    }
  }
  return out;
}

bool pointwise_leq(const FiltrationTree& tree, const ExtendedStoppingTime& a,
                   const ExtendedStoppingTime& b) {
  StopProfile pa = stop_profile(tree, a);
  StopProfile pb = stop_profile(tree, b);
  const int n = tree.n_stages();
  for (int i = 0; i < tree.n_pre(n); ++i) {
    if (pa.stopped_key[n][i] < 0 || pb.stopped_key[n][i] < 0)
      throw Error(ErrorCode::BadStoppingTime, "comparison of rules that never stop");
    if (pa.stopped_key[n][i] > pb.stopped_key[n][i]) return false;
  }
  return true;
}

RegularityReport regularity_report(const FiltrationTree& tree, const LadlagProcess& obstacle) {
  check_shape(tree, obstacle);
  RegularityReport report;
  for (int k = 1; k <= tree.n_stages(); ++k) {
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      const double gap = obstacle.left[k][i] - obstacle.value[k][i];
      if (gap != 0.0) report.constant_left = false;
      if (gap > 0.0) {
        report.lusc = false;
        report.lusc_violations.push_back({"pre[" + std::to_string(k) + "][" + std::to_string(i) + "]",
                                          "LEFT_ABOVE_VALUE", gap});
      }
    }
  }
  for (int k = 0; k < tree.n_stages(); ++k) {
    // E[xi_{(k+1)-} | G_k] against xi_k
    Array projected = expect_given_pre(tree, k, expect_given_post(tree, k, obstacle.left[k + 1]));
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      const double gap = projected[i] - obstacle.value[k][i];
      if (gap > 0.0) {
        report.p_right_dominated = false;
        report.right_violations.push_back({"atom[" + std::to_string(k) + "][" + std::to_string(i) + "]",
                                           "RIGHT_LIMIT_ABOVE_VALUE", gap});
      }
    }
  }
  return report;
}

ValidationReport validate_stopping_time(const FiltrationTree& tree,
                                        const ExtendedStoppingTime& tau, int from_stage) {
  ValidationReport report;
  const int n = tree.n_stages();
  if (static_cast<int>(tau.decision.size()) != n + 1) {
    report.violations.push_back({"tau", "SHAPE_MISMATCH",
                                 static_cast<double>(tau.decision.size())});
    return report;
  }
  for (int k = 0; k <= n; ++k) {
    if (static_cast<int>(tau.decision[k].size()) != tree.n_atoms(k)) {
      report.violations.push_back(
          {"tau[" + std::to_string(k) + "]", "SHAPE_MISMATCH",
           static_cast<double>(tau.decision[k].size())});
      return report;
    }
  }
  StopProfile profile = stop_profile(tree, tau);
  const int min_key = 2 * from_stage;
  for (int k = std::max(0, tau.from_stage); k <= n; ++k) {
    for (int i = 0; i < tree.n_atoms(k); ++i) {
      const int key = profile.stopped_key[k][i];
      if (k == n && key < 0)
        report.violations.push_back({"pre[" + std::to_string(k) + "][" + std::to_string(i) + "]",
                                     "NO_STOP", 0.0});
      // flag a stop decided at this atom that lands before the base stage
      const bool decided_here = key >= 0 && key >= 2 * k - 1;
      if (decided_here && key < min_key)
        report.violations.push_back({"pre[" + std::to_string(k) + "][" + std::to_string(i) + "]",
                                     "STOP_BEFORE_FROM_STAGE",
                                     static_cast<double>(min_key - key)});
    }
  }
  return report;
}

void check_shape(const FiltrationTree& tree, const LadlagProcess& process) {
  const int n = tree.n_stages();
  if (static_cast<int>(process.left.size()) != n + 1 ||
      static_cast<int>(process.value.size()) != n + 1)
    throw Error(ErrorCode::ShapeMismatch, "process has wrong stage count");
  for (int k = 0; k <= n; ++k) {
    if (process.left[k].size() != tree.n_atoms(k) || process.value[k].size() != tree.n_atoms(k))
      throw Error(ErrorCode::ShapeMismatch,
                  "process arrays do not match atom count at stage " + std::to_string(k));
    if (!process.left[k].isFinite().all() || !process.value[k].isFinite().all())
      throw Error(ErrorCode::BadArgument, "process has non-finite values");
  }
}

void check_shape(const FiltrationTree& tree, const AdaptedProcess& process, int last_stage) {
  if (static_cast<int>(process.value.size()) != last_stage + 1)
    throw Error(ErrorCode::ShapeMismatch, "adapted process has wrong stage count");
  for (int k = 0; k <= last_stage; ++k)
    if (process.value[k].size() != tree.n_post(k))
      throw Error(ErrorCode::ShapeMismatch,
                  "adapted process does not match post-node count at stage " + std::to_string(k));
}

namespace {

double weight(double beta, double t) { return std::exp(beta * t); }

}  // namespace

double beta_norm(const FiltrationTree& tree, const LadlagProcess& process, double beta,
                 BetaNormKind kind) {
  if (beta < 0.0) throw Error(ErrorCode::BadArgument, "beta must be >= 0");
  check_shape(tree, process);
  const int n = tree.n_stages();
  if (kind == BetaNormKind::TimeIntegral) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k)
      acc += weight(beta, tree.time(k)) * tree.dt() *
             (tree.pre_prob(k) * process.value[k].square()).sum();
    return acc;
  }
  // SupSquare: expectation of the pathwise running maximum.
  const double x0 = process.value[0][0];
  Array running = Array::Constant(1, x0 * x0);  // post level, stage 0
  for (int k = 1; k <= n; ++k) {
    const double w = weight(beta, tree.time(k));
    Array at_pre(tree.n_pre(k));
    for (int i = 0; i < tree.n_pre(k); ++i) {
      const double term =
          w * std::max(process.left[k][i] * process.left[k][i],
                       process.value[k][i] * process.value[k][i]);
      at_pre[i] = std::max(running[tree.pre(k, i).parent], term);
    }
    if (k == n) return (tree.pre_prob(n) * at_pre).sum();
    Array at_post(tree.n_post(k));
    for (int i = 0; i < tree.n_post(k); ++i) at_post[i] = at_pre[tree.post(k, i).parent];
    running = std::move(at_post);
  }
  return x0 * x0;  // n == 0 cannot happen (trees have >= 1 stage)
}

double beta_norm(const FiltrationTree& tree, const AdaptedProcess& process, double beta,
                 BetaNormKind kind) {
  if (beta < 0.0) throw Error(ErrorCode::BadArgument, "beta must be >= 0");
  const int last = static_cast<int>(process.value.size()) - 1;
  check_shape(tree, process, last);
  if (kind == BetaNormKind::TimeIntegral) {
    double acc = 0.0;
    for (int k = 0; k <= last; ++k)
      acc += weight(beta, tree.time(k)) * tree.dt() *
             (tree.post_prob(k) * process.value[k].square()).sum();
    return acc;
  }
  Array running = Array::Zero(1);
  for (int k = 0; k <= last; ++k) {
    const double w = weight(beta, tree.time(k));
    Array next(tree.n_post(k));
    for (int i = 0; i < tree.n_post(k); ++i) {
      const int pre_parent = tree.post(k, i).parent;
      const int ancestor = k == 0 ? 0 : tree.pre(k, pre_parent).parent;
      next[i] = std::max(running[ancestor], w * process.value[k][i] * process.value[k][i]);
    }
    running = std::move(next);
  }
  return (tree.post_prob(last) * running).sum();
}

}  // namespace presto
