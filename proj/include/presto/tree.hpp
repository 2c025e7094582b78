#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "presto/errors.hpp"

namespace presto {

using Array = Eigen::ArrayXd;

/// Atom of G_k = F_{t_k-}: the state once the Brownian increment over
/// (t_{k-1}, t_k] is known but before the mark at t_k is revealed.
struct PreNode {
  int parent = -1;  // post-node index at stage k-1
  double dw = 0.0;  // Brownian increment realized on this branch
  double p = 0.0;   // conditional probability given the parent
};

/// Atom of F_k: pre-node refined by the mark revealed at the predictable
/// time t_k. Marks are what lets martingales jump at grid times.
struct PostNode {
  int parent = -1;   // pre-node index at stage k
  std::string mark;  // mark label
  double q = 0.0;    // conditional probability given the parent
};

struct Violation {
  std::string node;  // e.g. "pre[2][5]"
  std::string rule;  // e.g. "BAD_PROBABILITY"
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool empty() const { return violations.empty(); }
};

/// Finite two-phase filtration tree. Stage 0 is a single root post-node;
/// each later stage k has a layer of pre-nodes (atoms of G_k) refined by a
/// layer of post-nodes (atoms of F_k). Immutable once built.
class FiltrationTree {
 public:
  FiltrationTree(int n_stages, double dt,
                 std::vector<std::vector<PreNode>> pre,
                 std::vector<std::vector<PostNode>> post);

  int n_stages() const { return n_stages_; }
  double dt() const { return dt_; }
  double time(int stage) const { return dt_ * stage; }
  double horizon() const { return dt_ * n_stages_; }

  // pre-node layers are valid for k = 1..N; post-node layers for k = 0..N
  // (stage 0 holds the lone root).
  int n_pre(int stage) const { return static_cast<int>(pre_[stage].size()); }
  int n_post(int stage) const { return static_cast<int>(post_[stage].size()); }
  const PreNode& pre(int stage, int i) const { return pre_[stage][i]; }
  const PostNode& post(int stage, int i) const { return post_[stage][i]; }

  /// Number of G_k atoms; stage 0 counts as one atom (F_0 trivial).
  int n_atoms(int stage) const { return stage == 0 ? 1 : n_pre(stage); }

  /// Pre-children at stage k+1 of post-node i at stage k, as [begin, end).
  std::pair<int, int> pre_children(int post_stage, int i) const {
    return pre_child_range_[post_stage][i];
  }
  /// Post-children (marks) at stage k of pre-node i at stage k.
  std::pair<int, int> post_children(int stage, int i) const {
    return post_child_range_[stage][i];
  }
  int n_marks(int stage, int pre_index) const {
    auto [b, e] = post_children(stage, pre_index);
    return e - b;
  }

  /// True when every pre-node has exactly one mark child (G_k = F_k; the
  /// quasi-left-continuous case).
  bool single_mark() const;

  double max_abs_dw() const;
  std::int64_t node_count() const;

  /// Unconditional probability of reaching each atom.
  const Array& pre_prob(int stage) const { return pre_prob_[stage]; }
  const Array& post_prob(int stage) const { return post_prob_[stage]; }

 private:
  int n_stages_;
  double dt_;
  std::vector<std::vector<PreNode>> pre_;    // [k], k = 1..N ([0] empty)
  std::vector<std::vector<PostNode>> post_;  // [k], k = 0..N
  std::vector<std::vector<std::pair<int, int>>> pre_child_range_;
  std::vector<std::vector<std::pair<int, int>>> post_child_range_;
  std::vector<Array> pre_prob_, post_prob_;
};

/// Expands an i.i.d. lattice into a non-recombining path tree: every stage
/// uses the same Brownian branches and the same mark distribution.
FiltrationTree build_lattice(int n_stages, double dt,
                             const std::vector<std::pair<double, double>>& w_branches,
                             const std::vector<std::pair<std::string, double>>& marks,
                             std::int64_t node_limit = 200000);

/// Seeded generator for property tests: per-node branch counts and
/// probabilities vary, Brownian increments are solved to satisfy the moment
/// constraints exactly. Bit-reproducible for a fixed seed.
FiltrationTree build_random_tree(std::uint64_t seed, int n_stages, int max_w_branches,
                                 int max_marks, double dt,
                                 std::int64_t node_limit = 200000);

/// Reports every invariant violation (probability sums, Brownian moments,
/// layering); never throws.
ValidationReport validate_tree(const FiltrationTree& tree);

/// E[. | F_k]: values on pre_nodes[k+1] -> values on post_nodes[k].
Array expect_given_post(const FiltrationTree& tree, int stage, const Array& values);

/// E[. | G_k]: values on post_nodes[k] -> values on the G_k atoms. This is
/// the one-step predictable projection; on single-mark trees it is the
/// identity. stage 0 is allowed and maps the root to the root.
Array expect_given_pre(const FiltrationTree& tree, int stage, const Array& values);

/// G-atom at an earlier base stage above a G-atom at the given stage.
int ancestor_atom(const FiltrationTree& tree, int stage, int atom, int base);

/// G-atom at the base stage above a post node.
int ancestor_atom_of_post(const FiltrationTree& tree, int stage, int post_atom, int base);

}  // namespace presto
