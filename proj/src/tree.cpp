#include "presto/tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "presto/rng.hpp"

namespace presto {

namespace {

constexpr double kTol = 1e-12;

std::string node_name(const char* kind, int stage, int i) {
  std::ostringstream os;
  os << kind << "[" << stage << "][" << i << "]";
  return os.str();
}

}  // namespace

FiltrationTree::FiltrationTree(int n_stages, double dt,
                               std::vector<std::vector<PreNode>> pre,
                               std::vector<std::vector<PostNode>> post)
    : n_stages_(n_stages), dt_(dt), pre_(std::move(pre)), post_(std::move(post)) {
  if (n_stages_ < 1) throw Error(ErrorCode::BadArgument, "need at least one stage");
  if (!(dt_ > 0.0)) throw Error(ErrorCode::BadArgument, "dt must be positive");
  if (static_cast<int>(pre_.size()) != n_stages_ + 1 ||
      static_cast<int>(post_.size()) != n_stages_ + 1)
    throw Error(ErrorCode::ShapeMismatch, "stage vectors must have n_stages+1 entries");
  if (post_[0].size() != 1)
    throw Error(ErrorCode::ShapeMismatch, "stage 0 must hold exactly the root post-node");
  if (!pre_[0].empty())
    throw Error(ErrorCode::ShapeMismatch, "stage 0 has no pre-nodes");

  // Child ranges require parent-major node ordering (parents nondecreasing).
  pre_child_range_.assign(n_stages_ + 1, {});
  post_child_range_.assign(n_stages_ + 1, {});
  for (int k = 0; k < n_stages_; ++k) {
    pre_child_range_[k].assign(post_[k].size(), {0, 0});
    int cursor = 0;
    const auto& children = pre_[k + 1];
    for (int parent = 0; parent < static_cast<int>(post_[k].size()); ++parent) {
      int begin = cursor;
      while (cursor < static_cast<int>(children.size()) && children[cursor].parent == parent)
        ++cursor;
      if (cursor == begin)
        throw Error(ErrorCode::ShapeMismatch,
                    "post node without pre children at stage " + std::to_string(k));
      pre_child_range_[k][parent] = {begin, cursor};
    }
    if (cursor != static_cast<int>(children.size()))
      throw Error(ErrorCode::ShapeMismatch,
                  "pre nodes not ordered by parent at stage " + std::to_string(k + 1));
  }
  for (int k = 1; k <= n_stages_; ++k) {
    post_child_range_[k].assign(pre_[k].size(), {0, 0});
    int cursor = 0;
    const auto& children = post_[k];
    for (int parent = 0; parent < static_cast<int>(pre_[k].size()); ++parent) {
      int begin = cursor;
      while (cursor < static_cast<int>(children.size()) && children[cursor].parent == parent)
        ++cursor;
      if (cursor == begin)
        throw Error(ErrorCode::ShapeMismatch,
                    "pre node without mark children at stage " + std::to_string(k));
      post_child_range_[k][parent] = {begin, cursor};
    }
    if (cursor != static_cast<int>(children.size()))
      throw Error(ErrorCode::ShapeMismatch,
                  "post nodes not ordered by parent at stage " + std::to_string(k));
  }

  pre_prob_.assign(n_stages_ + 1, Array());
  post_prob_.assign(n_stages_ + 1, Array());
  post_prob_[0] = Array::Ones(1);
  for (int k = 1; k <= n_stages_; ++k) {
    pre_prob_[k] = Array(pre_[k].size());
    for (int i = 0; i < n_pre(k); ++i)
      pre_prob_[k][i] = post_prob_[k - 1][pre_[k][i].parent] * pre_[k][i].p;
    post_prob_[k] = Array(post_[k].size());
    for (int i = 0; i < n_post(k); ++i)
      post_prob_[k][i] = pre_prob_[k][post_[k][i].parent] * post_[k][i].q;
  }
}

bool FiltrationTree::single_mark() const {
  for (int k = 1; k <= n_stages_; ++k)
    for (int i = 0; i < n_pre(k); ++i)
      if (n_marks(k, i) != 1) return false;
  return true;
}

double FiltrationTree::max_abs_dw() const {
  double m = 0.0;
  for (int k = 1; k <= n_stages_; ++k)
    for (const auto& node : pre_[k]) m = std::max(m, std::abs(node.dw));
  return m;
}

std::int64_t FiltrationTree::node_count() const {
  std::int64_t n = 1;
  for (int k = 1; k <= n_stages_; ++k) n += n_pre(k) + n_post(k);
  return n;
}

FiltrationTree build_lattice(int n_stages, double dt,
                             const std::vector<std::pair<double, double>>& w_branches,
                             const std::vector<std::pair<std::string, double>>& marks,
                             std::int64_t node_limit) {
  if (n_stages < 1) throw Error(ErrorCode::BadArgument, "n_stages must be >= 1");
  if (!(dt > 0.0)) throw Error(ErrorCode::BadArgument, "dt must be positive");
  if (w_branches.empty() || marks.empty())
    throw Error(ErrorCode::BadArgument, "need at least one W branch and one mark");

  double psum = 0.0, qsum = 0.0, m1 = 0.0, m2 = 0.0;
  for (const auto& [dw, p] : w_branches) {
    if (!(p > 0.0)) throw Error(ErrorCode::BadProbability, "W branch probability must be > 0");
    psum += p;
    m1 += p * dw;
    m2 += p * dw * dw;
  }
  for (const auto& [label, q] : marks) {
    if (!(q > 0.0)) throw Error(ErrorCode::BadProbability, "mark probability must be > 0");
    qsum += q;
  }
  if (std::abs(psum - 1.0) > kTol)
    throw Error(ErrorCode::BadProbability, "W branch probabilities sum to " + std::to_string(psum));
  if (std::abs(qsum - 1.0) > kTol)
    throw Error(ErrorCode::BadProbability, "mark probabilities sum to " + std::to_string(qsum));
  if (std::abs(m1) > kTol)
    throw Error(ErrorCode::MomentViolation, "E[dW] = " + std::to_string(m1));
  if (std::abs(m2 - dt) > kTol)
    throw Error(ErrorCode::MomentViolation, "E[dW^2] - dt = " + std::to_string(m2 - dt));

  std::vector<std::vector<PreNode>> pre(n_stages + 1);
  std::vector<std::vector<PostNode>> post(n_stages + 1);
  post[0].push_back(PostNode{-1, "", 1.0});

  std::int64_t total = 1;
  for (int k = 1; k <= n_stages; ++k) {
    const std::int64_t n_parents = static_cast<std::int64_t>(post[k - 1].size());
    const std::int64_t n_pre_k = n_parents * static_cast<std::int64_t>(w_branches.size());
    const std::int64_t n_post_k = n_pre_k * static_cast<std::int64_t>(marks.size());
    total += n_pre_k + n_post_k;
    if (total > node_limit)
      throw Error(ErrorCode::SizeLimit,
                  "tree exceeds node limit " + std::to_string(node_limit));
    pre[k].reserve(n_pre_k);
    post[k].reserve(n_post_k);
    for (int parent = 0; parent < n_parents; ++parent)
      for (const auto& [dw, p] : w_branches) pre[k].push_back(PreNode{parent, dw, p});
    for (int parent = 0; parent < static_cast<int>(pre[k].size()); ++parent)
      for (const auto& [label, q] : marks) post[k].push_back(PostNode{parent, label, q});
  }
  return FiltrationTree(n_stages, dt, std::move(pre), std::move(post));
}

namespace {

// Brownian branch values with E[dW]=0 and E[dW^2]=dt, exactly. Two branches
// use the closed form; larger fans draw raw values and project/rescale.
void draw_w_branches(Rng& rng, int count, double dt, std::vector<double>& dw,
                     std::vector<double>& p) {
  dw.resize(count);
  p.resize(count);
  double mass = 0.0;
  for (int i = 0; i < count; ++i) {
    p[i] = rng.uniform(0.2, 1.0);
    mass += p[i];
  }
  for (int i = 0; i < count; ++i) p[i] /= mass;

  if (count == 2) {
    const double p1 = p[0], p2 = p[1];
    dw[0] = std::sqrt(dt * p2 / p1);
    dw[1] = -std::sqrt(dt * p1 / p2);
    return;
  }
  double mean = 0.0, var = 0.0;
  do {
    mean = var = 0.0;
    for (int i = 0; i < count; ++i) dw[i] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < count; ++i) mean += p[i] * dw[i];
    for (int i = 0; i < count; ++i) {
      dw[i] -= mean;
      var += p[i] * dw[i] * dw[i];
    }
  } while (var < 1e-8);
  const double scale = std::sqrt(dt / var);
  for (int i = 0; i < count; ++i) dw[i] *= scale;
}

}  // namespace

FiltrationTree build_random_tree(std::uint64_t seed, int n_stages, int max_w_branches,
                                 int max_marks, double dt, std::int64_t node_limit) {
  if (n_stages < 1 || max_w_branches < 1 || max_marks < 1)
    throw Error(ErrorCode::BadArgument, "bounds must be >= 1");
  if (!(dt > 0.0)) throw Error(ErrorCode::BadArgument, "dt must be positive");
  // The two Brownian moment constraints need at least two branches.
  const int w_hi = std::max(2, max_w_branches);

  Rng rng(seed);
  std::vector<std::vector<PreNode>> pre(n_stages + 1);
  std::vector<std::vector<PostNode>> post(n_stages + 1);
  post[0].push_back(PostNode{-1, "", 1.0});

  std::vector<double> dw, p, q;
  std::int64_t total = 1;
  for (int k = 1; k <= n_stages; ++k) {
    for (int parent = 0; parent < static_cast<int>(post[k - 1].size()); ++parent) {
      const int fan = rng.uniform_int(2, w_hi);
      draw_w_branches(rng, fan, dt, dw, p);
      for (int i = 0; i < fan; ++i) pre[k].push_back(PreNode{parent, dw[i], p[i]});
    }
    for (int parent = 0; parent < static_cast<int>(pre[k].size()); ++parent) {
      const int marks = rng.uniform_int(1, max_marks);
      q.resize(marks);
      double mass = 0.0;
      for (int i = 0; i < marks; ++i) {
        q[i] = rng.uniform(0.2, 1.0);
        mass += q[i];
      }
      for (int i = 0; i < marks; ++i)
        post[k].push_back(PostNode{parent, "m" + std::to_string(i), q[i] / mass});
    }
    total += static_cast<std::int64_t>(pre[k].size()) + static_cast<std::int64_t>(post[k].size());
    if (total > node_limit)
      throw Error(ErrorCode::SizeLimit, "tree exceeds node limit " + std::to_string(node_limit));
  }
  return FiltrationTree(n_stages, dt, std::move(pre), std::move(post));
}

ValidationReport validate_tree(const FiltrationTree& tree) {
  ValidationReport report;
  const double dt = tree.dt();
  for (int k = 1; k <= tree.n_stages(); ++k) {
    for (int parent = 0; parent < tree.n_post(k - 1); ++parent) {
      auto [b, e] = tree.pre_children(k - 1, parent);
      double psum = 0.0, m1 = 0.0, m2 = 0.0;
      for (int i = b; i < e; ++i) {
        const PreNode& node = tree.pre(k, i);
        if (!(node.p > 0.0))
          report.violations.push_back({node_name("pre", k, i), "BAD_PROBABILITY", node.p});
        psum += node.p;
        m1 += node.p * node.dw;
        m2 += node.p * node.dw * node.dw;
      }
      if (std::abs(psum - 1.0) > kTol)
        report.violations.push_back(
            {node_name("post", k - 1, parent), "BAD_PROBABILITY", std::abs(psum - 1.0)});
      if (std::abs(m1) > kTol)
        report.violations.push_back(
            {node_name("post", k - 1, parent), "MOMENT_VIOLATION", std::abs(m1)});
      if (std::abs(m2 - dt) > kTol)
        report.violations.push_back(
            {node_name("post", k - 1, parent), "MOMENT_VIOLATION", std::abs(m2 - dt)});
    }
    for (int parent = 0; parent < tree.n_pre(k); ++parent) {
      auto [b, e] = tree.post_children(k, parent);
      double qsum = 0.0;
      for (int i = b; i < e; ++i) {
        const PostNode& node = tree.post(k, i);
        if (!(node.q > 0.0))
          report.violations.push_back({node_name("post", k, i), "BAD_PROBABILITY", node.q});
        qsum += node.q;
      }
      if (std::abs(qsum - 1.0) > kTol)
        report.violations.push_back(
            {node_name("pre", k, parent), "BAD_PROBABILITY", std::abs(qsum - 1.0)});
    }
  }
  return report;
}

Array expect_given_post(const FiltrationTree& tree, int stage, const Array& values) {
  if (stage < 0 || stage >= tree.n_stages())
    throw Error(ErrorCode::BadArgument, "stage out of range for expect_given_post");
  if (values.size() != tree.n_pre(stage + 1))
    throw Error(ErrorCode::ShapeMismatch, "value array does not match pre-node count");
  Array out(tree.n_post(stage));
  for (int i = 0; i < tree.n_post(stage); ++i) {
    auto [b, e] = tree.pre_children(stage, i);
    double acc = 0.0;
    for (int c = b; c < e; ++c) acc += tree.pre(stage + 1, c).p * values[c];
    out[i] = acc;
  }
  return out;
}

int ancestor_atom(const FiltrationTree& tree, int stage, int atom, int base) {
  if (base > stage) throw Error(ErrorCode::BadArgument, "base stage is beyond the atom's stage");
  int k = stage, current = atom;
  while (k > base) {
    const int post = tree.pre(k, current).parent;
    current = k == 1 ? 0 : tree.post(k - 1, post).parent;
    --k;
  }
  return current;
}

int ancestor_atom_of_post(const FiltrationTree& tree, int stage, int post_atom, int base) {
  const int atom = stage == 0 ? 0 : tree.post(stage, post_atom).parent;
  return ancestor_atom(tree, stage, atom, base);
}

Array expect_given_pre(const FiltrationTree& tree, int stage, const Array& values) {
  if (stage < 0 || stage > tree.n_stages())
    throw Error(ErrorCode::BadArgument, "stage out of range for expect_given_pre");
  if (values.size() != tree.n_post(stage))
    throw Error(ErrorCode::ShapeMismatch, "value array does not match post-node count");
  if (stage == 0) return values;  // F_0 trivial
  Array out(tree.n_pre(stage));
  for (int i = 0; i < tree.n_pre(stage); ++i) {
    auto [b, e] = tree.post_children(stage, i);
    double acc = 0.0;
    for (int c = b; c < e; ++c) acc += tree.post(stage, c).q * values[c];
    out[i] = acc;
  }
  return out;
}

}  // namespace presto
