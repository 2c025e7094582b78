#pragma once

#include <cmath>

#include "presto/instance.hpp"
#include "presto/process.hpp"
#include "presto/tree.hpp"

namespace presto::fixtures {

// N=2, dt=0.5, dW = +-sqrt(0.5) with p = 1/2, single mark.
inline FiltrationTree tree_a() {
  const double w = std::sqrt(0.5);
  return build_lattice(2, 0.5, {{w, 0.5}, {-w, 0.5}}, {{"m", 1.0}});
}

// Constant obstacle 1 on tree A.
inline LadlagProcess obstacle_a(const FiltrationTree& tree) {
  return LadlagProcess::constant(tree, 1.0);
}

// N=1, dt=1, dW = +-1 with p = 1/2, single mark.
inline FiltrationTree tree_b() {
  return build_lattice(1, 1.0, {{1.0, 0.5}, {-1.0, 0.5}}, {{"m", 1.0}});
}

// Terminal (1, 0) at both instants, initial value x0 (0.2 unless stated).
inline LadlagProcess obstacle_b(const FiltrationTree& tree, double x0 = 0.2) {
  LadlagProcess xi = LadlagProcess::zeros(tree);
  xi.left[0][0] = xi.value[0][0] = x0;
  xi.left[1][0] = xi.value[1][0] = 1.0;
  xi.left[1][1] = xi.value[1][1] = 0.0;
  return xi;
}

// N=2, dt=1, dW = +-1, two marks u/d with q = 1/2 at stage 1 only.
inline FiltrationTree tree_c() {
  std::vector<std::vector<PreNode>> pre(3);
  std::vector<std::vector<PostNode>> post(3);
  post[0].push_back(PostNode{-1, "", 1.0});
  pre[1] = {PreNode{0, 1.0, 0.5}, PreNode{0, -1.0, 0.5}};
  post[1] = {PostNode{0, "u", 0.5}, PostNode{0, "d", 0.5}, PostNode{1, "u", 0.5},
             PostNode{1, "d", 0.5}};
  for (int parent = 0; parent < 4; ++parent) {
    pre[2].push_back(PreNode{parent, 1.0, 0.5});
    pre[2].push_back(PreNode{parent, -1.0, 0.5});
  }
  for (int parent = 0; parent < 8; ++parent) post[2].push_back(PostNode{parent, "m", 1.0});
  return FiltrationTree(2, 1.0, std::move(pre), std::move(post));
}

// Terminal pays 1 exactly when the stage-1 mark was "u"; obstacle 0 elsewhere.
inline LadlagProcess obstacle_c(const FiltrationTree& tree) {
  LadlagProcess xi = LadlagProcess::zeros(tree);
  for (int j = 0; j < tree.n_pre(2); ++j) {
    const int post_parent = tree.pre(2, j).parent;
    if (tree.post(1, post_parent).mark == "u") xi.value[2][j] = 1.0;
  }
  return xi;
}

// Tree B with left values (2, 0) above values (1, 0) at stage 1, start 0.
inline LadlagProcess obstacle_d(const FiltrationTree& tree) {
  LadlagProcess xi = obstacle_b(tree, 0.0);
  xi.left[1][0] = 2.0;
  return xi;
}

inline Driver driver_zero() { return make_driver("zero"); }
inline Driver driver_e() { return make_driver("discount", {{"rho", 0.1}}); }

}  // namespace presto::fixtures
