/*
 * Copyright 2026 The lstree Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lstree/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lstree {

int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

struct Distances {
  double signed_score;
  double absolute_score;
};

// a = estimate with the node removed, b = estimate with it kept.
Distances Distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd diff = b - a;
  return {diff.sum(), diff.norm()};
}

NodeScore Describe(const TreeNode& node) {
  NodeScore s;
  s.node = node.id;
  s.begin = node.begin;
  s.end = node.end;
  s.label = node.label;
  s.leaf = node.is_leaf();
  s.synthetic = node.synthetic;
  return s;
}

// Marks node `id` and all its ancestors.
std::vector<bool> AncestorsOrSelf(const ParseTree& tree, NodeId id) {
  std::vector<bool> mark(tree.node_count(), false);
  std::optional<NodeId> cur = id;
  while (cur) {
    mark[*cur] = true;
    cur = tree.node(*cur).parent;
  }
  return mark;
}

Eigen::MatrixXd KeptRows(const DesignMatrix& x, const std::vector<bool>& removed) {
  Eigen::Index kept = 0;
  for (bool r : removed) kept += r ? 0 : 1;
  Eigen::MatrixXd out(kept, x.cols());
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    if (!removed[static_cast<std::size_t>(r)]) out.row(k++) = x.x.row(r);
  }
  return out;
}

Eigen::VectorXd KeptEntries(const Eigen::VectorXd& y, const std::vector<bool>& removed) {
  Eigen::Index kept = 0;
  for (bool r : removed) kept += r ? 0 : 1;
  Eigen::VectorXd out(kept);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < y.size(); ++r) {
    if (!removed[static_cast<std::size_t>(r)]) out(k++) = y(r);
  }
  return out;
}

Eigen::VectorXd MinNormSolve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() == 0) return Eigen::VectorXd::Zero(a.cols());
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(a).solve(b);
}

void CheckShape(const ParseTree& tree, const DesignMatrix& x) {
  if (static_cast<std::size_t>(x.rows()) != tree.node_count() ||
      static_cast<std::size_t>(x.cols()) != tree.word_count()) {
    throw std::invalid_argument("design matrix does not match the tree");
  }
  for (std::size_t r = 0; r < x.row_nodes.size(); ++r) {
    if (x.row_nodes[r] != r) throw std::invalid_argument("design matrix rows are not in preorder");
  }
}

// Top-down rank-one recursion over the tree.
class Recursion {
 public:
  Recursion(const CharacteristicTable& table, const ParseTree& tree, const DesignMatrix& x,
            const InteractionOptions& options, InteractionReport& report)
      : tree_(tree), x_(x), y_(RowTargets(table, x)), options_(options), report_(report) {
    subtree_size_.assign(tree.node_count(), 1);
    const auto& nodes = tree.nodes();
    for (std::size_t k = nodes.size(); k-- > 0;) {
      for (NodeId c : nodes[k].children) subtree_size_[k] += subtree_size_[c];
    }
  }

  void Run() {
    const TreeNode& root = tree_.node(tree_.root_id());
    if (root.is_leaf()) {
      ScoreLeaf(root);
      return;
    }
    const Eigen::MatrixXd gram = x_.x.transpose() * x_.x;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw std::runtime_error("Gram matrix of the tree is not positive definite");
    const Eigen::Index d = x_.cols();
    const Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(d, d));
    const Eigen::VectorXd beta = llt.solve(x_.x.transpose() * y_);

    if (options_.execution == Execution::kParallel) {
#pragma omp parallel
#pragma omp single
      Visit(root.id, inverse, beta);
    } else {
      Visit(root.id, inverse, beta);
    }
  }

 private:
  const ParseTree& tree_;
  const DesignMatrix& x_;
  const Eigen::VectorXd y_;
  const InteractionOptions& options_;
  InteractionReport& report_;
  std::vector<std::size_t> subtree_size_;

  void ScoreLeaf(const TreeNode& node) {
    NodeScore& s = report_.nodes[node.id];
    s.signed_score = y_(static_cast<Eigen::Index>(node.id));
    s.absolute_score = std::abs(s.signed_score);
  }

  // `parent_inverse` is the inverse Gram matrix with the node's strict
  // ancestors removed, `parent_beta` the matching estimate.
  void Visit(NodeId id, const Eigen::MatrixXd& parent_inverse, const Eigen::VectorXd& parent_beta) {
    const TreeNode& node = tree_.node(id);
    if (node.is_leaf()) {
      ScoreLeaf(node);
      return;
    }
    const auto begin = static_cast<Eigen::Index>(node.begin);
    const auto width = static_cast<Eigen::Index>(node.span_size());

    // u = A_parent^{-1} x_j, h = x_j^T u.
    const Eigen::VectorXd u = parent_inverse.middleCols(begin, width).rowwise().sum();
    const double h = u.segment(begin, width).sum();
    const double denom = 1.0 - h;

    Eigen::MatrixXd inverse;
    Eigen::VectorXd beta;
    if (std::abs(denom) < options_.denominator_tolerance * parent_inverse.trace()) {
      DirectState(id, inverse, beta);
#pragma omp atomic
      ++report_.fallback_nodes;
    } else {
      inverse = parent_inverse;
      inverse.noalias() += (u / denom) * u.transpose();
      const double residual = y_(static_cast<Eigen::Index>(id)) - parent_beta.segment(begin, width).sum();
      beta = parent_beta - (residual / denom) * u;
    }

    const Distances dist = Distance(beta, parent_beta);
    NodeScore& s = report_.nodes[id];
    s.signed_score = dist.signed_score;
    s.absolute_score = dist.absolute_score;

    if (options_.verify_state) {
      const std::vector<bool> removed = AncestorsOrSelf(tree_, id);
      const Eigen::MatrixXd kept = KeptRows(x_, removed);
      const Eigen::MatrixXd gram = kept.transpose() * kept;
      const Eigen::MatrixXd err = inverse * gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
      const double e = err.cwiseAbs().maxCoeff();
#pragma omp critical(lstree_state_error)
      report_.max_state_error = std::max(report_.max_state_error, e);
    }

    std::vector<NodeId> order = node.children;
    if (options_.reverse_children) std::reverse(order.begin(), order.end());
    const bool spawn = options_.execution == Execution::kParallel;
    for (NodeId c : order) {
      if (spawn && subtree_size_[c] >= options_.task_grain) {
#pragma omp task firstprivate(c) shared(inverse, beta)
        Visit(c, inverse, beta);
      } else {
        Visit(c, inverse, beta);
      }
    }
    if (spawn) {
#pragma omp taskwait
    }
  }

  void DirectState(NodeId id, Eigen::MatrixXd& inverse, Eigen::VectorXd& beta) const {
    const std::vector<bool> removed = AncestorsOrSelf(tree_, id);
    const Eigen::MatrixXd kept = KeptRows(x_, removed);
    const Eigen::VectorXd y = KeptEntries(y_, removed);
    const Eigen::MatrixXd gram = kept.transpose() * kept;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw std::runtime_error("reduced Gram matrix is singular at a non-leaf node");
    inverse = llt.solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
    beta = llt.solve(kept.transpose() * y);
  }
};

}  // namespace

Eigen::VectorXd RowTargets(const CharacteristicTable& table, const DesignMatrix& x) {
  if (x.row_subsets.size() != static_cast<std::size_t>(x.rows())) {
    throw std::invalid_argument("design matrix row metadata does not match its shape");
  }
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const WordSet& s = x.row_subsets[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(s.universe()) != x.cols()) {
      throw std::invalid_argument("row subset universe does not match design matrix width");
    }
    if (!table.contains(s)) {
      throw std::invalid_argument("characteristic table has no value for row " + std::to_string(r) + " " +
                                  s.ToString());
    }
    y(r) = table.at(s);
  }
  return y;
}

AttributionResult SolveLsTree(const CharacteristicTable& table, const DesignMatrix& x,
                              std::optional<std::span<const double>> weights) {
  const Eigen::VectorXd y = RowTargets(table, x);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(x.rows());
  if (weights) {
    if (weights->size() != static_cast<std::size_t>(x.rows())) {
      throw std::invalid_argument("need one weight per design-matrix row");
    }
    for (std::size_t r = 0; r < weights->size(); ++r) {
      const double wr = (*weights)[r];
      if (!(wr > 0.0) || !std::isfinite(wr)) throw std::invalid_argument("row weights must be positive");
      w(static_cast<Eigen::Index>(r)) = wr;
    }
  }

  AttributionResult result;
  const Eigen::MatrixXd gram = x.x.transpose() * w.asDiagonal() * x.x;
  const Eigen::VectorXd rhs = x.x.transpose() * w.cwiseProduct(y);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (x.cols() > 0 && rcond > std::numeric_limits<double>::epsilon()) {
    result.psi = llt.solve(rhs);
    result.condition_estimate = 1.0 / rcond;
  } else {
    const Eigen::VectorXd sw = w.cwiseSqrt();
    result.psi = MinNormSolve(sw.asDiagonal() * x.x, sw.cwiseProduct(y));
    result.condition_estimate = std::numeric_limits<double>::infinity();
    result.min_norm_fallback = true;
  }
  result.residual_norm = (w.cwiseSqrt().cwiseProduct(x.x * result.psi - y)).norm();
  return result;
}

double CoalitionGame::at(std::uint32_t coalition) const {
  auto it = value.find(coalition);
  if (it == value.end()) {
    throw std::out_of_range("game has no value for coalition mask " + std::to_string(coalition));
  }
  return it->second;
}

GeneralFit SolveGeneralLs(const CoalitionGame& game, bool with_intercept) {
  const int d = game.players;
  if (d < 1 || d > kMaxGeneralPlayers) {
    throw std::invalid_argument("SolveGeneralLs supports 1.." + std::to_string(kMaxGeneralPlayers) + " players");
  }
  if (game.value.empty()) throw std::invalid_argument("SolveGeneralLs needs at least one coalition");
  const Eigen::Index offset = with_intercept ? 1 : 0;
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(game.value.size()), d + offset);
  Eigen::VectorXd y(design.rows());
  Eigen::Index r = 0;
  for (const auto& [mask, v] : game.value) {
    if (mask >> d) throw std::invalid_argument("coalition mask names a player outside the game");
    if (with_intercept) design(r, 0) = 1.0;
    for (int i = 0; i < d; ++i) {
      if ((mask >> i) & 1u) design(r, offset + i) = 1.0;
    }
    y(r++) = v;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  const Eigen::VectorXd beta = cod.solve(y);
  GeneralFit fit;
  fit.rank_deficient = cod.rank() < design.cols();
  fit.intercept = with_intercept ? beta(0) : 0.0;
  fit.coefficients = beta.tail(d);
  return fit;
}

Eigen::VectorXd BanzhafBruteForce(const CoalitionGame& game) {
  const int d = game.players;
  if (d < 1 || d > kMaxBanzhafPlayers) {
    throw std::invalid_argument("BanzhafBruteForce supports 1.." + std::to_string(kMaxBanzhafPlayers) + " players");
  }
  const std::uint32_t full = 1u << d;
  std::vector<double> v(full);
  for (std::uint32_t s = 0; s < full; ++s) v[s] = game.at(s);

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    const std::uint32_t bit = 1u << i;
    double total = 0.0;
    for (std::uint32_t s = 0; s < full; ++s) {
      if (s & bit) continue;
      total += v[s | bit] - v[s];
    }
    phi(i) = std::ldexp(total, 1 - d);
  }
  return phi;
}

InteractionReport DetectInteractions(const CharacteristicTable& table, const ParseTree& tree,
                                     const DesignMatrix& x, DistanceMode mode, const InteractionOptions& options) {
  CheckShape(tree, x);
  InteractionReport report;
  report.mode = mode;
  report.nodes.reserve(tree.node_count());
  for (const TreeNode& node : tree.nodes()) report.nodes.push_back(Describe(node));
  Recursion(table, tree, x, options, report).Run();
  return report;
}

InteractionReport DetectInteractionsDirect(const CharacteristicTable& table, const ParseTree& tree,
                                           const DesignMatrix& x, DistanceMode mode, Execution execution) {
  CheckShape(tree, x);
  const Eigen::VectorXd y = RowTargets(table, x);
  InteractionReport report;
  report.mode = mode;
  report.nodes.reserve(tree.node_count());
  for (const TreeNode& node : tree.nodes()) report.nodes.push_back(Describe(node));

  const auto n = static_cast<std::int64_t>(tree.node_count());
  auto score_node = [&](std::int64_t k) {
    const auto id = static_cast<NodeId>(k);
    std::vector<bool> removed = AncestorsOrSelf(tree, id);
    const Eigen::VectorXd without = MinNormSolve(KeptRows(x, removed), KeptEntries(y, removed));
    removed[id] = false;
    const Eigen::VectorXd with = MinNormSolve(KeptRows(x, removed), KeptEntries(y, removed));
    const Distances dist = Distance(without, with);
    report.nodes[id].signed_score = dist.signed_score;
    report.nodes[id].absolute_score = dist.absolute_score;
  };

  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < n; ++k) score_node(k);
  } else {
    for (std::int64_t k = 0; k < n; ++k) score_node(k);
  }
  return report;
}

}  // namespace lstree
