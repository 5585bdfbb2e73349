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

#ifndef LSTREE_SOLVER_H_
#define LSTREE_SOLVER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lstree/execution.h"
#include "lstree/oracle.h"
#include "lstree/tree.h"

namespace lstree {

// LS-Tree value: psi minimizing sum_S w_S [v(S) - sum_{i in S} psi_i]^2
// over the node subsets of a parse tree.
struct AttributionResult {
  Eigen::VectorXd psi;
  double residual_norm = 0.0;
  // Reciprocal of the Cholesky reciprocal-condition estimate of X^T W X;
  // +inf when the minimum-norm fallback was used.
  double condition_estimate = 0.0;
  // Set when X^T W X was singular and psi is the minimum-norm solution.
  bool min_norm_fallback = false;
};

// Row targets v(S_r) in design-matrix row order. Throws
// std::invalid_argument when a row subset is missing from the table.
Eigen::VectorXd RowTargets(const CharacteristicTable& table, const DesignMatrix& x);

// `weights`, when given, has one positive entry per design-matrix row.
AttributionResult SolveLsTree(const CharacteristicTable& table, const DesignMatrix& x,
                              std::optional<std::span<const double>> weights = std::nullopt);

// A game on an arbitrary collection of coalitions over `players` players,
// coalitions encoded as bit masks (bit i = player i).
struct CoalitionGame {
  int players = 0;
  std::map<std::uint32_t, double> value;

  double at(std::uint32_t coalition) const;
};

struct GeneralFit {
  Eigen::VectorXd coefficients;  // one per player
  double intercept = 0.0;        // 0 unless fitted
  bool rank_deficient = false;
};

inline constexpr int kMaxGeneralPlayers = 20;
inline constexpr int kMaxBanzhafPlayers = 16;

// Least squares over every coalition in `game` on the 0/1 incidence design,
// optionally with a constant column. Minimum-norm on rank deficiency.
GeneralFit SolveGeneralLs(const CoalitionGame& game, bool with_intercept);

// Exact Banzhaf value by enumerating all 2^d coalitions:
// phi_i = 2^{1-d} sum_{S not containing i} [v(S + i) - v(S)].
Eigen::VectorXd BanzhafBruteForce(const CoalitionGame& game);

enum class DistanceMode { kSigned, kAbsolute, kBoth };

struct NodeScore {
  NodeId node = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::optional<std::string> label;
  bool leaf = false;
  bool synthetic = false;
  double signed_score = 0.0;    // sum_i (b_i - a_i)
  double absolute_score = 0.0;  // ||b - a||_2
};

struct InteractionReport {
  std::string instance;
  DistanceMode mode = DistanceMode::kBoth;
  std::vector<NodeScore> nodes;  // preorder, one entry per tree node
  // Nodes whose rank-one denominator was too small and were re-solved
  // directly.
  std::size_t fallback_nodes = 0;
  // Largest |A_inv * Gram - I| entry seen, when state verification is on.
  double max_state_error = 0.0;
};

struct InteractionOptions {
  Execution execution = Execution::kSerial;
  // Visit children right-to-left; scores must not change.
  bool reverse_children = false;
  // Rebuild each Gram matrix explicitly and record how far the carried
  // inverse is from it.
  bool verify_state = false;
  // Fallback threshold on |1 - x^T A_inv x|, relative to trace(A_inv).
  double denominator_tolerance = 1e-10;
  // Subtrees with fewer nodes than this are not spawned as tasks.
  std::size_t task_grain = 16;
};

// Interaction score of every node: the distance between the least-squares
// estimates with the node's ancestors removed, with and without the node
// itself. Computed top-down with Sherman-Morrison updates of the inverse
// Gram matrix; leaves take signed score v(leaf) and absolute |v(leaf)|.
InteractionReport DetectInteractions(const CharacteristicTable& table, const ParseTree& tree,
                                     const DesignMatrix& x, DistanceMode mode,
                                     const InteractionOptions& options = {});

// Same scores, from two explicit minimum-norm solves per node.
InteractionReport DetectInteractionsDirect(const CharacteristicTable& table, const ParseTree& tree,
                                           const DesignMatrix& x, DistanceMode mode,
                                           Execution execution = Execution::kSerial);

}  // namespace lstree

#endif  // LSTREE_SOLVER_H_
