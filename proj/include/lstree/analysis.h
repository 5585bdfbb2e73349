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

#ifndef LSTREE_ANALYSIS_H_
#define LSTREE_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lstree/execution.h"
#include "lstree/oracle.h"
#include "lstree/solver.h"
#include "lstree/tree.h"

namespace lstree {

// Everything computed for one corpus instance.
struct InstanceResult {
  std::string id;
  ParseTree tree;
  AttributionResult attribution;
  InteractionReport interactions;
  std::optional<std::string> split;
};

// Synthetic sentence-joining nodes are left out of every corpus analysis:
// interactions across sentences are not studied.

struct NonlinearityRow {
  std::string instance;
  // Pearson correlation of psi with the per-token linear coefficients;
  // nullopt when either side has zero variance.
  std::optional<double> correlation;
  // Tokens with no linear coefficient (scored as 0).
  std::size_t missing_words = 0;
  // Entry k-1 is the average depth of the k nodes with the largest absolute
  // interaction scores (ties by preorder), k = 1..K.
  std::vector<double> top_node_depths;
};

struct NonlinearitySummary {
  std::vector<NonlinearityRow> rows;
  std::optional<double> average_correlation;
  std::size_t correlated_instances = 0;
  std::vector<double> average_depths;  // per k, over all instances
};

std::optional<double> PearsonCorrelation(std::span<const double> a, std::span<const double> b);

// Average depth of the top-k nodes by absolute score, for k = 1..max_k.
// When a tree has fewer than k eligible nodes all of them are averaged.
std::vector<double> TopNodeDepths(const ParseTree& tree, const InteractionReport& report, int max_k);

NonlinearitySummary NonlinearityReport(std::span<const InstanceResult> instances, const Lexicon& linear_coefficients,
                                       int max_k);

struct AdversativeRow {
  std::string marker;
  std::size_t count = 0;         // matched nodes
  std::size_t parent_count = 0;  // matched nodes with an eligible parent
  std::optional<double> ratio_self;
  std::optional<double> ratio_parent;
};

struct AdversativeSummary {
  std::vector<AdversativeRow> rows;
  // Mean absolute interaction score of a node, over all nodes of all
  // instances (leaves included). Denominator of every ratio.
  std::optional<double> generic_average;
};

std::vector<std::vector<std::string>> DefaultAdversativeMarkers();

// A node matches a marker when its words equal the marker's words,
// ignoring case.
AdversativeSummary AdversativeReport(std::span<const InstanceResult> instances,
                                     std::span<const std::vector<std::string>> markers);

struct OverfitDiagnostic {
  double stat_observed = 0.0;  // mean train variance - mean test variance
  double p_value = 1.0;
  int iterations = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t excluded = 0;  // instances with fewer than two nodes
};

// Population variance of the absolute scores of one instance; nullopt with
// fewer than two eligible nodes.
std::optional<double> ScoreVariance(const InteractionReport& report);

// Two-sided permutation test on the difference of group means. Iteration t
// shuffles labels with a generator seeded from (seed, t), so the result does
// not depend on the number of threads.
OverfitDiagnostic PermutationTest(std::span<const double> train, std::span<const double> test, int iterations,
                                  std::uint64_t seed, Execution execution = Execution::kParallel);

OverfitDiagnostic OverfitTest(std::span<const InteractionReport> train, std::span<const InteractionReport> test,
                              int iterations, std::uint64_t seed, Execution execution = Execution::kParallel);

}  // namespace lstree

#endif  // LSTREE_ANALYSIS_H_
