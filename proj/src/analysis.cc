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

#include "lstree/analysis.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lstree {

namespace {

std::vector<const NodeScore*> Eligible(const InteractionReport& report) {
  std::vector<const NodeScore*> out;
  out.reserve(report.nodes.size());
  for (const auto& s : report.nodes) {
    if (!s.synthetic) out.push_back(&s);
  }
  return out;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool Matches(const ParseTree& tree, const NodeScore& node, const std::vector<std::string>& marker) {
  if (node.end - node.begin != marker.size()) return false;
  for (std::size_t k = 0; k < marker.size(); ++k) {
    if (Lower(tree.tokens()[node.begin + k].surface) != Lower(marker[k])) return false;
  }
  return true;
}

std::string Join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

// SplitMix64 finalizer; turns (seed, counter) into an independent stream seed.
std::uint64_t StreamSeed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

std::optional<double> PearsonCorrelation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("PearsonCorrelation: length mismatch");
  if (a.size() < 2) return std::nullopt;
  const double ma = Mean(a);
  const double mb = Mean(b);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> TopNodeDepths(const ParseTree& tree, const InteractionReport& report, int max_k) {
  if (max_k < 1) throw std::invalid_argument("top-k must be at least 1");
  const std::vector<int> depth = Depths(tree);
  auto nodes = Eligible(report);
  std::stable_sort(nodes.begin(), nodes.end(), [](const NodeScore* a, const NodeScore* b) {
    if (a->absolute_score != b->absolute_score) return a->absolute_score > b->absolute_score;
    return a->node < b->node;
  });
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(max_k));
  double total = 0.0;
  for (int k = 1; k <= max_k; ++k) {
    const auto used = std::min(static_cast<std::size_t>(k), nodes.size());
    if (static_cast<std::size_t>(k) <= nodes.size()) total += depth[nodes[static_cast<std::size_t>(k) - 1]->node];
    out.push_back(used == 0 ? 0.0 : total / static_cast<double>(used));
  }
  return out;
}

NonlinearitySummary NonlinearityReport(std::span<const InstanceResult> instances, const Lexicon& linear_coefficients,
                                       int max_k) {
  NonlinearitySummary summary;
  summary.average_depths.assign(static_cast<std::size_t>(std::max(max_k, 0)), 0.0);
  double correlation_total = 0.0;
  for (const InstanceResult& inst : instances) {
    NonlinearityRow row;
    row.instance = inst.id;
    std::vector<double> coefficients;
    coefficients.reserve(inst.tree.word_count());
    for (const Token& tok : inst.tree.tokens()) {
      auto it = linear_coefficients.find(tok.surface);
      if (it == linear_coefficients.end()) {
        ++row.missing_words;
        coefficients.push_back(0.0);
      } else {
        coefficients.push_back(it->second);
      }
    }
    const auto& psi = inst.attribution.psi;
    row.correlation = PearsonCorrelation(std::span<const double>(psi.data(), static_cast<std::size_t>(psi.size())),
                                         coefficients);
    if (row.correlation) {
      correlation_total += *row.correlation;
      ++summary.correlated_instances;
    }
    row.top_node_depths = TopNodeDepths(inst.tree, inst.interactions, max_k);
    for (std::size_t k = 0; k < row.top_node_depths.size(); ++k) summary.average_depths[k] += row.top_node_depths[k];
    summary.rows.push_back(std::move(row));
  }
  if (summary.correlated_instances > 0) {
    summary.average_correlation = correlation_total / static_cast<double>(summary.correlated_instances);
  }
  if (!instances.empty()) {
    for (auto& v : summary.average_depths) v /= static_cast<double>(instances.size());
  }
  return summary;
}

std::vector<std::vector<std::string>> DefaultAdversativeMarkers() {
  return {{"not"},    {"but"},     {"yet"},   {"though"}, {"although"},   {"even", "though"},
          {"whereas"}, {"except"}, {"despite"}, {"in", "spite", "of"}};
}

AdversativeSummary AdversativeReport(std::span<const InstanceResult> instances,
                                     std::span<const std::vector<std::string>> markers) {
  if (markers.empty()) throw std::invalid_argument("adversative marker list is empty");
  AdversativeSummary summary;
  double generic_total = 0.0;
  std::size_t generic_count = 0;
  for (const auto& inst : instances) {
    for (const NodeScore* s : Eligible(inst.interactions)) {
      generic_total += s->absolute_score;
      ++generic_count;
    }
  }
  if (generic_count > 0 && generic_total > 0.0) summary.generic_average = generic_total / static_cast<double>(generic_count);

  for (const auto& marker : markers) {
    if (marker.empty()) throw std::invalid_argument("empty adversative marker");
    AdversativeRow row;
    row.marker = Join(marker);
    double self_total = 0.0;
    double parent_total = 0.0;
    for (const auto& inst : instances) {
      const auto& nodes = inst.interactions.nodes;
      for (const NodeScore* s : Eligible(inst.interactions)) {
        if (!Matches(inst.tree, *s, marker)) continue;
        ++row.count;
        self_total += s->absolute_score;
        const auto parent = inst.tree.node(s->node).parent;
        if (parent && !nodes[*parent].synthetic) {
          ++row.parent_count;
          parent_total += nodes[*parent].absolute_score;
        }
      }
    }
    if (summary.generic_average && row.count > 0) {
      row.ratio_self = self_total / static_cast<double>(row.count) / *summary.generic_average;
    }
    if (summary.generic_average && row.parent_count > 0) {
      row.ratio_parent = parent_total / static_cast<double>(row.parent_count) / *summary.generic_average;
    }
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

std::optional<double> ScoreVariance(const InteractionReport& report) {
  const auto nodes = Eligible(report);
  if (nodes.size() < 2) return std::nullopt;
  double mean = 0.0;
  for (const NodeScore* s : nodes) mean += s->absolute_score;
  mean /= static_cast<double>(nodes.size());
  double ss = 0.0;
  for (const NodeScore* s : nodes) ss += (s->absolute_score - mean) * (s->absolute_score - mean);
  return ss / static_cast<double>(nodes.size());
}

OverfitDiagnostic PermutationTest(std::span<const double> train, std::span<const double> test, int iterations,
                                  std::uint64_t seed, Execution execution) {
  if (train.size() < 2 || test.size() < 2) {
    throw std::invalid_argument("permutation test needs at least two instances per side");
  }
  if (iterations < 100) throw std::invalid_argument("permutation test needs at least 100 iterations");

  OverfitDiagnostic out;
  out.iterations = iterations;
  out.n_train = train.size();
  out.n_test = test.size();
  out.stat_observed = Mean(train) - Mean(test);

  std::vector<double> pooled(train.begin(), train.end());
  pooled.insert(pooled.end(), test.begin(), test.end());
  // Canonical order: the result depends only on the two multisets.
  std::sort(pooled.begin(), pooled.end());
  const double total = std::accumulate(pooled.begin(), pooled.end(), 0.0);
  double scale = 0.0;
  for (double v : pooled) scale = std::max(scale, std::abs(v));
  // Permuted statistics equal to the observed one up to rounding count as
  // "at least as extreme".
  const double threshold = std::abs(out.stat_observed) - 1e-12 * std::max(scale, 1e-300);
  const std::size_t n_train = train.size();
  const auto n_test = static_cast<double>(test.size());

  auto extreme = [&](int t) -> long long {
    std::mt19937_64 rng(StreamSeed(seed, static_cast<std::uint64_t>(t)));
    std::vector<double> perm = pooled;
    std::shuffle(perm.begin(), perm.end(), rng);
    double train_sum = 0.0;
    for (std::size_t k = 0; k < n_train; ++k) train_sum += perm[k];
    const double stat = train_sum / static_cast<double>(n_train) - (total - train_sum) / n_test;
    return std::abs(stat) >= threshold ? 1 : 0;
  };

  long long count = 0;
  if (execution == Execution::kParallel) {
#pragma omp parallel for reduction(+ : count) schedule(static)
    for (int t = 0; t < iterations; ++t) count += extreme(t);
  } else {
    for (int t = 0; t < iterations; ++t) count += extreme(t);
  }
  out.p_value = static_cast<double>(1 + count) / static_cast<double>(1 + iterations);
  return out;
}

OverfitDiagnostic OverfitTest(std::span<const InteractionReport> train, std::span<const InteractionReport> test,
                              int iterations, std::uint64_t seed, Execution execution) {
  std::size_t excluded = 0;
  auto collect = [&](std::span<const InteractionReport> side) {
    std::vector<double> out;
    for (const auto& r : side) {
      if (auto v = ScoreVariance(r)) {
        out.push_back(*v);
      } else {
        ++excluded;
      }
    }
    return out;
  };
  const std::vector<double> train_var = collect(train);
  const std::vector<double> test_var = collect(test);
  OverfitDiagnostic out = PermutationTest(train_var, test_var, iterations, seed, execution);
  out.excluded = excluded;
  return out;
}

}  // namespace lstree
