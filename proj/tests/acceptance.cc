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

// Acceptance checks. Prints one PASS/FAIL line per criterion with the
// measured quantity next to its pinned tolerance; exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lstree/analysis.h"
#include "lstree/corpus.h"
#include "lstree/pipeline.h"
#include "lstree/solver.h"

namespace {

using namespace lstree;
using Clock = std::chrono::steady_clock;

const std::string kData = LSTREE_TEST_DATA;
const std::string kLexiconPath = kData + "/lexicon.tsv";
const std::string kCorpusPath = kData + "/corpus.jsonl";

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

BracketNode Random(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  BracketNode node;
  if (hi - lo == 1) {
    node.label = "W";
    node.word = "w" + std::to_string(lo);
    return node;
  }
  node.label = "N";
  std::vector<std::size_t> inner;
  for (std::size_t c = lo + 1; c < hi; ++c) inner.push_back(c);
  std::shuffle(inner.begin(), inner.end(), rng);
  const std::size_t parts = 2 + rng() % std::min<std::size_t>(2, hi - lo - 1);
  std::vector<std::size_t> cuts(inner.begin(), inner.begin() + static_cast<std::ptrdiff_t>(parts - 1));
  std::sort(cuts.begin(), cuts.end());
  std::size_t start = lo;
  for (std::size_t c : cuts) {
    node.children.push_back(Random(rng, start, c));
    start = c;
  }
  node.children.push_back(Random(rng, start, hi));
  return node;
}

BracketNode Balanced(std::size_t lo, std::size_t hi) {
  BracketNode node;
  if (hi - lo == 1) {
    node.word = "w" + std::to_string(lo);
    return node;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  node.children.push_back(Balanced(lo, mid));
  node.children.push_back(Balanced(mid, hi));
  return node;
}

CharacteristicTable RandomTable(std::mt19937_64& rng, const ParseTree& t) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CharacteristicTable table;
  table.has_base = true;
  for (const auto& n : t.nodes()) table.values[n.subset] = u(rng);
  return table;
}

double MaxDiff(const InteractionReport& a, const InteractionReport& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    m = std::max({m, std::abs(a.nodes[k].signed_score - b.nodes[k].signed_score),
                  std::abs(a.nodes[k].absolute_score - b.nodes[k].absolute_score)});
  }
  return m;
}

std::vector<InstanceResult> Corpus(Oracle& oracle) {
  std::vector<InstanceResult> out;
  for (const auto& rec : LoadCorpus(kCorpusPath)) {
    ParseTree t = BuildInstanceTree(rec);
    const auto table = Populate(oracle, t);
    const DesignMatrix x = BuildDesignMatrix(t);
    out.push_back({rec.id, t, SolveLsTree(table, x), DetectInteractions(table, t, x, DistanceMode::kBoth), rec.split});
  }
  return out;
}

Outcome OracleEquivalence() {
  std::mt19937_64 rng(20260101);
  const auto start = Clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(trial) % 11;
    const ParseTree t = ParseTree::FromBrackets(Random(rng, 0, d));
    const auto table = RandomTable(rng, t);
    const DesignMatrix x = BuildDesignMatrix(t);
    worst = std::max(worst, MaxDiff(DetectInteractions(table, t, x, DistanceMode::kBoth),
                                    DetectInteractionsDirect(table, t, x, DistanceMode::kBoth)));
  }
  const double secs = Seconds(start);
  return {worst < 1e-8 && secs < 10.0, Fmt("max |diff| %.3g (tol 1e-08), %.3f s (limit 10 s)", worst, secs)};
}

Outcome LinearInvariants() {
  const Lexicon lex = LoadLexicon(kLexiconPath);
  LinearOracle oracle(lex);
  const auto results = Corpus(oracle);
  double residual = 0.0, psi_err = 0.0, interior = 0.0;
  for (const auto& r : results) {
    residual = std::max(residual, r.attribution.residual_norm);
    for (std::size_t i = 0; i < r.tree.word_count(); ++i) {
      auto it = lex.find(r.tree.tokens()[i].surface);
      const double w = it == lex.end() ? 0.0 : it->second;
      psi_err = std::max(psi_err, std::abs(r.attribution.psi(static_cast<Eigen::Index>(i)) - w));
    }
    for (const auto& s : r.interactions.nodes) {
      if (!s.leaf) interior = std::max({interior, std::abs(s.signed_score), s.absolute_score});
    }
  }
  const NonlinearitySummary nl = NonlinearityReport(results, lex, 10);
  double corr_err = 0.0;
  for (const auto& row : nl.rows) {
    if (row.correlation) corr_err = std::max(corr_err, std::abs(*row.correlation - 1.0));
  }
  const auto markers = DefaultAdversativeMarkers();
  const AdversativeSummary adv = AdversativeReport(results, markers);
  double parent = 0.0;
  for (const auto& row : adv.rows) {
    if (row.ratio_parent) parent = std::max(parent, *row.ratio_parent);
  }
  char avg[16], par[16];
  std::snprintf(avg, sizeof avg, "%.3f", nl.average_correlation.value_or(0.0));
  std::snprintf(par, sizeof par, "%.3f", parent);
  const bool pass = residual < 1e-10 && psi_err < 1e-10 && interior < 1e-8 && corr_err < 1e-12 &&
                    std::string(avg) == "1.000" && std::string(par) == "0.000" && nl.correlated_instances > 0;
  std::ostringstream d;
  d << "residual " << Fmt("%.2g", residual) << ", |psi-w| " << Fmt("%.2g", psi_err) << ", interior |D| "
    << Fmt("%.2g", interior) << " (tol 1e-08), correlation " << avg << " over " << nl.correlated_instances
    << " instances, parent ratio " << par;
  return {pass, d.str()};
}

Outcome BanzhafConsistency() {
  std::mt19937_64 rng(7777);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int g = 0; g < 20; ++g) {
    const int d = 2 + g % 7;
    CoalitionGame game{d, {}};
    for (std::uint32_t s = 0; s < (1u << d); ++s) game.value[s] = s == 0 ? 0.0 : u(rng);
    const GeneralFit fit = SolveGeneralLs(game, true);
    worst = std::max(worst, (fit.coefficients - BanzhafBruteForce(game)).cwiseAbs().maxCoeff());
  }
  // Negation game: intercept-free least squares is not the Banzhaf value.
  const CoalitionGame neg{2, {{0b00, 0.0}, {0b01, 0.0}, {0b10, 1.0}, {0b11, -1.0}}};
  const Eigen::VectorXd free = SolveGeneralLs(neg, false).coefficients;
  const Eigen::VectorXd banzhaf = BanzhafBruteForce(neg);
  const bool counter = std::abs(free(0) + 2.0 / 3.0) < 1e-12 && std::abs(free(1) - 1.0 / 3.0) < 1e-12 &&
                       std::abs(banzhaf(0) + 1.0) < 1e-12 && std::abs(banzhaf(1)) < 1e-12;
  return {worst < 1e-8 && counter,
          Fmt("max |fit-banzhaf| %.3g (tol 1e-08); no-intercept (%.4f, %.4f)", worst, free(0), free(1)) +
              Fmt(" vs banzhaf (%.4f, %.4f)", banzhaf(0), banzhaf(1))};
}

Outcome LeafRule() {
  std::size_t leaves = 0, mismatches = 0;
  LinearOracle linear(LoadLexicon(kLexiconPath));
  NegationOracle negation(NegationOracle::DefaultLexicon(), NegationOracle::DefaultNegators());
  for (Oracle* oracle : std::initializer_list<Oracle*>{&linear, &negation}) {
    for (const auto& rec : LoadCorpus(kCorpusPath)) {
      const ParseTree t = BuildInstanceTree(rec);
      const auto table = Populate(*oracle, t);
      const auto report = DetectInteractions(table, t, BuildDesignMatrix(t), DistanceMode::kBoth);
      for (const auto& s : report.nodes) {
        if (!s.leaf) continue;
        ++leaves;
        if (s.signed_score != table.at(t.node(s.node).subset)) ++mismatches;
      }
    }
  }
  return {leaves > 0 && mismatches == 0,
          std::to_string(leaves) + " leaves, " + std::to_string(mismatches) + " not bit-equal to v(leaf)"};
}

Outcome WorkedNegation() {
  NegationOracle oracle(NegationOracle::DefaultLexicon(), NegationOracle::DefaultNegators());
  const ParseTree t = ParsePtb("(S (RB not) (JJ good))");
  const auto table = Populate(oracle, t);
  const DesignMatrix x = BuildDesignMatrix(t);
  const auto psi = SolveLsTree(table, x).psi;
  const auto fast = DetectInteractions(table, t, x, DistanceMode::kBoth);
  const auto direct = DetectInteractionsDirect(table, t, x, DistanceMode::kBoth);
  const double err = std::max({std::abs(psi(0) + 2.0 / 3.0), std::abs(psi(1) - 1.0 / 3.0),
                               std::abs(fast.nodes[0].signed_score + 4.0 / 3.0),
                               std::abs(fast.nodes[0].absolute_score - std::sqrt(8.0) / 3.0),
                               std::abs(direct.nodes[0].signed_score + 4.0 / 3.0),
                               std::abs(direct.nodes[0].absolute_score - std::sqrt(8.0) / 3.0), MaxDiff(fast, direct)});
  return {err < 1e-12, Fmt("psi (%.6f, %.6f), ", psi(0), psi(1)) +
                           Fmt("D_root signed %.6f absolute %.6f, max err %.2g (tol 1e-12)", fast.nodes[0].signed_score,
                               fast.nodes[0].absolute_score, err)};
}

// One synthetic instance: absolute scores of `nodes` nodes, |N(0, spread^2)|.
InteractionReport Synthetic(std::mt19937_64& rng, double spread) {
  std::normal_distribution<double> n(0.0, spread);
  InteractionReport r;
  r.nodes.resize(5 + rng() % 26);
  for (auto& s : r.nodes) {
    s.signed_score = n(rng);
    s.absolute_score = std::abs(s.signed_score);
  }
  return r;
}

Outcome PermutationCalibration() {
  const int trials = 200, iterations = 1000, per_side = 50;
  std::mt19937_64 rng(99);
  int null_hits = 0, alt_hits = 0;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<InteractionReport> train, test, spread;
    for (int k = 0; k < per_side; ++k) {
      train.push_back(Synthetic(rng, 1.0));
      test.push_back(Synthetic(rng, 1.0));
      spread.push_back(Synthetic(rng, 3.0));
    }
    const auto seed = static_cast<std::uint64_t>(trial);
    null_hits += OverfitTest(train, test, iterations, seed).p_value < 0.05 ? 1 : 0;
    alt_hits += OverfitTest(train, spread, iterations, seed).p_value < 0.05 ? 1 : 0;
  }
  const double null_rate = null_hits / static_cast<double>(trials);
  const double alt_rate = alt_hits / static_cast<double>(trials);
  return {null_rate >= 0.02 && null_rate <= 0.10 && alt_rate >= 0.95,
          Fmt("null rate %.3f (range [0.02, 0.10]), x3 spread rate %.3f (min 0.95)", null_rate, alt_rate)};
}

Outcome Throughput() {
  std::mt19937_64 rng(100);
  const ParseTree t = ParseTree::FromBrackets(Balanced(0, 100));
  const auto table = RandomTable(rng, t);
  const auto start = Clock::now();
  const DesignMatrix x = BuildDesignMatrix(t);
  const auto report = DetectInteractions(table, t, x, DistanceMode::kBoth);
  const double secs = Seconds(start);
  const double err = MaxDiff(report, DetectInteractionsDirect(table, t, x, DistanceMode::kBoth));
  return {t.node_count() == 199 && secs < 1.0 && err < 1e-8,
          Fmt("d=100, %.0f nodes, %.4f s (limit 1 s), max |diff| vs direct %.2g", static_cast<double>(t.node_count()),
              secs, err)};
}

Outcome Determinism() {
  bool same = true;
  std::size_t bytes = 0;
  for (Command command : {Command::kValues, Command::kInteractions, Command::kAnalyze, Command::kDiagnose}) {
    RunConfig c;
    c.command = command;
    c.corpus = kCorpusPath;
    c.model = "builtin-negation:" + kLexiconPath;
    c.seed = 12345;
    c.iterations = 2000;
    std::ostringstream a, b, log;
    Run(c, a, log);
    Run(c, b, log);
    same = same && a.str() == b.str() && !a.str().empty();
    bytes += a.str().size();
  }
  return {same, std::to_string(bytes) + " bytes over 4 commands, repeated runs " + (same ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"oracle-equivalence", OracleEquivalence},
      {"linear-invariants", LinearInvariants},
      {"banzhaf-consistency", BanzhafConsistency},
      {"leaf-rule", LeafRule},
      {"worked-negation", WorkedNegation},
      {"permutation-calibration", PermutationCalibration},
      {"throughput-d100", Throughput},
      {"determinism", Determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : checks) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-24s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
