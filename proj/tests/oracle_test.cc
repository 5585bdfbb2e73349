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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "lstree/oracle.h"
#include "test_support.h"

namespace lstree {
namespace {

ModelQuery Query(const std::vector<std::string>& tokens, std::vector<bool> keep) { return {tokens, std::move(keep)}; }

LinearOracle NotGood() { return LinearOracle({{"good", 1.0}, {"not", -2.0}}); }

NegationOracle Negation() {
  return NegationOracle(NegationOracle::DefaultLexicon(), NegationOracle::DefaultNegators());
}

// Counts calls and returns a fixed score per visible-token string.
class CountingOracle : public Oracle {
 public:
  std::string name() const override { return "counting"; }
  int batches = 0;
  double forced = 0.0;
  bool force = false;

 protected:
  std::vector<double> DoEvaluateBatch(std::span<const ModelQuery> queries, std::optional<int>) override {
    ++batches;
    std::vector<double> out;
    for (const auto& q : queries) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.keep.size(); ++i) s += q.keep[i] ? static_cast<double>(i + 1) * 0.5 : 0.0;
      out.push_back(force ? forced : s + 3.0);
    }
    return out;
  }
};

TEST(LinearOracleTest, SumsWeights) {
  LinearOracle oracle = NotGood();
  const std::vector<std::string> tokens = {"not", "good"};
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {true, true})), -1.0);
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {false, false})), 0.0);
  EXPECT_EQ(oracle.evaluations(), 2u);
}

TEST(LinearOracleTest, PlaceholderTokenIsScoredLikeAnyWord) {
  LinearOracle oracle({{"good", 1.0}, {"[PAD]", 0.25}});
  const std::vector<std::string> tokens = {"not", "good"};
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {false, true})), 1.25);
  oracle.set_mask({MaskMode::kDelete, "[PAD]"});
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {false, true})), 1.0);
}

TEST(NegationOracleTest, FlipRule) {
  NegationOracle oracle = Negation();
  const std::vector<std::string> tokens = {"not", "good"};
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {true, true})), -1.0);
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {false, true})), 1.0);
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {true, false})), 0.0);
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {false, false})), 0.0);
  // The negator must precede the word.
  const std::vector<std::string> after = {"good", "not"};
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(after, {true, true})), 1.0);
}

TEST(ModelQueryTest, MaskModes) {
  const std::vector<std::string> tokens = {"a", "b", "c"};
  const ModelQuery q = Query(tokens, {true, false, true});
  EXPECT_EQ(q.Materialize({MaskMode::kPad, "[PAD]"}), (std::vector<std::string>{"a", "[PAD]", "c"}));
  EXPECT_EQ(q.Materialize({MaskMode::kDelete, "[PAD]"}), (std::vector<std::string>{"a", "c"}));
  LinearOracle oracle({});
  EXPECT_THROW(oracle.Evaluate(Query(tokens, {true})), OracleError);
}

TEST(LexiconTest, ParsesAndRejects) {
  const Lexicon lex = ParseLexicon("# comment\ngood\t1.5\n\nnot\t-2\r\n");
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_DOUBLE_EQ(lex.at("good"), 1.5);
  EXPECT_DOUBLE_EQ(lex.at("not"), -2.0);
  EXPECT_THROW(ParseLexicon("good 1.0\n"), std::runtime_error);
  EXPECT_THROW(ParseLexicon("good\tabc\n"), std::runtime_error);
  EXPECT_THROW(ParseLexicon("good\t1.0x\n"), std::runtime_error);
  EXPECT_THROW(LoadLexicon("/nonexistent/lexicon.tsv"), std::runtime_error);
}

TEST(PopulateTest, LinearThreeNodeTree) {
  LinearOracle oracle({{"w1", 1.0}, {"w2", -2.0}});
  const ParseTree t = ParsePtb("(X (A w1) (B w2))");
  const CharacteristicTable table = Populate(oracle, t);
  EXPECT_EQ(oracle.evaluations(), t.node_count() + 1);
  EXPECT_DOUBLE_EQ(table.at(WordSet::Singleton(2, 0)), 1.0);
  EXPECT_DOUBLE_EQ(table.at(WordSet::Singleton(2, 1)), -2.0);
  EXPECT_DOUBLE_EQ(table.at(WordSet::Range(2, 0, 2)), -1.0);
  EXPECT_DOUBLE_EQ(table.at(WordSet(2)), 0.0);
  EXPECT_EQ(table.size(), t.node_count());
}

TEST(PopulateTest, NegationGame) {
  NegationOracle oracle = Negation();
  const ParseTree t = ParsePtb("(S (RB not) (JJ good))");
  const CharacteristicTable table = Populate(oracle, t);
  EXPECT_DOUBLE_EQ(table.at(WordSet::Singleton(2, 0)), 0.0);
  EXPECT_DOUBLE_EQ(table.at(WordSet::Singleton(2, 1)), 1.0);
  EXPECT_DOUBLE_EQ(table.at(WordSet::Range(2, 0, 2)), -1.0);
}

TEST(PopulateTest, SubtractsEmptyScoreAndBatchesOnce) {
  CountingOracle oracle;
  const ParseTree t = ParsePtb("(X (A a) (B b) (C c))");
  const CharacteristicTable table = Populate(oracle, t);
  EXPECT_EQ(oracle.batches, 1);
  EXPECT_DOUBLE_EQ(table.base, 3.0);
  EXPECT_DOUBLE_EQ(table.at(WordSet::Singleton(3, 2)), 1.5);
  EXPECT_DOUBLE_EQ(table.at(WordSet::Range(3, 0, 3)), 3.0);
}

TEST(PopulateTest, CachedTableIssuesNoNewCalls) {
  CountingOracle oracle;
  std::mt19937_64 rng(3);
  const ParseTree t = testing::RandomTree(rng, 9);
  const CharacteristicTable first = Populate(oracle, t);
  const std::size_t calls = oracle.evaluations();
  const CharacteristicTable second = Populate(oracle, t, {}, &first);
  EXPECT_EQ(oracle.evaluations(), calls);
  EXPECT_EQ(oracle.batches, 1);
  EXPECT_EQ(second.values, first.values);
}

TEST(PopulateTest, NonFiniteScoreIsRejected) {
  CountingOracle oracle;
  oracle.force = true;
  oracle.forced = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Populate(oracle, ParsePtb("(X (A a) (B b))")), OracleError);
  oracle.forced = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Populate(oracle, ParsePtb("(X (A a) (B b))")), OracleError);
}

TEST(PopulateTest, MissingSubsetThrows) {
  CharacteristicTable table;
  EXPECT_THROW(table.at(WordSet::Singleton(3, 1)), std::out_of_range);
}

// v is additive for the linear model: v(S u T) = v(S) + v(T), S and T disjoint.
TEST(LinearOracleTest, AdditiveOnRandomDisjointSubsets) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(-3.0, 3.0);
  Lexicon lex;
  std::vector<std::string> tokens;
  for (int i = 0; i < 12; ++i) {
    tokens.push_back("t" + std::to_string(i));
    lex[tokens.back()] = w(rng);
  }
  LinearOracle oracle(lex);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<bool> s(12), t(12), both(12);
    for (int i = 0; i < 12; ++i) {
      const int side = static_cast<int>(rng() % 3);
      s[i] = side == 0;
      t[i] = side == 1;
      both[i] = s[i] || t[i];
    }
    const double vs = oracle.Evaluate(Query(tokens, s));
    const double vt = oracle.Evaluate(Query(tokens, t));
    const double vst = oracle.Evaluate(Query(tokens, both));
    EXPECT_NEAR(vst, vs + vt, 1e-12);
  }
}

}  // namespace
}  // namespace lstree
