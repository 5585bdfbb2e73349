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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "lstree/process_oracle.h"
#include "lstree/solver.h"

namespace lstree {
namespace {

namespace fs = std::filesystem;

class ProcessOracleTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("lstree_proc_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    lexicon_ = (dir_ / "lex.tsv").string();
    std::ofstream(lexicon_) << "good\t1\nnot\t-2\nfilm\t0.25\nbad\t-1.5\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Command(const std::string& extra = "") const {
    return std::string(FAKE_ADAPTER_PATH) + " " + lexicon_ + " " + extra;
  }

  fs::path dir_;
  std::string lexicon_;
};

ModelQuery Query(const std::vector<std::string>& tokens, std::vector<bool> keep) { return {tokens, std::move(keep)}; }

TEST_F(ProcessOracleTest, HandshakeAndScore) {
  ProcessOracle oracle(Command());
  EXPECT_EQ(oracle.name(), "fake-linear");
  const std::vector<std::string> tokens = {"not", "good"};
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {true, true}), 0), -1.0);
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {false, false}), 0), 0.0);
}

TEST_F(ProcessOracleTest, MatchesBuiltinLinearOnRandomQueries) {
  ProcessOracle external(Command("--reverse"));
  LinearOracle builtin(LoadLexicon(lexicon_));
  const std::vector<std::string> vocab = {"good", "not", "film", "bad", "the", "[PAD]"};
  std::mt19937_64 rng(17);
  std::vector<std::vector<std::string>> token_lists;
  std::vector<ModelQuery> queries;
  token_lists.reserve(50);
  for (int q = 0; q < 50; ++q) {
    std::vector<std::string> toks(1 + rng() % 8);
    for (auto& t : toks) t = vocab[rng() % vocab.size()];
    token_lists.push_back(std::move(toks));
  }
  for (const auto& toks : token_lists) {
    std::vector<bool> keep(toks.size());
    for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = rng() % 2;
    queries.push_back({toks, keep});
  }
  const auto a = external.EvaluateBatch(queries, 0);
  const auto b = builtin.EvaluateBatch(queries, 0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-9) << "query " << k;
  // Same request again, same answers.
  EXPECT_EQ(external.EvaluateBatch(queries, 0), a);
}

TEST_F(ProcessOracleTest, PerRequestErrorKeepsSessionAlive) {
  ProcessOracle oracle(Command("--fail-token bad"));
  const std::vector<std::string> tokens = {"not", "bad"};
  std::vector<ModelQuery> batch = {Query(tokens, {true, false}), Query(tokens, {false, true})};
  try {
    oracle.EvaluateBatch(batch, 0);
    FAIL() << "expected OracleError";
  } catch (const OracleError& e) {
    ASSERT_TRUE(e.query_id().has_value());
    EXPECT_EQ(e.batch_index(), 1u);
    EXPECT_NE(std::string(e.what()).find("refusing token bad"), std::string::npos);
  }
  EXPECT_DOUBLE_EQ(oracle.Evaluate(Query(tokens, {true, false}), 0), -2.0);
  EXPECT_EQ(oracle.launches(), 1);
}

TEST_F(ProcessOracleTest, RestartsAfterCrash) {
  const std::string marker = (dir_ / "crashed").string();
  ProcessOracle oracle(Command("--crash-once " + marker + " 2"));
  const std::vector<std::string> tokens = {"good", "film"};
  std::vector<ModelQuery> batch = {Query(tokens, {true, false}), Query(tokens, {false, true}),
                                   Query(tokens, {true, true})};
  const auto scores = oracle.EvaluateBatch(batch, 0);
  EXPECT_EQ(scores, (std::vector<double>{1.0, 0.25, 1.25}));
  EXPECT_EQ(oracle.launches(), 2);
  EXPECT_TRUE(fs::exists(marker));
}

TEST_F(ProcessOracleTest, SilentProcessTimesOut) {
  ProcessOracle::Options options;
  options.timeout = std::chrono::milliseconds(200);
  options.max_restarts = 1;
  ProcessOracle oracle(Command("--silent"), options);
  const std::vector<std::string> tokens = {"good"};
  EXPECT_THROW(oracle.Evaluate(Query(tokens, {true}), 0), OracleError);
  EXPECT_EQ(oracle.launches(), 2);
}

TEST_F(ProcessOracleTest, BadLaunchesFail) {
  ProcessOracle::Options options;
  options.timeout = std::chrono::milliseconds(500);
  EXPECT_THROW(ProcessOracle("exit 0", options), OracleError);
  EXPECT_THROW(ProcessOracle(Command("--bad-hello"), options), OracleError);
}

TEST_F(ProcessOracleTest, AutoClassIsResolvedOnceAndPinned) {
  ProcessOracle oracle(Command("--class 2"));
  const ParseTree t = ParsePtb("(S (RB not) (JJ good))");
  const CharacteristicTable table = Populate(oracle, t);
  ASSERT_EQ(table.class_index, 2);
  // Scores are shifted by -0.5 * class for every query, so v is unchanged.
  EXPECT_DOUBLE_EQ(table.base, -1.0);
  EXPECT_DOUBLE_EQ(table.at(WordSet::Range(2, 0, 2)), -1.0);

  const CharacteristicTable fixed = Populate(oracle, t, ClassPolicy{0});
  EXPECT_EQ(fixed.class_index, 0);
  EXPECT_DOUBLE_EQ(fixed.base, 0.0);
}

TEST_F(ProcessOracleTest, LsTreeValueMatchesBuiltin) {
  ProcessOracle external(Command("--reverse"));
  LinearOracle builtin(LoadLexicon(lexicon_));
  const ParseTree t = ParsePtb("(S (NP (DT the) (NN film)) (VP (RB not) (JJ good)))");
  const DesignMatrix x = BuildDesignMatrix(t);
  const auto a = SolveLsTree(Populate(external, t, ClassPolicy{0}), x).psi;
  const auto b = SolveLsTree(Populate(builtin, t), x).psi;
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-9);
}

}  // namespace
}  // namespace lstree
