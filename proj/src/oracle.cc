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

#include "lstree/oracle.h"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lstree {

std::vector<std::string> ModelQuery::Materialize(const MaskOptions& mask) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (keep[i]) {
      out.push_back(tokens[i]);
    } else if (mask.mode == MaskMode::kPad) {
      out.push_back(mask.token);
    }
  }
  return out;
}

ModelQuery MakeQuery(std::span<const std::string> tokens, const WordSet& present) {
  ModelQuery q{tokens, std::vector<bool>(tokens.size(), false)};
  for (auto i : present.indices()) q.keep.at(i) = true;
  return q;
}

std::vector<double> Oracle::EvaluateBatch(std::span<const ModelQuery> queries,
                                          std::optional<int> class_index) {
  for (std::size_t k = 0; k < queries.size(); ++k) {
    if (queries[k].keep.size() != queries[k].tokens.size()) {
      throw OracleError("query mask length does not match token count", std::nullopt, k);
    }
  }
  auto scores = DoEvaluateBatch(queries, class_index);
  if (scores.size() != queries.size()) throw OracleError("oracle returned the wrong number of scores");
  evaluations_ += scores.size();
  return scores;
}

double Oracle::Evaluate(const ModelQuery& query, std::optional<int> class_index) {
  return EvaluateBatch(std::span<const ModelQuery>(&query, 1), class_index).front();
}

std::optional<int> Oracle::ResolveClass(std::span<const std::string>) { return std::nullopt; }

Lexicon ParseLexicon(std::string_view text) {
  Lexicon lexicon;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw std::runtime_error("lexicon line " + std::to_string(lineno) + ": expected word<TAB>weight");
    }
    const std::string weight = line.substr(tab + 1);
    std::size_t used = 0;
    double w = 0.0;
    try {
      w = std::stod(weight, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != weight.size() || !std::isfinite(w)) {
      throw std::runtime_error("lexicon line " + std::to_string(lineno) + ": bad weight '" + weight + "'");
    }
    lexicon[line.substr(0, tab)] = w;
  }
  return lexicon;
}

Lexicon LoadLexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseLexicon(buffer.str());
}

std::vector<double> LinearOracle::DoEvaluateBatch(std::span<const ModelQuery> queries,
                                                  std::optional<int>) {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    double score = 0.0;
    for (const auto& word : q.Materialize(mask())) {
      if (auto it = weights_.find(word); it != weights_.end()) score += it->second;
    }
    out.push_back(score);
  }
  return out;
}

NegationOracle::NegationOracle(Lexicon polarity, std::unordered_set<std::string> negators)
    : polarity_(std::move(polarity)), negators_(std::move(negators)) {}

Lexicon NegationOracle::DefaultLexicon() {
  return {
      {"good", 1.0},         {"great", 1.0},  {"fun", 1.0},     {"funny", 1.0},
      {"entertaining", 1.0}, {"heartwarming", 1.0}, {"best", 1.0}, {"love", 1.0},
      {"bad", -1.0},         {"boring", -1.0}, {"dull", -1.0},  {"awful", -1.0},
      {"worst", -1.0},       {"mess", -1.0},
  };
}

std::unordered_set<std::string> NegationOracle::DefaultNegators() {
  return {"not", "n't", "no", "never"};
}

std::vector<double> NegationOracle::DoEvaluateBatch(std::span<const ModelQuery> queries,
                                                    std::optional<int>) {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    double score = 0.0;
    bool negated = false;
    for (const auto& word : q.Materialize(mask())) {
      if (negators_.contains(word)) {
        negated = true;
        continue;
      }
      if (auto it = polarity_.find(word); it != polarity_.end()) {
        score += negated ? -it->second : it->second;
      }
    }
    out.push_back(score);
  }
  return out;
}

double CharacteristicTable::at(const WordSet& s) const {
  if (s.empty()) return 0.0;
  auto it = values.find(s);
  if (it == values.end()) throw std::out_of_range("characteristic table has no entry for " + s.ToString());
  return it->second;
}

bool CharacteristicTable::contains(const WordSet& s) const { return s.empty() || values.contains(s); }

CharacteristicTable Populate(Oracle& oracle, const ParseTree& tree, const ClassPolicy& policy,
                             const CharacteristicTable* cache) {
  CharacteristicTable table;
  if (cache != nullptr) table = *cache;

  const std::vector<std::string> tokens = tree.surfaces();
  if (!table.class_index) {
    table.class_index = policy.fixed ? policy.fixed : oracle.ResolveClass(tokens);
  }

  // Batch slot -> node id; kBase marks the empty-set query.
  constexpr NodeId kBase = static_cast<NodeId>(-1);
  std::vector<NodeId> slots;
  std::vector<ModelQuery> queries;
  const std::size_t d = tree.word_count();
  if (!table.has_base) {
    slots.push_back(kBase);
    queries.push_back(MakeQuery(tokens, WordSet(d)));
  }
  for (const TreeNode& node : tree.nodes()) {
    if (table.values.contains(node.subset)) continue;
    slots.push_back(node.id);
    queries.push_back(MakeQuery(tokens, node.subset));
  }
  if (queries.empty()) return table;

  std::vector<double> scores;
  try {
    scores = oracle.EvaluateBatch(queries, table.class_index);
  } catch (const OracleError& e) {
    std::string where;
    if (auto k = e.batch_index(); k && *k < slots.size()) {
      where = slots[*k] == kBase ? " (empty-input query)"
                                 : " (node " + std::to_string(slots[*k]) + " span [" +
                                       std::to_string(tree.node(slots[*k]).begin) + "," +
                                       std::to_string(tree.node(slots[*k]).end) + "))";
    }
    throw OracleError(std::string(e.what()) + where, e.query_id(), e.batch_index());
  }

  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!std::isfinite(scores[k])) {
      throw OracleError("non-finite score from " + oracle.name() +
                            (slots[k] == kBase ? " on the empty input" : " on node " + std::to_string(slots[k])),
                        std::nullopt, k);
    }
  }
  if (slots.front() == kBase) {
    table.base = scores.front();
    table.has_base = true;
  }
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (slots[k] == kBase) continue;
    table.values[tree.node(slots[k]).subset] = scores[k] - table.base;
  }
  return table;
}

}  // namespace lstree
