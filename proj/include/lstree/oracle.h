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

#ifndef LSTREE_ORACLE_H_
#define LSTREE_ORACLE_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lstree/subset.h"
#include "lstree/tree.h"

namespace lstree {

enum class MaskMode { kPad, kDelete };

struct MaskOptions {
  MaskMode mode = MaskMode::kPad;
  std::string token = "[PAD]";
};

// Full token list plus a keep-mask; keep[i] == false hides word i.
struct ModelQuery {
  std::span<const std::string> tokens;
  std::vector<bool> keep;

  // Tokens as the model sees them: masked words are replaced by the
  // placeholder (kPad) or dropped (kDelete).
  std::vector<std::string> Materialize(const MaskOptions& mask) const;
};

ModelQuery MakeQuery(std::span<const std::string> tokens, const WordSet& present);

class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& what, std::optional<std::int64_t> query_id = std::nullopt,
                       std::optional<std::size_t> batch_index = std::nullopt)
      : std::runtime_error(what), query_id_(query_id), batch_index_(batch_index) {}
  // Wire id of the failing request, for external models.
  std::optional<std::int64_t> query_id() const { return query_id_; }
  // Position of the failing query within the batch.
  std::optional<std::size_t> batch_index() const { return batch_index_; }

 private:
  std::optional<std::int64_t> query_id_;
  std::optional<std::size_t> batch_index_;
};

// Black-box model f(S): log-probability of one selected class on the words
// kept by the query. Implementations must be deterministic.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual std::string name() const = 0;

  // Scores every query for `class_index` (nullopt lets the model pick).
  // Answers are returned in query order.
  std::vector<double> EvaluateBatch(std::span<const ModelQuery> queries,
                                    std::optional<int> class_index = std::nullopt);
  double Evaluate(const ModelQuery& query, std::optional<int> class_index = std::nullopt);

  // The model's argmax class on the full sentence, if it has classes.
  virtual std::optional<int> ResolveClass(std::span<const std::string> tokens);

  // Number of queries answered so far.
  std::size_t evaluations() const { return evaluations_.load(); }

  const MaskOptions& mask() const { return mask_; }
  void set_mask(MaskOptions mask) { mask_ = std::move(mask); }

 protected:
  virtual std::vector<double> DoEvaluateBatch(std::span<const ModelQuery> queries,
                                              std::optional<int> class_index) = 0;

 private:
  MaskOptions mask_;
  std::atomic<std::size_t> evaluations_{0};
};

using Lexicon = std::unordered_map<std::string, double>;

// Reads "word<TAB>weight" lines. Blank lines and lines starting with '#'
// are ignored.
Lexicon LoadLexicon(const std::string& path);
Lexicon ParseLexicon(std::string_view text);

// f = sum of the weights of the words the model sees; f(empty) = 0.
class LinearOracle : public Oracle {
 public:
  explicit LinearOracle(Lexicon weights) : weights_(std::move(weights)) {}
  std::string name() const override { return "builtin-linear"; }
  const Lexicon& weights() const { return weights_; }

 protected:
  std::vector<double> DoEvaluateBatch(std::span<const ModelQuery> queries,
                                      std::optional<int> class_index) override;

 private:
  Lexicon weights_;
};

// Sum of lexicon polarities over the visible words, where a word's polarity
// is flipped when any negator appears before it among the visible words.
// Negators carry no polarity of their own.
class NegationOracle : public Oracle {
 public:
  NegationOracle(Lexicon polarity, std::unordered_set<std::string> negators);
  std::string name() const override { return "builtin-negation"; }

  static Lexicon DefaultLexicon();
  static std::unordered_set<std::string> DefaultNegators();

 protected:
  std::vector<double> DoEvaluateBatch(std::span<const ModelQuery> queries,
                                      std::optional<int> class_index) override;

 private:
  Lexicon polarity_;
  std::unordered_set<std::string> negators_;
};

// Cached characteristic function v(S) = f(S) - f(empty) over tree subsets.
struct CharacteristicTable {
  double base = 0.0;  // f(empty)
  bool has_base = false;
  std::optional<int> class_index;
  std::unordered_map<WordSet, double> values;

  // v(S); v(empty) is 0. Throws std::out_of_range for subsets never
  // evaluated.
  double at(const WordSet& s) const;
  bool contains(const WordSet& s) const;
  std::size_t size() const { return values.size(); }
};

struct ClassPolicy {
  // nullopt means "the model's own argmax on the full sentence".
  std::optional<int> fixed;
};

// Evaluates f on every node subset plus the empty set, in one batch.
// Entries already present in `cache` are not re-queried.
CharacteristicTable Populate(Oracle& oracle, const ParseTree& tree, const ClassPolicy& policy = {},
                             const CharacteristicTable* cache = nullptr);

}  // namespace lstree

#endif  // LSTREE_ORACLE_H_
