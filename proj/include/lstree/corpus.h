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

#ifndef LSTREE_CORPUS_H_
#define LSTREE_CORPUS_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lstree/tree.h"

namespace lstree {

// One line of the input corpus:
//   {"id": "s1", "trees": ["(S ...)", ...], "split": "train", "label": 1}
struct InstanceRecord {
  std::string id;
  std::vector<std::string> trees;
  std::optional<std::string> split;  // "train" or "test"
  std::optional<int> label;
  std::size_t line = 0;  // 1-based line in the corpus file
};

class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::size_t line, const std::string& what)
      : std::runtime_error("corpus line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Blank lines are skipped. Throws CorpusError naming the first bad line.
std::vector<InstanceRecord> ReadCorpus(std::istream& in);
std::vector<InstanceRecord> LoadCorpus(const std::string& path);

// Parses every sentence of the record and merges them under one synthetic
// parent when there is more than one.
ParseTree BuildInstanceTree(const InstanceRecord& record);

}  // namespace lstree

#endif  // LSTREE_CORPUS_H_
