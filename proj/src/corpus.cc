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

#include "lstree/corpus.h"

#include <fstream>
#include <unordered_set>

#include "json.hpp"

namespace lstree {

using nlohmann::json;

std::vector<InstanceRecord> ReadCorpus(std::istream& in) {
  std::vector<InstanceRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) throw CorpusError(lineno, "not valid JSON");
    if (!obj.is_object()) throw CorpusError(lineno, "expected a JSON object");

    InstanceRecord rec;
    rec.line = lineno;
    if (!obj.contains("id") || !obj["id"].is_string()) throw CorpusError(lineno, "missing string field 'id'");
    rec.id = obj["id"].get<std::string>();
    if (!seen.insert(rec.id).second) throw CorpusError(lineno, "duplicate id '" + rec.id + "'");

    if (!obj.contains("trees") || !obj["trees"].is_array() || obj["trees"].empty()) {
      throw CorpusError(lineno, "field 'trees' must be a non-empty array of bracketed strings");
    }
    for (const auto& t : obj["trees"]) {
      if (!t.is_string()) throw CorpusError(lineno, "field 'trees' must contain strings");
      rec.trees.push_back(t.get<std::string>());
    }

    if (obj.contains("split") && !obj["split"].is_null()) {
      if (!obj["split"].is_string()) throw CorpusError(lineno, "field 'split' must be a string");
      rec.split = obj["split"].get<std::string>();
      if (*rec.split != "train" && *rec.split != "test") {
        throw CorpusError(lineno, "field 'split' must be \"train\" or \"test\"");
      }
    }
    if (obj.contains("label") && !obj["label"].is_null()) {
      if (!obj["label"].is_number_integer()) throw CorpusError(lineno, "field 'label' must be an integer");
      rec.label = obj["label"].get<int>();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<InstanceRecord> LoadCorpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus " + path);
  return ReadCorpus(in);
}

ParseTree BuildInstanceTree(const InstanceRecord& record) {
  std::vector<ParseTree> sentences;
  sentences.reserve(record.trees.size());
  for (const auto& text : record.trees) sentences.push_back(ParsePtb(text));
  return MergeSentences(sentences);
}

}  // namespace lstree
