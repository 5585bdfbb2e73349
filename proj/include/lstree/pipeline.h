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

#ifndef LSTREE_PIPELINE_H_
#define LSTREE_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lstree/execution.h"
#include "lstree/oracle.h"
#include "lstree/solver.h"

namespace lstree {

enum class Command { kValues, kInteractions, kAnalyze, kDiagnose };

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartialFailure = 1;
inline constexpr int kExitConfigError = 2;

struct RunConfig {
  Command command = Command::kValues;
  std::string corpus;
  // builtin-linear:LEXICON | builtin-negation[:LEXICON] | exec:CMD
  std::string model = "builtin-negation";
  MaskOptions mask;
  std::optional<int> class_index;  // nullopt = auto
  DistanceMode distance = DistanceMode::kBoth;
  int top_k = 10;
  std::uint64_t seed = 0;
  int iterations = 10000;
  bool render = false;
  std::string out;           // empty = standard output
  std::string coefficients;  // linear coefficients for analyze
  Execution execution = Execution::kParallel;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ConfigError for an unknown model spec.
std::unique_ptr<Oracle> MakeOracle(const std::string& spec, const MaskOptions& mask);

// Runs one command. Reports go to `out` (or the --out file), tables and
// renderings to `out` as well, diagnostics and the failure log to `log`.
// Returns one of the kExit* codes.
int Run(const RunConfig& config, std::ostream& out, std::ostream& log);

}  // namespace lstree

#endif  // LSTREE_PIPELINE_H_
