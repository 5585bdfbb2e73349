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

// lstree: word importance and interaction scores on constituency parse trees.
//
//   lstree values       --corpus C --model M     LS-Tree value per word
//   lstree interactions --corpus C --model M     interaction score per node
//   lstree analyze      --corpus C --model M     nonlinearity + adversative tables
//   lstree diagnose     --corpus C --model M     train/test permutation test

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "lstree/pipeline.h"

namespace {

void AddCommonOptions(CLI::App* cmd, lstree::RunConfig& config, std::string& class_index, std::string& mask_mode,
                      std::string& distance) {
  cmd->add_option("--corpus", config.corpus, "Line-delimited JSON corpus")->required();
  cmd->add_option("--model", config.model,
                  "builtin-linear:LEXICON | builtin-negation[:LEXICON] | exec:CMD")
      ->capture_default_str();
  cmd->add_option("--mask-mode", mask_mode, "pad | delete")
      ->check(CLI::IsMember({"pad", "delete"}))
      ->capture_default_str();
  cmd->add_option("--mask-token", config.mask.token, "Placeholder for masked words")->capture_default_str();
  cmd->add_option("--class-index", class_index, "Scored class: N or auto")->capture_default_str();
  cmd->add_option("--distance", distance, "signed | absolute | both")
      ->check(CLI::IsMember({"signed", "absolute", "both"}))
      ->capture_default_str();
  cmd->add_option("--top-k", config.top_k, "Largest k for top-node depths")->capture_default_str();
  cmd->add_option("--seed", config.seed, "Seed for every random draw")->capture_default_str();
  cmd->add_option("--iterations", config.iterations, "Permutation-test iterations")->capture_default_str();
  cmd->add_flag("--render", config.render, "Print indented trees with signed scores");
  cmd->add_option("--out", config.out, "Write line-delimited reports here");
  cmd->add_option("--coefficients", config.coefficients, "Linear coefficients (word<TAB>weight) for analyze");
  cmd->add_flag("--serial", [&config](std::int64_t) { config.execution = lstree::Execution::kSerial; },
                "Disable OpenMP parallelism");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LS-Tree values and interaction scores for black-box text classifiers"};
  app.require_subcommand(1);

  lstree::RunConfig config;
  std::string class_index = "auto";
  std::string mask_mode = "pad";
  std::string distance = "both";

  const std::map<std::string, lstree::Command> commands = {
      {"values", lstree::Command::kValues},
      {"interactions", lstree::Command::kInteractions},
      {"analyze", lstree::Command::kAnalyze},
      {"diagnose", lstree::Command::kDiagnose},
  };
  const std::map<std::string, std::string> help = {
      {"values", "LS-Tree value of every word"},
      {"interactions", "Interaction score of every parse-tree node"},
      {"analyze", "Correlation with linear coefficients, top-node depths, adversative ratios"},
      {"diagnose", "Permutation test on interaction-score variances, train vs test"},
  };
  for (const auto& [name, command] : commands) {
    CLI::App* cmd = app.add_subcommand(name, help.at(name));
    AddCommonOptions(cmd, config, class_index, mask_mode, distance);
    cmd->callback([&config, command = command] { config.command = command; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lstree::kExitConfigError;
  }

  config.mask.mode = mask_mode == "delete" ? lstree::MaskMode::kDelete : lstree::MaskMode::kPad;
  config.distance = distance == "signed"     ? lstree::DistanceMode::kSigned
                    : distance == "absolute" ? lstree::DistanceMode::kAbsolute
                                             : lstree::DistanceMode::kBoth;
  if (class_index != "auto") {
    try {
      std::size_t used = 0;
      config.class_index = std::stoi(class_index, &used);
      if (used != class_index.size()) throw std::invalid_argument(class_index);
    } catch (const std::exception&) {
      std::cerr << "error: --class-index must be an integer or 'auto'\n";
      return lstree::kExitConfigError;
    }
  }
  return lstree::Run(config, std::cout, std::cerr);
}
