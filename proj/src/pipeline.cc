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

#include "lstree/pipeline.h"

#include <fstream>
#include <vector>

#include "lstree/analysis.h"
#include "lstree/corpus.h"
#include "lstree/process_oracle.h"
#include "lstree/report_io.h"

namespace lstree {

namespace {

struct Slot {
  const InstanceRecord* record = nullptr;
  std::optional<ParseTree> tree;
  CharacteristicTable table;
  AttributionResult attribution;
  InteractionReport interactions;
  std::optional<std::string> failure;
};

bool StartsWith(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

void Validate(const RunConfig& config) {
  if (config.corpus.empty()) throw ConfigError("--corpus is required");
  if (config.top_k < 1) throw ConfigError("--top-k must be at least 1");
  if (config.command == Command::kDiagnose && config.iterations < 100) {
    throw ConfigError("--iterations must be at least 100");
  }
  if (config.class_index && *config.class_index < 0) throw ConfigError("--class-index must be non-negative");
}

// Parse, populate (serially, one oracle session), then solve in parallel.
std::vector<Slot> Compute(const RunConfig& config, const std::vector<InstanceRecord>& records, Oracle& oracle,
                          bool need_interactions) {
  std::vector<Slot> slots(records.size());
  const ClassPolicy policy{config.class_index};
  for (std::size_t k = 0; k < records.size(); ++k) {
    Slot& slot = slots[k];
    slot.record = &records[k];
    try {
      slot.tree = BuildInstanceTree(records[k]);
      slot.table = Populate(oracle, *slot.tree, policy);
    } catch (const std::exception& e) {
      slot.failure = e.what();
    }
  }

  auto solve = [&](std::int64_t k) {
    Slot& slot = slots[static_cast<std::size_t>(k)];
    if (slot.failure) return;
    try {
      const DesignMatrix x = BuildDesignMatrix(*slot.tree);
      slot.attribution = SolveLsTree(slot.table, x);
      if (need_interactions) {
        slot.interactions = DetectInteractions(slot.table, *slot.tree, x, config.distance);
        slot.interactions.instance = slot.record->id;
      }
    } catch (const std::exception& e) {
      slot.failure = e.what();
    }
  };
  const auto n = static_cast<std::int64_t>(slots.size());
  if (config.execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < n; ++k) solve(k);
  } else {
    for (std::int64_t k = 0; k < n; ++k) solve(k);
  }
  return slots;
}

std::size_t LogFailures(const std::vector<Slot>& slots, std::ostream& log) {
  std::size_t failed = 0;
  for (const auto& slot : slots) {
    if (!slot.failure) continue;
    ++failed;
    log << "failed instance " << JsonString(slot.record->id) << " (corpus line " << slot.record->line
        << "): " << *slot.failure << '\n';
  }
  return failed;
}

std::vector<InstanceResult> Results(std::vector<Slot>& slots) {
  std::vector<InstanceResult> out;
  for (auto& slot : slots) {
    if (slot.failure) continue;
    out.push_back({slot.record->id, std::move(*slot.tree), std::move(slot.attribution),
                   std::move(slot.interactions), slot.record->split});
  }
  return out;
}

}  // namespace

std::unique_ptr<Oracle> MakeOracle(const std::string& spec, const MaskOptions& mask) {
  std::unique_ptr<Oracle> oracle;
  if (StartsWith(spec, "builtin-linear:")) {
    oracle = std::make_unique<LinearOracle>(LoadLexicon(spec.substr(15)));
  } else if (spec == "builtin-negation") {
    oracle = std::make_unique<NegationOracle>(NegationOracle::DefaultLexicon(), NegationOracle::DefaultNegators());
  } else if (StartsWith(spec, "builtin-negation:")) {
    oracle = std::make_unique<NegationOracle>(LoadLexicon(spec.substr(17)), NegationOracle::DefaultNegators());
  } else if (StartsWith(spec, "exec:") && spec.size() > 5) {
    oracle = std::make_unique<ProcessOracle>(spec.substr(5));
  } else {
    throw ConfigError("unknown --model '" + spec +
                      "' (expected builtin-linear:LEXICON, builtin-negation[:LEXICON] or exec:CMD)");
  }
  oracle->set_mask(mask);
  return oracle;
}

int Run(const RunConfig& config, std::ostream& out, std::ostream& log) {
  std::vector<InstanceRecord> records;
  std::unique_ptr<Oracle> oracle;
  Lexicon coefficients;
  bool have_coefficients = false;
  try {
    Validate(config);
    records = LoadCorpus(config.corpus);
    if (config.command == Command::kDiagnose) {
      for (const auto& r : records) {
        if (!r.split) throw ConfigError("corpus line " + std::to_string(r.line) + ": diagnose needs a 'split' tag");
      }
    }
    if (records.empty()) {
      log << "warning: corpus " << config.corpus << " has no instances\n";
      return kExitOk;
    }
    oracle = MakeOracle(config.model, config.mask);
    if (config.command == Command::kAnalyze) {
      if (!config.coefficients.empty()) {
        coefficients = LoadLexicon(config.coefficients);
        have_coefficients = true;
      } else if (auto* linear = dynamic_cast<LinearOracle*>(oracle.get())) {
        coefficients = linear->weights();
        have_coefficients = true;
      }
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  std::ofstream file;
  if (!config.out.empty()) {
    file.open(config.out);
    if (!file) {
      log << "error: cannot write " << config.out << '\n';
      return kExitConfigError;
    }
  }
  std::ostream& report = config.out.empty() ? out : file;

  const bool need_interactions = config.command != Command::kValues;
  std::vector<Slot> slots = Compute(config, records, *oracle, need_interactions);
  const std::size_t failed = LogFailures(slots, log);

  switch (config.command) {
    case Command::kValues:
      for (const auto& slot : slots) {
        if (!slot.failure) WriteAttributionLine(report, slot.record->id, *slot.tree, slot.attribution);
      }
      break;
    case Command::kInteractions:
      for (const auto& slot : slots) {
        if (slot.failure) continue;
        if (config.render) RenderInteractionTree(out, *slot.tree, slot.interactions);
        if (!config.render || !config.out.empty()) WriteInteractionLines(report, slot.interactions);
      }
      break;
    case Command::kAnalyze: {
      const std::vector<InstanceResult> results = Results(slots);
      const auto markers = DefaultAdversativeMarkers();
      const AdversativeSummary adversative = AdversativeReport(results, markers);
      // Without coefficients every word scores 0 and correlations come out
      // undefined; depths are still reported.
      if (!have_coefficients) log << "warning: no linear coefficients (--coefficients); correlation not computed\n";
      const NonlinearitySummary nonlinearity = NonlinearityReport(results, coefficients, config.top_k);
      if (file.is_open()) WriteNonlinearity(file, nonlinearity);
      PrintNonlinearityTable(out, nonlinearity);
      if (file.is_open()) WriteAdversative(file, adversative);
      PrintAdversativeTable(out, adversative);
      break;
    }
    case Command::kDiagnose: {
      std::vector<InteractionReport> train, test;
      for (const auto& slot : slots) {
        if (slot.failure) continue;
        (*slot.record->split == "train" ? train : test).push_back(slot.interactions);
      }
      OverfitDiagnostic diag;
      try {
        diag = OverfitTest(train, test, config.iterations, config.seed, config.execution);
      } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfigError;
      }
      if (diag.excluded > 0) log << "warning: " << diag.excluded << " instances with fewer than 2 nodes excluded\n";
      if (file.is_open()) WriteOverfit(file, diag);
      PrintOverfitTable(out, diag);
      break;
    }
  }
  return failed > 0 ? kExitPartialFailure : kExitOk;
}

}  // namespace lstree
