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

#ifndef LSTREE_REPORT_IO_H_
#define LSTREE_REPORT_IO_H_

#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "lstree/analysis.h"
#include "lstree/solver.h"
#include "lstree/tree.h"

namespace lstree {

// %.17g, so every double round-trips and golden files are bit-stable.
// Non-finite values are written as null.
std::string FormatNumber(double v);
std::string JsonString(std::string_view s);

// One line per node, preorder:
// {"instance":..,"node":..,"span":[lo,hi],"label":..,"leaf":..,"synthetic":..,
//  "signed":..,"absolute":..}
// A score column not selected by the report's mode is written as null.
void WriteInteractionLines(std::ostream& out, const InteractionReport& report);

void WriteAttributionLine(std::ostream& out, std::string_view instance, const ParseTree& tree,
                          const AttributionResult& result);

// Indented tree, one node per line, with the signed score and its intensity
// in [-1, 1] (score divided by the largest |signed score| of the instance).
void RenderInteractionTree(std::ostream& out, const ParseTree& tree, const InteractionReport& report);

void WriteNonlinearity(std::ostream& jsonl, const NonlinearitySummary& summary);
void WriteAdversative(std::ostream& jsonl, const AdversativeSummary& summary);
void WriteOverfit(std::ostream& jsonl, const OverfitDiagnostic& diag);

void PrintNonlinearityTable(std::ostream& out, const NonlinearitySummary& summary);
void PrintAdversativeTable(std::ostream& out, const AdversativeSummary& summary);
void PrintOverfitTable(std::ostream& out, const OverfitDiagnostic& diag);

}  // namespace lstree

#endif  // LSTREE_REPORT_IO_H_
