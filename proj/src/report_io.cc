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

#include "lstree/report_io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace lstree {

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string OptionalNumber(const std::optional<double>& v) { return v ? FormatNumber(*v) : "null"; }

std::string OptionalFixed(const std::optional<double>& v, int digits) { return v ? Fixed(*v, digits) : "-"; }

std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

void RenderNode(std::ostream& out, const ParseTree& tree, const InteractionReport& report, NodeId id, int indent,
                double scale) {
  const TreeNode& node = tree.node(id);
  const NodeScore& s = report.nodes[id];
  const double intensity = scale > 0.0 ? s.signed_score / scale : 0.0;
  out << std::string(static_cast<std::size_t>(indent) * 2, ' ') << '[' << id << "] ";
  if (node.synthetic) {
    out << "<sentences>";
  } else {
    out << (node.label ? *node.label : std::string("-"));
  }
  out << " \"" << tree.SpanText(id) << "\" signed=" << Fixed(s.signed_score, 6)
      << " intensity=" << (intensity >= 0 ? "+" : "") << Fixed(intensity, 3) << '\n';
  for (NodeId c : node.children) RenderNode(out, tree, report, c, indent + 1, scale);
}

}  // namespace

std::string FormatNumber(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string JsonString(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

void WriteInteractionLines(std::ostream& out, const InteractionReport& report) {
  const bool want_signed = report.mode != DistanceMode::kAbsolute;
  const bool want_absolute = report.mode != DistanceMode::kSigned;
  const std::string instance = JsonString(report.instance);
  for (const NodeScore& s : report.nodes) {
    out << "{\"instance\":" << instance << ",\"node\":" << s.node << ",\"span\":[" << s.begin << ',' << s.end
        << "],\"label\":" << (s.label ? JsonString(*s.label) : std::string("null"))
        << ",\"leaf\":" << (s.leaf ? "true" : "false") << ",\"synthetic\":" << (s.synthetic ? "true" : "false")
        << ",\"signed\":" << (want_signed ? FormatNumber(s.signed_score) : "null")
        << ",\"absolute\":" << (want_absolute ? FormatNumber(s.absolute_score) : "null") << "}\n";
  }
}

void WriteAttributionLine(std::ostream& out, std::string_view instance, const ParseTree& tree,
                          const AttributionResult& result) {
  out << "{\"instance\":" << JsonString(instance) << ",\"tokens\":[";
  for (std::size_t i = 0; i < tree.word_count(); ++i) {
    if (i) out << ',';
    out << JsonString(tree.tokens()[i].surface);
  }
  out << "],\"psi\":[";
  for (Eigen::Index i = 0; i < result.psi.size(); ++i) {
    if (i) out << ',';
    out << FormatNumber(result.psi(i));
  }
  out << "],\"residual_norm\":" << FormatNumber(result.residual_norm)
      << ",\"condition_estimate\":" << FormatNumber(result.condition_estimate)
      << ",\"min_norm_fallback\":" << (result.min_norm_fallback ? "true" : "false") << "}\n";
}

void RenderInteractionTree(std::ostream& out, const ParseTree& tree, const InteractionReport& report) {
  double scale = 0.0;
  for (const auto& s : report.nodes) scale = std::max(scale, std::abs(s.signed_score));
  out << "# " << report.instance << '\n';
  RenderNode(out, tree, report, tree.root_id(), 0, scale);
}

void WriteNonlinearity(std::ostream& jsonl, const NonlinearitySummary& summary) {
  for (const auto& row : summary.rows) {
    jsonl << "{\"instance\":" << JsonString(row.instance) << ",\"correlation\":" << OptionalNumber(row.correlation)
          << ",\"missing_words\":" << row.missing_words << ",\"top_node_depths\":[";
    for (std::size_t k = 0; k < row.top_node_depths.size(); ++k) {
      if (k) jsonl << ',';
      jsonl << FormatNumber(row.top_node_depths[k]);
    }
    jsonl << "]}\n";
  }
  jsonl << "{\"summary\":\"nonlinearity\",\"average_correlation\":" << OptionalNumber(summary.average_correlation)
        << ",\"correlated_instances\":" << summary.correlated_instances << ",\"average_depths\":[";
  for (std::size_t k = 0; k < summary.average_depths.size(); ++k) {
    if (k) jsonl << ',';
    jsonl << FormatNumber(summary.average_depths[k]);
  }
  jsonl << "]}\n";
}

void WriteAdversative(std::ostream& jsonl, const AdversativeSummary& summary) {
  for (const auto& row : summary.rows) {
    jsonl << "{\"marker\":" << JsonString(row.marker) << ",\"count\":" << row.count
          << ",\"parent_count\":" << row.parent_count << ",\"ratio_self\":" << OptionalNumber(row.ratio_self)
          << ",\"ratio_parent\":" << OptionalNumber(row.ratio_parent) << "}\n";
  }
  jsonl << "{\"summary\":\"adversative\",\"generic_average\":" << OptionalNumber(summary.generic_average) << "}\n";
}

void WriteOverfit(std::ostream& jsonl, const OverfitDiagnostic& diag) {
  jsonl << "{\"summary\":\"overfit\",\"stat_observed\":" << FormatNumber(diag.stat_observed)
        << ",\"p_value\":" << FormatNumber(diag.p_value) << ",\"iterations\":" << diag.iterations
        << ",\"n_train\":" << diag.n_train << ",\"n_test\":" << diag.n_test << ",\"excluded\":" << diag.excluded
        << "}\n";
}

void PrintNonlinearityTable(std::ostream& out, const NonlinearitySummary& summary) {
  out << "Nonlinearity (" << summary.rows.size() << " instances)\n";
  out << "  average correlation with linear coefficients: " << OptionalFixed(summary.average_correlation, 3) << " ("
      << summary.correlated_instances << " instances with defined correlation)\n";
  out << "  " << Pad("k", 4) << Pad("avg depth", 12) << '\n';
  for (std::size_t k = 0; k < summary.average_depths.size(); ++k) {
    out << "  " << Pad(std::to_string(k + 1), 4) << Pad(Fixed(summary.average_depths[k], 3), 12) << '\n';
  }
}

void PrintAdversativeTable(std::ostream& out, const AdversativeSummary& summary) {
  out << "Adversative markers (generic node average: " << OptionalFixed(summary.generic_average, 4) << ")\n";
  out << "  " << std::string("marker") + std::string(14, ' ') << Pad("count", 7) << Pad("self", 10)
      << Pad("parent", 10) << '\n';
  for (const auto& row : summary.rows) {
    std::string marker = row.marker;
    if (marker.size() < 20) marker += std::string(20 - marker.size(), ' ');
    out << "  " << marker << Pad(std::to_string(row.count), 7) << Pad(OptionalFixed(row.ratio_self, 3), 10)
        << Pad(OptionalFixed(row.ratio_parent, 3), 10) << '\n';
  }
}

void PrintOverfitTable(std::ostream& out, const OverfitDiagnostic& diag) {
  out << "Overfitting permutation test\n";
  out << "  train instances     " << Pad(std::to_string(diag.n_train), 12) << '\n';
  out << "  test instances      " << Pad(std::to_string(diag.n_test), 12) << '\n';
  out << "  excluded (<2 nodes) " << Pad(std::to_string(diag.excluded), 12) << '\n';
  out << "  observed statistic  " << Pad(Fixed(diag.stat_observed, 6), 12) << '\n';
  out << "  iterations          " << Pad(std::to_string(diag.iterations), 12) << '\n';
  out << "  p-value             " << Pad(Fixed(diag.p_value, 4), 12) << '\n';
}

}  // namespace lstree
