#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tuba/clustering.hpp"
#include "tuba/decisions.hpp"
#include "tuba/metrics.hpp"
#include "tuba/model.hpp"

namespace tuba
{

using Json = nlohmann::ordered_json;

/// Canonical text: two-space indentation, keys in insertion order, scalar
/// arrays on one line, floats with 17 significant digits, trailing newline.
/// Every document the CLI and the service emit goes through here.
std::string canonical_dump(const Json& doc);

/// Throws Schema (path "$") on malformed JSON.
Json parse_json(std::string_view bytes);

// Model file: {"actions", "hypotheses", "attributes": [{"id", "weight"}],
//              "outcomes": {"action|hypothesis": [values]}, "priors"?}
Json model_to_json(const UtilityModel& model);
/// Schema checks only; cells absent from `outcomes` are left empty so that
/// validate_model can report them.
UtilityModel model_from_json_unchecked(const Json& doc);
/// Schema checks plus validate_model; violations are raised as InvalidModel
/// with the offending field as path.
UtilityModel model_from_json(const Json& doc);
std::string serialize_model(const UtilityModel& model);
UtilityModel parse_model(std::string_view bytes);

// Distribution file: {"evidence_label"?, "probs": {hypothesis: p}}
Json dist_to_json(const ProbabilityDist& dist);
ProbabilityDist dist_from_json(const Json& doc);
ProbabilityDist parse_dist(std::string_view bytes);

Json dendrogram_to_json(const Dendrogram& d);
Dendrogram dendrogram_from_json(const Json& doc);
Dendrogram parse_dendrogram(std::string_view bytes);

// Partition file: {"kind", "cutoff", "categories": [{"members", "max_span"}]}.
// "kind" may be omitted on input when the members identify it.
Json partition_to_json(const Partition& p);
Partition partition_from_json(const Json& doc,
                              const UtilityMatrix* matrix = nullptr);

Json span_to_json(const Category& category, const SpanReport& report,
                  std::optional<double> expected_span = std::nullopt);

Json report_to_json(const DecisionReport& report);

Json violations_to_json(const std::vector<Violation>& violations);

/// Single-line {"error", "message", "path"?} document (no trailing newline).
std::string error_line(std::string_view code, std::string_view message,
                       std::string_view path = {});

}  // namespace tuba
