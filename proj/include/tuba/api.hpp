#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tuba/clustering.hpp"
#include "tuba/decisions.hpp"
#include "tuba/io.hpp"
#include "tuba/model.hpp"

namespace tuba::api
{

/// Per-request adjustments of a stored model. Weights never touch the stored
/// model; they go through reweight.
struct Projection
{
  std::optional<std::vector<double>> weights;
  std::optional<std::vector<std::string>> actions;
  std::optional<std::vector<std::string>> hypotheses;
};

struct ClusterRequest
{
  Projection projection;
  CategoryKind target = CategoryKind::Hypothesis;
  MetricKind metric = MetricKind::Euclidean;
  Linkage linkage = Linkage::Complete;
  std::optional<ProbabilityDist> dist;
  RenderFormat format = RenderFormat::Json;
};

struct CutRequest
{
  ClusterRequest cluster;
  std::optional<Dendrogram> dendrogram;
  std::optional<double> tolerance;
  std::optional<std::size_t> k;
};

struct DecideRequest
{
  Projection projection;
  std::optional<ProbabilityDist> dist;
  std::optional<Json> partition;  // raw, so its kind can be inferred
  DecisionRule rule = DecisionRule::ExpectedUtility;
  AbstractionMode mode = AbstractionMode::Conditional;
};

struct SpanRequest
{
  Projection projection;
  std::vector<std::string> members;
  std::optional<CategoryKind> kind;  // inferred from the ids when absent
  std::optional<ProbabilityDist> dist;
};

UtilityMatrix project(const UtilityModel& model, const Projection& projection);

Dendrogram cluster(const UtilityModel& model, const ClusterRequest& request);
/// `model` may be null only when a dendrogram is supplied; spans are then
/// left unset.
Partition cut(const UtilityModel* model, const CutRequest& request);
DecisionReport decide(const UtilityModel& model, const DecideRequest& request);
Json span(const UtilityModel& model, const SpanRequest& request);

// Canonical response bodies shared by the CLI and the service.
std::string cluster_body(const UtilityModel& model,
                         const ClusterRequest& request);
std::string cut_body(const UtilityModel* model, const CutRequest& request);
std::string decide_body(const UtilityModel& model,
                        const DecideRequest& request);
std::string span_body(const UtilityModel& model, const SpanRequest& request);
std::string validate_body(const UtilityModel& model);

// Request bodies as accepted by the service.
ClusterRequest cluster_request_from_json(const Json& body);
CutRequest cut_request_from_json(const Json& body);
DecideRequest decide_request_from_json(const Json& body);

/// Splits "a,b,c" into ids; empty items are rejected.
std::vector<std::string> split_list(const std::string& text);
std::vector<double> parse_weights(const std::string& text);

}  // namespace tuba::api
