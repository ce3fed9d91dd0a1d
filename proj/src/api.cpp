#include "tuba/api.hpp"

#include <charconv>
#include <set>

#include "tuba/error.hpp"

namespace tuba::api
{

namespace
{

std::optional<ProbabilityDist> dist_or_priors(
    const UtilityModel& model, const std::optional<ProbabilityDist>& dist)
{
  return dist ? dist : priors_of(model);
}

[[noreturn]] void schema_error(const std::string& path, const std::string& msg)
{
  throw Error(ErrorCode::Schema, path + ": " + msg, path);
}

void expect_keys(const Json& body, std::initializer_list<std::string_view> allowed)
{
  if (!body.is_object())
  {
    schema_error("$", "request body must be a JSON object");
  }
  for (const auto& [key, val] : body.items())
  {
    bool known = false;
    for (auto a : allowed)
    {
      known = known || key == a;
    }
    if (!known)
    {
      schema_error(key, "unknown key");
    }
  }
}

std::string string_field(const Json& body, const char* key,
                         const std::string& fallback)
{
  if (!body.contains(key))
  {
    return fallback;
  }
  if (!body[key].is_string())
  {
    schema_error(key, "expected a string");
  }
  return body[key].get<std::string>();
}

std::vector<std::string> id_list(const Json& v, const std::string& path)
{
  if (!v.is_array() || v.empty())
  {
    schema_error(path, "expected a nonempty array of ids");
  }
  std::vector<std::string> out;
  for (const auto& e : v)
  {
    if (!e.is_string())
    {
      schema_error(path, "expected string ids");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

// Enum parsers signal Usage; in a request body that is a schema problem.
template <typename F>
auto field(const char* path, F&& parse)
{
  try
  {
    return parse();
  }
  catch (const Error& e)
  {
    if (e.code() == ErrorCode::Usage)
    {
      schema_error(path, e.what());
    }
    throw;
  }
}

Projection projection_from_json(const Json& body)
{
  Projection p;
  if (body.contains("weights"))
  {
    const Json& w = body["weights"];
    if (!w.is_array())
    {
      schema_error("weights", "expected an array of numbers");
    }
    std::vector<double> weights;
    for (const auto& e : w)
    {
      if (!e.is_number())
      {
        schema_error("weights", "expected an array of numbers");
      }
      weights.push_back(e.get<double>());
    }
    p.weights = std::move(weights);
  }
  if (body.contains("subset"))
  {
    const Json& s = body["subset"];
    if (!s.is_object())
    {
      schema_error("subset", "expected {actions?, hypotheses?}");
    }
    for (const auto& [key, val] : s.items())
    {
      if (key == "actions")
      {
        p.actions = id_list(val, "subset.actions");
      }
      else if (key == "hypotheses")
      {
        p.hypotheses = id_list(val, "subset.hypotheses");
      }
      else
      {
        schema_error("subset." + key, "unknown key");
      }
    }
  }
  return p;
}

std::optional<ProbabilityDist> dist_from_body(const Json& body)
{
  if (!body.contains("dist") || body["dist"].is_null())
  {
    return std::nullopt;
  }
  try
  {
    return dist_from_json(body["dist"]);
  }
  catch (const Error& e)
  {
    throw Error(e.code(), std::string("dist.") + e.what(), "dist." + e.path());
  }
}

void fill_cluster_fields(const Json& body, ClusterRequest& r)
{
  r.projection = projection_from_json(body);
  r.target = field("target", [&] {
    return parse_category_kind(string_field(body, "target", "hypotheses"));
  });
  r.metric = field("metric", [&] {
    return parse_metric(string_field(body, "metric", "euclidean"));
  });
  r.linkage = field("linkage", [&] {
    return parse_linkage(string_field(body, "linkage", "complete"));
  });
  r.dist = dist_from_body(body);
  r.format = field("format", [&] {
    return parse_render_format(string_field(body, "format", "json"));
  });
}

}  // namespace

UtilityMatrix project(const UtilityModel& model, const Projection& projection)
{
  if (projection.weights)
  {
    const UtilityModel adjusted = reweight(model, *projection.weights);
    return utility_matrix(
        ModelView(adjusted, projection.actions, projection.hypotheses));
  }
  return utility_matrix(
      ModelView(model, projection.actions, projection.hypotheses));
}

Dendrogram cluster(const UtilityModel& model, const ClusterRequest& request)
{
  const UtilityMatrix matrix = project(model, request.projection);
  std::optional<ProbabilityDist> dist;
  if (request.metric == MetricKind::WeightedEuclidean)
  {
    dist = dist_or_priors(model, request.dist);
  }
  return build_hierarchy(matrix, request.target, request.metric,
                         request.linkage, dist ? &*dist : nullptr);
}

Partition cut(const UtilityModel* model, const CutRequest& request)
{
  if (request.tolerance.has_value() == request.k.has_value())
  {
    throw Error(ErrorCode::Usage, "give exactly one of tolerance or k");
  }
  if (model == nullptr && !request.dendrogram)
  {
    throw Error(ErrorCode::Usage, "cut needs a dendrogram or a model");
  }
  const Dendrogram d =
      request.dendrogram ? *request.dendrogram : cluster(*model, request.cluster);
  std::optional<UtilityMatrix> matrix;
  if (model != nullptr)
  {
    matrix = project(*model, request.cluster.projection);
  }
  const UtilityMatrix* m = matrix ? &*matrix : nullptr;
  return request.k ? cut_to_k(d, *request.k, m)
                   : cut_at_tolerance(d, *request.tolerance, m);
}

DecisionReport decide(const UtilityModel& model, const DecideRequest& request)
{
  const UtilityMatrix matrix = project(model, request.projection);
  const auto dist = dist_or_priors(model, request.dist);
  if (!dist)
  {
    throw Error(ErrorCode::MissingDistribution,
                "decide needs a distribution (none given and the model has "
                "no priors)");
  }
  if (!request.partition)
  {
    if (request.rule == DecisionRule::ExpectedUtility)
    {
      return best_action(matrix, *dist);
    }
    return minimax_decide_events(
        matrix, singleton_partition(matrix.hypotheses(), CategoryKind::Hypothesis),
        *dist);
  }
  const Partition partition = partition_from_json(*request.partition, &matrix);
  if (partition.kind == CategoryKind::Hypothesis)
  {
    return request.rule == DecisionRule::ExpectedUtility
               ? decide_with_event_categories(matrix, partition, *dist,
                                              request.mode)
               : minimax_decide_events(matrix, partition, *dist);
  }
  return request.rule == DecisionRule::ExpectedUtility
             ? decide_with_action_categories(matrix, partition, *dist)
             : minimax_decide_action_categories(matrix, partition, *dist);
}

Json span(const UtilityModel& model, const SpanRequest& request)
{
  const UtilityMatrix matrix = project(model, request.projection);
  Category category{CategoryKind::Hypothesis, request.members};
  if (request.kind)
  {
    category.kind = *request.kind;
  }
  else
  {
    const std::set<std::string> hyps(matrix.hypotheses().begin(),
                                     matrix.hypotheses().end());
    bool all_hyps = true;
    for (const auto& m : request.members)
    {
      all_hyps = all_hyps && hyps.count(m) > 0;
    }
    category.kind = all_hyps ? CategoryKind::Hypothesis : CategoryKind::Action;
  }
  const SpanReport report = uspan(matrix, category);
  std::optional<double> expected;
  if (category.kind == CategoryKind::Action)
  {
    if (const auto dist = dist_or_priors(model, request.dist))
    {
      expected = expected_uspan(matrix, category, *dist);
    }
  }
  return span_to_json(category, report, expected);
}

std::string cluster_body(const UtilityModel& model,
                         const ClusterRequest& request)
{
  const Dendrogram d = cluster(model, request);
  if (request.format == RenderFormat::Json)
  {
    return render_dendrogram(d, RenderFormat::Json);
  }
  const UtilityMatrix matrix = project(model, request.projection);
  return render_dendrogram(d, request.format, &matrix);
}

std::string cut_body(const UtilityModel* model, const CutRequest& request)
{
  return canonical_dump(partition_to_json(cut(model, request)));
}

std::string decide_body(const UtilityModel& model,
                        const DecideRequest& request)
{
  return canonical_dump(report_to_json(decide(model, request)));
}

std::string span_body(const UtilityModel& model, const SpanRequest& request)
{
  return canonical_dump(span(model, request));
}

std::string validate_body(const UtilityModel& model)
{
  const auto violations = validate_model(model);
  Json doc = Json::object();
  doc["valid"] = violations.empty();
  doc["violations"] = violations_to_json(violations);
  doc["warnings"] = violations_to_json(model_warnings(model));
  return canonical_dump(doc);
}

ClusterRequest cluster_request_from_json(const Json& body)
{
  expect_keys(body, {"target", "metric", "linkage", "weights", "subset", "dist",
                     "format"});
  ClusterRequest r;
  fill_cluster_fields(body, r);
  return r;
}

CutRequest cut_request_from_json(const Json& body)
{
  expect_keys(body, {"dendrogram", "tolerance", "k", "target", "metric",
                     "linkage", "weights", "subset", "dist"});
  CutRequest r;
  fill_cluster_fields(body, r.cluster);
  if (body.contains("dendrogram") && !body["dendrogram"].is_null())
  {
    r.dendrogram = dendrogram_from_json(body["dendrogram"]);
  }
  if (body.contains("tolerance") && !body["tolerance"].is_null())
  {
    if (!body["tolerance"].is_number())
    {
      schema_error("tolerance", "expected a number");
    }
    r.tolerance = body["tolerance"].get<double>();
  }
  if (body.contains("k") && !body["k"].is_null())
  {
    if (!body["k"].is_number_integer())
    {
      schema_error("k", "expected an integer");
    }
    const long long k = body["k"].get<long long>();
    if (k < 1)
    {
      throw Error(ErrorCode::InvalidK, "k must be >= 1");
    }
    r.k = static_cast<std::size_t>(k);
  }
  if (r.tolerance.has_value() == r.k.has_value())
  {
    schema_error("$", "give exactly one of 'tolerance' or 'k'");
  }
  return r;
}

DecideRequest decide_request_from_json(const Json& body)
{
  expect_keys(body, {"dist", "partition", "rule", "mode", "weights", "subset"});
  DecideRequest r;
  r.projection = projection_from_json(body);
  r.dist = dist_from_body(body);
  if (body.contains("partition") && !body["partition"].is_null())
  {
    r.partition = body["partition"];
  }
  r.rule = field("rule", [&] { return parse_rule(string_field(body, "rule", "eu")); });
  r.mode = field("mode", [&] {
    return parse_mode(string_field(body, "mode", "conditional"));
  });
  return r;
}

std::vector<std::string> split_list(const std::string& text)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true)
  {
    const std::size_t comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos
                                              ? std::string::npos
                                              : comma - start);
    if (item.empty())
    {
      throw Error(ErrorCode::Usage, "empty item in list '" + text + "'");
    }
    out.push_back(std::move(item));
    if (comma == std::string::npos)
    {
      return out;
    }
    start = comma + 1;
  }
}

std::vector<double> parse_weights(const std::string& text)
{
  std::vector<double> out;
  for (const auto& item : split_list(text))
  {
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size())
    {
      throw Error(ErrorCode::Usage, "bad weight '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace tuba::api
