#include "tuba/io.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "tuba/error.hpp"

namespace tuba
{

namespace
{

void write_number(std::string& out, double v)
{
  if (!std::isfinite(v))
  {
    throw Error(ErrorCode::InvalidModel, "cannot serialize a non-finite number");
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

bool is_scalar(const Json& v)
{
  return !v.is_object() && !v.is_array();
}

void write_value(std::string& out, const Json& v, int indent)
{
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type())
  {
    case Json::value_t::object:
    {
      if (v.empty())
      {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, val] : v.items())
      {
        if (!first)
        {
          out += ",\n";
        }
        first = false;
        out += inner;
        out += Json(key).dump();
        out += ": ";
        write_value(out, val, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array:
    {
      if (v.empty())
      {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : v)
      {
        flat = flat && is_scalar(e);
      }
      if (flat)
      {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i)
        {
          if (i)
          {
            out += ", ";
          }
          write_value(out, v[i], indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i)
      {
        if (i)
        {
          out += ",\n";
        }
        out += inner;
        write_value(out, v[i], indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      write_number(out, v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

[[noreturn]] void schema_error(const std::string& path, const std::string& msg)
{
  throw Error(ErrorCode::Schema, path + ": " + msg, path);
}

void expect_object(const Json& v, const std::string& path,
                   std::initializer_list<std::string_view> allowed)
{
  if (!v.is_object())
  {
    schema_error(path, "expected an object");
  }
  for (const auto& [key, val] : v.items())
  {
    bool known = false;
    for (auto a : allowed)
    {
      known = known || key == a;
    }
    if (!known)
    {
      schema_error(path + "." + key, "unknown key");
    }
  }
}

const Json& require(const Json& obj, const std::string& key,
                    const std::string& path)
{
  const auto it = obj.find(key);
  if (it == obj.end())
  {
    schema_error(path + "." + key, "missing required key");
  }
  return *it;
}

double number_at(const Json& v, const std::string& path)
{
  if (!v.is_number())
  {
    schema_error(path, "expected a number");
  }
  return v.get<double>();
}

std::string string_at(const Json& v, const std::string& path)
{
  if (!v.is_string())
  {
    schema_error(path, "expected a string");
  }
  return v.get<std::string>();
}

std::vector<std::string> string_list(const Json& v, const std::string& path,
                                     bool nonempty)
{
  if (!v.is_array())
  {
    schema_error(path, "expected an array of strings");
  }
  if (nonempty && v.empty())
  {
    schema_error(path, "must be nonempty");
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    out.push_back(string_at(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::size_t index_at(const Json& v, const std::string& path)
{
  if (!v.is_number_integer() || v.get<long long>() < 0)
  {
    schema_error(path, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

Json scores_to_json(const Scores& scores)
{
  Json out = Json::object();
  for (const auto& [id, s] : scores)
  {
    out[id] = s;
  }
  return out;
}

Json node_to_json(const NodeRef& ref)
{
  Json out = Json::object();
  out[ref.is_leaf() ? "leaf" : "merge"] = ref.index;
  return out;
}

NodeRef node_from_json(const Json& v, const std::string& path)
{
  expect_object(v, path, {"leaf", "merge"});
  if (v.size() != 1)
  {
    schema_error(path, "expected exactly one of 'leaf' or 'merge'");
  }
  if (v.contains("leaf"))
  {
    return NodeRef::leaf(index_at(v["leaf"], path + ".leaf"));
  }
  return NodeRef::merge(index_at(v["merge"], path + ".merge"));
}

template <typename Parse>
auto with_path(const std::string& path, Parse&& parse)
{
  try
  {
    return parse();
  }
  catch (const Error& e)
  {
    if (e.code() == ErrorCode::Usage)
    {
      throw Error(ErrorCode::Schema, path + ": " + e.what(), path);
    }
    throw;
  }
}

}  // namespace

std::string canonical_dump(const Json& doc)
{
  std::string out;
  write_value(out, doc, 0);
  out += "\n";
  return out;
}

Json parse_json(std::string_view bytes)
{
  try
  {
    return Json::parse(bytes.begin(), bytes.end());
  }
  catch (const nlohmann::json::parse_error& e)
  {
    throw Error(ErrorCode::Schema, std::string("malformed JSON: ") + e.what(),
                "$");
  }
}

Json model_to_json(const UtilityModel& model)
{
  Json doc = Json::object();
  doc["actions"] = model.actions;
  doc["hypotheses"] = model.hypotheses;
  Json attrs = Json::array();
  for (const auto& a : model.attributes)
  {
    Json entry = Json::object();
    entry["id"] = a.id;
    entry["weight"] = a.weight;
    attrs.push_back(std::move(entry));
  }
  doc["attributes"] = std::move(attrs);
  Json outcomes = Json::object();
  for (std::size_t a = 0; a < model.actions.size(); ++a)
  {
    for (std::size_t h = 0; h < model.hypotheses.size(); ++h)
    {
      Json values = Json::array();
      for (double v : model.outcomes.at(a).at(h))
      {
        values.push_back(v);
      }
      outcomes[model.actions[a] + "|" + model.hypotheses[h]] = std::move(values);
    }
  }
  doc["outcomes"] = std::move(outcomes);
  if (model.priors)
  {
    Json priors = Json::object();
    for (std::size_t h = 0; h < model.hypotheses.size(); ++h)
    {
      priors[model.hypotheses[h]] = (*model.priors)[h];
    }
    doc["priors"] = std::move(priors);
  }
  return doc;
}

UtilityModel model_from_json_unchecked(const Json& doc)
{
  expect_object(doc, "$",
                {"actions", "hypotheses", "attributes", "outcomes", "priors"});
  UtilityModel m;
  m.actions = string_list(require(doc, "actions", "$"), "actions", true);
  m.hypotheses = string_list(require(doc, "hypotheses", "$"), "hypotheses", true);

  const Json& attrs = require(doc, "attributes", "$");
  if (!attrs.is_array() || attrs.empty())
  {
    schema_error("attributes", "expected a nonempty array of {id, weight}");
  }
  for (std::size_t k = 0; k < attrs.size(); ++k)
  {
    const std::string path = "attributes[" + std::to_string(k) + "]";
    expect_object(attrs[k], path, {"id", "weight"});
    m.attributes.push_back(
        {string_at(require(attrs[k], "id", path), path + ".id"),
         number_at(require(attrs[k], "weight", path), path + ".weight")});
  }

  const Json& outcomes = require(doc, "outcomes", "$");
  if (!outcomes.is_object())
  {
    schema_error("outcomes", "expected an object keyed by 'action|hypothesis'");
  }
  m.outcomes.assign(m.actions.size(),
                    std::vector<std::vector<double>>(m.hypotheses.size()));
  for (const auto& [key, values] : outcomes.items())
  {
    const std::string path = "outcomes." + key;
    const auto bar = key.find('|');
    if (bar == std::string::npos || key.find('|', bar + 1) != std::string::npos)
    {
      schema_error(path, "key must have the form 'action|hypothesis'");
    }
    std::size_t a = 0;
    std::size_t h = 0;
    try
    {
      a = m.action_index(key.substr(0, bar));
      h = m.hypothesis_index(key.substr(bar + 1));
    }
    catch (const Error& e)
    {
      schema_error(path, e.what());
    }
    if (!values.is_array())
    {
      schema_error(path, "expected an array of attribute values");
    }
    std::vector<double> cell;
    for (std::size_t k = 0; k < values.size(); ++k)
    {
      cell.push_back(number_at(values[k], path + "[" + std::to_string(k) + "]"));
    }
    m.outcomes[a][h] = std::move(cell);
  }

  if (const auto it = doc.find("priors"); it != doc.end())
  {
    if (!it->is_object())
    {
      schema_error("priors", "expected an object keyed by hypothesis");
    }
    std::vector<double> priors(m.hypotheses.size(), 0.0);
    std::vector<bool> seen(m.hypotheses.size(), false);
    for (const auto& [key, p] : it->items())
    {
      std::size_t h = 0;
      try
      {
        h = m.hypothesis_index(key);
      }
      catch (const Error& e)
      {
        schema_error("priors." + key, e.what());
      }
      priors[h] = number_at(p, "priors." + key);
      seen[h] = true;
    }
    for (std::size_t h = 0; h < seen.size(); ++h)
    {
      if (!seen[h])
      {
        schema_error("priors." + m.hypotheses[h], "missing prior");
      }
    }
    m.priors = std::move(priors);
  }
  return m;
}

UtilityModel model_from_json(const Json& doc)
{
  UtilityModel m = model_from_json_unchecked(doc);
  const auto violations = validate_model(m);
  if (!violations.empty())
  {
    std::string msg;
    for (const auto& v : violations)
    {
      msg += (msg.empty() ? "" : "; ") + v.field + ": " + v.message;
    }
    throw Error(ErrorCode::InvalidModel, msg, violations.front().field);
  }
  return m;
}

std::string serialize_model(const UtilityModel& model)
{
  return canonical_dump(model_to_json(model));
}

UtilityModel parse_model(std::string_view bytes)
{
  return model_from_json(parse_json(bytes));
}

Json dist_to_json(const ProbabilityDist& dist)
{
  Json doc = Json::object();
  if (dist.evidence_label)
  {
    doc["evidence_label"] = *dist.evidence_label;
  }
  Json probs = Json::object();
  for (const auto& [h, p] : dist.probs)
  {
    probs[h] = p;
  }
  doc["probs"] = std::move(probs);
  return doc;
}

ProbabilityDist dist_from_json(const Json& doc)
{
  expect_object(doc, "$", {"evidence_label", "probs"});
  ProbabilityDist d;
  if (doc.contains("evidence_label"))
  {
    d.evidence_label = string_at(doc["evidence_label"], "evidence_label");
  }
  const Json& probs = require(doc, "probs", "$");
  if (!probs.is_object() || probs.empty())
  {
    schema_error("probs", "expected a nonempty object keyed by hypothesis");
  }
  for (const auto& [h, p] : probs.items())
  {
    d.probs[h] = number_at(p, "probs." + h);
  }
  return d;
}

ProbabilityDist parse_dist(std::string_view bytes)
{
  return dist_from_json(parse_json(bytes));
}

Json dendrogram_to_json(const Dendrogram& d)
{
  Json doc = Json::object();
  doc["kind"] = std::string(to_string(d.kind));
  doc["metric"] = std::string(to_string(d.metric));
  doc["linkage"] = std::string(to_string(d.linkage));
  doc["leaves"] = d.leaves;
  Json merges = Json::array();
  for (const auto& m : d.merges)
  {
    Json rec = Json::object();
    rec["left"] = node_to_json(m.left);
    rec["right"] = node_to_json(m.right);
    rec["height"] = m.height;
    merges.push_back(std::move(rec));
  }
  doc["merges"] = std::move(merges);
  return doc;
}

Dendrogram dendrogram_from_json(const Json& doc)
{
  expect_object(doc, "$", {"kind", "metric", "linkage", "leaves", "merges"});
  Dendrogram d;
  d.kind = with_path("kind", [&] {
    return parse_category_kind(string_at(require(doc, "kind", "$"), "kind"));
  });
  d.metric = with_path("metric", [&] {
    return parse_metric(string_at(require(doc, "metric", "$"), "metric"));
  });
  d.linkage = with_path("linkage", [&] {
    return parse_linkage(string_at(require(doc, "linkage", "$"), "linkage"));
  });
  d.leaves = string_list(require(doc, "leaves", "$"), "leaves", true);
  const Json& merges = require(doc, "merges", "$");
  if (!merges.is_array())
  {
    schema_error("merges", "expected an array");
  }
  for (std::size_t m = 0; m < merges.size(); ++m)
  {
    const std::string path = "merges[" + std::to_string(m) + "]";
    expect_object(merges[m], path, {"left", "right", "height"});
    d.merges.push_back(
        {node_from_json(require(merges[m], "left", path), path + ".left"),
         node_from_json(require(merges[m], "right", path), path + ".right"),
         number_at(require(merges[m], "height", path), path + ".height")});
  }
  check_dendrogram(d);
  return d;
}

Dendrogram parse_dendrogram(std::string_view bytes)
{
  return dendrogram_from_json(parse_json(bytes));
}

Json partition_to_json(const Partition& p)
{
  Json doc = Json::object();
  doc["kind"] = std::string(to_string(p.kind));
  doc["cutoff"] = p.cutoff;
  Json cats = Json::array();
  for (std::size_t i = 0; i < p.categories.size(); ++i)
  {
    Json c = Json::object();
    c["members"] = p.categories[i].members;
    c["max_span"] = p.max_spans.size() > i && p.max_spans[i]
                        ? Json(*p.max_spans[i])
                        : Json(nullptr);
    cats.push_back(std::move(c));
  }
  doc["categories"] = std::move(cats);
  return doc;
}

Partition partition_from_json(const Json& doc, const UtilityMatrix* matrix)
{
  expect_object(doc, "$", {"kind", "cutoff", "categories"});
  Partition p;
  if (doc.contains("cutoff") && !doc["cutoff"].is_null())
  {
    p.cutoff = number_at(doc["cutoff"], "cutoff");
  }
  const Json& cats = require(doc, "categories", "$");
  if (!cats.is_array() || cats.empty())
  {
    schema_error("categories", "expected a nonempty array");
  }
  std::vector<std::string> all_members;
  for (std::size_t i = 0; i < cats.size(); ++i)
  {
    const std::string path = "categories[" + std::to_string(i) + "]";
    expect_object(cats[i], path, {"members", "max_span"});
    Category c;
    c.members = string_list(require(cats[i], "members", path),
                            path + ".members", true);
    all_members.insert(all_members.end(), c.members.begin(), c.members.end());
    std::optional<double> span;
    if (cats[i].contains("max_span") && !cats[i]["max_span"].is_null())
    {
      span = number_at(cats[i]["max_span"], path + ".max_span");
    }
    p.categories.push_back(std::move(c));
    p.max_spans.push_back(span);
  }

  if (doc.contains("kind"))
  {
    p.kind = with_path("kind", [&] {
      return parse_category_kind(string_at(doc["kind"], "kind"));
    });
  }
  else
  {
    if (matrix == nullptr)
    {
      schema_error("kind", "missing and cannot be inferred without a model");
    }
    const auto all_in = [&](const std::vector<std::string>& ids) {
      std::set<std::string> pool(ids.begin(), ids.end());
      for (const auto& m : all_members)
      {
        if (!pool.count(m))
        {
          return false;
        }
      }
      return true;
    };
    if (all_in(matrix->hypotheses()))
    {
      p.kind = CategoryKind::Hypothesis;
    }
    else if (all_in(matrix->actions()))
    {
      p.kind = CategoryKind::Action;
    }
    else
    {
      schema_error("categories",
                   "members are neither all hypotheses nor all actions");
    }
  }
  for (auto& c : p.categories)
  {
    c.kind = p.kind;
  }
  return p;
}

Json span_to_json(const Category& category, const SpanReport& report,
                  std::optional<double> expected_span)
{
  Json doc = Json::object();
  doc["kind"] = std::string(to_string(category.kind));
  doc["members"] = category.members;
  doc["per_axis"] = scores_to_json(report.per_axis);
  doc["max_span"] = report.max_span;
  if (expected_span)
  {
    doc["expected_span"] = *expected_span;
  }
  return doc;
}

Json report_to_json(const DecisionReport& report)
{
  Json doc = Json::object();
  doc["rule"] = std::string(to_string(report.rule));
  doc["scores"] = scores_to_json(report.scores);
  doc["chosen"] = report.chosen ? Json(*report.chosen) : Json(nullptr);
  doc["dominated"] = report.dominated ? Json(*report.dominated) : Json(nullptr);
  doc["tie"] = report.tie;
  if (report.mode)
  {
    doc["mode"] = std::string(to_string(*report.mode));
  }
  if (!report.optimistic.empty())
  {
    doc["optimistic"] = scores_to_json(report.optimistic);
  }
  if (!report.representatives.empty())
  {
    Json reps = Json::object();
    for (const auto& [label, action] : report.representatives)
    {
      reps[label] = action;
    }
    doc["representatives"] = std::move(reps);
  }
  if (report.fallback)
  {
    Json fb = Json::object();
    fb["rule"] = "eu";
    if (report.fallback->mode)
    {
      fb["mode"] = std::string(to_string(*report.fallback->mode));
    }
    fb["scores"] = scores_to_json(report.fallback->scores);
    fb["chosen"] = report.fallback->chosen;
    fb["tie"] = report.fallback->tie;
    doc["fallback"] = std::move(fb);
  }
  return doc;
}

Json violations_to_json(const std::vector<Violation>& violations)
{
  Json out = Json::array();
  for (const auto& v : violations)
  {
    Json entry = Json::object();
    entry["field"] = v.field;
    entry["message"] = v.message;
    out.push_back(std::move(entry));
  }
  return out;
}

std::string error_line(std::string_view code, std::string_view message,
                       std::string_view path)
{
  Json doc = Json::object();
  doc["error"] = std::string(code);
  doc["message"] = std::string(message);
  if (!path.empty())
  {
    doc["path"] = std::string(path);
  }
  return doc.dump(-1, ' ', false, Json::error_handler_t::replace);
}

}  // namespace tuba
