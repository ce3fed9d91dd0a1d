#include "tuba/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tuba/error.hpp"

namespace tuba
{

std::string_view error_code_name(ErrorCode code)
{
  switch (code)
  {
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::DistMismatch: return "DistMismatch";
    case ErrorCode::MissingDistribution: return "MissingDistribution";
    case ErrorCode::UnsupportedMetric: return "UnsupportedMetric";
    case ErrorCode::OverlapError: return "OverlapError";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::ZeroMassCategory: return "ZeroMassCategory";
    case ErrorCode::InvalidCategory: return "InvalidCategory";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::Usage: return "UsageError";
    case ErrorCode::UnknownModel: return "UnknownModel";
  }
  return "Error";
}

namespace
{

std::size_t find_id(const std::vector<std::string>& ids, std::string_view id,
                    std::string_view what)
{
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end())
  {
    throw Error(ErrorCode::NotFound,
                "unknown " + std::string(what) + " '" + std::string(id) + "'");
  }
  return static_cast<std::size_t>(it - ids.begin());
}

std::vector<std::size_t> resolve_subset(
    const std::vector<std::string>& all,
    const std::optional<std::vector<std::string>>& subset,
    std::string_view what)
{
  std::vector<std::size_t> indices;
  if (!subset)
  {
    indices.resize(all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
    {
      indices[i] = i;
    }
    return indices;
  }
  if (subset->empty())
  {
    throw Error(ErrorCode::InvalidModel,
                std::string(what) + " subset must be nonempty");
  }
  std::set<std::size_t> seen;
  for (const auto& id : *subset)
  {
    const std::size_t idx = find_id(all, id, what);
    if (!seen.insert(idx).second)
    {
      throw Error(ErrorCode::InvalidModel,
                  "duplicate " + std::string(what) + " '" + id + "' in subset");
    }
    indices.push_back(idx);
  }
  return indices;
}

template <typename Ids>
void check_unique(const Ids& ids, const std::string& field,
                  std::vector<Violation>& out)
{
  std::set<std::string> seen;
  for (const auto& id : ids)
  {
    if (!seen.insert(id).second)
    {
      out.push_back({field, "duplicate id '" + id + "'"});
    }
  }
}

}  // namespace

std::size_t UtilityModel::action_index(std::string_view id) const
{
  return find_id(actions, id, "action");
}

std::size_t UtilityModel::hypothesis_index(std::string_view id) const
{
  return find_id(hypotheses, id, "hypothesis");
}

std::vector<double> UtilityModel::weights() const
{
  std::vector<double> w;
  w.reserve(attributes.size());
  for (const auto& a : attributes)
  {
    w.push_back(a.weight);
  }
  return w;
}

ProbabilityDist ProbabilityDist::uniform(std::span<const std::string> hypotheses)
{
  ProbabilityDist d;
  for (const auto& h : hypotheses)
  {
    d.probs[h] = 1.0 / static_cast<double>(hypotheses.size());
  }
  return d;
}

ProbabilityDist ProbabilityDist::degenerate(
    std::span<const std::string> hypotheses, std::string_view certain)
{
  ProbabilityDist d;
  bool found = false;
  for (const auto& h : hypotheses)
  {
    d.probs[h] = (h == certain) ? 1.0 : 0.0;
    found = found || h == certain;
  }
  if (!found)
  {
    throw Error(ErrorCode::NotFound,
                "unknown hypothesis '" + std::string(certain) + "'");
  }
  return d;
}

std::vector<double> ProbabilityDist::aligned(
    std::span<const std::string> hypotheses) const
{
  if (probs.size() != hypotheses.size())
  {
    throw Error(ErrorCode::DistMismatch,
                "distribution covers " + std::to_string(probs.size())
                    + " hypotheses, expected "
                    + std::to_string(hypotheses.size()));
  }
  std::vector<double> out;
  out.reserve(hypotheses.size());
  double total = 0.0;
  for (const auto& h : hypotheses)
  {
    const auto it = probs.find(h);
    if (it == probs.end())
    {
      throw Error(ErrorCode::DistMismatch,
                  "distribution has no probability for hypothesis '" + h + "'");
    }
    if (!(it->second >= 0.0 && it->second <= 1.0))
    {
      throw Error(ErrorCode::DistMismatch,
                  "probability of '" + h + "' outside [0,1]");
    }
    out.push_back(it->second);
    total += it->second;
  }
  if (std::abs(total - 1.0) > kTolerance)
  {
    std::ostringstream msg;
    msg << "probabilities sum to " << total << ", expected 1";
    throw Error(ErrorCode::DistMismatch, msg.str());
  }
  return out;
}

std::optional<ProbabilityDist> priors_of(const UtilityModel& model)
{
  if (!model.priors)
  {
    return std::nullopt;
  }
  ProbabilityDist d;
  for (std::size_t j = 0; j < model.hypotheses.size(); ++j)
  {
    d.probs[model.hypotheses[j]] = (*model.priors)[j];
  }
  return d;
}

UtilityMatrix::UtilityMatrix(std::vector<std::string> actions,
                             std::vector<std::string> hypotheses,
                             std::vector<double> values)
    : actions_(std::move(actions)),
      hypotheses_(std::move(hypotheses)),
      values_(std::move(values))
{
  if (values_.size() != actions_.size() * hypotheses_.size())
  {
    throw Error(ErrorCode::InvalidModel,
                "utility matrix needs |actions| x |hypotheses| values");
  }
}

std::size_t UtilityMatrix::action_index(std::string_view id) const
{
  return find_id(actions_, id, "action");
}

std::size_t UtilityMatrix::hypothesis_index(std::string_view id) const
{
  return find_id(hypotheses_, id, "hypothesis");
}

ModelView::ModelView(const UtilityModel& base)
    : ModelView(base, std::nullopt, std::nullopt)
{
}

ModelView::ModelView(const UtilityModel& base,
                     const std::optional<std::vector<std::string>>& actions,
                     const std::optional<std::vector<std::string>>& hypotheses)
    : base_(&base),
      action_rows_(resolve_subset(base.actions, actions, "action")),
      hypothesis_cols_(resolve_subset(base.hypotheses, hypotheses, "hypothesis"))
{
}

namespace
{

double weighted_sum(const UtilityModel& model, std::size_t a, std::size_t h)
{
  const auto& cell = model.outcomes.at(a).at(h);
  if (cell.size() != model.attributes.size())
  {
    throw Error(ErrorCode::InvalidModel,
                "outcome '" + model.actions[a] + "|" + model.hypotheses[h]
                    + "' does not have one value per attribute");
  }
  double u = 0.0;
  for (std::size_t k = 0; k < cell.size(); ++k)
  {
    u += model.attributes[k].weight * cell[k];
  }
  return u;
}

}  // namespace

double evaluate_utility(const UtilityModel& model, std::string_view action,
                        std::string_view hypothesis)
{
  return weighted_sum(model, model.action_index(action),
                      model.hypothesis_index(hypothesis));
}

UtilityMatrix utility_matrix(const ModelView& view)
{
  const UtilityModel& m = view.base();
  std::vector<std::string> actions;
  std::vector<std::string> hypotheses;
  for (std::size_t a : view.action_rows())
  {
    actions.push_back(m.actions[a]);
  }
  for (std::size_t h : view.hypothesis_cols())
  {
    hypotheses.push_back(m.hypotheses[h]);
  }
  std::vector<double> values;
  values.reserve(actions.size() * hypotheses.size());
  for (std::size_t a : view.action_rows())
  {
    for (std::size_t h : view.hypothesis_cols())
    {
      values.push_back(weighted_sum(m, a, h));
    }
  }
  return UtilityMatrix(std::move(actions), std::move(hypotheses),
                       std::move(values));
}

std::vector<Violation> validate_model(const UtilityModel& model)
{
  std::vector<Violation> out;
  if (model.actions.empty())
  {
    out.push_back({"actions", "must be nonempty"});
  }
  if (model.hypotheses.empty())
  {
    out.push_back({"hypotheses", "must be nonempty"});
  }
  if (model.attributes.empty())
  {
    out.push_back({"attributes", "must have at least one attribute"});
  }
  check_unique(model.actions, "actions", out);
  check_unique(model.hypotheses, "hypotheses", out);
  std::vector<std::string> attribute_ids;
  for (const auto& a : model.attributes)
  {
    attribute_ids.push_back(a.id);
    if (!std::isfinite(a.weight))
    {
      out.push_back({"attributes." + a.id, "weight must be finite"});
    }
  }
  check_unique(attribute_ids, "attributes", out);

  for (const auto* ids : {&model.actions, &model.hypotheses})
  {
    for (const auto& id : *ids)
    {
      if (id.find('|') != std::string::npos)
      {
        out.push_back({ids == &model.actions ? "actions" : "hypotheses",
                       "id '" + id + "' must not contain '|'"});
      }
    }
  }

  // Totality: one value vector of length |attributes| per cell.
  const bool rows_ok = model.outcomes.size() == model.actions.size();
  for (std::size_t a = 0; a < model.actions.size(); ++a)
  {
    for (std::size_t h = 0; h < model.hypotheses.size(); ++h)
    {
      const std::string key = model.actions[a] + "|" + model.hypotheses[h];
      if (!rows_ok || model.outcomes[a].size() != model.hypotheses.size()
          || model.outcomes[a][h].empty())
      {
        out.push_back({"outcomes." + key, "missing outcome (totality)"});
        continue;
      }
      const auto& cell = model.outcomes[a][h];
      if (cell.size() != model.attributes.size())
      {
        out.push_back({"outcomes." + key,
                       "expected " + std::to_string(model.attributes.size())
                           + " attribute values, got "
                           + std::to_string(cell.size())});
      }
      for (double v : cell)
      {
        if (!std::isfinite(v))
        {
          out.push_back({"outcomes." + key, "values must be finite"});
          break;
        }
      }
    }
  }
  if (!rows_ok)
  {
    out.push_back({"outcomes", "outcome table shape does not match actions"});
  }

  if (model.priors)
  {
    const auto& p = *model.priors;
    if (p.size() != model.hypotheses.size())
    {
      out.push_back({"priors", "must give one probability per hypothesis"});
    }
    else
    {
      double total = 0.0;
      for (std::size_t j = 0; j < p.size(); ++j)
      {
        if (!(p[j] >= 0.0 && p[j] <= 1.0))
        {
          out.push_back({"priors." + model.hypotheses[j],
                         "probability must lie in [0,1]"});
        }
        total += p[j];
      }
      if (std::abs(total - 1.0) > kTolerance)
      {
        std::ostringstream msg;
        msg << "priors must sum to 1 (normalization), got " << total;
        out.push_back({"priors", msg.str()});
      }
    }
  }
  return out;
}

std::vector<Violation> model_warnings(const UtilityModel& model)
{
  std::vector<Violation> out;
  if (!validate_model(model).empty())
  {
    return out;
  }
  for (std::size_t a = 0; a < model.actions.size(); ++a)
  {
    for (std::size_t h = 0; h < model.hypotheses.size(); ++h)
    {
      const std::string key = model.actions[a] + "|" + model.hypotheses[h];
      const double u = weighted_sum(model, a, h);
      if (u < 0.0 || u > 1.0)
      {
        std::ostringstream msg;
        msg << "utility " << u << " lies outside [0,1]";
        out.push_back({"outcomes." + key, msg.str()});
      }
    }
  }
  return out;
}

UtilityModel reweight(const UtilityModel& model,
                      std::span<const double> new_weights)
{
  if (new_weights.size() != model.attributes.size())
  {
    throw Error(ErrorCode::InvalidWeights,
                "expected " + std::to_string(model.attributes.size())
                    + " weights, got " + std::to_string(new_weights.size()));
  }
  UtilityModel out = model;
  for (std::size_t k = 0; k < new_weights.size(); ++k)
  {
    if (!std::isfinite(new_weights[k]))
    {
      throw Error(ErrorCode::InvalidWeights, "weights must be finite");
    }
    out.attributes[k].weight = new_weights[k];
  }
  return out;
}

}  // namespace tuba
