#include "tuba/decisions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tuba/error.hpp"

namespace tuba
{

std::string_view to_string(DecisionRule rule)
{
  return rule == DecisionRule::ExpectedUtility ? "eu" : "minimax";
}

std::string_view to_string(AbstractionMode mode)
{
  switch (mode)
  {
    case AbstractionMode::Conditional: return "conditional";
    case AbstractionMode::Average: return "average";
    case AbstractionMode::Interval: return "interval";
  }
  return "average";
}

DecisionRule parse_rule(std::string_view text)
{
  if (text == "eu")
  {
    return DecisionRule::ExpectedUtility;
  }
  if (text == "minimax")
  {
    return DecisionRule::MinimaxDominance;
  }
  throw Error(ErrorCode::Usage,
              "rule must be eu|minimax, got '" + std::string(text) + "'");
}

AbstractionMode parse_mode(std::string_view text)
{
  if (text == "conditional")
  {
    return AbstractionMode::Conditional;
  }
  if (text == "average")
  {
    return AbstractionMode::Average;
  }
  if (text == "interval")
  {
    return AbstractionMode::Interval;
  }
  throw Error(ErrorCode::Usage,
              "mode must be conditional|average|interval, got '"
                  + std::string(text) + "'");
}

std::string category_label(const Category& category)
{
  std::string label;
  for (const auto& m : category.members)
  {
    if (!label.empty())
    {
      label += '|';
    }
    label += m;
  }
  return label;
}

namespace
{

struct Argmax
{
  std::size_t index = 0;
  bool tie = false;
};

// First maximum in candidate order; tie when another candidate is within
// kTolerance of it.
Argmax argmax(const std::vector<double>& scores)
{
  Argmax out;
  for (std::size_t i = 1; i < scores.size(); ++i)
  {
    if (scores[i] > scores[out.index])
    {
      out.index = i;
    }
  }
  for (std::size_t i = 0; i < scores.size(); ++i)
  {
    if (i != out.index && std::abs(scores[i] - scores[out.index]) <= kTolerance)
    {
      out.tie = true;
    }
  }
  return out;
}

// Index of the unique candidate whose pessimistic bound meets every rival's
// optimistic bound.
std::optional<std::size_t> unique_dominant(const std::vector<double>& pess,
                                           const std::vector<double>& opt)
{
  std::optional<std::size_t> found;
  for (std::size_t c = 0; c < pess.size(); ++c)
  {
    bool dominates = true;
    for (std::size_t o = 0; o < opt.size() && dominates; ++o)
    {
      dominates = o == c || pess[c] >= opt[o];
    }
    if (dominates)
    {
      if (found)
      {
        return std::nullopt;
      }
      found = c;
    }
  }
  return found;
}

Scores zip(const std::vector<std::string>& ids, const std::vector<double>& v)
{
  Scores out;
  for (std::size_t i = 0; i < ids.size(); ++i)
  {
    out.emplace_back(ids[i], v[i]);
  }
  return out;
}

std::vector<double> row_expectations(const UtilityMatrix& matrix,
                                     const std::vector<double>& p)
{
  std::vector<double> eu(matrix.num_actions(), 0.0);
  for (std::size_t i = 0; i < matrix.num_actions(); ++i)
  {
    for (std::size_t j = 0; j < matrix.num_hypotheses(); ++j)
    {
      eu[i] += p[j] * matrix(i, j);
    }
  }
  return eu;
}

void require_kind(const Partition& partition, CategoryKind kind,
                  const UtilityMatrix& matrix)
{
  if (partition.kind != kind)
  {
    throw Error(ErrorCode::InvalidCategory,
                std::string("expected a partition over ")
                    + std::string(to_string(kind)));
  }
  check_partition(partition, leaf_ids(matrix, kind));
}

std::vector<std::size_t> hypothesis_members(const UtilityMatrix& matrix,
                                            const Category& c)
{
  std::vector<std::size_t> idx;
  for (const auto& m : c.members)
  {
    idx.push_back(matrix.hypothesis_index(m));
  }
  return idx;
}

}  // namespace

double expected_utility(const UtilityMatrix& matrix, std::string_view action,
                        const ProbabilityDist& dist)
{
  const std::size_t i = matrix.action_index(action);
  const auto p = dist.aligned(matrix.hypotheses());
  double eu = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j)
  {
    eu += p[j] * matrix(i, j);
  }
  return eu;
}

DecisionReport best_action(const UtilityMatrix& matrix,
                           const ProbabilityDist& dist)
{
  const auto eu = row_expectations(matrix, dist.aligned(matrix.hypotheses()));
  const Argmax best = argmax(eu);
  DecisionReport report;
  report.rule = DecisionRule::ExpectedUtility;
  report.scores = zip(matrix.actions(), eu);
  report.chosen = matrix.actions()[best.index];
  report.tie = best.tie;
  return report;
}

std::vector<double> category_probability(const Partition& partition,
                                         const ProbabilityDist& dist)
{
  std::vector<std::string> ids;
  for (const auto& c : partition.categories)
  {
    ids.insert(ids.end(), c.members.begin(), c.members.end());
  }
  if (partition.kind != CategoryKind::Hypothesis)
  {
    throw Error(ErrorCode::InvalidCategory,
                "category probabilities need a hypothesis partition");
  }
  check_partition(partition, ids);
  const auto p = dist.aligned(ids);
  std::vector<double> out;
  std::size_t k = 0;
  for (const auto& c : partition.categories)
  {
    double mass = 0.0;
    for (std::size_t m = 0; m < c.members.size(); ++m)
    {
      mass += p[k++];
    }
    out.push_back(mass);
  }
  return out;
}

IntervalUtility abstract_outcome_utility(const UtilityMatrix& matrix,
                                         std::string_view action,
                                         const Category& category,
                                         AbstractionMode mode,
                                         const ProbabilityDist* dist)
{
  if (category.kind != CategoryKind::Hypothesis)
  {
    throw Error(ErrorCode::InvalidCategory,
                "abstract outcomes are defined over hypothesis categories");
  }
  check_category(category);
  const std::size_t a = matrix.action_index(action);
  const auto members = hypothesis_members(matrix, category);

  switch (mode)
  {
    case AbstractionMode::Interval:
    {
      IntervalUtility iv{std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()};
      for (std::size_t h : members)
      {
        iv.lo = std::min(iv.lo, matrix(a, h));
        iv.hi = std::max(iv.hi, matrix(a, h));
      }
      return iv;
    }
    case AbstractionMode::Average:
    {
      double sum = 0.0;
      for (std::size_t h : members)
      {
        sum += matrix(a, h);
      }
      const double avg = sum / static_cast<double>(members.size());
      return {avg, avg};
    }
    case AbstractionMode::Conditional:
    {
      if (dist == nullptr)
      {
        throw Error(ErrorCode::MissingDistribution,
                    "conditional mode requires a probability distribution");
      }
      const auto p = dist->aligned(matrix.hypotheses());
      double mass = 0.0;
      for (std::size_t h : members)
      {
        mass += p[h];
      }
      if (!(mass > 0.0))
      {
        throw Error(ErrorCode::ZeroMassCategory,
                    "category '" + category_label(category)
                        + "' has zero probability");
      }
      double eu = 0.0;
      for (std::size_t h : members)
      {
        eu += (p[h] / mass) * matrix(a, h);
      }
      return {eu, eu};
    }
  }
  return {};
}

DecisionReport decide_with_event_categories(const UtilityMatrix& matrix,
                                            const Partition& partition,
                                            const ProbabilityDist& dist,
                                            AbstractionMode mode)
{
  require_kind(partition, CategoryKind::Hypothesis, matrix);
  const auto pc = category_probability(partition, dist);
  std::vector<double> eu(matrix.num_actions(), 0.0);
  for (std::size_t i = 0; i < matrix.num_actions(); ++i)
  {
    for (std::size_t k = 0; k < partition.categories.size(); ++k)
    {
      if (pc[k] == 0.0)
      {
        continue;
      }
      const auto u = abstract_outcome_utility(
          matrix, matrix.actions()[i], partition.categories[k], mode, &dist);
      eu[i] += pc[k] * u.midpoint();
    }
  }
  const Argmax best = argmax(eu);
  DecisionReport report;
  report.rule = DecisionRule::ExpectedUtility;
  report.mode = mode;
  report.scores = zip(matrix.actions(), eu);
  report.chosen = matrix.actions()[best.index];
  report.tie = best.tie;
  return report;
}

DecisionReport minimax_decide_events(const UtilityMatrix& matrix,
                                     const Partition& partition,
                                     const ProbabilityDist& dist)
{
  require_kind(partition, CategoryKind::Hypothesis, matrix);
  const auto pc = category_probability(partition, dist);
  std::vector<double> pess(matrix.num_actions(), 0.0);
  std::vector<double> opt(matrix.num_actions(), 0.0);
  for (std::size_t i = 0; i < matrix.num_actions(); ++i)
  {
    for (std::size_t k = 0; k < partition.categories.size(); ++k)
    {
      const auto iv =
          abstract_outcome_utility(matrix, matrix.actions()[i],
                                   partition.categories[k],
                                   AbstractionMode::Interval);
      pess[i] += pc[k] * iv.lo;
      opt[i] += pc[k] * iv.hi;
    }
  }

  DecisionReport report;
  report.rule = DecisionRule::MinimaxDominance;
  report.mode = AbstractionMode::Interval;
  report.scores = zip(matrix.actions(), pess);
  report.optimistic = zip(matrix.actions(), opt);
  const auto winner = unique_dominant(pess, opt);
  report.dominated = winner.has_value();
  if (winner)
  {
    report.chosen = matrix.actions()[*winner];
  }
  else
  {
    const auto eu = decide_with_event_categories(matrix, partition, dist,
                                                 AbstractionMode::Average);
    report.fallback =
        Fallback{AbstractionMode::Average, eu.scores, *eu.chosen, eu.tie};
  }
  return report;
}

std::vector<std::pair<std::string, std::string>> representative_actions(
    const UtilityMatrix& matrix, const Partition& action_partition,
    const ProbabilityDist& dist)
{
  require_kind(action_partition, CategoryKind::Action, matrix);
  const auto eu = row_expectations(matrix, dist.aligned(matrix.hypotheses()));
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& c : action_partition.categories)
  {
    // Members scanned in model order so ties resolve to the earliest action.
    std::vector<std::size_t> rows;
    for (const auto& m : c.members)
    {
      rows.push_back(matrix.action_index(m));
    }
    std::sort(rows.begin(), rows.end());
    std::size_t best = rows.front();
    for (std::size_t r : rows)
    {
      if (eu[r] > eu[best])
      {
        best = r;
      }
    }
    out.emplace_back(category_label(c), matrix.actions()[best]);
  }
  return out;
}

DecisionReport decide_with_action_categories(const UtilityMatrix& matrix,
                                             const Partition& action_partition,
                                             const ProbabilityDist& dist)
{
  const auto reps = representative_actions(matrix, action_partition, dist);
  std::vector<std::string> labels;
  std::vector<double> scores;
  for (const auto& [label, action] : reps)
  {
    labels.push_back(label);
    scores.push_back(expected_utility(matrix, action, dist));
  }
  const Argmax best = argmax(scores);
  DecisionReport report;
  report.rule = DecisionRule::ExpectedUtility;
  report.scores = zip(labels, scores);
  report.chosen = labels[best.index];
  report.tie = best.tie;
  report.representatives = reps;
  return report;
}

DecisionReport minimax_decide_action_categories(
    const UtilityMatrix& matrix, const Partition& action_partition,
    const ProbabilityDist& dist)
{
  require_kind(action_partition, CategoryKind::Action, matrix);
  const auto p = dist.aligned(matrix.hypotheses());
  std::vector<std::string> labels;
  std::vector<double> pess;
  std::vector<double> opt;
  for (const auto& c : action_partition.categories)
  {
    double lo_sum = 0.0;
    double hi_sum = 0.0;
    for (std::size_t j = 0; j < matrix.num_hypotheses(); ++j)
    {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& m : c.members)
      {
        const double u = matrix(matrix.action_index(m), j);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
      }
      lo_sum += p[j] * lo;
      hi_sum += p[j] * hi;
    }
    labels.push_back(category_label(c));
    pess.push_back(lo_sum);
    opt.push_back(hi_sum);
  }

  DecisionReport report;
  report.rule = DecisionRule::MinimaxDominance;
  report.scores = zip(labels, pess);
  report.optimistic = zip(labels, opt);
  const auto winner = unique_dominant(pess, opt);
  report.dominated = winner.has_value();
  if (winner)
  {
    report.chosen = labels[*winner];
  }
  else
  {
    const auto eu = decide_with_action_categories(matrix, action_partition, dist);
    report.representatives = eu.representatives;
    report.fallback = Fallback{std::nullopt, eu.scores, *eu.chosen, eu.tie};
  }
  return report;
}

}  // namespace tuba
