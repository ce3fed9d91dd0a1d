#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tuba/clustering.hpp"
#include "tuba/metrics.hpp"
#include "tuba/model.hpp"

namespace tuba
{

enum class DecisionRule
{
  ExpectedUtility,
  MinimaxDominance,
};

/// How a point utility is assigned to an (action, event category) outcome.
enum class AbstractionMode
{
  Conditional,  // expectation under p(H | category)
  Average,      // members taken as equally likely
  Interval,     // [min, max] over members; midpoint when a point is needed
};

std::string_view to_string(DecisionRule rule);
std::string_view to_string(AbstractionMode mode);
DecisionRule parse_rule(std::string_view text);
AbstractionMode parse_mode(std::string_view text);

struct IntervalUtility
{
  double lo = 0.0;
  double hi = 0.0;

  double midpoint() const { return 0.5 * (lo + hi); }
  bool operator==(const IntervalUtility&) const = default;
};

using Scores = std::vector<std::pair<std::string, double>>;

/// Expected-utility ranking carried alongside a minimax verdict that found
/// no dominant candidate.
struct Fallback
{
  std::optional<AbstractionMode> mode;  // unset for action categories
  Scores scores;
  std::string chosen;
  bool tie = false;
};

struct DecisionReport
{
  DecisionRule rule = DecisionRule::ExpectedUtility;
  /// Expected utilities per candidate (action, or action-category label),
  /// in model order. Under minimax these are the pessimistic bounds.
  Scores scores;
  std::optional<std::string> chosen;
  /// Minimax only: a unique dominant candidate exists.
  std::optional<bool> dominated;
  /// Another candidate scored within kTolerance of the chosen one.
  bool tie = false;
  std::optional<AbstractionMode> mode;
  /// Minimax only: optimistic bounds, same order as `scores`.
  Scores optimistic;
  /// Action categories only: label -> representative action.
  std::vector<std::pair<std::string, std::string>> representatives;
  std::optional<Fallback> fallback;
};

/// Members joined by '|', which ids may not contain.
std::string category_label(const Category& category);

double expected_utility(const UtilityMatrix& matrix, std::string_view action,
                        const ProbabilityDist& dist);

DecisionReport best_action(const UtilityMatrix& matrix,
                           const ProbabilityDist& dist);

/// Probability of each category of a hypothesis partition, in category
/// order.
std::vector<double> category_probability(const Partition& partition,
                                         const ProbabilityDist& dist);

/// Point modes return lo == hi. Conditional throws ZeroMassCategory when the
/// category has no probability mass, MissingDistribution without `dist`.
IntervalUtility abstract_outcome_utility(const UtilityMatrix& matrix,
                                         std::string_view action,
                                         const Category& category,
                                         AbstractionMode mode,
                                         const ProbabilityDist* dist = nullptr);

/// Category-level expected utility per action. Zero-mass categories
/// contribute nothing; Interval mode scores the midpoint.
DecisionReport decide_with_event_categories(const UtilityMatrix& matrix,
                                            const Partition& partition,
                                            const ProbabilityDist& dist,
                                            AbstractionMode mode);

DecisionReport minimax_decide_events(const UtilityMatrix& matrix,
                                     const Partition& partition,
                                     const ProbabilityDist& dist);

/// Highest-EU member of each action category (ties: model order).
std::vector<std::pair<std::string, std::string>> representative_actions(
    const UtilityMatrix& matrix, const Partition& action_partition,
    const ProbabilityDist& dist);

/// Scores each category by its representative's expected utility.
DecisionReport decide_with_action_categories(const UtilityMatrix& matrix,
                                             const Partition& action_partition,
                                             const ProbabilityDist& dist);

DecisionReport minimax_decide_action_categories(
    const UtilityMatrix& matrix, const Partition& action_partition,
    const ProbabilityDist& dist);

}  // namespace tuba
