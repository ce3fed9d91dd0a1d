#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tuba
{

/// Absolute tolerance for every sum-to-one and equality check.
inline constexpr double kTolerance = 1e-9;

struct Attribute
{
  std::string id;
  double weight = 0.0;

  bool operator==(const Attribute&) const = default;
};

/// Actions x hypotheses outcome table under an additive multiattribute
/// utility. outcomes[a][h] holds one value per attribute; a cell with the
/// wrong length (e.g. empty) is reported by validate_model as non-total.
/// Id order fixes row/column order everywhere downstream.
struct UtilityModel
{
  std::vector<std::string> actions;
  std::vector<std::string> hypotheses;
  std::vector<Attribute> attributes;
  std::vector<std::vector<std::vector<double>>> outcomes;
  std::optional<std::vector<double>> priors;

  std::size_t action_index(std::string_view id) const;
  std::size_t hypothesis_index(std::string_view id) const;
  std::vector<double> weights() const;

  bool operator==(const UtilityModel&) const = default;
};

/// Probability over hypotheses. The evidence label is an opaque context tag;
/// nothing is inferred from it.
struct ProbabilityDist
{
  std::optional<std::string> evidence_label;
  std::map<std::string, double> probs;

  static ProbabilityDist uniform(std::span<const std::string> hypotheses);
  static ProbabilityDist degenerate(std::span<const std::string> hypotheses,
                                    std::string_view certain);

  /// Probabilities in the order of `hypotheses`. Throws DistMismatch unless
  /// the keys are exactly that set, each value lies in [0,1], and the values
  /// sum to 1 within kTolerance.
  std::vector<double> aligned(std::span<const std::string> hypotheses) const;

  bool operator==(const ProbabilityDist&) const = default;
};

/// The model's priors as a distribution; nullopt when the model has none.
std::optional<ProbabilityDist> priors_of(const UtilityModel& model);

/// Dense utility table, row-major, rows = actions, columns = hypotheses.
class UtilityMatrix
{
public:
  UtilityMatrix(std::vector<std::string> actions,
                std::vector<std::string> hypotheses,
                std::vector<double> values);

  std::size_t num_actions() const { return actions_.size(); }
  std::size_t num_hypotheses() const { return hypotheses_.size(); }

  double operator()(std::size_t action, std::size_t hypothesis) const
  {
    return values_[action * hypotheses_.size() + hypothesis];
  }

  std::span<const double> row(std::size_t action) const
  {
    return {values_.data() + action * hypotheses_.size(), hypotheses_.size()};
  }

  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<std::string>& hypotheses() const { return hypotheses_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t action_index(std::string_view id) const;
  std::size_t hypothesis_index(std::string_view id) const;

  bool operator==(const UtilityMatrix&) const = default;

private:
  std::vector<std::string> actions_;
  std::vector<std::string> hypotheses_;
  std::vector<double> values_;
};

/// Projection of a model onto ordered subsets of its actions and hypotheses.
/// The subsets keep the order the caller gave them in.
class ModelView
{
public:
  /// Full view in model order.
  explicit ModelView(const UtilityModel& base);
  /// Throws NotFound for unknown ids and InvalidModel for empty or duplicated
  /// subsets. An absent subset means "all, in model order".
  ModelView(const UtilityModel& base,
            const std::optional<std::vector<std::string>>& actions,
            const std::optional<std::vector<std::string>>& hypotheses);

  const UtilityModel& base() const { return *base_; }
  const std::vector<std::size_t>& action_rows() const { return action_rows_; }
  const std::vector<std::size_t>& hypothesis_cols() const
  {
    return hypothesis_cols_;
  }

private:
  const UtilityModel* base_;
  std::vector<std::size_t> action_rows_;
  std::vector<std::size_t> hypothesis_cols_;
};

struct Violation
{
  std::string field;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Weighted sum of the (action, hypothesis) attribute values.
double evaluate_utility(const UtilityModel& model, std::string_view action,
                        std::string_view hypothesis);

UtilityMatrix utility_matrix(const ModelView& view);
inline UtilityMatrix utility_matrix(const UtilityModel& model)
{
  return utility_matrix(ModelView(model));
}

/// Empty iff every structural invariant holds.
std::vector<Violation> validate_model(const UtilityModel& model);

/// Non-fatal findings: attribute values or utilities outside [0,1].
std::vector<Violation> model_warnings(const UtilityModel& model);

UtilityModel reweight(const UtilityModel& model,
                      std::span<const double> new_weights);

}  // namespace tuba
