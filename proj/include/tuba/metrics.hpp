#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tuba/model.hpp"

namespace tuba
{

/// Which axis of the utility table a category groups.
enum class CategoryKind
{
  Hypothesis,
  Action,
};

enum class MetricKind
{
  Euclidean,
  WeightedEuclidean,
  Chebyshev,
};

enum class Linkage
{
  Complete,
  Single,
};

std::string_view to_string(CategoryKind kind);
std::string_view to_string(MetricKind metric);
std::string_view to_string(Linkage linkage);
CategoryKind parse_category_kind(std::string_view text);
MetricKind parse_metric(std::string_view text);
Linkage parse_linkage(std::string_view text);

/// A disjunction of hypotheses, or a set of interchangeable actions.
struct Category
{
  CategoryKind kind = CategoryKind::Hypothesis;
  std::vector<std::string> members;

  bool operator==(const Category&) const = default;
};

/// Throws InvalidCategory when empty or duplicated.
void check_category(const Category& category);

/// Utility range of a category along each cross axis: per action for a
/// hypothesis category, per hypothesis for an action category.
struct SpanReport
{
  std::vector<std::pair<std::string, double>> per_axis;
  double max_span = 0.0;
};

/// Ids along the axis that a category of `kind` draws its members from.
const std::vector<std::string>& leaf_ids(const UtilityMatrix& matrix,
                                         CategoryKind kind);

/// Utility vector of one leaf: a column for hypotheses, a row for actions.
std::vector<double> leaf_vector(const UtilityMatrix& matrix, CategoryKind kind,
                                std::size_t index);

SpanReport uspan(const UtilityMatrix& matrix, const Category& category);

/// Probability-weighted span of an action category, summed over hypotheses.
double expected_uspan(const UtilityMatrix& matrix, const Category& category,
                      const ProbabilityDist& dist);

double distance(const UtilityMatrix& matrix, std::string_view a,
                std::string_view b, CategoryKind kind, MetricKind metric,
                const ProbabilityDist* dist = nullptr);

double group_distance(const UtilityMatrix& matrix, const Category& g1,
                      const Category& g2, MetricKind metric, Linkage linkage,
                      const ProbabilityDist* dist = nullptr);

/// Symmetric n x n leaf-to-leaf distance table (row-major) for the axis of
/// `kind`. Shared by group_distance and the clustering scan.
std::vector<double> pairwise_distances(const UtilityMatrix& matrix,
                                       CategoryKind kind, MetricKind metric,
                                       const ProbabilityDist* dist = nullptr);

}  // namespace tuba
