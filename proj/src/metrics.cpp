#include "tuba/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tuba/error.hpp"

namespace tuba
{

std::string_view to_string(CategoryKind kind)
{
  return kind == CategoryKind::Hypothesis ? "hypotheses" : "actions";
}

std::string_view to_string(MetricKind metric)
{
  switch (metric)
  {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::WeightedEuclidean: return "weighted";
    case MetricKind::Chebyshev: return "chebyshev";
  }
  return "euclidean";
}

std::string_view to_string(Linkage linkage)
{
  return linkage == Linkage::Complete ? "complete" : "single";
}

CategoryKind parse_category_kind(std::string_view text)
{
  if (text == "hypotheses")
  {
    return CategoryKind::Hypothesis;
  }
  if (text == "actions")
  {
    return CategoryKind::Action;
  }
  throw Error(ErrorCode::Usage, "target must be 'hypotheses' or 'actions', got '"
                                    + std::string(text) + "'");
}

MetricKind parse_metric(std::string_view text)
{
  if (text == "euclidean")
  {
    return MetricKind::Euclidean;
  }
  if (text == "weighted")
  {
    return MetricKind::WeightedEuclidean;
  }
  if (text == "chebyshev")
  {
    return MetricKind::Chebyshev;
  }
  throw Error(ErrorCode::Usage,
              "metric must be euclidean|weighted|chebyshev, got '"
                  + std::string(text) + "'");
}

Linkage parse_linkage(std::string_view text)
{
  if (text == "complete")
  {
    return Linkage::Complete;
  }
  if (text == "single")
  {
    return Linkage::Single;
  }
  throw Error(ErrorCode::Usage, "linkage must be complete|single, got '"
                                    + std::string(text) + "'");
}

void check_category(const Category& category)
{
  if (category.members.empty())
  {
    throw Error(ErrorCode::InvalidCategory, "category must be nonempty");
  }
  std::set<std::string> seen;
  for (const auto& m : category.members)
  {
    if (!seen.insert(m).second)
    {
      throw Error(ErrorCode::InvalidCategory,
                  "duplicate category member '" + m + "'");
    }
  }
}

const std::vector<std::string>& leaf_ids(const UtilityMatrix& matrix,
                                         CategoryKind kind)
{
  return kind == CategoryKind::Hypothesis ? matrix.hypotheses()
                                          : matrix.actions();
}

std::vector<double> leaf_vector(const UtilityMatrix& matrix, CategoryKind kind,
                                std::size_t index)
{
  if (kind == CategoryKind::Action)
  {
    const auto row = matrix.row(index);
    return {row.begin(), row.end()};
  }
  std::vector<double> column(matrix.num_actions());
  for (std::size_t i = 0; i < matrix.num_actions(); ++i)
  {
    column[i] = matrix(i, index);
  }
  return column;
}

namespace
{

std::vector<std::size_t> member_indices(const UtilityMatrix& matrix,
                                        const Category& category)
{
  check_category(category);
  std::vector<std::size_t> idx;
  idx.reserve(category.members.size());
  for (const auto& m : category.members)
  {
    idx.push_back(category.kind == CategoryKind::Hypothesis
                      ? matrix.hypothesis_index(m)
                      : matrix.action_index(m));
  }
  return idx;
}

// Utility of the outcome (member, axis) for a category of `kind`.
double cell(const UtilityMatrix& matrix, CategoryKind kind, std::size_t member,
            std::size_t axis)
{
  return kind == CategoryKind::Hypothesis ? matrix(axis, member)
                                          : matrix(member, axis);
}

// Per-axis (max - min) across members.
std::vector<double> spans(const UtilityMatrix& matrix, CategoryKind kind,
                          const std::vector<std::size_t>& members)
{
  const std::size_t axes = kind == CategoryKind::Hypothesis
                               ? matrix.num_actions()
                               : matrix.num_hypotheses();
  std::vector<double> out(axes);
  for (std::size_t axis = 0; axis < axes; ++axis)
  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t m : members)
    {
      const double u = cell(matrix, kind, m, axis);
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    out[axis] = hi - lo;
  }
  return out;
}

double vector_distance(std::span<const double> a, std::span<const double> b,
                       MetricKind metric, std::span<const double> weights)
{
  switch (metric)
  {
    case MetricKind::Chebyshev:
    {
      double best = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i)
      {
        best = std::max(best, std::abs(a[i] - b[i]));
      }
      return best;
    }
    case MetricKind::Euclidean:
    case MetricKind::WeightedEuclidean:
    {
      double sum = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i)
      {
        const double d = a[i] - b[i];
        sum += (weights.empty() ? 1.0 : weights[i]) * d * d;
      }
      return std::sqrt(sum);
    }
  }
  return 0.0;
}

std::vector<double> metric_weights(const UtilityMatrix& matrix,
                                   CategoryKind kind, MetricKind metric,
                                   const ProbabilityDist* dist)
{
  if (metric != MetricKind::WeightedEuclidean)
  {
    return {};
  }
  if (kind == CategoryKind::Hypothesis)
  {
    throw Error(ErrorCode::UnsupportedMetric,
                "weighted metric applies only to action clustering "
                "(hypothesis axes carry the probabilities)");
  }
  if (dist == nullptr)
  {
    throw Error(ErrorCode::MissingDistribution,
                "weighted metric requires a probability distribution");
  }
  return dist->aligned(matrix.hypotheses());
}

}  // namespace

SpanReport uspan(const UtilityMatrix& matrix, const Category& category)
{
  const auto members = member_indices(matrix, category);
  const auto per_axis = spans(matrix, category.kind, members);
  const auto& axis_ids = category.kind == CategoryKind::Hypothesis
                             ? matrix.actions()
                             : matrix.hypotheses();
  SpanReport report;
  for (std::size_t axis = 0; axis < per_axis.size(); ++axis)
  {
    report.per_axis.emplace_back(axis_ids[axis], per_axis[axis]);
    report.max_span = std::max(report.max_span, per_axis[axis]);
  }
  return report;
}

double expected_uspan(const UtilityMatrix& matrix, const Category& category,
                      const ProbabilityDist& dist)
{
  if (category.kind != CategoryKind::Action)
  {
    throw Error(ErrorCode::InvalidCategory,
                "expected span is defined for action categories");
  }
  const auto p = dist.aligned(matrix.hypotheses());
  const auto per_axis = spans(matrix, category.kind,
                              member_indices(matrix, category));
  double total = 0.0;
  for (std::size_t j = 0; j < per_axis.size(); ++j)
  {
    total += p[j] * per_axis[j];
  }
  return total;
}

double distance(const UtilityMatrix& matrix, std::string_view a,
                std::string_view b, CategoryKind kind, MetricKind metric,
                const ProbabilityDist* dist)
{
  const auto weights = metric_weights(matrix, kind, metric, dist);
  const auto index = [&](std::string_view id) {
    return kind == CategoryKind::Hypothesis ? matrix.hypothesis_index(id)
                                            : matrix.action_index(id);
  };
  const auto va = leaf_vector(matrix, kind, index(a));
  const auto vb = leaf_vector(matrix, kind, index(b));
  return vector_distance(va, vb, metric, weights);
}

std::vector<double> pairwise_distances(const UtilityMatrix& matrix,
                                       CategoryKind kind, MetricKind metric,
                                       const ProbabilityDist* dist)
{
  const auto weights = metric_weights(matrix, kind, metric, dist);
  const std::size_t n = leaf_ids(matrix, kind).size();
  std::vector<std::vector<double>> vectors;
  vectors.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    vectors.push_back(leaf_vector(matrix, kind, i));
  }
  std::vector<double> table(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = i + 1; j < n; ++j)
    {
      const double d = vector_distance(vectors[i], vectors[j], metric, weights);
      table[i * n + j] = d;
      table[j * n + i] = d;
    }
  }
  return table;
}

double group_distance(const UtilityMatrix& matrix, const Category& g1,
                      const Category& g2, MetricKind metric, Linkage linkage,
                      const ProbabilityDist* dist)
{
  if (g1.kind != g2.kind)
  {
    throw Error(ErrorCode::InvalidCategory,
                "groups must be of the same kind");
  }
  const auto m1 = member_indices(matrix, g1);
  const auto m2 = member_indices(matrix, g2);
  for (std::size_t i : m1)
  {
    if (std::find(m2.begin(), m2.end(), i) != m2.end())
    {
      throw Error(ErrorCode::OverlapError,
                  "groups share member '" + leaf_ids(matrix, g1.kind)[i] + "'");
    }
  }
  const auto weights = metric_weights(matrix, g1.kind, metric, dist);
  double best = linkage == Linkage::Complete
                    ? 0.0
                    : std::numeric_limits<double>::infinity();
  for (std::size_t i : m1)
  {
    const auto vi = leaf_vector(matrix, g1.kind, i);
    for (std::size_t j : m2)
    {
      const auto vj = leaf_vector(matrix, g1.kind, j);
      const double d = vector_distance(vi, vj, metric, weights);
      best = linkage == Linkage::Complete ? std::max(best, d)
                                          : std::min(best, d);
    }
  }
  return best;
}

}  // namespace tuba
