#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tuba/metrics.hpp"
#include "tuba/model.hpp"

namespace tuba
{

/// Reference to a dendrogram node: a leaf (index into `leaves`) or an
/// earlier merge (index into `merges`).
struct NodeRef
{
  enum class Type
  {
    Leaf,
    Merge,
  };

  Type type = Type::Leaf;
  std::size_t index = 0;

  static NodeRef leaf(std::size_t i) { return {Type::Leaf, i}; }
  static NodeRef merge(std::size_t i) { return {Type::Merge, i}; }
  bool is_leaf() const { return type == Type::Leaf; }

  bool operator==(const NodeRef&) const = default;
};

struct MergeRecord
{
  NodeRef left;
  NodeRef right;
  double height = 0.0;  // inter-group distance at the time of the merge

  bool operator==(const MergeRecord&) const = default;
};

struct Dendrogram
{
  CategoryKind kind = CategoryKind::Hypothesis;
  MetricKind metric = MetricKind::Euclidean;
  Linkage linkage = Linkage::Complete;
  std::vector<std::string> leaves;
  std::vector<MergeRecord> merges;

  /// Leaf indices under `node`, ascending.
  std::vector<std::size_t> members(NodeRef node) const;

  bool operator==(const Dendrogram&) const = default;
};

/// Throws Schema when the structure is not a single binary tree over the
/// leaves (|leaves|-1 merges, each node consumed once, forward references
/// only, finite non-negative heights).
void check_dendrogram(const Dendrogram& d);

/// A disjoint cover of the leaves. `max_spans[i]` is the utility span of
/// categories[i] when a utility matrix was supplied to the cut.
struct Partition
{
  CategoryKind kind = CategoryKind::Hypothesis;
  double cutoff = 0.0;
  std::vector<Category> categories;
  std::vector<std::optional<double>> max_spans;

  bool operator==(const Partition&) const = default;
};

/// Throws InvalidCategory unless the categories are disjoint, of `kind`,
/// and cover exactly `ids`.
void check_partition(const Partition& p, const std::vector<std::string>& ids);

/// Every leaf in its own category.
Partition singleton_partition(const std::vector<std::string>& ids,
                              CategoryKind kind);

/// Agglomerative clustering. Repeatedly merges the closest pair of roots;
/// exact ties go to the pair whose (min leaf index, max leaf index) is
/// lexicographically smallest.
Dendrogram build_hierarchy(const UtilityMatrix& matrix, CategoryKind kind,
                           MetricKind metric, Linkage linkage,
                           const ProbabilityDist* dist = nullptr);

/// Maximal subtrees whose merge heights are all <= tolerance (inclusive).
/// Spans are filled in when `matrix` is given.
Partition cut_at_tolerance(const Dendrogram& d, double tolerance,
                           const UtilityMatrix* matrix = nullptr);

/// Exactly k categories, by undoing the last k-1 merges. The recorded
/// cutoff is the height of the last merge kept (0 when none is kept).
Partition cut_to_k(const Dendrogram& d, std::size_t k,
                   const UtilityMatrix* matrix = nullptr);

enum class RenderFormat
{
  Text,
  Svg,
  Json,
};

RenderFormat parse_render_format(std::string_view text);

/// Text and Svg label every merge line with its height and, when `matrix`
/// is given, the maximum utility span of the merged group.
std::string render_dendrogram(const Dendrogram& d, RenderFormat format,
                              const UtilityMatrix* matrix = nullptr);

}  // namespace tuba
