#include "tuba/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tuba/error.hpp"

namespace tuba
{

std::vector<std::size_t> Dendrogram::members(NodeRef node) const
{
  std::vector<std::size_t> out;
  std::vector<NodeRef> stack{node};
  while (!stack.empty())
  {
    const NodeRef n = stack.back();
    stack.pop_back();
    if (n.is_leaf())
    {
      out.push_back(n.index);
    }
    else
    {
      const MergeRecord& m = merges.at(n.index);
      stack.push_back(m.left);
      stack.push_back(m.right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_dendrogram(const Dendrogram& d)
{
  const std::size_t n = d.leaves.size();
  if (n == 0)
  {
    throw Error(ErrorCode::Schema, "dendrogram has no leaves", "leaves");
  }
  std::set<std::string> seen(d.leaves.begin(), d.leaves.end());
  if (seen.size() != n)
  {
    throw Error(ErrorCode::Schema, "duplicate leaf id", "leaves");
  }
  if (d.merges.size() != n - 1)
  {
    throw Error(ErrorCode::Schema,
                "expected " + std::to_string(n - 1) + " merges, got "
                    + std::to_string(d.merges.size()),
                "merges");
  }
  std::vector<bool> leaf_used(n, false);
  std::vector<bool> merge_used(d.merges.size(), false);
  for (std::size_t m = 0; m < d.merges.size(); ++m)
  {
    const MergeRecord& rec = d.merges[m];
    const std::string path = "merges[" + std::to_string(m) + "]";
    if (!std::isfinite(rec.height) || rec.height < 0.0)
    {
      throw Error(ErrorCode::Schema, "height must be finite and >= 0",
                  path + ".height");
    }
    if (rec.left == rec.right)
    {
      throw Error(ErrorCode::Schema, "left and right must differ", path);
    }
    for (const NodeRef& ref : {rec.left, rec.right})
    {
      if (ref.is_leaf())
      {
        if (ref.index >= n || leaf_used[ref.index])
        {
          throw Error(ErrorCode::Schema,
                      "leaf reference out of range or reused", path);
        }
        leaf_used[ref.index] = true;
      }
      else
      {
        if (ref.index >= m || merge_used[ref.index])
        {
          throw Error(ErrorCode::Schema,
                      "merge reference must point to an earlier, unused merge",
                      path);
        }
        merge_used[ref.index] = true;
      }
    }
  }
}

void check_partition(const Partition& p, const std::vector<std::string>& ids)
{
  std::set<std::string> universe(ids.begin(), ids.end());
  std::set<std::string> covered;
  for (const auto& c : p.categories)
  {
    check_category(c);
    if (c.kind != p.kind)
    {
      throw Error(ErrorCode::InvalidCategory,
                  "category kind differs from partition kind");
    }
    for (const auto& m : c.members)
    {
      if (!universe.count(m))
      {
        throw Error(ErrorCode::NotFound,
                    "partition member '" + m + "' is not a "
                        + std::string(p.kind == CategoryKind::Hypothesis
                                          ? "hypothesis"
                                          : "action")
                        + " of the model");
      }
      if (!covered.insert(m).second)
      {
        throw Error(ErrorCode::OverlapError,
                    "'" + m + "' appears in more than one category");
      }
    }
  }
  if (covered.size() != universe.size())
  {
    for (const auto& id : ids)
    {
      if (!covered.count(id))
      {
        throw Error(ErrorCode::InvalidCategory,
                    "partition does not cover '" + id + "'");
      }
    }
  }
}

Partition singleton_partition(const std::vector<std::string>& ids,
                              CategoryKind kind)
{
  Partition p;
  p.kind = kind;
  for (const auto& id : ids)
  {
    p.categories.push_back({kind, {id}});
    p.max_spans.emplace_back(0.0);
  }
  return p;
}

Dendrogram build_hierarchy(const UtilityMatrix& matrix, CategoryKind kind,
                           MetricKind metric, Linkage linkage,
                           const ProbabilityDist* dist)
{
  Dendrogram d;
  d.kind = kind;
  d.metric = metric;
  d.linkage = linkage;
  d.leaves = leaf_ids(matrix, kind);
  const std::size_t n = d.leaves.size();
  if (n == 0)
  {
    throw Error(ErrorCode::InvalidModel, "nothing to cluster");
  }

  // Slot i holds the root whose smallest leaf index is i, so scanning slots
  // in ascending order visits pairs in tie-break order.
  std::vector<double> between = pairwise_distances(matrix, kind, metric, dist);
  std::vector<NodeRef> root(n);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i)
  {
    root[i] = NodeRef::leaf(i);
  }

  for (std::size_t step = 0; step + 1 < n; ++step)
  {
    std::size_t best_i = n;
    std::size_t best_j = n;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      if (!alive[i])
      {
        continue;
      }
      for (std::size_t j = i + 1; j < n; ++j)
      {
        if (!alive[j])
        {
          continue;
        }
        const double dij = between[i * n + j];
        if (best_i == n || dij < best)
        {
          best = dij;
          best_i = i;
          best_j = j;
        }
      }
    }

    d.merges.push_back({root[best_i], root[best_j], best});
    root[best_i] = NodeRef::merge(d.merges.size() - 1);
    alive[best_j] = false;
    for (std::size_t k = 0; k < n; ++k)
    {
      if (!alive[k] || k == best_i)
      {
        continue;
      }
      const double a = between[best_i * n + k];
      const double b = between[best_j * n + k];
      const double merged =
          linkage == Linkage::Complete ? std::max(a, b) : std::min(a, b);
      between[best_i * n + k] = merged;
      between[k * n + best_i] = merged;
    }
  }
  return d;
}

namespace
{

// Categories are the components joined by the admitted merges, ordered by
// their smallest leaf index.
Partition partition_from(const Dendrogram& d,
                         const std::vector<bool>& admitted, double cutoff,
                         const UtilityMatrix* matrix)
{
  const std::size_t n = d.leaves.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x)
    {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t m = 0; m < d.merges.size(); ++m)
  {
    if (!admitted[m])
    {
      continue;
    }
    const auto left = d.members(d.merges[m].left);
    const auto right = d.members(d.merges[m].right);
    const std::size_t a = find(left.front());
    const std::size_t b = find(right.front());
    parent[std::max(a, b)] = std::min(a, b);
  }

  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> group_of(n, n);
  for (std::size_t i = 0; i < n; ++i)
  {
    const std::size_t r = find(i);
    if (group_of[r] == n)
    {
      group_of[r] = groups.size();
      groups.emplace_back();
    }
    groups[group_of[r]].push_back(i);
  }

  Partition p;
  p.kind = d.kind;
  p.cutoff = cutoff;
  for (const auto& g : groups)
  {
    Category c{d.kind, {}};
    for (std::size_t i : g)
    {
      c.members.push_back(d.leaves[i]);
    }
    if (matrix != nullptr)
    {
      p.max_spans.emplace_back(uspan(*matrix, c).max_span);
    }
    else
    {
      p.max_spans.emplace_back(std::nullopt);
    }
    p.categories.push_back(std::move(c));
  }
  return p;
}

}  // namespace

Partition cut_at_tolerance(const Dendrogram& d, double tolerance,
                           const UtilityMatrix* matrix)
{
  if (!(tolerance >= 0.0))
  {
    throw Error(ErrorCode::Usage, "tolerance must be >= 0");
  }
  check_dendrogram(d);
  std::vector<bool> admitted(d.merges.size(), false);
  for (std::size_t m = 0; m < d.merges.size(); ++m)
  {
    const MergeRecord& rec = d.merges[m];
    const auto child_ok = [&](NodeRef r) {
      return r.is_leaf() || admitted[r.index];
    };
    admitted[m] = rec.height <= tolerance && child_ok(rec.left)
                  && child_ok(rec.right);
  }
  return partition_from(d, admitted, tolerance, matrix);
}

Partition cut_to_k(const Dendrogram& d, std::size_t k,
                   const UtilityMatrix* matrix)
{
  check_dendrogram(d);
  const std::size_t n = d.leaves.size();
  if (k < 1 || k > n)
  {
    throw Error(ErrorCode::InvalidK, "k must lie in [1, " + std::to_string(n)
                                         + "], got " + std::to_string(k));
  }
  const std::size_t applied = n - k;
  std::vector<bool> admitted(d.merges.size(), false);
  std::fill_n(admitted.begin(), applied, true);
  const double cutoff = applied == 0 ? 0.0 : d.merges[applied - 1].height;
  return partition_from(d, admitted, cutoff, matrix);
}

RenderFormat parse_render_format(std::string_view text)
{
  if (text == "text")
  {
    return RenderFormat::Text;
  }
  if (text == "svg")
  {
    return RenderFormat::Svg;
  }
  if (text == "json")
  {
    return RenderFormat::Json;
  }
  throw Error(ErrorCode::Usage,
              "format must be text|svg|json, got '" + std::string(text) + "'");
}

}  // namespace tuba
