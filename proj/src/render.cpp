#include <algorithm>
#include <cstdio>
#include <sstream>

#include "tuba/clustering.hpp"
#include "tuba/io.hpp"

namespace tuba
{

namespace
{

std::string fixed(double v, int digits = 4)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string merge_label(const Dendrogram& d, std::size_t m,
                        const UtilityMatrix* matrix)
{
  std::string label = "height " + fixed(d.merges[m].height);
  if (matrix != nullptr)
  {
    Category group{d.kind, {}};
    for (std::size_t i : d.members(NodeRef::merge(m)))
    {
      group.members.push_back(d.leaves[i]);
    }
    label += "  max span " + fixed(uspan(*matrix, group).max_span);
  }
  return label;
}

NodeRef root_of(const Dendrogram& d)
{
  return d.merges.empty() ? NodeRef::leaf(0)
                          : NodeRef::merge(d.merges.size() - 1);
}

void text_node(const Dendrogram& d, NodeRef node, const std::string& prefix,
               const std::string& branch, const UtilityMatrix* matrix,
               std::string& out)
{
  out += prefix + branch;
  if (node.is_leaf())
  {
    out += d.leaves[node.index] + "\n";
    return;
  }
  out += "[" + merge_label(d, node.index, matrix) + "]\n";
  std::string child_prefix = prefix;
  if (branch == "+-- ")
  {
    child_prefix += "|   ";
  }
  else if (branch == "`-- ")
  {
    child_prefix += "    ";
  }
  const MergeRecord& m = d.merges[node.index];
  text_node(d, m.left, child_prefix, "+-- ", matrix, out);
  text_node(d, m.right, child_prefix, "`-- ", matrix, out);
}

std::string render_text(const Dendrogram& d, const UtilityMatrix* matrix)
{
  std::string out = "dendrogram " + std::string(to_string(d.kind)) + " "
                    + std::string(to_string(d.metric)) + "/"
                    + std::string(to_string(d.linkage)) + ", "
                    + std::to_string(d.leaves.size()) + " leaves\n";
  text_node(d, root_of(d), "", "", matrix, out);
  return out;
}

std::string xml_escape(const std::string& s)
{
  std::string out;
  for (char c : s)
  {
    switch (c)
    {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_svg(const Dendrogram& d, const UtilityMatrix* matrix)
{
  // Leaves along the bottom in tree order; merge height on the vertical axis.
  const double left = 70.0;
  const double top = 30.0;
  const double plot_h = 300.0;
  const double spacing = 90.0;
  const double bottom = top + plot_h;

  std::vector<std::size_t> order;
  std::vector<NodeRef> stack{root_of(d)};
  while (!stack.empty())
  {
    const NodeRef n = stack.back();
    stack.pop_back();
    if (n.is_leaf())
    {
      order.push_back(n.index);
    }
    else
    {
      stack.push_back(d.merges[n.index].right);
      stack.push_back(d.merges[n.index].left);
    }
  }

  double max_h = 0.0;
  for (const auto& m : d.merges)
  {
    max_h = std::max(max_h, m.height);
  }
  const auto y_of = [&](double h) {
    return max_h > 0.0 ? bottom - plot_h * (h / max_h) : bottom;
  };

  std::vector<double> leaf_x(d.leaves.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos)
  {
    leaf_x[order[pos]] = left + 40.0 + spacing * static_cast<double>(pos);
  }
  std::vector<double> merge_x(d.merges.size());
  const auto x_of = [&](NodeRef r) {
    return r.is_leaf() ? leaf_x[r.index] : merge_x[r.index];
  };
  const auto node_y = [&](NodeRef r) {
    return r.is_leaf() ? bottom : y_of(d.merges[r.index].height);
  };

  const double width = left + 80.0 + spacing * static_cast<double>(order.size());
  const double height = bottom + 60.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0)
      << "\" height=\"" << fixed(height, 0) << "\" font-family=\"sans-serif\""
      << " font-size=\"11\">\n";
  svg << "  <line x1=\"" << fixed(left, 1) << "\" y1=\"" << fixed(top, 1)
      << "\" x2=\"" << fixed(left, 1) << "\" y2=\"" << fixed(bottom, 1)
      << "\" stroke=\"#666\"/>\n";
  for (double h : {0.0, max_h / 2.0, max_h})
  {
    svg << "  <text x=\"" << fixed(left - 6.0, 1) << "\" y=\""
        << fixed(y_of(h) + 4.0, 1) << "\" text-anchor=\"end\">" << fixed(h)
        << "</text>\n";
  }

  for (std::size_t m = 0; m < d.merges.size(); ++m)
  {
    const MergeRecord& rec = d.merges[m];
    const double xl = x_of(rec.left);
    const double xr = x_of(rec.right);
    const double y = y_of(rec.height);
    merge_x[m] = 0.5 * (xl + xr);
    svg << "  <polyline fill=\"none\" stroke=\"#222\" points=\"" << fixed(xl, 1)
        << "," << fixed(node_y(rec.left), 1) << " " << fixed(xl, 1) << ","
        << fixed(y, 1) << " " << fixed(xr, 1) << "," << fixed(y, 1) << " "
        << fixed(xr, 1) << "," << fixed(node_y(rec.right), 1) << "\"/>\n";
    svg << "  <text x=\"" << fixed(merge_x[m], 1) << "\" y=\""
        << fixed(y - 4.0, 1) << "\" text-anchor=\"middle\">"
        << xml_escape(merge_label(d, m, matrix)) << "</text>\n";
  }
  for (std::size_t i = 0; i < d.leaves.size(); ++i)
  {
    svg << "  <text x=\"" << fixed(leaf_x[i], 1) << "\" y=\""
        << fixed(bottom + 16.0, 1) << "\" text-anchor=\"middle\">"
        << xml_escape(d.leaves[i]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string render_dendrogram(const Dendrogram& d, RenderFormat format,
                              const UtilityMatrix* matrix)
{
  check_dendrogram(d);
  switch (format)
  {
    case RenderFormat::Text: return render_text(d, matrix);
    case RenderFormat::Svg: return render_svg(d, matrix);
    case RenderFormat::Json: return canonical_dump(dendrogram_to_json(d));
  }
  return {};
}

}  // namespace tuba
