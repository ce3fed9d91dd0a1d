#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tuba/api.hpp"
#include "tuba/error.hpp"
#include "tuba/io.hpp"
#include "tuba/service.hpp"

namespace tuba
{

namespace
{

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw Error(ErrorCode::NotFound, "cannot read file '" + path + "'", path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Flags shared by every subcommand that reads a model.
struct ModelFlags
{
  std::string model;
  std::string weights;
  std::string actions;
  std::string hypotheses;
  std::string dist;

  void add_to(CLI::App* cmd, bool model_required)
  {
    auto* opt = cmd->add_option("--model", model, "Model JSON file");
    if (model_required)
    {
      opt->required();
    }
    cmd->add_option("--weights", weights,
                    "Comma-separated attribute weights (non-destructive)");
    cmd->add_option("--actions", actions, "Comma-separated action subset");
    cmd->add_option("--hypotheses", hypotheses,
                    "Comma-separated hypothesis subset");
    cmd->add_option("--dist", dist,
                    "Probability distribution JSON file (defaults to priors)");
  }

  api::Projection projection() const
  {
    api::Projection p;
    if (!weights.empty())
    {
      p.weights = api::parse_weights(weights);
    }
    if (!actions.empty())
    {
      p.actions = api::split_list(actions);
    }
    if (!hypotheses.empty())
    {
      p.hypotheses = api::split_list(hypotheses);
    }
    return p;
  }

  std::optional<ProbabilityDist> distribution() const
  {
    if (dist.empty())
    {
      return std::nullopt;
    }
    return parse_dist(read_file(dist));
  }

  UtilityModel load() const { return parse_model(read_file(model)); }
};

struct ClusterFlags
{
  std::string target = "hypotheses";
  std::string metric = "euclidean";
  std::string linkage = "complete";
  std::string format = "json";

  void add_to(CLI::App* cmd, bool with_format)
  {
    cmd->add_option("--target", target, "hypotheses|actions")
        ->check(CLI::IsMember({"hypotheses", "actions"}));
    cmd->add_option("--metric", metric, "euclidean|weighted|chebyshev")
        ->check(CLI::IsMember({"euclidean", "weighted", "chebyshev"}));
    cmd->add_option("--linkage", linkage, "complete|single")
        ->check(CLI::IsMember({"complete", "single"}));
    if (with_format)
    {
      cmd->add_option("--out", format, "json|text|svg")
          ->check(CLI::IsMember({"json", "text", "svg"}));
    }
  }

  api::ClusterRequest request(const ModelFlags& m) const
  {
    api::ClusterRequest r;
    r.projection = m.projection();
    r.target = parse_category_kind(target);
    r.metric = parse_metric(metric);
    r.linkage = parse_linkage(linkage);
    r.dist = m.distribution();
    r.format = parse_render_format(format);
    return r;
  }
};

int serve(int port, const std::string& host, const std::string& state_dir,
          std::ostream& out, std::ostream& err)
{
  Service service(state_dir.empty()
                      ? std::nullopt
                      : std::optional<std::filesystem::path>(state_dir));
  HttpServer server(service);
  const int bound = server.bind(host, port);
  if (bound < 0)
  {
    err << error_line("BindFailed", "cannot bind " + host + ":"
                                        + std::to_string(port))
        << "\n";
    return 1;
  }
  out << "{\"listening\": \"" << host << ":" << bound << "\"}\n" << std::flush;
  return server.run() ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err)
{
  CLI::App app{"Utility-based abstraction: cluster hypotheses and actions by "
               "utility similarity and decide with the resulting categories"};
  app.require_subcommand(1);

  ModelFlags model_flags;
  ClusterFlags cluster_flags;

  auto* validate = app.add_subcommand("validate", "Check a model file");
  validate->add_option("--model", model_flags.model, "Model JSON file")
      ->required();

  auto* cluster = app.add_subcommand("cluster", "Build an abstraction hierarchy");
  model_flags.add_to(cluster, true);
  cluster_flags.add_to(cluster, true);

  auto* cut = app.add_subcommand(
      "cut", "Extract categories from a dendrogram at a tolerance or count");
  std::string dendrogram_file;
  double tolerance = -1.0;
  std::size_t k = 0;
  cut->add_option("--dendrogram", dendrogram_file, "Dendrogram JSON file");
  auto* tol_opt = cut->add_option("--tolerance", tolerance, "Maximum merge height");
  auto* k_opt = cut->add_option("--k", k, "Number of categories");
  tol_opt->excludes(k_opt);
  model_flags.add_to(cut, false);
  cluster_flags.add_to(cut, false);

  auto* decide = app.add_subcommand("decide", "Choose an action");
  std::string partition_file;
  std::string rule = "eu";
  std::string mode = "conditional";
  model_flags.add_to(decide, true);
  decide->add_option("--partition", partition_file, "Partition JSON file");
  decide->add_option("--rule", rule, "eu|minimax")
      ->check(CLI::IsMember({"eu", "minimax"}));
  decide->add_option("--mode", mode, "conditional|average|interval")
      ->check(CLI::IsMember({"conditional", "average", "interval"}));

  auto* span = app.add_subcommand("span", "Utility span of a category");
  std::string category;
  std::string span_target;
  model_flags.add_to(span, true);
  span->add_option("--category", category, "Comma-separated member ids")
      ->required();
  span->add_option("--target", span_target,
                   "hypotheses|actions (inferred when omitted)")
      ->check(CLI::IsMember({"hypotheses", "actions"}));

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  int port = 8080;
  if (const char* env = std::getenv("TUBA_PORT"))
  {
    port = std::atoi(env);
  }
  std::string host = "127.0.0.1";
  std::string state_dir;
  serve_cmd->add_option("--port", port, "Port (default $TUBA_PORT or 8080)");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--state-dir", state_dir,
                        "Directory for model snapshots");

  std::vector<const char*> argv;
  for (const auto& a : args)
  {
    argv.push_back(a.c_str());
  }
  try
  {
    app.parse(static_cast<int>(argv.size()), argv.data());
  }
  catch (const CLI::CallForHelp&)
  {
    out << app.help();
    return 0;
  }
  catch (const CLI::ParseError& e)
  {
    err << error_line("UsageError", e.what()) << "\n";
    return 2;
  }

  try
  {
    if (*validate)
    {
      const auto model =
          model_from_json_unchecked(parse_json(read_file(model_flags.model)));
      const std::string body = api::validate_body(model);
      out << body;
      return validate_model(model).empty() ? 0 : 1;
    }
    if (*cluster)
    {
      out << api::cluster_body(model_flags.load(),
                               cluster_flags.request(model_flags));
      return 0;
    }
    if (*cut)
    {
      if (tol_opt->count() == 0 && k_opt->count() == 0)
      {
        throw Error(ErrorCode::Usage, "cut needs --tolerance or --k");
      }
      if (dendrogram_file.empty() && model_flags.model.empty())
      {
        throw Error(ErrorCode::Usage, "cut needs --dendrogram or --model");
      }
      api::CutRequest req;
      req.cluster = cluster_flags.request(model_flags);
      if (!dendrogram_file.empty())
      {
        req.dendrogram = parse_dendrogram(read_file(dendrogram_file));
      }
      if (tol_opt->count())
      {
        req.tolerance = tolerance;
      }
      else
      {
        req.k = k;
      }
      std::optional<UtilityModel> model;
      if (!model_flags.model.empty())
      {
        model = model_flags.load();
      }
      out << api::cut_body(model ? &*model : nullptr, req);
      return 0;
    }
    if (*decide)
    {
      api::DecideRequest req;
      req.projection = model_flags.projection();
      req.dist = model_flags.distribution();
      if (!partition_file.empty())
      {
        req.partition = parse_json(read_file(partition_file));
      }
      req.rule = parse_rule(rule);
      req.mode = parse_mode(mode);
      out << api::decide_body(model_flags.load(), req);
      return 0;
    }
    if (*span)
    {
      api::SpanRequest req;
      req.projection = model_flags.projection();
      req.members = api::split_list(category);
      if (!span_target.empty())
      {
        req.kind = parse_category_kind(span_target);
      }
      req.dist = model_flags.distribution();
      out << api::span_body(model_flags.load(), req);
      return 0;
    }
    if (*serve_cmd)
    {
      return serve(port, host, state_dir, out, err);
    }
  }
  catch (const Error& e)
  {
    err << error_line(error_code_name(e.code()), e.what(), e.path()) << "\n";
    return e.code() == ErrorCode::Usage ? 2 : 1;
  }
  catch (const std::exception& e)
  {
    err << error_line("InternalError", e.what()) << "\n";
    return 1;
  }
  return 2;
}

}  // namespace tuba
