#include "tuba/service.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <httplib.h>

#include "tuba/api.hpp"
#include "tuba/error.hpp"
#include "tuba/io.hpp"

namespace tuba
{

namespace
{

std::uint64_t fnv1a(std::string_view bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes)
  {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_all(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int status_for(ErrorCode code)
{
  switch (code)
  {
    case ErrorCode::UnknownModel: return 404;
    case ErrorCode::Schema:
    case ErrorCode::InvalidModel:
    case ErrorCode::Usage: return 400;
    default: return 422;
  }
}

HttpResponse error_response(int status, std::string_view code,
                            std::string_view message, std::string_view path = {})
{
  Json doc = Json::object();
  doc["error"] = std::string(code);
  doc["message"] = std::string(message);
  if (!path.empty())
  {
    doc["path"] = std::string(path);
  }
  return {status, canonical_dump(doc), "application/json"};
}

std::string content_type_for(RenderFormat format)
{
  switch (format)
  {
    case RenderFormat::Svg: return "image/svg+xml";
    case RenderFormat::Text: return "text/plain; charset=utf-8";
    case RenderFormat::Json: return "application/json";
  }
  return "application/json";
}

// Splits "/models/abc/cut" into {"models", "abc", "cut"}.
std::vector<std::string> segments(std::string_view path)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < path.size())
  {
    if (path[start] == '/')
    {
      ++start;
      continue;
    }
    const std::size_t end = path.find('/', start);
    out.emplace_back(path.substr(start, end == std::string_view::npos
                                            ? std::string_view::npos
                                            : end - start));
    if (end == std::string_view::npos)
    {
      break;
    }
    start = end;
  }
  return out;
}

}  // namespace

ModelStore::ModelStore(std::optional<std::filesystem::path> state_dir)
    : state_dir_(std::move(state_dir))
{
  if (!state_dir_)
  {
    return;
  }
  std::filesystem::create_directories(*state_dir_);
  for (const auto& entry : std::filesystem::directory_iterator(*state_dir_))
  {
    if (entry.path().extension() != ".json")
    {
      continue;
    }
    try
    {
      UtilityModel model = parse_model(read_all(entry.path()));
      const std::string id = id_for(model);
      models_[id] = {id, std::make_shared<const UtilityModel>(std::move(model)),
                     std::chrono::system_clock::now()};
    }
    catch (const Error& e)
    {
      std::cerr << error_line("SnapshotSkipped",
                              entry.path().string() + ": " + e.what())
                << "\n";
    }
  }
}

std::string ModelStore::id_for(const UtilityModel& model)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "m%016llx",
                static_cast<unsigned long long>(fnv1a(serialize_model(model))));
  return buf;
}

std::string ModelStore::put(UtilityModel model)
{
  const std::string id = id_for(model);
  std::unique_lock lock(mutex_);
  if (models_.count(id))
  {
    return id;
  }
  if (state_dir_)
  {
    const auto target = *state_dir_ / (id + ".json");
    const auto tmp = *state_dir_ / (id + ".json.tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      out << serialize_model(model);
    }
    std::filesystem::rename(tmp, target);
  }
  models_[id] = {id, std::make_shared<const UtilityModel>(std::move(model)),
                 std::chrono::system_clock::now()};
  return id;
}

std::optional<SessionModel> ModelStore::get(const std::string& id) const
{
  std::shared_lock lock(mutex_);
  const auto it = models_.find(id);
  if (it == models_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

std::size_t ModelStore::size() const
{
  std::shared_lock lock(mutex_);
  return models_.size();
}

Service::Service(std::optional<std::filesystem::path> state_dir)
    : store_(std::move(state_dir))
{
}

HttpResponse Service::handle(std::string_view method, std::string_view path,
                             std::string_view body,
                             std::string_view content_type) const
{
  const auto parts = segments(path);
  if (parts.empty() || parts[0] != "models" || parts.size() > 3)
  {
    return error_response(404, "NoRoute", "no route for " + std::string(path));
  }
  const bool is_post = method == "POST";
  if (!is_post && method != "GET")
  {
    return error_response(405, "MethodNotAllowed",
                          std::string(method) + " not allowed");
  }
  if (is_post && content_type.substr(0, 16) != "application/json")
  {
    return error_response(415, "UnsupportedMediaType",
                          "request body must be application/json");
  }

  try
  {
    if (parts.size() == 1)
    {
      if (!is_post)
      {
        return error_response(405, "MethodNotAllowed", "use POST /models");
      }
      UtilityModel model = model_from_json_unchecked(parse_json(body));
      const auto violations = validate_model(model);
      if (!violations.empty())
      {
        Json doc = Json::object();
        doc["error"] = std::string(error_code_name(ErrorCode::InvalidModel));
        doc["violations"] = violations_to_json(violations);
        return {400, canonical_dump(doc), "application/json"};
      }
      Json doc = Json::object();
      doc["id"] = store_.put(std::move(model));
      return {200, canonical_dump(doc), "application/json"};
    }

    const auto session = store_.get(parts[1]);
    if (!session)
    {
      throw Error(ErrorCode::UnknownModel, "unknown model id '" + parts[1] + "'");
    }
    const UtilityModel& model = *session->model;

    if (parts.size() == 2)
    {
      if (is_post)
      {
        return error_response(405, "MethodNotAllowed", "use GET");
      }
      return {200, serialize_model(model), "application/json"};
    }
    if (!is_post)
    {
      return error_response(405, "MethodNotAllowed", "use POST");
    }
    const Json request = parse_json(body);
    if (parts[2] == "cluster")
    {
      const auto req = api::cluster_request_from_json(request);
      return {200, api::cluster_body(model, req), content_type_for(req.format)};
    }
    if (parts[2] == "cut")
    {
      return {200, api::cut_body(&model, api::cut_request_from_json(request)),
              "application/json"};
    }
    if (parts[2] == "decide")
    {
      return {200,
              api::decide_body(model, api::decide_request_from_json(request)),
              "application/json"};
    }
    return error_response(404, "NoRoute", "no route for " + std::string(path));
  }
  catch (const Error& e)
  {
    return error_response(status_for(e.code()), error_code_name(e.code()),
                          e.what(), e.path());
  }
}

struct HttpServer::Impl
{
  explicit Impl(const Service& s) : service(s) {}

  const Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service)
    : impl_(std::make_unique<Impl>(service))
{
  const auto dispatch = [this](const httplib::Request& req,
                               httplib::Response& res) {
    const HttpResponse out = impl_->service.handle(
        req.method, req.path, req.body, req.get_header_value("Content-Type"));
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  auto& svr = impl_->server;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  svr.Get(".*", dispatch);
  svr.Post(".*", dispatch);
  svr.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port)
{
  if (port == 0)
  {
    return impl_->server.bind_to_any_port(host);
  }
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace tuba
