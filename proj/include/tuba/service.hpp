#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "tuba/model.hpp"

namespace tuba
{

struct SessionModel
{
  std::string id;
  std::shared_ptr<const UtilityModel> model;
  std::chrono::system_clock::time_point last_modified;
};

/// In-memory model store. Reads share a lock; uploads take it exclusively.
/// With a state directory, every upload is also written to <dir>/<id>.json
/// and existing snapshots are loaded at construction.
class ModelStore
{
public:
  explicit ModelStore(std::optional<std::filesystem::path> state_dir = {});

  /// Content-addressed: identical models get identical ids.
  std::string put(UtilityModel model);
  std::optional<SessionModel> get(const std::string& id) const;
  std::size_t size() const;

  static std::string id_for(const UtilityModel& model);

private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, SessionModel> models_;
  std::optional<std::filesystem::path> state_dir_;
};

struct HttpResponse
{
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Route table over the core, independent of any socket layer:
///   POST /models                 upload a model file        -> {"id"}
///   GET  /models/{id}            canonical model file
///   POST /models/{id}/cluster    dendrogram
///   POST /models/{id}/cut        partition
///   POST /models/{id}/decide     decision report
/// Errors: 404 unknown id, 400 schema/validation, 415 non-JSON body,
/// 422 semantic errors.
class Service
{
public:
  explicit Service(std::optional<std::filesystem::path> state_dir = {});

  HttpResponse handle(std::string_view method, std::string_view path,
                      std::string_view body,
                      std::string_view content_type) const;

  ModelStore& store() { return store_; }

private:
  mutable ModelStore store_;
};

/// HTTP/1.1 front end for a Service, with CORS for the browser explorer.
class HttpServer
{
public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 binds any free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool run();
  void stop();
  void wait_until_ready() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tuba
