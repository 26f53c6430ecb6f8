#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "passtopic/match_data.hpp"
#include "passtopic/report.hpp"

namespace passtopic {

struct ServiceConfig {
  std::filesystem::path data_dir = "passtopic-data";
  std::string host = "127.0.0.1";
  int port = 8080;
  int default_k = 5;
  std::uint64_t default_seed = 0;
  std::chrono::milliseconds detect_timeout{60000};
  bool heuristic_styles = false;
  ReportConfig report;

  // Overrides from PASSTOPIC_PORT, PASSTOPIC_DATA_DIR, PASSTOPIC_DEFAULT_K and
  // PASSTOPIC_DEFAULT_SEED when they are set.
  static ServiceConfig from_env();
  static ServiceConfig from_env(ServiceConfig base);
};

// A parsed match plus its per-team analysis views, immutable once built.
struct StoredMatch {
  std::string id;
  MatchRecord raw;  // as uploaded, original orientation
  std::map<TeamId, MatchRecord> views;  // normalized for the key team and segmented

  const MatchRecord& view(const TeamId& team) const;
};

// One directory per match under <root>/matches/<id>/ holding match.json and
// models/<key>.json. Model files are written once and never modified.
class MatchStore {
 public:
  MatchStore(std::filesystem::path root, SegmentOptions segment_options);

  struct PutResult {
    std::string id;
    bool created = false;
  };

  PutResult put_match(std::string_view raw);
  std::shared_ptr<const StoredMatch> find(const std::string& id);

  std::optional<std::string> read_model(const std::string& id, const std::string& key) const;
  // Returns false when the model already existed (the file is left untouched).
  bool write_model(const std::string& id, const std::string& key, const std::string& content);

  // Serializes writers of one match.
  std::mutex& write_lock(const std::string& id);

 private:
  std::filesystem::path match_dir(const std::string& id) const;
  std::shared_ptr<const StoredMatch> build(const std::string& id, MatchRecord raw) const;

  std::filesystem::path root_;
  SegmentOptions segment_options_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const StoredMatch>> cache_;
  std::map<std::string, std::unique_ptr<std::mutex>> write_locks_;
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Transport-independent request handling; the HTTP server is a thin adapter.
class Service {
 public:
  explicit Service(ServiceConfig config);

  HttpResponse handle(const HttpRequest& request);

  const ServiceConfig& config() const { return config_; }
  MatchStore& store() { return store_; }

 private:
  HttpResponse post_match(const HttpRequest& r);
  HttpResponse detect(const std::string& id, const HttpRequest& r);
  HttpResponse patterns(const std::string& id, const HttpRequest& r);
  HttpResponse flow(const std::string& id, const HttpRequest& r);
  HttpResponse model(const std::string& id, const std::string& key);
  HttpResponse phase(const std::string& id, const std::string& pid, const HttpRequest& r);
  HttpResponse player_stats(const std::string& id, const std::string& player, const HttpRequest& r);
  HttpResponse mine(const std::string& id, const HttpRequest& r);

  ServiceConfig config_;
  MatchStore store_;
};

// Key under which a detection is stored: a digest of every parameter that
// affects the fitted result.
std::string model_key(const TeamId& team, int k, const DetectConfig& config);

std::string sha256_hex(std::string_view data);

// HTTP adapter around a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds to `port`, or to a free port when it is 0. Returns the bound port
  // or -1 on failure.
  int bind(const std::string& host, int port);
  // Serves until stop() is called.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocks serving HTTP until the process is stopped.
int run_server(const ServiceConfig& config);

}  // namespace passtopic
