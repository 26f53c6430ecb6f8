#include "passtopic/service.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <httplib.h>

#include "passtopic/error.hpp"
#include "passtopic/match_io.hpp"
#include "passtopic/model_io.hpp"
#include "passtopic/seqmine.hpp"

namespace passtopic {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

namespace {

std::optional<long long> parse_integer(std::string_view s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a temporary name then rename so readers never see a partial file.
void write_file_atomic(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.substr(0, 48);
}

bool safe_segment(const std::string& s) {
  return !s.empty() && s.find('/') == std::string::npos && s.find("..") == std::string::npos;
}

HttpResponse json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

HttpResponse error_response(int status, const std::string& code, const std::string& message,
                            const std::string& field = {}) {
  json body = {{"error", code}, {"message", message}};
  if (!field.empty()) body["field"] = field;
  return json_response(status, body);
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed:
    case ErrorCode::roster_reference:
    case ErrorCode::non_monotone:
    case ErrorCode::out_of_bounds:
    case ErrorCode::unknown_direction:
    case ErrorCode::duplicate_entry:
      return 400;
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::timeout:
      return 504;
    default:
      return 422;
  }
}

struct Params {
  const HttpRequest& r;

  std::optional<std::string> get(const std::string& name) const {
    auto it = r.query.find(name);
    if (it == r.query.end() || it->second.empty()) return std::nullopt;
    return it->second;
  }

  long long integer(const std::string& name, long long fallback) const {
    auto v = get(name);
    if (!v) return fallback;
    auto parsed = parse_integer(*v);
    if (!parsed) throw Error(ErrorCode::invalid_argument, name + " must be an integer", name);
    return *parsed;
  }

  double real(const std::string& name, double fallback) const {
    auto v = get(name);
    if (!v) return fallback;
    auto parsed = parse_real(*v);
    if (!parsed) throw Error(ErrorCode::invalid_argument, name + " must be a number", name);
    return *parsed;
  }
};

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(path);
  while (std::getline(in, part, '/')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

TeamId pick_team(const StoredMatch& m, const Params& p) {
  auto team = p.get("team");
  if (!team) return m.raw.teams[0].id;
  if (!m.raw.find_team(*team)) throw Error(ErrorCode::not_found, "unknown team '" + *team + "'", "team");
  return *team;
}

}  // namespace

ServiceConfig ServiceConfig::from_env() { return from_env(ServiceConfig{}); }

ServiceConfig ServiceConfig::from_env(ServiceConfig base) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  auto env_int = [&](const char* name) -> std::optional<long long> {
    auto v = env(name);
    if (!v) return std::nullopt;
    auto parsed = parse_integer(*v);
    if (!parsed) throw Error(ErrorCode::invalid_argument, std::string(name) + " must be an integer", name);
    return parsed;
  };
  if (auto v = env_int("PASSTOPIC_PORT")) base.port = static_cast<int>(*v);
  if (auto v = env("PASSTOPIC_DATA_DIR")) base.data_dir = *v;
  if (auto v = env_int("PASSTOPIC_DEFAULT_K")) base.default_k = static_cast<int>(*v);
  if (auto v = env_int("PASSTOPIC_DEFAULT_SEED")) base.default_seed = static_cast<std::uint64_t>(*v);
  return base;
}

const MatchRecord& StoredMatch::view(const TeamId& team) const {
  auto it = views.find(team);
  if (it == views.end()) throw Error(ErrorCode::not_found, "unknown team '" + team + "'", "team");
  return it->second;
}

MatchStore::MatchStore(fs::path root, SegmentOptions segment_options)
    : root_(std::move(root)), segment_options_(segment_options) {}

fs::path MatchStore::match_dir(const std::string& id) const { return root_ / "matches" / id; }

std::shared_ptr<const StoredMatch> MatchStore::build(const std::string& id, MatchRecord raw) const {
  auto stored = std::make_shared<StoredMatch>();
  stored->id = id;
  for (const auto& t : raw.teams) {
    MatchRecord view = normalize_direction(raw, t.id);
    segment(view, segment_options_);
    stored->views.emplace(t.id, std::move(view));
  }
  stored->raw = std::move(raw);
  return stored;
}

MatchStore::PutResult MatchStore::put_match(std::string_view raw) {
  MatchRecord match = parse_match(raw);
  const std::string canonical = match_to_json(match).dump(2) + "\n";
  const std::string id = sanitize(match.match_id) + "-" + sha256_hex(canonical).substr(0, 12);
  auto stored = build(id, std::move(match));  // validates direction metadata

  std::lock_guard lock(mutex_);
  const fs::path file = match_dir(id) / "match.json";
  if (fs::exists(file)) {
    cache_.try_emplace(id, std::move(stored));
    return {id, false};
  }
  write_file_atomic(file, canonical);
  cache_[id] = std::move(stored);
  return {id, true};
}

std::shared_ptr<const StoredMatch> MatchStore::find(const std::string& id) {
  if (!safe_segment(id)) return nullptr;
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  const fs::path file = match_dir(id) / "match.json";
  if (!fs::exists(file)) return nullptr;
  auto stored = build(id, parse_match(read_file(file)));
  cache_[id] = stored;
  return stored;
}

std::optional<std::string> MatchStore::read_model(const std::string& id, const std::string& key) const {
  if (!safe_segment(id) || !safe_segment(key)) return std::nullopt;
  const fs::path file = match_dir(id) / "models" / (key + ".json");
  if (!fs::exists(file)) return std::nullopt;
  return read_file(file);
}

bool MatchStore::write_model(const std::string& id, const std::string& key, const std::string& content) {
  const fs::path file = match_dir(id) / "models" / (key + ".json");
  if (fs::exists(file)) return false;
  write_file_atomic(file, content);
  return true;
}

std::mutex& MatchStore::write_lock(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto& slot = write_locks_[id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::string model_key(const TeamId& team, int k, const DetectConfig& config) {
  json params = {{"team", team},
                 {"k", k},
                 {"seed", config.nmf.seed},
                 {"max_iters", config.nmf.max_iters},
                 {"tol", config.nmf.tol},
                 {"theta", config.theta},
                 {"count_mode", to_string(config.count_mode)},
                 {"word_mode", to_string(config.word_mode)}};
  return sha256_hex(params.dump()).substr(0, 16);
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)), store_(config_.data_dir, SegmentOptions{config_.heuristic_styles}) {}

HttpResponse Service::handle(const HttpRequest& r) {
  try {
    const auto parts = split_path(r.path);
    const bool get = r.method == "GET";
    const bool post = r.method == "POST";
    if (parts.empty() || parts[0] != "matches") return error_response(404, "not_found", "no such endpoint");

    if (parts.size() == 1 && post) return post_match(r);
    if (parts.size() < 2) return error_response(404, "not_found", "no such endpoint");
    const std::string& id = parts[1];

    if (parts.size() == 2 && get) {
      auto m = store_.find(id);
      if (!m) return error_response(404, "not_found", "unknown match '" + id + "'");
      json teams = json::array();
      for (const auto& t : m->raw.teams) teams.push_back(t.id);
      return json_response(200, {{"match_id", m->id},
                                 {"source_match_id", m->raw.match_id},
                                 {"teams", teams},
                                 {"phases", m->view(m->raw.teams[0].id).phases.size()}});
    }
    if (parts.size() == 3 && post && parts[2] == "detect") return detect(id, r);
    if (parts.size() == 3 && post && parts[2] == "mine") return mine(id, r);
    if (parts.size() == 3 && get && parts[2] == "patterns") return patterns(id, r);
    if (parts.size() == 3 && get && parts[2] == "flow") return flow(id, r);
    if (parts.size() == 4 && get && parts[2] == "models") return model(id, parts[3]);
    if (parts.size() == 4 && get && parts[2] == "phases") return phase(id, parts[3], r);
    if (parts.size() == 5 && get && parts[2] == "players" && parts[4] == "stats") return player_stats(id, parts[3], r);
    return error_response(404, "not_found", "no such endpoint");
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what(), e.field());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

HttpResponse Service::post_match(const HttpRequest& r) {
  auto result = store_.put_match(r.body);
  return json_response(result.created ? 201 : 200, {{"match_id", result.id}, {"created", result.created}});
}

HttpResponse Service::detect(const std::string& id, const HttpRequest& r) {
  auto m = store_.find(id);
  if (!m) return error_response(404, "not_found", "unknown match '" + id + "'");
  const Params p{r};
  if (auto corpus = p.get("corpus"); corpus && *corpus != "single") {
    return error_response(501, "not_implemented", "multi-match corpora are not supported yet", "corpus");
  }
  const TeamId team = pick_team(*m, p);
  const long long k = p.integer("k", config_.default_k);
  if (k < 1 || k > 1000) return error_response(422, "invalid_k", "k must be a positive integer", "k");

  DetectConfig cfg;
  cfg.nmf.seed = static_cast<std::uint64_t>(p.integer("seed", static_cast<long long>(config_.default_seed)));
  cfg.nmf.max_iters = static_cast<int>(p.integer("max_iters", cfg.nmf.max_iters));
  cfg.nmf.tol = p.real("tol", cfg.nmf.tol);
  cfg.theta = p.real("theta", cfg.theta);
  if (auto mode = p.get("mode")) {
    auto parsed = parse_count_mode(*mode);
    if (!parsed) return error_response(422, "invalid_argument", "mode must be binary or count", "mode");
    cfg.count_mode = *parsed;
  }
  if (auto words = p.get("words")) {
    auto parsed = parse_word_mode(*words);
    if (!parsed) return error_response(422, "invalid_argument", "words must be player or region", "words");
    cfg.word_mode = *parsed;
  }
  const std::string key = model_key(team, static_cast<int>(k), cfg);

  std::lock_guard lock(store_.write_lock(id));
  if (store_.read_model(id, key)) {
    return json_response(200, {{"model", key}, {"cached", true}});
  }
  cfg.nmf.time_budget = config_.detect_timeout;
  Detection d = detect_patterns(m->view(team), team, static_cast<int>(k), cfg);
  d.config.nmf.time_budget.reset();
  store_.write_model(id, key, export_model(d));
  return json_response(201, {{"model", key}, {"cached", false}});
}

namespace {

struct LoadedModel {
  std::shared_ptr<const StoredMatch> match;
  Detection detection;
};

std::variant<LoadedModel, HttpResponse> load_model(MatchStore& store, const std::string& id, const Params& p) {
  auto m = store.find(id);
  if (!m) return error_response(404, "not_found", "unknown match '" + id + "'");
  auto key = p.get("model");
  if (!key) return error_response(404, "not_found", "no model selected", "model");
  auto text = store.read_model(id, *key);
  if (!text) return error_response(404, "not_found", "unknown model '" + *key + "'", "model");
  Detection d = import_model(*text);
  if (auto team = p.get("team"); team && *team != d.team) {
    return error_response(422, "invalid_argument", "model was fitted for team '" + d.team + "'", "team");
  }
  return LoadedModel{std::move(m), std::move(d)};
}

}  // namespace

HttpResponse Service::patterns(const std::string& id, const HttpRequest& r) {
  const Params p{r};
  auto loaded = load_model(store_, id, p);
  if (auto* resp = std::get_if<HttpResponse>(&loaded)) return *resp;
  auto& [m, d] = std::get<LoadedModel>(loaded);
  PatternSort sort = PatternSort::frequency;
  if (auto s = p.get("sort")) {
    auto parsed = parse_pattern_sort(*s);
    if (!parsed) return error_response(422, "invalid_argument", "sort must be frequency or shootings", "sort");
    sort = *parsed;
  }
  json body = patterns_view(m->view(d.team), d, sort, config_.report);
  body["model"] = *p.get("model");
  return json_response(200, body);
}

HttpResponse Service::flow(const std::string& id, const HttpRequest& r) {
  const Params p{r};
  auto loaded = load_model(store_, id, p);
  if (auto* resp = std::get_if<HttpResponse>(&loaded)) return *resp;
  auto& [m, d] = std::get<LoadedModel>(loaded);
  json body = flow_view(m->view(d.team), d, config_.report);
  body["model"] = *p.get("model");
  return json_response(200, body);
}

HttpResponse Service::model(const std::string& id, const std::string& key) {
  if (!store_.find(id)) return error_response(404, "not_found", "unknown match '" + id + "'");
  auto text = store_.read_model(id, key);
  if (!text) return error_response(404, "not_found", "unknown model '" + key + "'", "model");
  return {200, *text, "application/json"};
}

HttpResponse Service::phase(const std::string& id, const std::string& pid, const HttpRequest& r) {
  auto m = store_.find(id);
  if (!m) return error_response(404, "not_found", "unknown match '" + id + "'");
  const Params p{r};
  auto index = parse_integer(pid);
  const auto& phases = m->view(m->raw.teams[0].id).phases;
  if (!index || *index < 0 || *index >= static_cast<long long>(phases.size())) {
    return error_response(404, "not_found", "unknown phase '" + pid + "'");
  }
  const TeamId team = p.get("team") ? pick_team(*m, p) : phases[static_cast<std::size_t>(*index)].team;
  const MatchRecord& view = m->view(team);
  return json_response(200, phase_detail_view(view, view.phases[static_cast<std::size_t>(*index)], config_.report));
}

HttpResponse Service::player_stats(const std::string& id, const std::string& player, const HttpRequest& r) {
  auto m = store_.find(id);
  if (!m) return error_response(404, "not_found", "unknown match '" + id + "'");
  const Params p{r};

  PlayerId pid;
  const auto sep = player.find_first_of("#:");
  std::string shirt_text = player;
  if (sep != std::string::npos) {
    pid.team = player.substr(0, sep);
    shirt_text = player.substr(sep + 1);
  } else {
    pid.team = pick_team(*m, p);
  }
  auto shirt = parse_integer(shirt_text);
  if (!shirt || !m->raw.find_player({pid.team, static_cast<int>(*shirt)})) {
    return error_response(404, "not_found", "unknown player '" + player + "'", "player");
  }
  pid.shirt = static_cast<int>(*shirt);

  std::optional<TimeSpan> span;
  if (auto s = p.get("span")) {
    // "<half>" or "<half>:<from>-<to>"
    TimeSpan ts;
    const auto colon = s->find(':');
    auto half = parse_integer(s->substr(0, colon));
    if (!half || (*half != 1 && *half != 2)) {
      return error_response(422, "invalid_argument", "span half must be 1 or 2", "span");
    }
    ts.half = static_cast<int>(*half);
    ts.from = -1e300;
    ts.to = 1e300;
    if (colon != std::string::npos) {
      const std::string range = s->substr(colon + 1);
      const auto dash = range.find('-', 1);
      std::optional<double> from, to;
      if (dash != std::string::npos) {
        from = parse_real(range.substr(0, dash));
        to = parse_real(range.substr(dash + 1));
      }
      if (!from || !to || *from > *to) {
        return error_response(422, "invalid_argument", "span must look like 1:0-2700", "span");
      }
      ts.from = *from;
      ts.to = *to;
    }
    const bool covered = std::any_of(m->raw.frames.begin(), m->raw.frames.end(),
                                     [&](const FrameSnapshot& f) { return ts.contains(f.half, f.t); });
    if (!covered) return error_response(422, "invalid_argument", "span lies outside the match", "span");
    span = ts;
  }
  const auto& view = m->view(pid.team);
  const auto passes = view.passes();
  try {
    return json_response(200, player_stats_to_json(pid, passtopic::player_stats(pid, view.frames, passes, {}, span)));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_frame) throw;
    return error_response(422, "no_frame", e.what(), "span");
  }
}

HttpResponse Service::mine(const std::string& id, const HttpRequest& r) {
  auto m = store_.find(id);
  if (!m) return error_response(404, "not_found", "unknown match '" + id + "'");
  const Params p{r};
  const TeamId team = pick_team(*m, p);
  const long long min_support = p.integer("min_support", 2);
  const long long max_len = p.integer("max_len", 5);
  if (min_support < 1) return error_response(422, "invalid_argument", "min_support must be >= 1", "min_support");
  if (max_len < 1) return error_response(422, "invalid_argument", "max_len must be >= 1", "max_len");
  SequenceMode mode = SequenceMode::player;
  if (auto s = p.get("mode")) {
    if (*s == "role") {
      mode = SequenceMode::role;
    } else if (*s != "player") {
      return error_response(422, "invalid_argument", "mode must be player or role", "mode");
    }
  }
  const auto corpus = mining_corpus(m->view(team), team, mode);
  if (corpus.sequences.empty()) {
    return error_response(422, "empty_corpus", "team has no phases to mine", "team");
  }
  const auto found = prefixspan(corpus.sequences, static_cast<int>(min_support), static_cast<int>(max_len));
  json patterns = json::array();
  for (const auto& sp : found) {
    json labels = json::array();
    for (int t : sp.tokens) labels.push_back(corpus.labels.at(static_cast<std::size_t>(t)));
    patterns.push_back(
        {{"tokens", std::move(labels)}, {"token_ids", sp.tokens}, {"support", sp.support}, {"length", sp.tokens.size()}});
  }
  return json_response(200, {{"match_id", id},
                             {"team", team},
                             {"mode", to_string(mode)},
                             {"min_support", min_support},
                             {"max_len", max_len},
                             {"sequences", corpus.sequences.size()},
                             {"patterns", std::move(patterns)}});
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
  auto adapter = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    HttpResponse out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  impl_->server.Get(".*", adapter);
  impl_->server.Post(".*", adapter);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

int run_server(const ServiceConfig& config) {
  Service service(config);
  HttpServer server(service);
  if (server.bind(config.host, config.port) < 0) {
    std::cerr << "passtopic: cannot listen on " << config.host << ':' << config.port << '\n';
    return 1;
  }
  std::cerr << "passtopic: serving " << config.data_dir << " on " << config.host << ':' << config.port << '\n';
  return server.listen() ? 0 : 1;
}

}  // namespace passtopic
