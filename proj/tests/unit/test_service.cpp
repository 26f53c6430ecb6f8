#include <doctest.h>

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "passtopic/match_data.hpp"
#include "passtopic/match_io.hpp"
#include "passtopic/seqmine.hpp"
#include "passtopic/service.hpp"
#include "synth.hpp"

using namespace passtopic;
using nlohmann::json;

namespace {

const std::string& fixture_text() {
  static const std::string text = synth::read_text(synth::fixture_dir() / "match_13.json");
  return text;
}

ServiceConfig config_for(const synth::TempDir& dir) {
  ServiceConfig c;
  c.data_dir = dir.path();
  return c;
}

HttpResponse call(Service& s, const std::string& method, const std::string& path,
                  std::map<std::string, std::string> query = {}, std::string body = {}) {
  return s.handle({method, path, std::move(query), std::move(body)});
}

json body_of(const HttpResponse& r) { return json::parse(r.body); }

std::string upload(Service& s) {
  auto r = call(s, "POST", "/matches", {}, fixture_text());
  REQUIRE(r.status / 100 == 2);
  return body_of(r).at("match_id");
}

std::string fit(Service& s, const std::string& id, std::map<std::string, std::string> q) {
  auto r = call(s, "POST", "/matches/" + id + "/detect", std::move(q));
  REQUIRE(r.status / 100 == 2);
  return body_of(r).at("model");
}

}  // namespace

TEST_CASE("upload is idempotent and rejects malformed bodies") {
  synth::TempDir dir("svc");
  Service s(config_for(dir));
  auto first = call(s, "POST", "/matches", {}, fixture_text());
  CHECK(first.status == 201);
  CHECK(body_of(first).at("created") == true);
  auto again = call(s, "POST", "/matches", {}, fixture_text());
  CHECK(again.status == 200);
  CHECK(body_of(again).at("match_id") == body_of(first).at("match_id"));

  CHECK(call(s, "POST", "/matches", {}, "{").status == 400);
  CHECK(call(s, "POST", "/matches", {}, R"({"match_id": "x"})").status == 400);

  const std::string id = body_of(first).at("match_id");
  auto info = body_of(call(s, "GET", "/matches/" + id));
  CHECK(info.at("teams") == json::array({"HOM", "AWY"}));
  CHECK(info.at("phases") == 18);
  CHECK(call(s, "GET", "/matches/nope").status == 404);
  CHECK(call(s, "GET", "/elsewhere").status == 404);
}

TEST_CASE("detect: key, cache and validation") {
  synth::TempDir dir("svc");
  Service s(config_for(dir));
  const std::string id = upload(s);

  auto r = call(s, "POST", "/matches/" + id + "/detect", {{"team", "HOM"}, {"k", "5"}, {"seed", "3"}});
  CHECK(r.status == 201);
  const std::string key = body_of(r).at("model");
  CHECK(body_of(r).at("cached") == false);
  auto cached = call(s, "POST", "/matches/" + id + "/detect", {{"team", "HOM"}, {"k", "5"}, {"seed", "3"}});
  CHECK(cached.status == 200);
  CHECK(body_of(cached).at("model") == key);
  CHECK(body_of(cached).at("cached") == true);

  auto model = call(s, "GET", "/matches/" + id + "/models/" + key);
  CHECK(model.status == 200);
  CHECK(body_of(model).at("patterns").size() == 6);

  CHECK(call(s, "POST", "/matches/" + id + "/detect", {{"k", "0"}}).status == 422);
  CHECK(body_of(call(s, "POST", "/matches/" + id + "/detect", {{"k", "0"}})).at("error") == "invalid_k");
  CHECK(call(s, "POST", "/matches/" + id + "/detect", {{"k", "x"}}).status == 422);
  CHECK(call(s, "POST", "/matches/" + id + "/detect", {{"mode", "tfidf"}}).status == 422);
  CHECK(call(s, "POST", "/matches/" + id + "/detect", {{"team", "ZZZ"}}).status == 404);
  CHECK(call(s, "POST", "/matches/nope/detect").status == 404);
  CHECK(call(s, "POST", "/matches/" + id + "/detect", {{"corpus", "multi"}}).status == 501);
  CHECK(call(s, "GET", "/matches/" + id + "/models/0000").status == 404);
}

TEST_CASE("detect defaults come from the configuration") {
  synth::TempDir dir("svc");
  auto cfg = config_for(dir);
  cfg.default_k = 2;
  Service s(cfg);
  const std::string id = upload(s);
  const std::string key = fit(s, id, {});
  CHECK(body_of(call(s, "GET", "/matches/" + id + "/models/" + key)).at("k") == 2);
  CHECK(fit(s, id, {{"k", "2"}, {"seed", "0"}, {"team", "HOM"}}) == key);
}

TEST_CASE("detect reports a blown time budget") {
  synth::TempDir dir("svc");
  auto cfg = config_for(dir);
  cfg.detect_timeout = std::chrono::milliseconds(0);
  Service s(cfg);
  const std::string id = upload(s);
  auto r = call(s, "POST", "/matches/" + id + "/detect", {{"k", "3"}, {"tol", "0"}, {"max_iters", "100000"}});
  CHECK(r.status == 504);
}

TEST_CASE("patterns and flow read a stored model") {
  synth::TempDir dir("svc");
  Service s(config_for(dir));
  const std::string id = upload(s);
  const std::string key = fit(s, id, {{"team", "HOM"}, {"k", "3"}, {"seed", "7"}});

  auto p = call(s, "GET", "/matches/" + id + "/patterns", {{"model", key}, {"sort", "shootings"}});
  REQUIRE(p.status == 200);
  auto pj = body_of(p);
  CHECK(pj.at("model") == key);
  CHECK(pj.at("patterns").size() == 4);
  CHECK(pj.at("patterns").back().at("separated") == true);

  auto f = call(s, "GET", "/matches/" + id + "/flow", {{"model", key}});
  REQUIRE(f.status == 200);
  CHECK(body_of(f).at("phases").size() == 13);

  CHECK(call(s, "GET", "/matches/" + id + "/patterns").status == 404);
  CHECK(call(s, "GET", "/matches/" + id + "/flow", {{"model", "ffff"}}).status == 404);
  CHECK(call(s, "GET", "/matches/" + id + "/patterns", {{"model", key}, {"sort", "goals"}}).status == 422);
  CHECK(call(s, "GET", "/matches/" + id + "/flow", {{"model", key}, {"team", "AWY"}}).status == 422);
}

TEST_CASE("phase detail") {
  synth::TempDir dir("svc");
  Service s(config_for(dir));
  const std::string id = upload(s);
  auto r = call(s, "GET", "/matches/" + id + "/phases/0");
  REQUIRE(r.status == 200);
  auto j = body_of(r);
  CHECK(j.at("phase_id") == 0);
  CHECK(!j.at("passes").empty());
  CHECK(j.at("statistics").size() == j.at("passes").size());
  // an away phase comes back in the away team's orientation
  bool saw_away = false;
  for (int pid = 0; pid < 18; ++pid) {
    auto pj = body_of(call(s, "GET", "/matches/" + id + "/phases/" + std::to_string(pid)));
    if (pj.at("team") == "AWY") saw_away = true;
  }
  CHECK(saw_away);
  CHECK(call(s, "GET", "/matches/" + id + "/phases/18").status == 404);
  CHECK(call(s, "GET", "/matches/" + id + "/phases/-1").status == 404);
  CHECK(call(s, "GET", "/matches/" + id + "/phases/x").status == 404);
}

TEST_CASE("player stats") {
  synth::TempDir dir("svc");
  Service s(config_for(dir));
  const std::string id = upload(s);
  auto r = call(s, "GET", "/matches/" + id + "/players/HOM#7/stats");
  REQUIRE(r.status == 200);
  auto j = body_of(r);
  CHECK(j.at("player") == "HOM#7");
  CHECK(j.at("total_distance").get<double>() > 0.0);
  CHECK(j.at("pass_count") == 7);

  auto first_half = body_of(call(s, "GET", "/matches/" + id + "/players/7/stats", {{"team", "HOM"}, {"span", "1"}}));
  CHECK(first_half.at("total_distance").get<double>() < j.at("total_distance").get<double>());
  CHECK(call(s, "GET", "/matches/" + id + "/players/HOM:7/stats", {{"span", "1:0-600"}}).status == 200);

  CHECK(call(s, "GET", "/matches/" + id + "/players/HOM#77/stats").status == 404);
  CHECK(call(s, "GET", "/matches/" + id + "/players/HOM#7/stats", {{"span", "1:90000-99999"}}).status == 422);
  CHECK(call(s, "GET", "/matches/" + id + "/players/HOM#7/stats", {{"span", "3"}}).status == 422);
  CHECK(call(s, "GET", "/matches/" + id + "/players/HOM#7/stats", {{"span", "1:abc"}}).status == 422);
}

TEST_CASE("mine matches the library miner") {
  synth::TempDir dir("svc");
  Service s(config_for(dir));
  const std::string id = upload(s);
  auto r = call(s, "POST", "/matches/" + id + "/mine", {{"team", "HOM"}, {"min_support", "2"}, {"max_len", "4"}});
  REQUIRE(r.status == 200);
  auto j = body_of(r);

  MatchRecord m = parse_match(fixture_text());
  m = normalize_direction(std::move(m), "HOM");
  segment(m);
  const auto corpus = mining_corpus(m, "HOM", SequenceMode::player);
  const auto expected = prefixspan(corpus.sequences, 2, 4);
  REQUIRE(j.at("patterns").size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(j.at("patterns")[i].at("token_ids").get<std::vector<int>>() == expected[i].tokens);
    CHECK(j.at("patterns")[i].at("support") == expected[i].support);
  }
  CHECK(j.at("sequences") == 13);

  auto roles = call(s, "POST", "/matches/" + id + "/mine", {{"mode", "role"}});
  CHECK(roles.status == 200);
  CHECK(body_of(roles).at("mode") == "role");
  CHECK(call(s, "POST", "/matches/" + id + "/mine", {{"min_support", "0"}}).status == 422);
  CHECK(call(s, "POST", "/matches/" + id + "/mine", {{"mode", "zone"}}).status == 422);
}

TEST_CASE("persistence survives a restart byte for byte") {
  synth::TempDir dir("svc");
  std::string id, key, model, flow;
  {
    Service s(config_for(dir));
    id = upload(s);
    key = fit(s, id, {{"team", "HOM"}, {"k", "3"}, {"seed", "7"}});
    model = call(s, "GET", "/matches/" + id + "/models/" + key).body;
    flow = call(s, "GET", "/matches/" + id + "/flow", {{"model", key}}).body;
  }
  Service restarted(config_for(dir));
  CHECK(call(restarted, "GET", "/matches/" + id + "/models/" + key).body == model);
  CHECK(call(restarted, "GET", "/matches/" + id + "/flow", {{"model", key}}).body == flow);
  auto again = call(restarted, "POST", "/matches/" + id + "/detect", {{"team", "HOM"}, {"k", "3"}, {"seed", "7"}});
  CHECK(again.status == 200);
  CHECK(body_of(again).at("cached") == true);
  CHECK(call(restarted, "POST", "/matches", {}, fixture_text()).status == 200);
}

TEST_CASE("model keys separate parameters") {
  DetectConfig a, b;
  b.nmf.seed = 1;
  CHECK(model_key("HOM", 3, a) == model_key("HOM", 3, a));
  CHECK(model_key("HOM", 3, a) != model_key("HOM", 3, b));
  CHECK(model_key("HOM", 3, a) != model_key("HOM", 4, a));
  CHECK(model_key("HOM", 3, a) != model_key("AWY", 3, a));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("environment overrides") {
  ::setenv("PASSTOPIC_PORT", "9123", 1);
  ::setenv("PASSTOPIC_DEFAULT_K", "7", 1);
  ::setenv("PASSTOPIC_DATA_DIR", "/tmp/somewhere", 1);
  auto c = ServiceConfig::from_env();
  CHECK(c.port == 9123);
  CHECK(c.default_k == 7);
  CHECK(c.data_dir == "/tmp/somewhere");
  ::setenv("PASSTOPIC_PORT", "many", 1);
  CHECK_THROWS(ServiceConfig::from_env());
  ::unsetenv("PASSTOPIC_PORT");
  ::unsetenv("PASSTOPIC_DEFAULT_K");
  ::unsetenv("PASSTOPIC_DATA_DIR");
  CHECK(ServiceConfig::from_env().port == 8080);
}

TEST_CASE("http adapter") {
  synth::TempDir dir("svc");
  Service s(config_for(dir));
  HttpServer server(s);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread loop([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  auto posted = client.Post("/matches", fixture_text(), "application/json");
  REQUIRE(posted);
  CHECK(posted->status == 201);
  const std::string id = json::parse(posted->body).at("match_id");
  auto detected = client.Post("/matches/" + id + "/detect?team=HOM&k=3&seed=7", "", "text/plain");
  REQUIRE(detected);
  CHECK(detected->status == 201);
  const std::string key = json::parse(detected->body).at("model");
  auto flow = client.Get("/matches/" + id + "/flow?model=" + key);
  REQUIRE(flow);
  CHECK(flow->status == 200);
  CHECK(flow->get_header_value("Content-Type").rfind("application/json", 0) == 0);
  CHECK(json::parse(flow->body).at("phases").size() == 13);
  auto missing = client.Get("/matches/none");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  loop.join();
}
