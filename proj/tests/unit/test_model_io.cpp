#include <doctest.h>

#include "passtopic/error.hpp"
#include "passtopic/match_data.hpp"
#include "passtopic/match_io.hpp"
#include "passtopic/model_io.hpp"
#include "synth.hpp"

using namespace passtopic;

namespace {

Detection fixture_detection(int k, std::uint64_t seed) {
  MatchRecord m = parse_match(synth::read_text(synth::fixture_dir() / "match_13.json"));
  m = normalize_direction(std::move(m), "HOM");
  segment(m);
  DetectConfig cfg;
  cfg.nmf.seed = seed;
  return detect_patterns(m, "HOM", k, cfg);
}

}  // namespace

TEST_CASE("export is byte stable and reloads without refitting") {
  Detection d = fixture_detection(3, 7);
  const std::string text = export_model(d);
  CHECK(text == export_model(fixture_detection(3, 7)));
  CHECK(text.back() == '\n');

  Detection back = import_model(text);
  CHECK(export_model(back) == text);
  CHECK(back.k == 3);
  CHECK(back.config.nmf.seed == 7);
  CHECK(back.dictionary == d.dictionary);
  REQUIRE(back.model);
  CHECK(back.model->W == d.model->W);
  CHECK(back.model->H == d.model->H);
  CHECK(back.model->objective_trace == d.model->objective_trace);
  CHECK(back.assignments == d.assignments);
  REQUIRE(back.patterns.size() == d.patterns.size());
  for (std::size_t i = 0; i < d.patterns.size(); ++i) {
    CHECK(back.patterns[i].weights == d.patterns[i].weights);
    CHECK(back.patterns[i].key_players == d.patterns[i].key_players);
    CHECK(back.patterns[i].style == d.patterns[i].style);
  }
}

TEST_CASE("document layout") {
  auto doc = nlohmann::json::parse(export_model(fixture_detection(2, 1)));
  CHECK(doc["format"] == kModelFormat);
  CHECK(doc["team"] == "HOM");
  CHECK(doc["dictionary"].size() == 12);
  CHECK(doc["patterns"].size() == 3);
  CHECK(doc["nmf"]["W"].size() == 12);
  CHECK(doc["nmf"]["H"].size() == 2);
  CHECK(doc["nmf"]["H"][0].size() == 10);
}

TEST_CASE("different seeds give different exports") {
  CHECK(export_model(fixture_detection(3, 7)) != export_model(fixture_detection(3, 8)));
}

TEST_CASE("rejects foreign documents") {
  CHECK_THROWS_AS(import_model("not json"), Error);
  CHECK_THROWS_AS(import_model(R"({"format": "other"})"), Error);
  auto doc = nlohmann::json::parse(export_model(fixture_detection(2, 1)));
  doc["nmf"]["W"].erase(0);
  CHECK_THROWS_AS(import_model(doc.dump()), Error);
}
