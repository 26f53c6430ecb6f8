#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "passtopic/types.hpp"

namespace passtopic {

// Coordinates may overshoot the pitch by this much (tracking jitter); they are
// clamped into [0, 105] x [0, 68] on load. Anything further out is rejected.
inline constexpr double kPitchTolerance = 1.0;

// Parses and validates a match document. Phases are not derived here.
MatchRecord parse_match(std::string_view raw);
MatchRecord match_from_json(const nlohmann::json& doc);

// Canonical document for a record; parse_match(match_to_json(m)) reproduces m
// (minus derived phases).
nlohmann::json match_to_json(const MatchRecord& match);

nlohmann::json to_json(const PlayerId& id);
nlohmann::json to_json(const Position& p);
nlohmann::json to_json(const Pass& p);
nlohmann::json to_json(const Event& e);

}  // namespace passtopic
