#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "passtopic/pattern_engine.hpp"

namespace passtopic {

inline constexpr const char* kModelFormat = "passtopic-model/1";

// Everything needed to serve a detection again without refitting: dictionary
// order, W, H, k, seed, configuration, assignments, objective trace, and the
// extracted patterns.
nlohmann::json detection_to_json(const Detection& d);
Detection detection_from_json(const nlohmann::json& doc);

// Pretty-printed document with a trailing newline. Byte-stable for a given
// detection: doubles are written in shortest round-trip form.
std::string export_model(const Detection& d);
Detection import_model(std::string_view text);

}  // namespace passtopic
