#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "passtopic/pattern_engine.hpp"
#include "passtopic/pitch_metrics.hpp"

namespace passtopic {

// JSON views shared by the HTTP service and the batch exporter. Every view
// takes a match that is segmented and normalized for the detection's team.

enum class PatternSort { frequency, shootings };

std::optional<PatternSort> parse_pattern_sort(const std::string& text);

struct ReportConfig {
  PressureParams pressure;
  GridConfig grid;
};

nlohmann::json region_to_json(RegionId r);
nlohmann::json event_to_json(const Event& e);
nlohmann::json summary_to_json(const PhaseSummary& s);

// Number of assigned phases ending in a shot or goal.
int pattern_shootings(const MatchRecord& match, const Detection& d, int pattern_id);

// Build-up patterns sorted by the chosen attribute (ties by pattern id), with
// the counter-attack aggregate always last.
nlohmann::json patterns_view(const MatchRecord& match, const Detection& d, PatternSort sort,
                             const ReportConfig& config = {});

nlohmann::json flow_view(const MatchRecord& match, const Detection& d, const ReportConfig& config = {});

nlohmann::json phase_detail_view(const MatchRecord& match, const Phase& phase, const ReportConfig& config = {});

nlohmann::json player_stats_to_json(const PlayerId& id, const PlayerStats& s);

// Flat tables, tab-separated with a header row.
std::string flow_tsv(const nlohmann::json& flow);
std::string patterns_tsv(const nlohmann::json& patterns);
// phase_id, defense_bar, mean_pressure, pass_count, end_event
std::string metrics_tsv(const nlohmann::json& flow);

}  // namespace passtopic
