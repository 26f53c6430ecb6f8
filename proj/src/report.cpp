#include "passtopic/report.hpp"

#include <algorithm>
#include <sstream>

#include "passtopic/error.hpp"
#include "passtopic/match_io.hpp"

namespace passtopic {

using nlohmann::json;

std::optional<PatternSort> parse_pattern_sort(const std::string& text) {
  if (text == "frequency") return PatternSort::frequency;
  if (text == "shootings") return PatternSort::shootings;
  return std::nullopt;
}

json region_to_json(RegionId r) {
  return {{"row", r.row}, {"col", r.col}, {"code", region_glyph(r).code}};
}

json event_to_json(const Event& e) {
  json out = {{"tag", e.tag == EventTag::other ? e.raw_tag : std::string(to_string(e.tag))},
              {"half", e.half},
              {"t", e.t}};
  out["team"] = e.team ? json(*e.team) : json(nullptr);
  out["actor"] = e.actor ? json(to_string(*e.actor)) : json(nullptr);
  if (!e.note.empty()) out["note"] = e.note;
  return out;
}

json summary_to_json(const PhaseSummary& s) {
  auto line = [](const LinePosition& l) { return json{{"line", l.line}, {"line_count", l.line_count}}; };
  return {{"first_passer", to_string(s.first_passer)},
          {"last_receiver", to_string(s.last_receiver)},
          {"first_formation_line", line(s.first_formation_line)},
          {"last_formation_line", line(s.last_formation_line)},
          {"first_region", region_to_json(s.first_region)},
          {"last_region", region_to_json(s.last_region)},
          {"pass_count", s.pass_count},
          {"end_event", event_to_json(s.end_event)}};
}

namespace {

std::vector<Phase> phases_for_pattern(const MatchRecord& match, const Detection& d, int pattern_id) {
  std::vector<Phase> out;
  for (const auto& p : match.phases) {
    if (p.team == d.team && d.pattern_of(p.id) == pattern_id) out.push_back(p);
  }
  return out;
}

// Passes attributed to each dictionary entry: the passer in player mode, the
// origin region in region mode.
std::vector<int> pass_bars(const std::vector<Phase>& phases, const PlayerDictionary& dict) {
  std::vector<int> bars(dict.size(), 0);
  for (const auto& phase : phases) {
    for (const auto& pass : phase.passes) {
      Word w = dict.mode() == WordMode::player ? Word(pass.passer) : Word(spatial_region(pass.origin));
      if (auto idx = dict.index_of(w)) ++bars[*idx];
    }
  }
  return bars;
}

json grid_to_json(const HeatmapGrid& g) {
  json rows = json::array();
  for (int ix = 0; ix < g.x_bins; ++ix) {
    json col = json::array();
    for (int iy = 0; iy < g.y_bins; ++iy) col.push_back(g.at(ix, iy));
    rows.push_back(std::move(col));
  }
  return {{"x_bins", g.x_bins}, {"y_bins", g.y_bins}, {"total", g.total()}, {"counts", std::move(rows)}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

int pattern_shootings(const MatchRecord& match, const Detection& d, int pattern_id) {
  int n = 0;
  for (const auto& p : phases_for_pattern(match, d, pattern_id)) {
    if (p.end_event.tag == EventTag::shot || p.end_event.tag == EventTag::goal) ++n;
  }
  return n;
}

json patterns_view(const MatchRecord& match, const Detection& d, PatternSort sort, const ReportConfig& config) {
  const auto team_phases = phases_of_team(match.phases, d.team);
  const auto overall = pass_bars(team_phases, d.dictionary);

  json players = json::array();
  for (std::size_t i = 0; i < d.dictionary.size(); ++i) {
    players.push_back({{"index", i}, {"label", d.dictionary.label(i)}, {"passes", overall[i]}});
  }

  struct Row {
    const PassingPattern* pattern;
    int shootings;
  };
  std::vector<Row> build_up;
  const PassingPattern* counter = nullptr;
  for (const auto& p : d.patterns) {
    if (p.style == Style::counter_attack) {
      counter = &p;
    } else {
      build_up.push_back({&p, pattern_shootings(match, d, p.pattern_id)});
    }
  }
  std::stable_sort(build_up.begin(), build_up.end(), [sort](const Row& a, const Row& b) {
    const int ka = sort == PatternSort::frequency ? a.pattern->frequency : a.shootings;
    const int kb = sort == PatternSort::frequency ? b.pattern->frequency : b.shootings;
    if (ka != kb) return ka > kb;
    return a.pattern->pattern_id < b.pattern->pattern_id;
  });
  if (counter) build_up.push_back({counter, pattern_shootings(match, d, counter->pattern_id)});

  json patterns = json::array();
  for (std::size_t rank = 0; rank < build_up.size(); ++rank) {
    const auto& [p, shootings] = build_up[rank];
    const auto phases = phases_for_pattern(match, d, p->pattern_id);
    const auto within = pass_bars(phases, d.dictionary);
    json weights = json::array();
    json bars = json::array();
    for (std::size_t i = 0; i < d.dictionary.size(); ++i) {
      weights.push_back({{"index", i}, {"label", d.dictionary.label(i)}, {"weight", p->weights.at(i)}});
      bars.push_back({{"index", i}, {"label", d.dictionary.label(i)}, {"overall", overall[i]}, {"within", within[i]}});
    }
    json keys = json::array();
    for (auto i : p->key_players) keys.push_back(d.dictionary.label(i));
    json phase_ids = json::array();
    for (const auto& ph : phases) phase_ids.push_back(ph.id);
    patterns.push_back({{"rank", rank},
                        {"pattern_id", p->pattern_id},
                        {"style", to_string(p->style)},
                        {"separated", p->style == Style::counter_attack},
                        {"frequency", p->frequency},
                        {"shootings", shootings},
                        {"key_players", std::move(keys)},
                        {"weights", std::move(weights)},
                        {"pass_bars", std::move(bars)},
                        {"phase_ids", std::move(phase_ids)},
                        {"heatmap", grid_to_json(pattern_heatmap(phases, config.grid))}});
  }
  return {{"match_id", match.match_id},
          {"team", d.team},
          {"k", d.k},
          {"word_mode", to_string(d.config.word_mode)},
          {"sort", sort == PatternSort::frequency ? "frequency" : "shootings"},
          {"players", std::move(players)},
          {"patterns", std::move(patterns)}};
}

json flow_view(const MatchRecord& match, const Detection& d, const ReportConfig& config) {
  json records = json::array();
  for (const auto& phase : match.phases) {
    if (phase.team != d.team) continue;
    auto pattern = d.pattern_of(phase.id);
    if (!pattern) throw Error(ErrorCode::not_found, "phase " + std::to_string(phase.id) + " has no pattern", "model");
    const auto metrics = phase_metrics(phase, match, config.pressure);
    records.push_back({{"phase_id", phase.id},
                       {"half", phase.half},
                       {"t_start", phase.start_time()},
                       {"t_end", phase.end_time()},
                       {"pattern_id", *pattern},
                       {"defense_bar", optional_number(metrics.defense_bar)},
                       {"mean_pressure", optional_number(metrics.mean_pressure)},
                       {"end_event", event_to_json(phase.end_event)},
                       {"style", to_string(phase.style)},
                       {"style_is_heuristic", phase.style_is_heuristic},
                       {"summary", summary_to_json(phase_summary(phase, match))}});
  }
  return {{"match_id", match.match_id}, {"team", d.team}, {"phases", std::move(records)}};
}

json phase_detail_view(const MatchRecord& match, const Phase& phase, const ReportConfig& config) {
  json passes = json::array();
  json table = json::array();
  bool any_context = false;
  for (std::size_t i = 0; i < phase.passes.size(); ++i) {
    const Pass& p = phase.passes[i];
    json entry = to_json(p);
    entry.erase("type");
    entry["index"] = i;
    entry["passer"] = to_string(p.passer);
    entry["receiver"] = to_string(p.receiver);
    try {
      const auto ctx = defense_context(p, match, config.pressure);
      json opponents = json::array();
      for (const auto& [id, pos] : ctx.opponents) {
        opponents.push_back({{"player", to_string(id)}, {"x", pos.x}, {"y", pos.y}});
      }
      entry["defense"] = {{"frame_t", ctx.frame_t},
                          {"opponents", std::move(opponents)},
                          {"covered_area", ctx.covered_area},
                          {"pressure", ctx.pressure}};
      table.push_back({{"pass_index", i}, {"covered_area", ctx.covered_area}, {"pressure", ctx.pressure}});
      any_context = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_frame && e.code() != ErrorCode::unknown_direction) throw;
      entry["defense"] = nullptr;
      table.push_back({{"pass_index", i}, {"covered_area", nullptr}, {"pressure", nullptr}});
    }
    passes.push_back(std::move(entry));
  }

  json dribbles = json::array();
  for (const auto& d : dribble_segments(phase)) {
    dribbles.push_back({{"player", to_string(d.player)},
                        {"t_start", d.t_start},
                        {"t_end", d.t_end},
                        {"from", to_json(d.from)},
                        {"to", to_json(d.to)}});
  }

  // Padded by the frame tolerance so that short phases still animate.
  json frames = json::array();
  const double lo = phase.start_time() - kFrameTolerance, hi = phase.end_time() + kFrameTolerance;
  for (const auto& f : match.frames) {
    if (f.half != phase.half || f.t < lo || f.t > hi) continue;
    json positions = json::array();
    for (const auto& [id, pos] : f.positions) {
      positions.push_back({{"player", to_string(id)}, {"x", pos.x}, {"y", pos.y}});
    }
    json frame = {{"t", f.t}, {"positions", std::move(positions)}};
    frame["ball"] = f.ball ? to_json(*f.ball) : json(nullptr);
    frames.push_back(std::move(frame));
  }

  const auto metrics = phase_metrics(phase, match, config.pressure);
  auto series = [](const std::vector<std::pair<double, double>>& s) {
    json out = json::array();
    for (const auto& [t, v] : s) out.push_back({t, v});
    return out;
  };

  return {{"match_id", match.match_id},
          {"phase_id", phase.id},
          {"team", phase.team},
          {"half", phase.half},
          {"style", to_string(phase.style)},
          {"style_is_heuristic", phase.style_is_heuristic},
          {"passes", std::move(passes)},
          {"dribbles", std::move(dribbles)},
          {"end_event", event_to_json(phase.end_event)},
          {"summary", summary_to_json(phase_summary(phase, match))},
          {"statistics", std::move(table)},
          {"metrics_available", any_context},
          {"covered_area_series", series(metrics.covered_area)},
          {"pressure_series", series(metrics.pressure)},
          {"defense_bar", optional_number(metrics.defense_bar)},
          {"pressure_model", {{"approximate", true},
                              {"d_front", config.pressure.d_front},
                              {"d_back", config.pressure.d_back},
                              {"exponent", config.pressure.exponent}}},
          {"frames", std::move(frames)}};
}

json player_stats_to_json(const PlayerId& id, const PlayerStats& s) {
  return {{"player", to_string(id)},
          {"max_speed", s.max_speed},
          {"dash_distance", s.dash_distance},
          {"total_distance", s.total_distance},
          {"pass_count", s.pass_count}};
}

namespace {

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string flow_tsv(const json& flow) {
  std::ostringstream out;
  out << "phase_id\thalf\tpattern_id\tstyle\tdefense_bar\tmean_pressure\tpass_count\tfirst_passer\tlast_receiver"
         "\tfirst_region\tlast_region\tend_event\n";
  for (const auto& r : flow.at("phases")) {
    const auto& s = r.at("summary");
    out << r.at("phase_id") << '\t' << r.at("half") << '\t' << r.at("pattern_id") << '\t' << cell(r.at("style"))
        << '\t' << cell(r.at("defense_bar")) << '\t' << cell(r.at("mean_pressure")) << '\t' << s.at("pass_count")
        << '\t' << cell(s.at("first_passer")) << '\t' << cell(s.at("last_receiver")) << '\t'
        << cell(s.at("first_region").at("code")) << '\t' << cell(s.at("last_region").at("code")) << '\t'
        << cell(r.at("end_event").at("tag")) << '\n';
  }
  return out.str();
}

std::string patterns_tsv(const json& patterns) {
  std::ostringstream out;
  out << "rank\tpattern_id\tstyle\tfrequency\tshootings\tkey_players\n";
  for (const auto& p : patterns.at("patterns")) {
    std::string keys;
    for (const auto& k : p.at("key_players")) {
      if (!keys.empty()) keys += ' ';
      keys += k.get<std::string>();
    }
    out << p.at("rank") << '\t' << p.at("pattern_id") << '\t' << cell(p.at("style")) << '\t' << p.at("frequency")
        << '\t' << p.at("shootings") << '\t' << keys << '\n';
  }
  return out.str();
}

std::string metrics_tsv(const json& flow) {
  std::ostringstream out;
  out << "phase_id\tdefense_bar\tmean_pressure\tpass_count\tend_event\n";
  for (const auto& r : flow.at("phases")) {
    out << r.at("phase_id") << '\t' << cell(r.at("defense_bar")) << '\t' << cell(r.at("mean_pressure")) << '\t'
        << r.at("summary").at("pass_count") << '\t' << cell(r.at("end_event").at("tag")) << '\n';
  }
  return out.str();
}

}  // namespace passtopic
