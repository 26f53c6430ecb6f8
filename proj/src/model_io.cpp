#include "passtopic/model_io.hpp"

#include "passtopic/error.hpp"

namespace passtopic {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const char* field) {
  if (!j.is_array() || j.size() != rows) throw Error(ErrorCode::malformed, std::string(field) + " has wrong shape", field);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw Error(ErrorCode::malformed, std::string(field) + " has wrong shape", field);
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json dictionary_to_json(const PlayerDictionary& dict) {
  json entries = json::array();
  for (const auto& w : dict.entries()) {
    if (const auto* p = std::get_if<PlayerId>(&w)) {
      entries.push_back({{"team", p->team}, {"shirt", p->shirt}});
    } else {
      const auto& r = std::get<RegionId>(w);
      entries.push_back({{"row", r.row}, {"col", r.col}});
    }
  }
  return entries;
}

json pattern_to_json(const PassingPattern& p) {
  return {{"pattern_id", p.pattern_id},
          {"style", to_string(p.style)},
          {"frequency", p.frequency},
          {"weights", p.weights},
          {"key_players", p.key_players}};
}

}  // namespace

json detection_to_json(const Detection& d) {
  json assignments = json::array();
  for (const auto& a : d.assignments) {
    assignments.push_back({{"phase_id", a.phase_id}, {"pattern_id", a.pattern_id}, {"degenerate", a.degenerate}});
  }
  json patterns = json::array();
  for (const auto& p : d.patterns) patterns.push_back(pattern_to_json(p));

  json doc = {
      {"format", kModelFormat},
      {"team", d.team},
      {"k", d.k},
      {"seed", d.config.nmf.seed},
      {"config",
       {{"max_iters", d.config.nmf.max_iters},
        {"tol", d.config.nmf.tol},
        {"theta", d.config.theta},
        {"count_mode", to_string(d.config.count_mode)},
        {"word_mode", to_string(d.config.word_mode)}}},
      {"dictionary", dictionary_to_json(d.dictionary)},
      {"assignments", std::move(assignments)},
      {"patterns", std::move(patterns)},
  };
  if (d.model) {
    const auto& m = *d.model;
    json model_assignments = json::array();
    for (const auto& a : m.assignments) model_assignments.push_back(a.pattern_id);
    doc["nmf"] = {{"phase_ids", m.phase_ids},
                  {"W", matrix_to_json(m.W)},
                  {"H", matrix_to_json(m.H)},
                  {"objective_trace", m.objective_trace},
                  {"converged", m.converged},
                  {"iterations", m.objective_trace.size() - 1},
                  {"assignments", std::move(model_assignments)}};
  } else {
    doc["nmf"] = nullptr;
  }
  return doc;
}

Detection detection_from_json(const json& doc) {
  try {
    if (doc.at("format") != kModelFormat) throw Error(ErrorCode::malformed, "unsupported model format", "format");
    Detection d;
    d.team = doc.at("team").get<std::string>();
    d.k = doc.at("k").get<int>();
    const json& cfg = doc.at("config");
    d.config.nmf.seed = doc.at("seed").get<std::uint64_t>();
    d.config.nmf.max_iters = cfg.at("max_iters").get<int>();
    d.config.nmf.tol = cfg.at("tol").get<double>();
    d.config.theta = cfg.at("theta").get<double>();
    auto count_mode = parse_count_mode(cfg.at("count_mode").get<std::string>());
    auto word_mode = parse_word_mode(cfg.at("word_mode").get<std::string>());
    if (!count_mode || !word_mode) throw Error(ErrorCode::malformed, "unknown mode in model config", "config");
    d.config.count_mode = *count_mode;
    d.config.word_mode = *word_mode;

    if (d.config.word_mode == WordMode::region) {
      d.dictionary = build_region_dictionary();
    } else {
      std::vector<PlayerId> ids;
      for (const auto& e : doc.at("dictionary")) ids.push_back({e.at("team").get<std::string>(), e.at("shirt").get<int>()});
      d.dictionary = build_dictionary(std::move(ids));
    }

    for (const auto& a : doc.at("assignments")) {
      d.assignments.push_back(
          {a.at("phase_id").get<int>(), a.at("pattern_id").get<int>(), a.at("degenerate").get<bool>()});
    }
    for (const auto& p : doc.at("patterns")) {
      PassingPattern pattern;
      pattern.pattern_id = p.at("pattern_id").get<int>();
      auto style = parse_style(p.at("style").get<std::string>());
      if (!style) throw Error(ErrorCode::malformed, "unknown pattern style", "patterns");
      pattern.style = *style;
      pattern.frequency = p.at("frequency").get<int>();
      pattern.weights = p.at("weights").get<std::vector<double>>();
      pattern.key_players = p.at("key_players").get<std::vector<std::size_t>>();
      d.patterns.push_back(std::move(pattern));
    }

    const json& nmf = doc.at("nmf");
    if (!nmf.is_null()) {
      PatternModel m;
      m.k = d.k;
      m.config = d.config.nmf;
      m.phase_ids = nmf.at("phase_ids").get<std::vector<int>>();
      m.W = matrix_from_json(nmf.at("W"), d.dictionary.size(), static_cast<std::size_t>(d.k), "W");
      m.H = matrix_from_json(nmf.at("H"), static_cast<std::size_t>(d.k), m.phase_ids.size(), "H");
      m.objective_trace = nmf.at("objective_trace").get<std::vector<double>>();
      m.converged = nmf.at("converged").get<bool>();
      m.assignments = assign_phases(m);
      d.model = std::move(m);
    }
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed, std::string("model document: ") + e.what(), "model");
  }
}

std::string export_model(const Detection& d) { return detection_to_json(d).dump(2) + "\n"; }

Detection import_model(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::malformed, "model document is not valid JSON", "model");
  return detection_from_json(doc);
}

}  // namespace passtopic
