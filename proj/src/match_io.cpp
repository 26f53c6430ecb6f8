#include "passtopic/match_io.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "passtopic/error.hpp"

namespace passtopic {

using nlohmann::json;

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& field, const std::string& msg) {
  throw Error(code, field + ": " + msg, field);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail(ErrorCode::malformed, where + "." + key, "missing required key");
  }
  return obj.at(key);
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(ErrorCode::malformed, field, "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) fail(ErrorCode::malformed, field, "non-finite number");
  return d;
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(ErrorCode::malformed, field, "expected an integer");
  return v.get<int>();
}

std::string string(const json& v, const std::string& field) {
  if (!v.is_string()) fail(ErrorCode::malformed, field, "expected a string");
  return v.get<std::string>();
}

int half_field(const json& obj, const std::string& where) {
  int half = obj.contains("half") ? integer(obj.at("half"), where + ".half") : 1;
  if (half != 1 && half != 2) fail(ErrorCode::malformed, where + ".half", "half must be 1 or 2");
  return half;
}

double clamp_axis(double v, double limit, const std::string& field) {
  if (v < -kPitchTolerance || v > limit + kPitchTolerance) {
    fail(ErrorCode::out_of_bounds, field, "coordinate " + std::to_string(v) + " outside pitch");
  }
  return std::clamp(v, 0.0, limit);
}

Position position(const json& v, const std::string& field) {
  if (!v.is_object()) fail(ErrorCode::malformed, field, "expected {x, y}");
  return {clamp_axis(number(require(v, "x", field), field + ".x"), kPitchLength, field + ".x"),
          clamp_axis(number(require(v, "y", field), field + ".y"), kPitchWidth, field + ".y")};
}

std::optional<AttackDirection> direction(const json& v, const std::string& field) {
  if (v.is_null()) return std::nullopt;
  auto s = string(v, field);
  if (s == "right" || s == "increasing_x") return AttackDirection::increasing_x;
  if (s == "left" || s == "decreasing_x") return AttackDirection::decreasing_x;
  fail(ErrorCode::unknown_direction, field, "unknown attack direction '" + s + "'");
}

class Parser {
 public:
  MatchRecord run(const json& doc) {
    if (!doc.is_object()) fail(ErrorCode::malformed, "$", "document must be an object");
    match_.match_id = string(require(doc, "match_id", "$"), "match_id");
    parse_teams(require(doc, "teams", "$"));
    if (doc.contains("frames")) parse_frames(doc.at("frames"));
    if (doc.contains("events")) parse_events(doc.at("events"));
    if (doc.contains("phase_styles")) parse_styles(doc.at("phase_styles"));
    return std::move(match_);
  }

 private:
  void parse_teams(const json& teams) {
    if (!teams.is_array() || teams.size() != 2) {
      fail(ErrorCode::malformed, "teams", "expected exactly two teams");
    }
    for (std::size_t i = 0; i < 2; ++i) {
      const std::string where = "teams[" + std::to_string(i) + "]";
      const json& t = teams[i];
      TeamRoster roster;
      roster.id = string(require(t, "id", where), where + ".id");
      if (roster.id.empty()) fail(ErrorCode::malformed, where + ".id", "empty team id");

      const json& players = require(t, "players", where);
      if (!players.is_array()) fail(ErrorCode::malformed, where + ".players", "expected an array");
      std::set<int> shirts;
      for (std::size_t j = 0; j < players.size(); ++j) {
        const std::string pw = where + ".players[" + std::to_string(j) + "]";
        const json& p = players[j];
        RosterEntry entry;
        entry.shirt = integer(require(p, "shirt", pw), pw + ".shirt");
        if (entry.shirt < 1) fail(ErrorCode::malformed, pw + ".shirt", "shirt must be >= 1");
        if (!shirts.insert(entry.shirt).second) {
          fail(ErrorCode::duplicate_entry, pw + ".shirt", "duplicate shirt " + std::to_string(entry.shirt));
        }
        if (p.contains("name")) entry.name = string(p.at("name"), pw + ".name");
        if (p.contains("role")) {
          auto role = parse_role(string(p.at("role"), pw + ".role"));
          if (!role) fail(ErrorCode::malformed, pw + ".role", "unknown role");
          entry.role = *role;
        }
        entry.line = entry.role == Role::goalkeeper ? -1 : 0;
        if (p.contains("line")) entry.line = integer(p.at("line"), pw + ".line");
        roster.players.push_back(std::move(entry));
      }

      if (t.contains("formation_by_half")) {
        const json& f = t.at("formation_by_half");
        if (f.is_string()) {
          roster.formation_by_half = {f.get<std::string>(), f.get<std::string>()};
        } else if (f.is_array() && f.size() <= 2) {
          for (std::size_t h = 0; h < f.size(); ++h) {
            roster.formation_by_half[h] = string(f[h], where + ".formation_by_half");
          }
          if (f.size() == 1) roster.formation_by_half[1] = roster.formation_by_half[0];
        } else {
          fail(ErrorCode::malformed, where + ".formation_by_half", "expected a string or two strings");
        }
      }
      if (t.contains("attack_by_half")) {
        const json& a = t.at("attack_by_half");
        if (!a.is_array() || a.size() != 2) {
          fail(ErrorCode::malformed, where + ".attack_by_half", "expected two directions");
        }
        for (std::size_t h = 0; h < 2; ++h) {
          roster.attack_by_half[h] = direction(a[h], where + ".attack_by_half[" + std::to_string(h) + "]");
        }
      }
      match_.teams[i] = std::move(roster);
    }
    if (match_.teams[0].id == match_.teams[1].id) {
      fail(ErrorCode::duplicate_entry, "teams[1].id", "team ids must differ");
    }
  }

  PlayerId player_ref(const json& v, const json& event, const std::string& field) {
    PlayerId id;
    if (v.is_object()) {
      id.team = string(require(v, "team", field), field + ".team");
      id.shirt = integer(require(v, "shirt", field), field + ".shirt");
    } else {
      if (!event.contains("team")) {
        fail(ErrorCode::malformed, field, "bare shirt number needs an event-level 'team'");
      }
      id.team = string(event.at("team"), field + ".team");
      id.shirt = integer(v, field);
    }
    if (!match_.find_player(id)) {
      fail(ErrorCode::roster_reference, field, "player " + to_string(id) + " not in roster");
    }
    return id;
  }

  void parse_frames(const json& frames) {
    if (!frames.is_array()) fail(ErrorCode::malformed, "frames", "expected an array");
    std::pair<int, double> last{0, 0.0};
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const std::string where = "frames[" + std::to_string(i) + "]";
      const json& f = frames[i];
      FrameSnapshot frame;
      frame.half = half_field(f, where);
      frame.t = number(require(f, "t", where), where + ".t");
      std::pair<int, double> key{frame.half, frame.t};
      if (i > 0 && key <= last) fail(ErrorCode::non_monotone, where + ".t", "frame times must strictly increase");
      last = key;

      const json& positions = require(f, "positions", where);
      if (!positions.is_array()) fail(ErrorCode::malformed, where + ".positions", "expected an array");
      for (std::size_t j = 0; j < positions.size(); ++j) {
        const std::string pw = where + ".positions[" + std::to_string(j) + "]";
        const json& p = positions[j];
        PlayerId id{string(require(p, "team", pw), pw + ".team"), integer(require(p, "shirt", pw), pw + ".shirt")};
        if (!match_.find_player(id)) {
          fail(ErrorCode::roster_reference, pw, "player " + to_string(id) + " not in roster");
        }
        if (!frame.positions.emplace(id, position(p, pw)).second) {
          fail(ErrorCode::duplicate_entry, pw, "player listed twice in one frame");
        }
      }
      if (f.contains("ball") && !f.at("ball").is_null()) frame.ball = position(f.at("ball"), where + ".ball");
      match_.frames.push_back(std::move(frame));
    }
  }

  void parse_events(const json& events) {
    if (!events.is_array()) fail(ErrorCode::malformed, "events", "expected an array");
    std::pair<int, double> last_event{0, 0.0};
    std::optional<std::pair<int, double>> last_pass;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const std::string where = "events[" + std::to_string(i) + "]";
      const json& e = events[i];
      const std::string type = string(require(e, "type", where), where + ".type");
      const int half = half_field(e, where);
      const double t = number(require(e, "t", where), where + ".t");
      std::pair<int, double> key{half, t};
      if (i > 0 && key < last_event) fail(ErrorCode::non_monotone, where + ".t", "events must be time-ordered");
      last_event = key;

      if (type == "pass") {
        if (last_pass && key <= *last_pass) {
          fail(ErrorCode::non_monotone, where + ".t", "pass times must strictly increase");
        }
        last_pass = key;
        Pass pass;
        pass.half = half;
        pass.t_pass = t;
        pass.passer = player_ref(require(e, "passer", where), e, where + ".passer");
        pass.receiver = player_ref(require(e, "receiver", where), e, where + ".receiver");
        if (pass.passer.team != pass.receiver.team) {
          fail(ErrorCode::malformed, where + ".receiver", "receiver must be a teammate of the passer");
        }
        if (pass.passer == pass.receiver) {
          fail(ErrorCode::malformed, where + ".receiver", "passer and receiver must differ");
        }
        pass.t_receive = e.contains("t_receive") ? number(e.at("t_receive"), where + ".t_receive") : t;
        if (pass.t_receive < pass.t_pass) {
          fail(ErrorCode::non_monotone, where + ".t_receive", "t_receive precedes t");
        }
        pass.origin = position(require(e, "origin", where), where + ".origin");
        pass.target = position(require(e, "target", where), where + ".target");
        if (e.contains("completed")) {
          if (!e.at("completed").is_boolean()) fail(ErrorCode::malformed, where + ".completed", "expected a boolean");
          pass.completed = e.at("completed").get<bool>();
        }
        match_.events.emplace_back(std::move(pass));
      } else {
        Event ev;
        ev.raw_tag = type;
        ev.tag = parse_event_tag(type).value_or(EventTag::other);
        ev.half = half;
        ev.t = t;
        if (e.contains("actor") && !e.at("actor").is_null()) {
          ev.actor = player_ref(e.at("actor"), e, where + ".actor");
        } else if (e.contains("player") && !e.at("player").is_null()) {
          ev.actor = player_ref(e.at("player"), e, where + ".player");
        }
        if (ev.actor) {
          ev.team = ev.actor->team;
        } else if (e.contains("team")) {
          auto team = string(e.at("team"), where + ".team");
          if (!match_.find_team(team)) fail(ErrorCode::roster_reference, where + ".team", "unknown team '" + team + "'");
          ev.team = team;
        }
        if (e.contains("note")) ev.note = string(e.at("note"), where + ".note");
        match_.events.emplace_back(std::move(ev));
      }
    }
  }

  void parse_styles(const json& styles) {
    if (!styles.is_array()) fail(ErrorCode::malformed, "phase_styles", "expected an array");
    for (std::size_t i = 0; i < styles.size(); ++i) {
      const std::string where = "phase_styles[" + std::to_string(i) + "]";
      int index = integer(require(styles[i], "phase_index", where), where + ".phase_index");
      if (index < 0) fail(ErrorCode::malformed, where + ".phase_index", "negative phase index");
      auto style = parse_style(string(require(styles[i], "style", where), where + ".style"));
      if (!style) fail(ErrorCode::malformed, where + ".style", "unknown style");
      match_.phase_styles[index] = *style;
    }
  }

  MatchRecord match_;
};

}  // namespace

MatchRecord match_from_json(const json& doc) { return Parser().run(doc); }

MatchRecord parse_match(std::string_view raw) {
  json doc = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) fail(ErrorCode::malformed, "$", "document is not valid JSON");
  return match_from_json(doc);
}

json to_json(const PlayerId& id) { return {{"team", id.team}, {"shirt", id.shirt}}; }

json to_json(const Position& p) { return {{"x", p.x}, {"y", p.y}}; }

json to_json(const Pass& p) {
  return {{"type", "pass"},          {"half", p.half},
          {"t", p.t_pass},           {"t_receive", p.t_receive},
          {"passer", to_json(p.passer)}, {"receiver", to_json(p.receiver)},
          {"origin", to_json(p.origin)}, {"target", to_json(p.target)},
          {"completed", p.completed}};
}

json to_json(const Event& e) {
  json out = {{"type", e.tag == EventTag::other ? e.raw_tag : std::string(to_string(e.tag))},
              {"half", e.half},
              {"t", e.t}};
  if (e.actor) {
    out["actor"] = to_json(*e.actor);
  } else if (e.team) {
    out["team"] = *e.team;
  }
  if (!e.note.empty()) out["note"] = e.note;
  return out;
}

json match_to_json(const MatchRecord& match) {
  json teams = json::array();
  for (const auto& t : match.teams) {
    json players = json::array();
    for (const auto& p : t.players) {
      players.push_back({{"shirt", p.shirt}, {"name", p.name}, {"role", to_string(p.role)}, {"line", p.line}});
    }
    json team = {{"id", t.id},
                 {"players", std::move(players)},
                 {"formation_by_half", {t.formation_by_half[0], t.formation_by_half[1]}}};
    if (t.attack_by_half[0] || t.attack_by_half[1]) {
      json dirs = json::array();
      for (const auto& d : t.attack_by_half) {
        if (!d) {
          dirs.push_back(nullptr);
        } else {
          dirs.push_back(*d == AttackDirection::increasing_x ? "right" : "left");
        }
      }
      team["attack_by_half"] = std::move(dirs);
    }
    teams.push_back(std::move(team));
  }

  json frames = json::array();
  for (const auto& f : match.frames) {
    json positions = json::array();
    for (const auto& [id, pos] : f.positions) {
      positions.push_back({{"team", id.team}, {"shirt", id.shirt}, {"x", pos.x}, {"y", pos.y}});
    }
    json frame = {{"half", f.half}, {"t", f.t}, {"positions", std::move(positions)}};
    if (f.ball) frame["ball"] = to_json(*f.ball);
    frames.push_back(std::move(frame));
  }

  json events = json::array();
  for (const auto& e : match.events) {
    std::visit([&](const auto& v) { events.push_back(to_json(v)); }, e);
  }

  json doc = {{"match_id", match.match_id},
              {"teams", std::move(teams)},
              {"frames", std::move(frames)},
              {"events", std::move(events)}};
  if (!match.phase_styles.empty()) {
    json styles = json::array();
    for (const auto& [index, style] : match.phase_styles) {
      styles.push_back({{"phase_index", index}, {"style", to_string(style)}});
    }
    doc["phase_styles"] = std::move(styles);
  }
  return doc;
}

}  // namespace passtopic
