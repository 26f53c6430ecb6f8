#include "passtopic/match_data.hpp"

#include <algorithm>
#include <set>

#include "passtopic/error.hpp"

namespace passtopic {

Position mirror(const Position& p) { return {kPitchLength - p.x, kPitchWidth - p.y}; }

namespace {

AttackDirection flipped(AttackDirection d) {
  return d == AttackDirection::increasing_x ? AttackDirection::decreasing_x : AttackDirection::increasing_x;
}

void mirror_pass(Pass& p) {
  p.origin = mirror(p.origin);
  p.target = mirror(p.target);
}

}  // namespace

std::optional<AttackDirection> attack_direction(const MatchRecord& match, const TeamId& team, int half) {
  const auto& roster = match.team(team);
  if (auto d = roster.attack_by_half[half - 1]) return d;
  // Fall back to the opponent's metadata: the two sides always face each other.
  if (auto d = match.opponent(team).attack_by_half[half - 1]) return flipped(*d);
  return std::nullopt;
}

MatchRecord normalize_direction(MatchRecord match, const TeamId& target_team) {
  std::array<bool, 2> has_data{false, false};
  for (const auto& f : match.frames) has_data[f.half - 1] = true;
  for (const auto& e : match.events) has_data[half_of(e) - 1] = true;

  std::array<bool, 2> flip{false, false};
  for (int half = 1; half <= 2; ++half) {
    auto dir = attack_direction(match, target_team, half);
    if (!dir) {
      if (has_data[half - 1]) {
        throw Error(ErrorCode::unknown_direction,
                    "no attack direction for team '" + target_team + "' in half " + std::to_string(half),
                    "attack_by_half");
      }
      continue;
    }
    flip[half - 1] = *dir == AttackDirection::decreasing_x;
  }

  for (auto& f : match.frames) {
    if (!flip[f.half - 1]) continue;
    for (auto& [id, pos] : f.positions) pos = mirror(pos);
    if (f.ball) f.ball = mirror(*f.ball);
  }
  for (auto& e : match.events) {
    if (auto* p = std::get_if<Pass>(&e); p && flip[p->half - 1]) mirror_pass(*p);
  }
  for (auto& phase : match.phases) {
    if (!flip[phase.half - 1]) continue;
    for (auto& p : phase.passes) mirror_pass(p);
  }
  for (int half = 1; half <= 2; ++half) {
    auto target_dir = attack_direction(match, target_team, half);
    if (!target_dir) continue;
    AttackDirection now = flip[half - 1] ? flipped(*target_dir) : *target_dir;
    for (auto& t : match.teams) {
      t.attack_by_half[half - 1] = t.id == target_team ? now : flipped(now);
    }
  }
  return match;
}

bool looks_like_counter_attack(const Phase& phase, AttackDirection dir, const CounterAttackHeuristic& h) {
  if (phase.passes.empty() || phase.passes.size() > h.max_passes) return false;
  if (phase.end_time() - phase.start_time() > h.max_duration_s) return false;
  double gain = phase.passes.back().target.x - phase.passes.front().origin.x;
  if (dir == AttackDirection::decreasing_x) gain = -gain;
  return gain >= h.min_forward_m;
}

namespace {

bool ends_phase(EventTag tag) {
  switch (tag) {
    case EventTag::possession_gain:
    case EventTag::interception:
    case EventTag::out_of_bounds:
    case EventTag::foul:
    case EventTag::shot:
    case EventTag::goal:
      return true;
    default:
      return false;
  }
}

Event half_boundary(const Phase& phase) {
  Event e;
  e.tag = EventTag::out_of_bounds;
  e.raw_tag = to_string(EventTag::out_of_bounds);
  e.half = phase.half;
  e.t = phase.end_time();
  e.note = "half-end";
  return e;
}

Event takeover(const Pass& first_pass_of_other_team) {
  Event e;
  e.tag = EventTag::possession_gain;
  e.raw_tag = to_string(EventTag::possession_gain);
  e.half = first_pass_of_other_team.half;
  e.t = first_pass_of_other_team.t_pass;
  e.team = first_pass_of_other_team.passer.team;
  e.actor = first_pass_of_other_team.passer;
  e.note = "team-change";
  return e;
}

}  // namespace

std::vector<Phase> segment_phases(const MatchRecord& match, const SegmentOptions& options) {
  std::vector<Phase> phases;
  std::optional<Phase> current;

  auto close = [&](Event end) {
    current->end_event = std::move(end);
    current->id = static_cast<int>(phases.size());
    phases.push_back(std::move(*current));
    current.reset();
  };

  for (const auto& e : match.events) {
    if (const auto* pass = std::get_if<Pass>(&e)) {
      if (current && current->half != pass->half) close(half_boundary(*current));
      if (current && current->team != pass->passer.team) close(takeover(*pass));
      if (!current) {
        current.emplace();
        current->team = pass->passer.team;
        current->half = pass->half;
      }
      current->passes.push_back(*pass);
      continue;
    }
    const auto& ev = std::get<Event>(e);
    if (!current) continue;
    if (ev.half != current->half) {
      close(half_boundary(*current));
      continue;
    }
    if (!ends_phase(ev.tag)) continue;
    // Regaining a ball the team already holds is not an interruption.
    if (ev.tag == EventTag::possession_gain && ev.team && *ev.team == current->team) continue;
    close(ev);
  }
  if (current) close(half_boundary(*current));

  for (auto& phase : phases) {
    if (auto it = match.phase_styles.find(phase.id); it != match.phase_styles.end()) {
      phase.style = it->second;
    } else if (options.heuristic_styles) {
      if (auto dir = attack_direction(match, phase.team, phase.half)) {
        phase.style = looks_like_counter_attack(phase, *dir) ? Style::counter_attack : Style::build_up;
        phase.style_is_heuristic = true;
      }
    }
  }
  return phases;
}

MatchRecord& segment(MatchRecord& match, const SegmentOptions& options) {
  match.phases = segment_phases(match, options);
  return match;
}

std::vector<Phase> phases_of_team(const std::vector<Phase>& phases, const TeamId& team) {
  std::vector<Phase> out;
  std::copy_if(phases.begin(), phases.end(), std::back_inserter(out),
               [&](const Phase& p) { return p.team == team; });
  return out;
}

const char* to_string(WordMode mode) { return mode == WordMode::region ? "region" : "player"; }

std::optional<WordMode> parse_word_mode(const std::string& text) {
  if (text == "player") return WordMode::player;
  if (text == "region") return WordMode::region;
  return std::nullopt;
}

std::string word_label(const Word& w) {
  if (const auto* p = std::get_if<PlayerId>(&w)) return to_string(*p);
  const auto& r = std::get<RegionId>(w);
  return "R" + std::to_string(r.row) + "C" + std::to_string(r.col);
}

std::optional<std::size_t> PlayerDictionary::index_of(const Word& w) const {
  auto it = index_.find(w);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PlayerDictionary build_dictionary(std::vector<PlayerId> roster) {
  if (roster.empty()) throw Error(ErrorCode::invalid_argument, "roster is empty", "roster");
  std::sort(roster.begin(), roster.end());
  if (auto dup = std::adjacent_find(roster.begin(), roster.end()); dup != roster.end()) {
    throw Error(ErrorCode::duplicate_entry, "duplicate roster entry " + to_string(*dup), "roster");
  }
  PlayerDictionary dict;
  dict.mode_ = WordMode::player;
  for (auto& id : roster) {
    dict.index_.emplace(id, dict.entries_.size());
    dict.entries_.emplace_back(std::move(id));
  }
  return dict;
}

PlayerDictionary build_dictionary(const TeamRoster& roster) {
  std::vector<PlayerId> ids;
  ids.reserve(roster.players.size());
  for (const auto& p : roster.players) ids.push_back({roster.id, p.shirt});
  return build_dictionary(std::move(ids));
}

PlayerDictionary build_region_dictionary() {
  PlayerDictionary dict;
  dict.mode_ = WordMode::region;
  for (int i = 0; i < 9; ++i) {
    dict.index_.emplace(RegionId::from_index(i), dict.entries_.size());
    dict.entries_.emplace_back(RegionId::from_index(i));
  }
  return dict;
}

}  // namespace passtopic
