#include "passtopic/types.hpp"

#include <algorithm>
#include <cmath>

#include "passtopic/error.hpp"

namespace passtopic {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed: return "malformed";
    case ErrorCode::roster_reference: return "roster_reference";
    case ErrorCode::non_monotone: return "non_monotone";
    case ErrorCode::out_of_bounds: return "out_of_bounds";
    case ErrorCode::unknown_direction: return "unknown_direction";
    case ErrorCode::duplicate_entry: return "duplicate_entry";
    case ErrorCode::missing_word: return "missing_word";
    case ErrorCode::empty_corpus: return "empty_corpus";
    case ErrorCode::invalid_k: return "invalid_k";
    case ErrorCode::zero_corpus: return "zero_corpus";
    case ErrorCode::degenerate_topic: return "degenerate_topic";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::input_too_large: return "input_too_large";
    case ErrorCode::no_frame: return "no_frame";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::timeout: return "timeout";
  }
  return "unknown";
}

std::string to_string(const PlayerId& id) {
  return id.team + "#" + std::to_string(id.shirt);
}

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

namespace {

struct TagName {
  EventTag tag;
  const char* name;
};

constexpr TagName kTagNames[] = {
    {EventTag::shot, "shot"},
    {EventTag::goal, "goal"},
    {EventTag::interception, "interception"},
    {EventTag::out_of_bounds, "out-of-bounds"},
    {EventTag::foul, "foul"},
    {EventTag::corner, "corner"},
    {EventTag::offside, "offside"},
    {EventTag::substitution, "substitution"},
    {EventTag::card, "card"},
    {EventTag::possession_gain, "possession-gain"},
};

}  // namespace

const char* to_string(EventTag tag) {
  for (const auto& [t, name] : kTagNames) {
    if (t == tag) return name;
  }
  return "other";
}

std::optional<EventTag> parse_event_tag(const std::string& text) {
  for (const auto& [t, name] : kTagNames) {
    if (text == name) return t;
  }
  return std::nullopt;
}

int half_of(const MatchEvent& e) {
  return std::visit([](const auto& v) { return v.half; }, e);
}

double time_of(const MatchEvent& e) {
  if (const auto* p = std::get_if<Pass>(&e)) return p->t_pass;
  return std::get<Event>(e).t;
}

const char* to_string(Style style) {
  switch (style) {
    case Style::build_up: return "build-up";
    case Style::counter_attack: return "counter-attack";
    case Style::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::optional<Style> parse_style(const std::string& text) {
  if (text == "build-up") return Style::build_up;
  if (text == "counter-attack") return Style::counter_attack;
  if (text == "unlabeled") return Style::unlabeled;
  return std::nullopt;
}

const char* to_string(Role role) {
  switch (role) {
    case Role::goalkeeper: return "goalkeeper";
    case Role::defender: return "defender";
    case Role::midfielder: return "midfielder";
    case Role::forward: return "forward";
  }
  return "midfielder";
}

std::optional<Role> parse_role(const std::string& text) {
  if (text == "goalkeeper" || text == "GK") return Role::goalkeeper;
  if (text == "defender" || text == "guard" || text == "DF") return Role::defender;
  if (text == "midfielder" || text == "MF") return Role::midfielder;
  if (text == "forward" || text == "FW") return Role::forward;
  return std::nullopt;
}

const RosterEntry* TeamRoster::find(int shirt) const {
  auto it = std::find_if(players.begin(), players.end(),
                         [shirt](const RosterEntry& p) { return p.shirt == shirt; });
  return it == players.end() ? nullptr : &*it;
}

const TeamRoster* MatchRecord::find_team(const TeamId& id) const {
  for (const auto& t : teams) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const TeamRoster& MatchRecord::team(const TeamId& id) const {
  if (const auto* t = find_team(id)) return *t;
  throw Error(ErrorCode::not_found, "unknown team '" + id + "'", "team");
}

const TeamRoster& MatchRecord::opponent(const TeamId& id) const {
  if (teams[0].id == id) return teams[1];
  if (teams[1].id == id) return teams[0];
  throw Error(ErrorCode::not_found, "unknown team '" + id + "'", "team");
}

const RosterEntry* MatchRecord::find_player(const PlayerId& id) const {
  const auto* t = find_team(id.team);
  return t ? t->find(id.shirt) : nullptr;
}

std::vector<Pass> MatchRecord::passes() const {
  std::vector<Pass> out;
  for (const auto& e : events) {
    if (const auto* p = std::get_if<Pass>(&e)) out.push_back(*p);
  }
  return out;
}

}  // namespace passtopic
