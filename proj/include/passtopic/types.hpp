#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace passtopic {

inline constexpr double kPitchLength = 105.0;
inline constexpr double kPitchWidth = 68.0;

using TeamId = std::string;

struct PlayerId {
  TeamId team;
  int shirt = 0;

  auto operator<=>(const PlayerId&) const = default;
  bool operator==(const PlayerId&) const = default;
};

std::string to_string(const PlayerId& id);  // "ARG#10"

struct Position {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);

// One cell of the 3 x 3 pitch tiling. Rows run across the width (y), columns
// along the length (x).
struct RegionId {
  int row = 0;
  int col = 0;

  int index() const { return row * 3 + col; }  // row-major
  static RegionId from_index(int i) { return {i / 3, i % 3}; }

  auto operator<=>(const RegionId&) const = default;
  bool operator==(const RegionId&) const = default;
};

struct Pass {
  PlayerId passer;
  PlayerId receiver;
  int half = 1;
  double t_pass = 0.0;
  double t_receive = 0.0;
  Position origin;
  Position target;
  bool completed = true;

  bool operator==(const Pass&) const = default;
};

enum class EventTag {
  shot,
  goal,
  interception,
  out_of_bounds,
  foul,
  corner,
  offside,
  substitution,
  card,
  possession_gain,
  other,  // unrecognised tag, kept verbatim in Event::raw_tag
};

const char* to_string(EventTag tag);
std::optional<EventTag> parse_event_tag(const std::string& text);

struct Event {
  EventTag tag = EventTag::other;
  std::string raw_tag;  // original spelling; meaningful for EventTag::other
  int half = 1;
  double t = 0.0;
  std::optional<TeamId> team;  // always set when actor is
  std::optional<PlayerId> actor;
  // Set on end events the segmenter fabricates (team change, half boundary).
  std::string note;

  bool operator==(const Event&) const = default;
};

using MatchEvent = std::variant<Pass, Event>;

int half_of(const MatchEvent& e);
double time_of(const MatchEvent& e);

enum class Style { unlabeled, build_up, counter_attack };

const char* to_string(Style style);
std::optional<Style> parse_style(const std::string& text);

struct Phase {
  int id = 0;
  TeamId team;
  int half = 1;
  std::vector<Pass> passes;
  Style style = Style::unlabeled;
  bool style_is_heuristic = false;
  Event end_event;

  double start_time() const { return passes.front().t_pass; }
  double end_time() const { return passes.back().t_receive; }
};

struct FrameSnapshot {
  int half = 1;
  double t = 0.0;
  std::map<PlayerId, Position> positions;
  std::optional<Position> ball;
};

enum class AttackDirection { increasing_x, decreasing_x };

enum class Role { goalkeeper, defender, midfielder, forward };

const char* to_string(Role role);
std::optional<Role> parse_role(const std::string& text);

struct RosterEntry {
  int shirt = 0;
  std::string name;
  Role role = Role::midfielder;
  int line = 0;  // formation line, -1 for the goalkeeper
};

struct TeamRoster {
  TeamId id;
  std::vector<RosterEntry> players;
  std::array<std::string, 2> formation_by_half;
  std::array<std::optional<AttackDirection>, 2> attack_by_half;

  const RosterEntry* find(int shirt) const;
};

struct MatchRecord {
  std::string match_id;
  std::array<TeamRoster, 2> teams;
  std::vector<FrameSnapshot> frames;
  std::vector<MatchEvent> events;
  std::map<int, Style> phase_styles;  // phase index -> label from the file
  std::vector<Phase> phases;          // empty until segmented

  const TeamRoster& team(const TeamId& id) const;
  const TeamRoster* find_team(const TeamId& id) const;
  const TeamRoster& opponent(const TeamId& id) const;
  const RosterEntry* find_player(const PlayerId& id) const;
  std::vector<Pass> passes() const;
};

}  // namespace passtopic
