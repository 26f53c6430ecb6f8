#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "passtopic/types.hpp"

namespace passtopic {

// --- attacking direction ----------------------------------------------------

Position mirror(const Position& p);

// Mirrors every position in the halves where `target_team` attacks toward
// decreasing x, so that afterwards it attacks toward increasing x throughout.
// Both teams' per-half direction metadata is updated to match, which makes a
// second call with the same team a no-op.
MatchRecord normalize_direction(MatchRecord match, const TeamId& target_team);

// Direction `team` attacks in `half` for the record's current orientation.
std::optional<AttackDirection> attack_direction(const MatchRecord& match, const TeamId& team, int half);

// --- phase segmentation -----------------------------------------------------

struct SegmentOptions {
  // Label phases without a style from the file using the counter-attack
  // heuristic below. Labels set this way carry style_is_heuristic.
  bool heuristic_styles = false;
};

struct CounterAttackHeuristic {
  std::size_t max_passes = 4;
  double max_duration_s = 12.0;
  double min_forward_m = 30.0;
};

// True when the phase looks like a counter-attack: few passes, short, and a
// large net gain toward the opponent goal.
bool looks_like_counter_attack(const Phase& phase, AttackDirection dir,
                               const CounterAttackHeuristic& h = {});

// Splits the event stream into possession phases. A phase ends on a
// possession gain by the opponent, an interception, out-of-bounds, foul, shot,
// goal, or the end of a half; passes by the other team imply a possession
// gain. Other event tags are carried along but never end a phase.
std::vector<Phase> segment_phases(const MatchRecord& match, const SegmentOptions& options = {});

// Segments in place and returns the record for chaining.
MatchRecord& segment(MatchRecord& match, const SegmentOptions& options = {});

std::vector<Phase> phases_of_team(const std::vector<Phase>& phases, const TeamId& team);

// --- dictionaries -----------------------------------------------------------

using Word = std::variant<PlayerId, RegionId>;

enum class WordMode { player, region };

const char* to_string(WordMode mode);
std::optional<WordMode> parse_word_mode(const std::string& text);

std::string word_label(const Word& w);  // "ARG#10" or "R1C2"

class PlayerDictionary {
 public:
  PlayerDictionary() = default;

  WordMode mode() const { return mode_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Word>& entries() const { return entries_; }
  const Word& at(std::size_t i) const { return entries_.at(i); }
  std::optional<std::size_t> index_of(const Word& w) const;
  std::string label(std::size_t i) const { return word_label(entries_.at(i)); }

  bool operator==(const PlayerDictionary& other) const { return entries_ == other.entries_; }

 private:
  friend PlayerDictionary build_dictionary(std::vector<PlayerId> roster);
  friend PlayerDictionary build_region_dictionary();

  WordMode mode_ = WordMode::player;
  std::vector<Word> entries_;
  std::map<Word, std::size_t> index_;
};

// Ordered by team, then shirt. Substitutes are simply more entries.
PlayerDictionary build_dictionary(std::vector<PlayerId> roster);
PlayerDictionary build_dictionary(const TeamRoster& roster);
// The nine pitch regions in row-major order.
PlayerDictionary build_region_dictionary();

}  // namespace passtopic
