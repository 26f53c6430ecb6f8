#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "passtopic/types.hpp"

namespace passtopic {

// --- regions ----------------------------------------------------------------

// 3 x 3 tiling of the pitch: col = floor(3x / 105), row = floor(3y / 68), with
// the far edges folded into the last cell. Throws out_of_bounds off the pitch.
RegionId spatial_region(const Position& p);

// Glyph lookup for the nine regions. Columns run from the own goal (0) to the
// opponent goal (2) in the normalized frame; row 0 is the right flank (y = 0
// side when attacking toward +x), row 2 the left flank.
struct RegionGlyph {
  RegionId region;
  const char* code;   // short stable key, e.g. "MC"
  const char* third;  // defensive / middle / attacking
  const char* channel;  // right / center / left
  const char* glyph;  // pitch marking the glyph is drawn from
};

std::span<const RegionGlyph> region_glyphs();
const RegionGlyph& region_glyph(RegionId region);

// --- covered area -----------------------------------------------------------

// Counter-clockwise hull without collinear points (monotone chain).
std::vector<Position> convex_hull(std::span<const Position> points);

// Area of the convex hull; 0 for fewer than three points or a degenerate hull.
double covered_area(std::span<const Position> points);

// --- pressure ---------------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct PressureParams {
  double d_front = 9.0;  // reach of a defender straight ahead of the carrier
  double d_back = 3.0;   // reach of a defender directly behind
  double exponent = 1.0;
};

// Reach of a defender at angle phi from the attack direction.
double pressure_reach(double cos_phi, const PressureParams& params);

// Sum over defenders of max(0, 1 − d / L(φ))^q, where L(φ) blends d_back and
// d_front by (1 + cos φ) / 2. A defender standing on the carrier counts fully.
double pressure(const Position& carrier, Vec2 attack_dir, std::span<const Position> defenders,
                const PressureParams& params = {});

Vec2 attack_vector(AttackDirection dir);

// --- heatmaps ---------------------------------------------------------------

struct GridConfig {
  int x_bins = 21;  // along the 105 m length
  int y_bins = 14;  // across the 68 m width
};

struct HeatmapGrid {
  int x_bins = 0;
  int y_bins = 0;
  std::vector<long> counts;  // x-major: counts[ix * y_bins + iy]

  long at(int ix, int iy) const { return counts[static_cast<std::size_t>(ix * y_bins + iy)]; }
  long total() const;
  void add(const Position& p);
};

HeatmapGrid make_heatmap(const GridConfig& config = {});

// Bins the origin and the target of every pass in the given phases.
HeatmapGrid pattern_heatmap(std::span<const Phase> phases, const GridConfig& config = {});

// --- formations -------------------------------------------------------------

struct FormationLines {
  std::vector<int> segments;  // outfield players per line, back to front
  std::map<PlayerId, int> role_line;

  int line_count() const { return static_cast<int>(segments.size()); }
  // Line to highlight for a player; none for the goalkeeper (line -1) or an
  // unknown player.
  std::optional<int> highlight(const PlayerId& player) const;
};

// "4-2-3-1" -> four lines. The segments must sum to the ten outfield players.
FormationLines formation_lines(const std::string& formation, std::map<PlayerId, int> role_line = {});

// --- phase summaries --------------------------------------------------------

struct LinePosition {
  int line = -1;
  int line_count = 0;  // 0 when the formation is unknown
};

struct PhaseSummary {
  PlayerId first_passer;
  PlayerId last_receiver;
  LinePosition first_formation_line;
  LinePosition last_formation_line;
  RegionId first_region;
  RegionId last_region;
  int pass_count = 0;
  Event end_event;
};

PhaseSummary phase_summary(const Phase& phase, const MatchRecord& match);

// --- player movement --------------------------------------------------------

struct StatsConfig {
  double dash_threshold = 5.5;  // m/s
  double speed_clamp = 12.0;    // faster steps are tracking noise and dropped
};

struct TimeSpan {
  int half = 1;
  double from = 0.0;
  double to = 0.0;

  bool contains(int h, double t) const { return h == half && t >= from && t <= to; }
};

struct PlayerStats {
  double max_speed = 0.0;
  double dash_distance = 0.0;
  double total_distance = 0.0;
  int pass_count = 0;
};

// Speeds are finite differences between consecutive frames in which the player
// appears (never across a half). Needs at least two such frames.
PlayerStats player_stats(const PlayerId& player, std::span<const FrameSnapshot> frames,
                         std::span<const Pass> passes, const StatsConfig& config = {},
                         std::optional<TimeSpan> span = std::nullopt);

// --- defensive context ------------------------------------------------------

inline constexpr double kFrameTolerance = 0.5;

// Nearest frame to (half, t) within `tolerance` seconds; ties go to the
// earlier frame. Frames must be sorted by (half, t).
const FrameSnapshot* nearest_frame(std::span<const FrameSnapshot> frames, int half, double t,
                                   double tolerance = kFrameTolerance);

struct DefenseContext {
  int half = 1;
  double frame_t = 0.0;
  std::map<PlayerId, Position> opponents;
  double covered_area = 0.0;
  double pressure = 0.0;
};

// Opponent positions at the moment of the pass, with the covered area they
// span and the pressure they put on the passer. Throws no_frame when no frame
// lies within tolerance.
DefenseContext defense_context(const Pass& pass, const MatchRecord& match,
                               const PressureParams& params = {}, double tolerance = kFrameTolerance);

// Series are sampled at every frame inside the phase window and at every pass
// instant (through the nearest frame within tolerance).
struct PhaseMetrics {
  std::vector<std::pair<double, double>> covered_area;  // (t, m²) of the defending team
  std::vector<std::pair<double, double>> pressure;      // (t, value) on the ball carrier
  std::optional<double> defense_bar;                    // mean covered area
  std::optional<double> mean_pressure;
};

PhaseMetrics phase_metrics(const Phase& phase, const MatchRecord& match, const PressureParams& params = {});

// --- dribbles ---------------------------------------------------------------

inline constexpr double kMinDribbleDisplacement = 2.0;

struct DribbleSegment {
  PlayerId player;
  double t_start = 0.0;
  double t_end = 0.0;
  Position from;
  Position to;
};

// Ball carries between receiving a pass and releasing the next one. Carries
// shorter than `min_displacement` metres are dropped as clutter.
std::vector<DribbleSegment> dribble_segments(const Phase& phase,
                                             double min_displacement = kMinDribbleDisplacement);

}  // namespace passtopic
