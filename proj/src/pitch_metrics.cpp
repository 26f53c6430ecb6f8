#include "passtopic/pitch_metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "passtopic/error.hpp"
#include "passtopic/match_data.hpp"

namespace passtopic {

RegionId spatial_region(const Position& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.x > kPitchLength || p.y < 0.0 ||
      p.y > kPitchWidth) {
    throw Error(ErrorCode::out_of_bounds,
                "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is off the pitch", "position");
  }
  const int col = std::min(2, static_cast<int>(std::floor(3.0 * p.x / kPitchLength)));
  const int row = std::min(2, static_cast<int>(std::floor(3.0 * p.y / kPitchWidth)));
  return {row, col};
}

namespace {

constexpr std::array<RegionGlyph, 9> kRegionGlyphs{{
    {{0, 0}, "DR", "defensive", "right", "own-corner-arc-right"},
    {{0, 1}, "MR", "middle", "right", "halfway-touchline-right"},
    {{0, 2}, "AR", "attacking", "right", "opponent-corner-arc-right"},
    {{1, 0}, "DC", "defensive", "center", "own-penalty-box"},
    {{1, 1}, "MC", "middle", "center", "center-circle"},
    {{1, 2}, "AC", "attacking", "center", "opponent-penalty-box"},
    {{2, 0}, "DL", "defensive", "left", "own-corner-arc-left"},
    {{2, 1}, "ML", "middle", "left", "halfway-touchline-left"},
    {{2, 2}, "AL", "attacking", "left", "opponent-corner-arc-left"},
}};

double cross(const Position& o, const Position& a, const Position& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::span<const RegionGlyph> region_glyphs() { return kRegionGlyphs; }

const RegionGlyph& region_glyph(RegionId region) {
  return kRegionGlyphs.at(static_cast<std::size_t>(region.index()));
}

std::vector<Position> convex_hull(std::span<const Position> points) {
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::invalid_argument, "non-finite coordinate", "positions");
    }
  }
  std::vector<Position> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Position& a, const Position& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Position> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double covered_area(std::span<const Position> points) {
  const auto hull = convex_hull(points);
  if (hull.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

double pressure_reach(double cos_phi, const PressureParams& params) {
  return params.d_back + (params.d_front - params.d_back) * (1.0 + cos_phi) / 2.0;
}

double pressure(const Position& carrier, Vec2 attack_dir, std::span<const Position> defenders,
                const PressureParams& params) {
  if (!(params.d_back > 0.0) || !(params.d_front >= params.d_back) || !std::isfinite(params.d_front) ||
      !(params.exponent > 0.0) || !std::isfinite(params.exponent)) {
    throw Error(ErrorCode::invalid_argument, "pressure needs d_front >= d_back > 0 and a positive exponent",
                "pressure_params");
  }
  const double dir_norm = std::hypot(attack_dir.x, attack_dir.y);
  if (!(dir_norm > 0.0) || !std::isfinite(dir_norm)) {
    throw Error(ErrorCode::invalid_argument, "attack direction must be a nonzero vector", "attack_dir");
  }
  double total = 0.0;
  for (const auto& def : defenders) {
    const double dx = def.x - carrier.x;
    const double dy = def.y - carrier.y;
    const double d = std::hypot(dx, dy);
    if (d == 0.0) {
      total += 1.0;
      continue;
    }
    const double cos_phi = std::clamp((dx * attack_dir.x + dy * attack_dir.y) / (d * dir_norm), -1.0, 1.0);
    const double reach = pressure_reach(cos_phi, params);
    if (d >= reach) continue;
    total += std::pow(1.0 - d / reach, params.exponent);
  }
  return total;
}

Vec2 attack_vector(AttackDirection dir) {
  return dir == AttackDirection::increasing_x ? Vec2{1.0, 0.0} : Vec2{-1.0, 0.0};
}

long HeatmapGrid::total() const { return std::accumulate(counts.begin(), counts.end(), 0L); }

void HeatmapGrid::add(const Position& p) {
  auto bin = [](double v, double extent, int bins) {
    const int b = static_cast<int>(std::floor(v * bins / extent));
    return std::clamp(b, 0, bins - 1);
  };
  const int ix = bin(p.x, kPitchLength, x_bins);
  const int iy = bin(p.y, kPitchWidth, y_bins);
  ++counts[static_cast<std::size_t>(ix * y_bins + iy)];
}

HeatmapGrid make_heatmap(const GridConfig& config) {
  if (config.x_bins < 1 || config.y_bins < 1) {
    throw Error(ErrorCode::invalid_argument, "heatmap needs at least one bin per axis", "grid");
  }
  return {config.x_bins, config.y_bins,
          std::vector<long>(static_cast<std::size_t>(config.x_bins * config.y_bins), 0)};
}

HeatmapGrid pattern_heatmap(std::span<const Phase> phases, const GridConfig& config) {
  HeatmapGrid grid = make_heatmap(config);
  for (const auto& phase : phases) {
    for (const auto& pass : phase.passes) {
      grid.add(pass.origin);
      grid.add(pass.target);
    }
  }
  return grid;
}

std::optional<int> FormationLines::highlight(const PlayerId& player) const {
  auto it = role_line.find(player);
  if (it == role_line.end() || it->second < 0 || it->second >= line_count()) return std::nullopt;
  return it->second;
}

FormationLines formation_lines(const std::string& formation, std::map<PlayerId, int> role_line) {
  FormationLines out;
  out.role_line = std::move(role_line);
  std::stringstream in(formation);
  std::string part;
  while (std::getline(in, part, '-')) {
    if (part.empty() || !std::all_of(part.begin(), part.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw Error(ErrorCode::malformed, "formation '" + formation + "' is not dash-separated numbers", "formation");
    }
    const int n = std::stoi(part);
    if (n < 1) throw Error(ErrorCode::malformed, "formation '" + formation + "' has an empty line", "formation");
    out.segments.push_back(n);
  }
  if (out.segments.empty() || formation.back() == '-') {
    throw Error(ErrorCode::malformed, "formation '" + formation + "' is empty", "formation");
  }
  const int sum = std::accumulate(out.segments.begin(), out.segments.end(), 0);
  if (sum != 10) {
    throw Error(ErrorCode::malformed,
                "formation '" + formation + "' places " + std::to_string(sum) + " outfield players, not 10",
                "formation");
  }
  return out;
}

namespace {

LinePosition line_of(const PlayerId& id, const MatchRecord& match, int half) {
  LinePosition pos;
  if (const auto* entry = match.find_player(id)) pos.line = entry->line;
  if (const auto* team = match.find_team(id.team)) {
    try {
      pos.line_count = formation_lines(team->formation_by_half[half - 1]).line_count();
    } catch (const Error&) {
      pos.line_count = 0;
    }
  }
  return pos;
}

}  // namespace

PhaseSummary phase_summary(const Phase& phase, const MatchRecord& match) {
  const Pass& first = phase.passes.front();
  const Pass& last = phase.passes.back();
  PhaseSummary s;
  s.first_passer = first.passer;
  s.last_receiver = last.receiver;
  s.first_formation_line = line_of(first.passer, match, phase.half);
  s.last_formation_line = line_of(last.receiver, match, phase.half);
  s.first_region = spatial_region(first.origin);
  s.last_region = spatial_region(last.target);
  s.pass_count = static_cast<int>(phase.passes.size());
  s.end_event = phase.end_event;
  return s;
}

PlayerStats player_stats(const PlayerId& player, std::span<const FrameSnapshot> frames, std::span<const Pass> passes,
                         const StatsConfig& config, std::optional<TimeSpan> span) {
  PlayerStats stats;
  const FrameSnapshot* prev = nullptr;
  Position prev_pos;
  int seen = 0;
  for (const auto& f : frames) {
    if (span && !span->contains(f.half, f.t)) continue;
    auto it = f.positions.find(player);
    if (it == f.positions.end()) continue;
    ++seen;
    if (prev && prev->half == f.half && f.t > prev->t) {
      const double step = distance(prev_pos, it->second);
      const double speed = step / (f.t - prev->t);
      if (speed <= config.speed_clamp) {
        stats.total_distance += step;
        stats.max_speed = std::max(stats.max_speed, speed);
        if (speed > config.dash_threshold) stats.dash_distance += step;
      }
    }
    prev = &f;
    prev_pos = it->second;
  }
  if (seen < 2) {
    throw Error(ErrorCode::no_frame, to_string(player) + " appears in fewer than two frames", "frames");
  }
  for (const auto& p : passes) {
    if (p.passer != player) continue;
    if (span && !span->contains(p.half, p.t_pass)) continue;
    ++stats.pass_count;
  }
  return stats;
}

const FrameSnapshot* nearest_frame(std::span<const FrameSnapshot> frames, int half, double t, double tolerance) {
  auto it = std::lower_bound(frames.begin(), frames.end(), std::pair{half, t},
                             [](const FrameSnapshot& f, const std::pair<int, double>& key) {
                               return std::pair{f.half, f.t} < key;
                             });
  const FrameSnapshot* best = nullptr;
  double best_gap = tolerance;
  // Earlier candidate first so that an exact tie keeps it.
  if (it != frames.begin()) {
    const auto& before = *std::prev(it);
    if (before.half == half && t - before.t <= best_gap) {
      best = &before;
      best_gap = t - before.t;
    }
  }
  if (it != frames.end() && it->half == half && it->t - t <= tolerance && (!best || it->t - t < best_gap)) {
    best = &*it;
  }
  return best;
}

namespace {

std::vector<Position> team_positions(const FrameSnapshot& f, const TeamId& team) {
  std::vector<Position> out;
  for (const auto& [id, pos] : f.positions) {
    if (id.team == team) out.push_back(pos);
  }
  return out;
}

Vec2 team_attack(const MatchRecord& match, const TeamId& team, int half) {
  auto dir = attack_direction(match, team, half);
  if (!dir) {
    throw Error(ErrorCode::unknown_direction, "no attack direction for '" + team + "' in half " + std::to_string(half),
                "attack_by_half");
  }
  return attack_vector(*dir);
}

}  // namespace

DefenseContext defense_context(const Pass& pass, const MatchRecord& match, const PressureParams& params,
                               double tolerance) {
  const FrameSnapshot* frame = nearest_frame(match.frames, pass.half, pass.t_pass, tolerance);
  if (!frame) {
    throw Error(ErrorCode::no_frame, "no frame within " + std::to_string(tolerance) + " s of the pass", "frames");
  }
  const TeamId& defending = match.opponent(pass.passer.team).id;
  DefenseContext ctx;
  ctx.half = frame->half;
  ctx.frame_t = frame->t;
  for (const auto& [id, pos] : frame->positions) {
    if (id.team == defending) ctx.opponents.emplace(id, pos);
  }
  const auto defenders = team_positions(*frame, defending);
  ctx.covered_area = covered_area(defenders);
  ctx.pressure = pressure(pass.origin, team_attack(match, pass.passer.team, pass.half), defenders, params);
  return ctx;
}

PhaseMetrics phase_metrics(const Phase& phase, const MatchRecord& match, const PressureParams& params) {
  PhaseMetrics m;
  const TeamId& defending = match.opponent(phase.team).id;
  const double t0 = phase.start_time();
  const double t1 = phase.end_time();
  std::optional<Vec2> dir;
  if (auto d = attack_direction(match, phase.team, phase.half)) dir = attack_vector(*d);

  // Keyed by time so pass instants and in-window frames interleave in order.
  std::map<double, std::pair<double, std::optional<double>>> samples;
  for (const auto& f : match.frames) {
    if (f.half != phase.half || f.t < t0 || f.t > t1) continue;
    const auto defenders = team_positions(f, defending);
    auto& sample = samples[f.t];
    sample.first = covered_area(defenders);
    if (!dir) continue;

    // Ball carrier: the passer at the instant of a pass, the receiver once it
    // arrives; nobody while the ball travels.
    const Pass* current = nullptr;
    for (const auto& p : phase.passes) {
      if (p.t_pass <= f.t) current = &p;
    }
    if (!current) continue;
    std::optional<PlayerId> carrier;
    if (f.t == current->t_pass) {
      carrier = current->passer;
    } else if (f.t >= current->t_receive) {
      carrier = current->receiver;
    }
    if (!carrier) continue;
    auto it = f.positions.find(*carrier);
    if (it == f.positions.end()) continue;
    sample.second = pressure(it->second, *dir, defenders, params);
  }
  // Every pass instant is sampled from its nearest frame, so short phases
  // without a frame inside their window still get values.
  for (const auto& p : phase.passes) {
    if (samples.count(p.t_pass)) continue;
    const FrameSnapshot* f = nearest_frame(match.frames, p.half, p.t_pass);
    if (!f) continue;
    const auto defenders = team_positions(*f, defending);
    auto& sample = samples[p.t_pass];
    sample.first = covered_area(defenders);
    // Same instant and carrier position as defense_context for this pass.
    if (dir) sample.second = pressure(p.origin, *dir, defenders, params);
  }
  for (const auto& [t, sample] : samples) {
    m.covered_area.emplace_back(t, sample.first);
    if (sample.second) m.pressure.emplace_back(t, *sample.second);
  }
  auto mean = [](const std::vector<std::pair<double, double>>& series) -> std::optional<double> {
    if (series.empty()) return std::nullopt;
    double s = 0.0;
    for (const auto& [t, v] : series) s += v;
    return s / static_cast<double>(series.size());
  };
  m.defense_bar = mean(m.covered_area);
  m.mean_pressure = mean(m.pressure);
  return m;
}

std::vector<DribbleSegment> dribble_segments(const Phase& phase, double min_displacement) {
  std::vector<DribbleSegment> out;
  for (std::size_t i = 1; i < phase.passes.size(); ++i) {
    const Pass& before = phase.passes[i - 1];
    const Pass& after = phase.passes[i];
    if (after.passer != before.receiver) continue;
    if (distance(before.target, after.origin) < min_displacement) continue;
    out.push_back({after.passer, before.t_receive, after.t_pass, before.target, after.origin});
  }
  return out;
}

}  // namespace passtopic
