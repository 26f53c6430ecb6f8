// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "passtopic/cli.hpp"
#include "passtopic/error.hpp"
#include "passtopic/match_data.hpp"
#include "passtopic/match_io.hpp"
#include "passtopic/matrix.hpp"
#include "passtopic/pattern_engine.hpp"
#include "passtopic/pitch_metrics.hpp"
#include "passtopic/seqmine.hpp"
#include "passtopic/service.hpp"
#include "synth.hpp"

using namespace passtopic;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and budgets, pinned.
constexpr double kMonotoneSlack = 1e-9;
constexpr double kRankOneRelative = 1e-6;
constexpr double kHullTolerance = 1e-9;
constexpr double kAriFloor = 0.9;
constexpr double kMonotoneBudgetS = 10.0;
constexpr double kRecoveryBudgetS = 5.0;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome nmf_monotonicity() {
  const auto t0 = Clock::now();
  double worst = -INFINITY;
  bool nonneg = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::bernoulli_distribution bit(0.3);
    Matrix x(11, 200);
    for (std::size_t i = 0; i < 11; ++i) {
      for (std::size_t j = 0; j < 200; ++j) x(i, j) = bit(rng) ? 1.0 : 0.0;
    }
    NmfConfig cfg;
    cfg.seed = seed;
    cfg.max_iters = 500;
    cfg.tol = 0.0;
    const auto f = factorize(x, 3, cfg);
    for (std::size_t i = 1; i < f.objective_trace.size(); ++i) {
      worst = std::max(worst, f.objective_trace[i] - f.objective_trace[i - 1]);
    }
    nonneg = nonneg && std::all_of(f.W.data().begin(), f.W.data().end(), [](double v) { return v >= 0.0; }) &&
             std::all_of(f.H.data().begin(), f.H.data().end(), [](double v) { return v >= 0.0; });
  }
  const double elapsed = seconds_since(t0);
  return {worst <= kMonotoneSlack && nonneg && elapsed < kMonotoneBudgetS,
          fmt("max increase %.3g (limit %.0e), nonnegative=%d, %.2f s (limit %.0f s)", worst, kMonotoneSlack,
              nonneg ? 1 : 0, elapsed, kMonotoneBudgetS)};
}

Outcome nmf_exactness() {
  double worst = 0.0;
  std::size_t worst_iters = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<double> a(11), b(60);
    for (double& v : a) v = u(rng);
    for (double& v : b) v = u(rng);
    Matrix x(11, 60);
    for (std::size_t i = 0; i < 11; ++i) {
      for (std::size_t j = 0; j < 60; ++j) x(i, j) = a[i] * b[j];
    }
    NmfConfig cfg;
    cfg.seed = seed;
    cfg.max_iters = 500;
    const auto f = factorize(x, 1, cfg);
    worst = std::max(worst, f.objective_trace.back() / frobenius_norm(x));
    worst_iters = std::max(worst_iters, f.objective_trace.size() - 1);
  }
  return {worst <= kRankOneRelative,
          fmt("worst final objective / ||X|| = %.3g (limit %.0e), at most %zu iterations", worst, kRankOneRelative,
              worst_iters)};
}

Outcome pattern_recovery() {
  const std::vector<std::vector<int>> groups{{1, 2, 3, 4}, {5, 6, 7, 8}, {9, 10, 11}};
  int good = 0;
  double slowest = 0.0, lowest = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto gm = synth::group_match(500 + seed, groups, 300);
    const auto t0 = Clock::now();
    segment(gm.match);
    DetectConfig cfg;
    cfg.nmf.seed = seed;
    const Detection d = detect_patterns(gm.match, "A", 3, cfg);
    slowest = std::max(slowest, seconds_since(t0));
    std::vector<int> found;
    for (const auto& a : d.assignments) found.push_back(a.pattern_id);
    const double ari = synth::adjusted_rand_index(found, gm.phase_group);
    lowest = std::min(lowest, ari);
    if (ari >= kAriFloor) ++good;
  }
  // Context only, not part of the verdict: how often the seeded start lands
  // in a poor local minimum over a wider seed range.
  int poor = 0;
  for (std::uint64_t seed = 10; seed < 300; ++seed) {
    auto gm = synth::group_match(500 + seed, groups, 300);
    segment(gm.match);
    DetectConfig cfg;
    cfg.nmf.seed = seed;
    std::vector<int> found;
    for (const auto& a : detect_patterns(gm.match, "A", 3, cfg).assignments) found.push_back(a.pattern_id);
    if (synth::adjusted_rand_index(found, gm.phase_group) < kAriFloor) ++poor;
  }
  return {good >= 9 && slowest < kRecoveryBudgetS,
          fmt("%d/10 seeds with ARI >= %.1f (need 9), lowest %.3f, slowest %.3f s (limit %.0f s); "
              "seeds 10-299: %d/290 below the floor",
              good, kAriFloor, lowest, slowest, kRecoveryBudgetS, poor)};
}

Outcome prefixspan_oracle() {
  std::mt19937_64 rng(2024);
  int agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> n_seq(1, 20), len(1, 8), alpha(1, 11);
    const int alphabet = alpha(rng);
    std::uniform_int_distribution<int> tok(0, alphabet - 1);
    std::vector<TokenSequence> seqs(static_cast<std::size_t>(n_seq(rng)));
    for (auto& s : seqs) {
      s.resize(static_cast<std::size_t>(len(rng)));
      for (int& t : s) t = tok(rng);
    }
    const int min_support = std::uniform_int_distribution<int>(1, std::max(1, static_cast<int>(seqs.size()) / 2))(rng);
    const int max_len = std::uniform_int_distribution<int>(1, 8)(rng);
    auto a = prefixspan(seqs, min_support, max_len);
    auto b = brute_force_mine(seqs, min_support, max_len);
    auto key = [](const SequentialPattern& p) { return std::make_pair(p.tokens, p.support); };
    std::vector<std::pair<TokenSequence, int>> ka, kb;
    for (const auto& p : a) ka.push_back(key(p));
    for (const auto& p : b) kb.push_back(key(p));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    if (ka == kb) ++agree;
  }
  return {agree == 200, fmt("%d/200 instances set-equal", agree)};
}

Outcome short_frequent_patterns() {
  int short_seeds = 0;
  std::string lengths;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto corpus = synth::shuffled_participant_corpus(seed, 200);
    const int min_support = static_cast<int>(std::ceil(0.10 * static_cast<double>(corpus.size())));
    std::vector<TokenSequence> seqs(corpus.begin(), corpus.end());
    std::size_t longest = 0;
    for (const auto& p : prefixspan(seqs, min_support, 11)) longest = std::max(longest, p.tokens.size());
    if (longest <= 2) ++short_seeds;
    lengths += std::to_string(longest);
  }
  return {short_seeds >= 18, fmt("%d/20 seeds with longest pattern <= 2 at 10%% support (need 18); longest per seed %s",
                                 short_seeds, lengths.c_str())};
}

Outcome geometry() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(0.0, 105.0), uy(0.0, 68.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Position> pts(11);
    for (auto& p : pts) p = {ux(rng), uy(rng)};
    worst = std::max(worst, std::abs(covered_area(pts) - synth::hull_area_oracle(pts)));
  }
  const std::vector<Position> rect{{0, 0}, {105, 0}, {105, 68}, {0, 68}};
  const std::vector<Position> line{{0, 0}, {10, 5}, {20, 10}, {35, 17.5}};
  const double r = covered_area(rect), c = covered_area(line);
  return {worst <= kHullTolerance && r == 7140.0 && c == 0.0,
          fmt("max |area - oracle| %.3g (limit %.0e), rectangle %.17g, collinear %.17g", worst, kHullTolerance, r, c)};
}

Outcome pressure_properties() {
  const PressureParams params;
  const Position carrier{50, 34};
  const Vec2 ahead{1, 0};
  bool ok = true;
  std::string why;
  if (pressure(carrier, ahead, std::span<const Position>{}, params) != 0.0) ok = false, why += " empty";
  for (int a = 0; a < 36; ++a) {
    const double phi = a * (2.0 * M_PI / 36.0);
    const double reach = pressure_reach(std::cos(phi), params);
    const Position beyond{carrier.x + 1.0001 * reach * std::cos(phi), carrier.y + 1.0001 * reach * std::sin(phi)};
    std::vector<Position> one{beyond};
    if (pressure(carrier, ahead, one, params) != 0.0) ok = false, why += " beyond";
    double prev = INFINITY;
    for (int s = 0; s < 50; ++s) {
      const double d = reach * s / 50.0;
      std::vector<Position> def{{carrier.x + d * std::cos(phi), carrier.y + d * std::sin(phi)}};
      const double v = pressure(carrier, ahead, def, params);
      if (!(v < prev)) ok = false, why += " monotone";
      prev = v;
    }
  }
  std::vector<Position> half{{carrier.x + params.d_front / 2.0, carrier.y}};
  const double h = pressure(carrier, ahead, half, params);
  if (std::abs(h - 0.5) > 1e-12) ok = false, why += " half-reach";
  return {ok, fmt("half reach ahead gives %.17g%s", h, why.c_str())};
}

Outcome segmentation_partition() {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MatchRecord m = synth::random_stream(7000 + seed, 150);
    const auto phases = segment_phases(m);
    std::vector<Pass> joined;
    bool homogeneous = true;
    for (const auto& ph : phases) {
      for (std::size_t i = 0; i < ph.passes.size(); ++i) {
        homogeneous = homogeneous && ph.passes[i].passer.team == ph.team && ph.passes[i].half == ph.half;
      }
      joined.insert(joined.end(), ph.passes.begin(), ph.passes.end());
    }
    const auto again = segment_phases(m);
    bool same = again.size() == phases.size();
    for (std::size_t i = 0; same && i < phases.size(); ++i) {
      same = again[i].passes == phases[i].passes && again[i].team == phases[i].team && again[i].id == phases[i].id;
    }
    if (homogeneous && joined == m.passes() && same) ++good;
  }
  return {good == 100, fmt("%d/100 streams partitioned, ordered, homogeneous and deterministic", good)};
}

Outcome end_to_end_determinism() {
  const std::string fixture = (synth::fixture_dir() / "match_13.json").string();
  synth::TempDir dir("accept");
  const auto a = dir.path() / "a.json", b = dir.path() / "b.json";
  std::ostringstream out, err;
  const int ca = run_cli({"detect", "--input", fixture, "--k", "3", "--seed", "7", "--output", a.string()}, out, err);
  const int cb = run_cli({"detect", "--input", fixture, "--k", "3", "--seed", "7", "--output", b.string()}, out, err);
  const bool cli_same = ca == 0 && cb == 0 && synth::read_text(a) == synth::read_text(b) && !synth::read_text(a).empty();

  ServiceConfig cfg;
  cfg.data_dir = dir.path() / "store";
  std::string id, key, model, flow;
  {
    Service s(cfg);
    auto up = s.handle({"POST", "/matches", {}, synth::read_text(fixture)});
    id = nlohmann::json::parse(up.body).at("match_id");
    auto det = s.handle({"POST", "/matches/" + id + "/detect", {{"team", "HOM"}, {"k", "3"}, {"seed", "7"}}, ""});
    key = nlohmann::json::parse(det.body).at("model");
    model = s.handle({"GET", "/matches/" + id + "/models/" + key, {}, ""}).body;
    flow = s.handle({"GET", "/matches/" + id + "/flow", {{"model", key}}, ""}).body;
  }
  Service restarted(cfg);
  const bool store_same = restarted.handle({"GET", "/matches/" + id + "/models/" + key, {}, ""}).body == model &&
                          restarted.handle({"GET", "/matches/" + id + "/flow", {{"model", key}}, ""}).body == flow;
  const bool cli_matches_service = synth::read_text(a) == model;
  return {cli_same && store_same,
          fmt("cli exports identical=%d, service restart identical=%d, cli export equals stored model=%d",
              cli_same ? 1 : 0, store_same ? 1 : 0, cli_matches_service ? 1 : 0)};
}

Outcome heatmap_conservation() {
  std::vector<MatchRecord> matches;
  matches.push_back(parse_match(synth::read_text(synth::fixture_dir() / "match_13.json")));
  for (std::uint64_t seed = 0; seed < 20; ++seed) matches.push_back(synth::random_match(seed));
  int checked = 0, good = 0;
  for (auto& m : matches) {
    for (const auto& team : m.teams) {
      MatchRecord view = normalize_direction(m, team.id);
      segment(view);
      const auto phases = phases_of_team(view.phases, team.id);
      std::size_t passes = 0;
      for (const auto& p : phases) passes += p.passes.size();
      ++checked;
      if (pattern_heatmap(phases).total() == static_cast<long long>(2 * passes)) ++good;
    }
  }
  return {good == checked, fmt("%d/%d team views with grid sum = 2 x passes", good, checked)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"nmf-monotonicity", nmf_monotonicity},
      {"nmf-exactness", nmf_exactness},
      {"pattern-recovery", pattern_recovery},
      {"prefixspan-oracle", prefixspan_oracle},
      {"short-frequent-patterns", short_frequent_patterns},
      {"geometry", geometry},
      {"pressure-properties", pressure_properties},
      {"segmentation-partition", segmentation_partition},
      {"end-to-end-determinism", end_to_end_determinism},
      {"heatmap-conservation", heatmap_conservation},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    if (!o.pass) ++failed;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
