#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "passtopic/match_data.hpp"
#include "passtopic/matrix.hpp"
#include "passtopic/types.hpp"

namespace passtopic {

// --- documents and corpus ---------------------------------------------------

enum class CountMode { binary, count };

const char* to_string(CountMode mode);
std::optional<CountMode> parse_count_mode(const std::string& text);

struct DocumentVector {
  int phase_id = 0;
  std::vector<double> counts;
};

// Token stream of a phase: passer then receiver of every pass, or in region
// mode the origin region then the target region.
std::vector<Word> phase_tokens(const Phase& phase, WordMode mode);

DocumentVector phase_to_document(const Phase& phase, const PlayerDictionary& dict,
                                 CountMode mode = CountMode::binary);

struct Corpus {
  Matrix X;  // dictionary entries x phases
  PlayerDictionary dictionary;
  std::vector<int> phase_ids;
  CountMode mode = CountMode::binary;
};

// Columns follow the order of `phases`, which must be chronological.
// style_filter = build_up drops counter-attack phases (unlabeled ones stay);
// style_filter = counter_attack keeps only those.
Corpus build_corpus(std::span<const Phase> phases, const PlayerDictionary& dict,
                    CountMode mode = CountMode::binary,
                    std::optional<Style> style_filter = std::nullopt);

// --- factorization ----------------------------------------------------------

inline constexpr double kNmfDamping = 1e-12;

struct NmfConfig {
  int max_iters = 500;
  double tol = 1e-6;  // relative objective decrease that counts as converged
  std::uint64_t seed = 0;
  // Wall-clock budget; exceeding it raises ErrorCode::timeout.
  std::optional<std::chrono::milliseconds> time_budget;
};

struct Factorization {
  Matrix W;  // m x k
  Matrix H;  // k x n
  std::vector<double> objective_trace;  // ‖X − W·H‖_F, entry 0 is the initial guess
  bool converged = false;
};

// Lee–Seung multiplicative updates for the Frobenius objective. W and H start
// uniform in (0, 1) from a generator seeded with config.seed.
Factorization factorize(const Matrix& X, int k, const NmfConfig& config);

// Rescales each column of W to peak at 1 and folds the scale into the
// matching row of H, leaving W·H unchanged.
void max_normalize(Factorization& f);

struct PhaseAssignment {
  int phase_id = 0;
  int pattern_id = 0;
  bool degenerate = false;  // column of H was all zeros

  bool operator==(const PhaseAssignment&) const = default;
};

// argmax with ties going to the lowest index.
PhaseAssignment assign_column(int phase_id, std::span<const double> column);

struct PatternModel {
  Matrix W;  // columns max-normalized into [0, 1]
  Matrix H;
  int k = 0;
  std::vector<double> objective_trace;
  std::vector<int> phase_ids;
  std::vector<PhaseAssignment> assignments;
  NmfConfig config;
  bool converged = false;

  std::uint64_t seed() const { return config.seed; }
};

PatternModel nmf_fit(const Corpus& corpus, int k, const NmfConfig& config = {});

std::vector<PhaseAssignment> assign_phases(const PatternModel& model);

// --- passing patterns -------------------------------------------------------

inline constexpr double kDefaultKeyThreshold = 0.5;

struct PassingPattern {
  int pattern_id = 0;
  std::vector<double> weights;          // one per dictionary entry, in [0, 1]
  std::vector<std::size_t> key_players;  // dictionary indices, ascending
  int frequency = 0;
  Style style = Style::build_up;
};

// Entries whose weight reaches `theta` times the column maximum.
std::vector<std::size_t> key_entries(std::span<const double> weights, double theta);

PassingPattern extract_pattern(const PatternModel& model, int pattern_id,
                               double theta = kDefaultKeyThreshold);

struct DetectConfig {
  NmfConfig nmf;
  CountMode count_mode = CountMode::binary;
  WordMode word_mode = WordMode::player;
  double theta = kDefaultKeyThreshold;
};

struct Detection {
  TeamId team;
  int k = 0;
  DetectConfig config;
  PlayerDictionary dictionary;
  std::optional<PatternModel> model;  // absent when there were no build-up phases
  std::vector<PassingPattern> patterns;  // build-up patterns, then the counter-attack aggregate
  std::vector<PhaseAssignment> assignments;  // every phase of `team`, chronological

  const PassingPattern* counter_attack_pattern() const;
  std::optional<int> pattern_of(int phase_id) const;
};

// Fits build-up phases of `team` and appends one aggregate pattern for its
// counter-attack phases. Unlabeled phases are treated as build-up.
// `match` must already be segmented.
Detection detect_patterns(const MatchRecord& match, const TeamId& team, int k,
                          const DetectConfig& config = {});

}  // namespace passtopic
