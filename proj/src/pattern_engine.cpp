#include "passtopic/pattern_engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "passtopic/error.hpp"
#include "passtopic/pitch_metrics.hpp"

namespace passtopic {

const char* to_string(CountMode mode) { return mode == CountMode::count ? "count" : "binary"; }

std::optional<CountMode> parse_count_mode(const std::string& text) {
  if (text == "binary") return CountMode::binary;
  if (text == "count") return CountMode::count;
  return std::nullopt;
}

std::vector<Word> phase_tokens(const Phase& phase, WordMode mode) {
  std::vector<Word> tokens;
  tokens.reserve(phase.passes.size() * 2);
  for (const auto& p : phase.passes) {
    if (mode == WordMode::player) {
      tokens.emplace_back(p.passer);
      tokens.emplace_back(p.receiver);
    } else {
      tokens.emplace_back(spatial_region(p.origin));
      tokens.emplace_back(spatial_region(p.target));
    }
  }
  return tokens;
}

DocumentVector phase_to_document(const Phase& phase, const PlayerDictionary& dict, CountMode mode) {
  DocumentVector doc{phase.id, std::vector<double>(dict.size(), 0.0)};
  for (const auto& token : phase_tokens(phase, dict.mode())) {
    auto idx = dict.index_of(token);
    if (!idx) {
      throw Error(ErrorCode::missing_word,
                  "phase " + std::to_string(phase.id) + ": " + word_label(token) + " is not in the dictionary",
                  "dictionary");
    }
    if (mode == CountMode::binary) {
      doc.counts[*idx] = 1.0;
    } else {
      doc.counts[*idx] += 1.0;
    }
  }
  return doc;
}

Corpus build_corpus(std::span<const Phase> phases, const PlayerDictionary& dict, CountMode mode,
                    std::optional<Style> style_filter) {
  std::vector<const Phase*> kept;
  for (const auto& p : phases) {
    if (style_filter == Style::build_up && p.style == Style::counter_attack) continue;
    if (style_filter == Style::counter_attack && p.style != Style::counter_attack) continue;
    kept.push_back(&p);
  }
  if (kept.empty()) throw Error(ErrorCode::empty_corpus, "no phases left to build a corpus from", "phases");

  Corpus corpus{Matrix(dict.size(), kept.size()), dict, {}, mode};
  corpus.phase_ids.reserve(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) {
    auto doc = phase_to_document(*kept[j], dict, mode);
    for (std::size_t i = 0; i < doc.counts.size(); ++i) corpus.X(i, j) = doc.counts[i];
    corpus.phase_ids.push_back(doc.phase_id);
  }
  return corpus;
}

namespace {

// Uniform in the open interval (0, 1); spelled out so the sequence does not
// depend on the standard library's distribution implementation.
double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

// target ∘= numer / (denom + ε)
void multiplicative_step(Matrix& target, const Matrix& numer, const Matrix& denom) {
  for (std::size_t r = 0; r < target.rows(); ++r) {
    auto t = target.row(r);
    auto n = numer.row(r);
    auto d = denom.row(r);
    for (std::size_t c = 0; c < t.size(); ++c) t[c] *= n[c] / (d[c] + kNmfDamping);
  }
}

}  // namespace

Factorization factorize(const Matrix& X, int k, const NmfConfig& config) {
  const std::size_t m = X.rows();
  const std::size_t n = X.cols();
  if (k < 1 || static_cast<std::size_t>(k) > std::min(m, n)) {
    throw Error(ErrorCode::invalid_k,
                "k = " + std::to_string(k) + " outside [1, " + std::to_string(std::min(m, n)) + "]", "k");
  }
  if (config.max_iters < 1) throw Error(ErrorCode::invalid_argument, "max_iters must be >= 1", "max_iters");
  if (!(config.tol >= 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be >= 0", "tol");
  bool any_positive = false;
  for (double v : X.data()) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::invalid_argument, "corpus must be finite and nonnegative", "X");
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) throw Error(ErrorCode::zero_corpus, "corpus is all zeros", "X");

  const auto started = std::chrono::steady_clock::now();
  const auto uk = static_cast<std::size_t>(k);
  Factorization f{Matrix(m, uk), Matrix(uk, n), {}, false};
  std::mt19937_64 rng(config.seed);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < uk; ++j) f.W(i, j) = open_unit(rng);
  }
  for (std::size_t i = 0; i < uk; ++i) {
    for (std::size_t j = 0; j < n; ++j) f.H(i, j) = open_unit(rng);
  }

  f.objective_trace.reserve(static_cast<std::size_t>(config.max_iters) + 1);
  f.objective_trace.push_back(residual_norm(X, f.W, f.H));

  for (int it = 0; it < config.max_iters; ++it) {
    // H ← H ∘ (WᵀX) / (WᵀW·H)
    Matrix wtx = multiply_at_b(f.W, X);
    Matrix wtwh = multiply(multiply_at_b(f.W, f.W), f.H);
    multiplicative_step(f.H, wtx, wtwh);

    // W ← W ∘ (X·Hᵀ) / (W·H·Hᵀ)
    Matrix xht = multiply_a_bt(X, f.H);
    Matrix whht = multiply(f.W, multiply_a_bt(f.H, f.H));
    multiplicative_step(f.W, xht, whht);

    const double prev = f.objective_trace.back();
    const double obj = residual_norm(X, f.W, f.H);
    f.objective_trace.push_back(obj);
    if (prev == 0.0 || (prev - obj) / prev < config.tol) {
      f.converged = true;
      break;
    }
    if (config.time_budget && std::chrono::steady_clock::now() - started > *config.time_budget) {
      throw Error(ErrorCode::timeout, "factorization exceeded its time budget", "time_budget");
    }
  }
  return f;
}

void max_normalize(Factorization& f) {
  for (std::size_t j = 0; j < f.W.cols(); ++j) {
    double peak = 0.0;
    for (std::size_t i = 0; i < f.W.rows(); ++i) peak = std::max(peak, f.W(i, j));
    if (peak <= 0.0) continue;
    for (std::size_t i = 0; i < f.W.rows(); ++i) f.W(i, j) /= peak;
    for (double& h : f.H.row(j)) h *= peak;
  }
}

PhaseAssignment assign_column(int phase_id, std::span<const double> column) {
  PhaseAssignment a{phase_id, 0, true};
  double best = 0.0;
  for (std::size_t r = 0; r < column.size(); ++r) {
    if (column[r] > best) {
      best = column[r];
      a.pattern_id = static_cast<int>(r);
      a.degenerate = false;
    }
  }
  return a;
}

std::vector<PhaseAssignment> assign_phases(const PatternModel& model) {
  std::vector<PhaseAssignment> out;
  out.reserve(model.H.cols());
  for (std::size_t j = 0; j < model.H.cols(); ++j) {
    out.push_back(assign_column(model.phase_ids.at(j), model.H.column(j)));
  }
  return out;
}

PatternModel nmf_fit(const Corpus& corpus, int k, const NmfConfig& config) {
  Factorization f = factorize(corpus.X, k, config);
  max_normalize(f);
  PatternModel model;
  model.W = std::move(f.W);
  model.H = std::move(f.H);
  model.k = k;
  model.objective_trace = std::move(f.objective_trace);
  model.phase_ids = corpus.phase_ids;
  model.config = config;
  model.converged = f.converged;
  model.assignments = assign_phases(model);
  return model;
}

std::vector<std::size_t> key_entries(std::span<const double> weights, double theta) {
  const double peak = weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end());
  std::vector<std::size_t> keys;
  if (peak <= 0.0) return keys;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] >= theta * peak) keys.push_back(i);
  }
  return keys;
}

namespace {

// Scales into [0, 1] with the maximum at exactly 1.
std::vector<double> peak_normalized(std::vector<double> v) {
  const double peak = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  if (peak > 0.0) {
    for (double& x : v) x /= peak;
  }
  return v;
}

}  // namespace

PassingPattern extract_pattern(const PatternModel& model, int pattern_id, double theta) {
  if (pattern_id < 0 || pattern_id >= model.k) {
    throw Error(ErrorCode::invalid_argument, "pattern id " + std::to_string(pattern_id) + " out of range", "pattern_id");
  }
  PassingPattern p;
  p.pattern_id = pattern_id;
  p.style = Style::build_up;
  p.weights = peak_normalized(model.W.column(static_cast<std::size_t>(pattern_id)));
  if (std::none_of(p.weights.begin(), p.weights.end(), [](double w) { return w > 0.0; })) {
    throw Error(ErrorCode::degenerate_topic, "topic " + std::to_string(pattern_id) + " has an all-zero column",
                "W");
  }
  p.key_players = key_entries(p.weights, theta);
  p.frequency = static_cast<int>(std::count_if(model.assignments.begin(), model.assignments.end(),
                                               [&](const PhaseAssignment& a) { return a.pattern_id == pattern_id; }));
  return p;
}

const PassingPattern* Detection::counter_attack_pattern() const {
  for (const auto& p : patterns) {
    if (p.style == Style::counter_attack) return &p;
  }
  return nullptr;
}

std::optional<int> Detection::pattern_of(int phase_id) const {
  for (const auto& a : assignments) {
    if (a.phase_id == phase_id) return a.pattern_id;
  }
  return std::nullopt;
}

Detection detect_patterns(const MatchRecord& match, const TeamId& team, int k, const DetectConfig& config) {
  if (k < 1) throw Error(ErrorCode::invalid_k, "k must be >= 1", "k");
  if (!(config.theta > 0.0 && config.theta <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "theta must lie in (0, 1]", "theta");
  }
  Detection d;
  d.team = team;
  d.k = k;
  d.config = config;
  d.dictionary = config.word_mode == WordMode::player ? build_dictionary(match.team(team)) : build_region_dictionary();

  std::vector<Phase> build_up;
  std::vector<Phase> counter;
  for (const auto& p : match.phases) {
    if (p.team != team) continue;
    (p.style == Style::counter_attack ? counter : build_up).push_back(p);
  }

  std::map<int, int> pattern_by_phase;
  int next_id = 0;
  if (!build_up.empty()) {
    Corpus corpus = build_corpus(build_up, d.dictionary, config.count_mode, Style::build_up);
    d.model = nmf_fit(corpus, k, config.nmf);
    for (int t = 0; t < k; ++t) d.patterns.push_back(extract_pattern(*d.model, t, config.theta));
    for (const auto& a : d.model->assignments) pattern_by_phase[a.phase_id] = a.pattern_id;
    next_id = k;
  }
  if (!counter.empty()) {
    PassingPattern agg;
    agg.pattern_id = next_id;
    agg.style = Style::counter_attack;
    agg.frequency = static_cast<int>(counter.size());
    std::vector<double> participation(d.dictionary.size(), 0.0);
    for (const auto& p : counter) {
      auto doc = phase_to_document(p, d.dictionary, CountMode::binary);
      for (std::size_t i = 0; i < participation.size(); ++i) participation[i] += doc.counts[i];
      pattern_by_phase[p.id] = next_id;
    }
    agg.weights = peak_normalized(std::move(participation));
    agg.key_players = key_entries(agg.weights, config.theta);
    d.patterns.push_back(std::move(agg));
  }

  std::map<int, bool> degenerate;
  if (d.model) {
    for (const auto& a : d.model->assignments) degenerate[a.phase_id] = a.degenerate;
  }
  for (const auto& p : match.phases) {
    if (p.team != team) continue;
    d.assignments.push_back({p.id, pattern_by_phase.at(p.id), degenerate[p.id]});
  }
  return d;
}

}  // namespace passtopic
