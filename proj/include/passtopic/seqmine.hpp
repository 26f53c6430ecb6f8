#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "passtopic/match_data.hpp"
#include "passtopic/types.hpp"

namespace passtopic {

using TokenSequence = std::vector<int>;

struct SequentialPattern {
  std::vector<int> tokens;
  int support = 0;  // number of input sequences containing `tokens` as a subsequence

  bool operator==(const SequentialPattern&) const = default;
};

// Descending support, then ascending length, then lexicographic tokens.
void sort_patterns(std::vector<SequentialPattern>& patterns);

// Frequent (not necessarily contiguous) subsequences of length <= max_len via
// prefix-projected pattern growth.
std::vector<SequentialPattern> prefixspan(std::span<const TokenSequence> sequences, int min_support, int max_len);

inline constexpr std::size_t kBruteForceTokenLimit = 200;

// Same contract as prefixspan by enumerating every index subset of every
// sequence. Refuses inputs above kBruteForceTokenLimit tokens in total.
std::vector<SequentialPattern> brute_force_mine(std::span<const TokenSequence> sequences, int min_support,
                                                int max_len);

enum class SequenceMode { player, role };

const char* to_string(SequenceMode mode);

// Token alphabets for mining one team's phases.
struct MiningCorpus {
  std::vector<TokenSequence> sequences;  // one per phase, chronological
  std::vector<int> phase_ids;
  std::vector<std::string> labels;  // token -> display label
};

// The player chain of a phase: first passer, then each receiver, with a
// passer inserted whenever the ball changes hands off the pass chain.
std::vector<PlayerId> player_chain(const Phase& phase);

// In role mode every player maps to guard (goalkeeper and defenders),
// midfielder, or forward.
MiningCorpus mining_corpus(const MatchRecord& match, const TeamId& team, SequenceMode mode);

// Tab-separated table with a header: tokens, support, length.
std::string patterns_to_tsv(std::span<const SequentialPattern> patterns, std::span<const std::string> labels);

}  // namespace passtopic
