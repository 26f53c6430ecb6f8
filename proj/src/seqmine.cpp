#include "passtopic/seqmine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "passtopic/error.hpp"

namespace passtopic {

void sort_patterns(std::vector<SequentialPattern>& patterns) {
  std::sort(patterns.begin(), patterns.end(), [](const SequentialPattern& a, const SequentialPattern& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.tokens.size() != b.tokens.size()) return a.tokens.size() < b.tokens.size();
    return a.tokens < b.tokens;
  });
}

namespace {

void check_arguments(std::span<const TokenSequence> sequences, int min_support, int max_len) {
  if (sequences.empty()) throw Error(ErrorCode::invalid_argument, "no sequences to mine", "sequences");
  if (min_support < 1) throw Error(ErrorCode::invalid_argument, "min_support must be >= 1", "min_support");
  if (max_len < 1) throw Error(ErrorCode::invalid_argument, "max_len must be >= 1", "max_len");
}

// A suffix of one sequence: the part after the current prefix's match.
struct Projection {
  std::size_t seq;
  std::size_t start;
};

class PrefixGrowth {
 public:
  PrefixGrowth(std::span<const TokenSequence> db, int min_support, int max_len)
      : db_(db), min_support_(min_support), max_len_(static_cast<std::size_t>(max_len)) {}

  std::vector<SequentialPattern> run() {
    std::vector<Projection> all;
    for (std::size_t s = 0; s < db_.size(); ++s) all.push_back({s, 0});
    grow(all);
    return std::move(out_);
  }

 private:
  void grow(const std::vector<Projection>& projected) {
    if (prefix_.size() >= max_len_) return;

    std::map<int, int> support;
    for (const auto& p : projected) {
      const auto& seq = db_[p.seq];
      std::set<int> seen(seq.begin() + static_cast<std::ptrdiff_t>(p.start), seq.end());
      for (int token : seen) ++support[token];
    }

    for (const auto& [token, count] : support) {
      if (count < min_support_) continue;
      std::vector<Projection> next;
      next.reserve(static_cast<std::size_t>(count));
      for (const auto& p : projected) {
        const auto& seq = db_[p.seq];
        auto it = std::find(seq.begin() + static_cast<std::ptrdiff_t>(p.start), seq.end(), token);
        if (it != seq.end()) next.push_back({p.seq, static_cast<std::size_t>(it - seq.begin()) + 1});
      }
      prefix_.push_back(token);
      out_.push_back({prefix_, count});
      grow(next);
      prefix_.pop_back();
    }
  }

  std::span<const TokenSequence> db_;
  int min_support_;
  std::size_t max_len_;
  std::vector<int> prefix_;
  std::vector<SequentialPattern> out_;
};

void collect_subsequences(const TokenSequence& seq, std::size_t from, std::size_t max_len, std::vector<int>& current,
                          std::set<std::vector<int>>& out) {
  for (std::size_t i = from; i < seq.size(); ++i) {
    current.push_back(seq[i]);
    out.insert(current);
    if (current.size() < max_len) collect_subsequences(seq, i + 1, max_len, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<SequentialPattern> prefixspan(std::span<const TokenSequence> sequences, int min_support, int max_len) {
  check_arguments(sequences, min_support, max_len);
  auto patterns = PrefixGrowth(sequences, min_support, max_len).run();
  sort_patterns(patterns);
  return patterns;
}

std::vector<SequentialPattern> brute_force_mine(std::span<const TokenSequence> sequences, int min_support,
                                                int max_len) {
  check_arguments(sequences, min_support, max_len);
  std::size_t total = 0;
  for (const auto& s : sequences) total += s.size();
  if (total > kBruteForceTokenLimit) {
    throw Error(ErrorCode::input_too_large,
                std::to_string(total) + " tokens exceed the enumeration limit of " +
                    std::to_string(kBruteForceTokenLimit),
                "sequences");
  }

  std::map<std::vector<int>, int> support;
  for (const auto& seq : sequences) {
    std::set<std::vector<int>> distinct;
    std::vector<int> current;
    collect_subsequences(seq, 0, static_cast<std::size_t>(max_len), current, distinct);
    for (const auto& sub : distinct) ++support[sub];
  }
  std::vector<SequentialPattern> patterns;
  for (auto& [tokens, count] : support) {
    if (count >= min_support) patterns.push_back({tokens, count});
  }
  sort_patterns(patterns);
  return patterns;
}

const char* to_string(SequenceMode mode) { return mode == SequenceMode::role ? "role" : "player"; }

std::vector<PlayerId> player_chain(const Phase& phase) {
  std::vector<PlayerId> chain;
  for (const auto& p : phase.passes) {
    if (chain.empty() || chain.back() != p.passer) chain.push_back(p.passer);
    chain.push_back(p.receiver);
  }
  return chain;
}

namespace {

int role_token(Role role) {
  switch (role) {
    case Role::goalkeeper:
    case Role::defender:
      return 0;
    case Role::midfielder:
      return 1;
    case Role::forward:
      return 2;
  }
  return 1;
}

}  // namespace

MiningCorpus mining_corpus(const MatchRecord& match, const TeamId& team, SequenceMode mode) {
  const TeamRoster& roster = match.team(team);
  MiningCorpus corpus;
  PlayerDictionary dict;
  if (mode == SequenceMode::player) {
    dict = build_dictionary(roster);
    for (std::size_t i = 0; i < dict.size(); ++i) corpus.labels.push_back(dict.label(i));
  } else {
    corpus.labels = {"guard", "midfielder", "forward"};
  }
  for (const auto& phase : match.phases) {
    if (phase.team != team) continue;
    TokenSequence seq;
    for (const auto& id : player_chain(phase)) {
      if (mode == SequenceMode::player) {
        seq.push_back(static_cast<int>(*dict.index_of(id)));
      } else {
        seq.push_back(role_token(roster.find(id.shirt)->role));
      }
    }
    corpus.sequences.push_back(std::move(seq));
    corpus.phase_ids.push_back(phase.id);
  }
  return corpus;
}

std::string patterns_to_tsv(std::span<const SequentialPattern> patterns, std::span<const std::string> labels) {
  std::ostringstream out;
  out << "tokens\tsupport\tlength\n";
  for (const auto& p : patterns) {
    for (std::size_t i = 0; i < p.tokens.size(); ++i) {
      if (i) out << ' ';
      const auto t = static_cast<std::size_t>(p.tokens[i]);
      if (t < labels.size()) {
        out << labels[t];
      } else {
        out << p.tokens[i];
      }
    }
    out << '\t' << p.support << '\t' << p.tokens.size() << '\n';
  }
  return out.str();
}

}  // namespace passtopic
