#include <doctest.h>

#include <algorithm>
#include <random>

#include "passtopic/error.hpp"
#include "passtopic/match_io.hpp"
#include "passtopic/seqmine.hpp"
#include "synth.hpp"

using namespace passtopic;

namespace {

std::vector<synth::OraclePattern> as_oracle(const std::vector<SequentialPattern>& ps) {
  std::vector<synth::OraclePattern> out;
  for (const auto& p : ps) out.push_back({p.tokens, p.support});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TokenSequence> random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_seq(1, 12), len(1, 6), tok(0, 5);
  std::vector<TokenSequence> seqs(static_cast<std::size_t>(n_seq(rng)));
  for (auto& s : seqs) {
    s.resize(static_cast<std::size_t>(len(rng)));
    for (auto& t : s) t = tok(rng);
  }
  return seqs;
}

}  // namespace

TEST_SUITE("prefixspan") {
  TEST_CASE("two sequences sharing a prefix") {
    std::vector<TokenSequence> seqs{{1, 2, 3}, {1, 2, 4}};
    auto got = prefixspan(seqs, 2, 5);
    std::vector<SequentialPattern> expected{{{1}, 2}, {{2}, 2}, {{1, 2}, 2}};
    CHECK(got == expected);
  }

  TEST_CASE("support counts sequences, not occurrences") {
    std::vector<TokenSequence> seqs{{1, 1}};
    std::vector<SequentialPattern> expected{{{1}, 1}, {{1, 1}, 1}};
    CHECK(prefixspan(seqs, 1, 5) == expected);
  }

  TEST_CASE("support above the number of sequences") {
    std::vector<TokenSequence> seqs{{1, 2}, {2, 1}};
    CHECK(prefixspan(seqs, 3, 5).empty());
  }

  TEST_CASE("gaps are allowed") {
    std::vector<TokenSequence> seqs{{1, 9, 2}, {1, 2}, {1, 7, 7, 2}};
    auto got = prefixspan(seqs, 3, 2);
    CHECK(std::find(got.begin(), got.end(), SequentialPattern{{1, 2}, 3}) != got.end());
  }

  TEST_CASE("ordering: support, then length, then tokens") {
    std::vector<TokenSequence> seqs{{3, 1, 2}, {3, 1}, {2, 3}};
    auto got = prefixspan(seqs, 1, 3);
    for (std::size_t i = 1; i < got.size(); ++i) {
      const auto& a = got[i - 1];
      const auto& b = got[i];
      const bool ordered = a.support > b.support ||
                           (a.support == b.support && (a.tokens.size() < b.tokens.size() ||
                                                       (a.tokens.size() == b.tokens.size() && a.tokens < b.tokens)));
      CHECK(ordered);
    }
  }

  TEST_CASE("argument errors") {
    std::vector<TokenSequence> none;
    std::vector<TokenSequence> one{{1}};
    CHECK_THROWS_AS(prefixspan(none, 1, 2), Error);
    CHECK_THROWS_AS(prefixspan(one, 0, 2), Error);
    CHECK_THROWS_AS(prefixspan(one, 1, 0), Error);
  }

  TEST_CASE("anti-monotone prefixes") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      auto seqs = random_instance(rng);
      auto got = prefixspan(seqs, 2, 4);
      for (const auto& p : got) {
        if (p.tokens.size() < 2) continue;
        std::vector<int> prefix(p.tokens.begin(), p.tokens.end() - 1);
        auto it = std::find_if(got.begin(), got.end(), [&](const auto& q) { return q.tokens == prefix; });
        REQUIRE(it != got.end());
        CHECK(it->support >= p.support);
      }
    }
  }

  TEST_CASE("agrees with the enumeration oracle") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
      auto seqs = random_instance(rng);
      const int min_support = 1 + trial % 3;
      const int max_len = 1 + trial % 4;
      auto oracle = synth::enumerate_frequent(seqs, min_support, max_len);
      CHECK(as_oracle(prefixspan(seqs, min_support, max_len)) == oracle);
      CHECK(as_oracle(brute_force_mine(seqs, min_support, max_len)) == oracle);
    }
  }
}

TEST_SUITE("brute_force_mine") {
  TEST_CASE("max length one gives the frequent tokens") {
    std::vector<TokenSequence> seqs{{4, 4, 5}, {5, 6}, {4}};
    std::vector<SequentialPattern> expected{{{4}, 2}, {{5}, 2}};
    CHECK(brute_force_mine(seqs, 2, 1) == expected);
  }

  TEST_CASE("guards") {
    std::vector<TokenSequence> none;
    CHECK_THROWS_AS(brute_force_mine(none, 1, 2), Error);
    std::vector<TokenSequence> big(21, TokenSequence(10, 1));
    try {
      brute_force_mine(big, 1, 2);
      FAIL("expected input_too_large");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::input_too_large);
    }
  }
}

TEST_SUITE("mining corpus") {
  TEST_CASE("player chain inserts the passer when the chain breaks") {
    Phase ph;
    ph.team = "A";
    ph.passes = {synth::make_pass("A", 2, 3, 1, 1.0), synth::make_pass("A", 3, 4, 1, 2.0),
                 synth::make_pass("A", 6, 7, 1, 3.0)};
    auto chain = player_chain(ph);
    std::vector<int> shirts;
    for (const auto& id : chain) shirts.push_back(id.shirt);
    CHECK(shirts == std::vector<int>{2, 3, 4, 6, 7});
  }

  TEST_CASE("role tokens") {
    MatchRecord m = synth::two_team_match();
    // shirts 1 keeper, 2-5 defenders, 6-9 midfielders, 10-11 forwards
    m.events.emplace_back(synth::make_pass("A", 1, 3, 1, 1.0));
    m.events.emplace_back(synth::make_pass("A", 3, 7, 1, 2.0));
    m.events.emplace_back(synth::make_pass("A", 7, 10, 1, 3.0));
    segment(m);
    auto roles = mining_corpus(m, "A", SequenceMode::role);
    REQUIRE(roles.sequences.size() == 1);
    CHECK(roles.sequences[0] == TokenSequence{0, 0, 1, 2});
    CHECK(roles.labels[0] == "guard");
    auto players = mining_corpus(m, "A", SequenceMode::player);
    CHECK(players.sequences[0] == TokenSequence{0, 2, 6, 9});
    CHECK(players.labels[9] == "A#10");
  }

  TEST_CASE("tsv export") {
    std::vector<SequentialPattern> ps{{{0, 1}, 3}};
    std::vector<std::string> labels{"A#1", "A#2"};
    CHECK(patterns_to_tsv(ps, labels) == "tokens\tsupport\tlength\nA#1 A#2\t3\t2\n");
  }
}
