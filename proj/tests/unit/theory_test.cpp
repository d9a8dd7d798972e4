// Copyright 2026 The ngpkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <chrono>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "ngpkit/error.hpp"
#include "ngpkit/theory.hpp"
#include "oracles.hpp"

using namespace ngpkit;
namespace t = ngpkit::testing;

namespace {

std::set<Fact> ic_facts(const TheoryStore& store) {
  std::set<Fact> out;
  for (const auto& ic : store.ics()) out.insert(ic.fact);
  return out;
}

// Straight transcription of the pair-sparsity construction: count facts per
// (s,o), (s,p) and (p,o) pair, and forbid every unknown completion of a pair
// with at most kappa known facts.
std::set<Fact> kg_complement_oracle(const std::set<Fact>& known, std::size_t ns, std::size_t np,
                                    std::size_t no, std::size_t kappa) {
  auto count = [&](auto match) {
    std::size_t n = 0;
    for (const auto& f : known) n += match(f) ? 1 : 0;
    return n;
  };
  std::set<Fact> out;
  for (std::uint32_t s = 0; s < ns; ++s)
    for (std::uint32_t p = 0; p < np; ++p)
      for (std::uint32_t o = 0; o < no; ++o) {
        const Fact f{s, p, o};
        if (known.contains(f)) continue;
        const bool so = count([&](const Fact& k) { return k.s == s && k.o == o; }) <= kappa;
        const bool sp = count([&](const Fact& k) { return k.s == s && k.p == p; }) <= kappa;
        const bool po = count([&](const Fact& k) { return k.p == p && k.o == o; }) <= kappa;
        if (so || sp || po) out.insert(f);
      }
  return out;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ngpkit_theory_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("complement of facts") {
  const auto vocab = std::make_shared<const Vocabulary>(std::vector<std::string>{"a"},
                                                        std::vector<std::string>{"p", "q"},
                                                        std::vector<std::string>{"b"});
  const std::vector<Fact> positive{{0, 0, 0}};
  const auto store = build_complement_of_facts(vocab, positive);
  CHECK(store.representation() == TheoryRepresentation::ComplementOfPositive);
  CHECK(store.ic_count() == 1);
  CHECK(store.contains_ic({0, 1, 0}));
  CHECK_FALSE(store.contains_ic({0, 0, 0}));
  CHECK_FALSE(store.contains_ic({0, 2, 0}));
  REQUIRE(store.ics().size() == 1);
  CHECK(store.ics()[0].fact == Fact{0, 1, 0});

  const std::vector<Fact> everything{{0, 0, 0}, {0, 1, 0}};
  const auto empty = build_complement_of_facts(vocab, everything);
  CHECK(empty.ic_count() == 0);
  CHECK_FALSE(empty.contains_ic({0, 0, 0}));
  CHECK_FALSE(empty.contains_ic({0, 1, 0}));

  const std::vector<Fact> invalid{{0, 5, 0}};
  CHECK_THROWS_AS(build_complement_of_facts(vocab, invalid), ValidationError);
}

TEST_CASE("complement theory at large-vocabulary scale") {
  const auto vocab = t::numbered_vocab(150, 50, 150);
  std::mt19937_64 rng(31);
  std::set<Fact> pos;
  while (pos.size() < 100000) pos.insert(t::random_fact(rng, 150, 50, 150));
  const std::vector<Fact> positive(pos.begin(), pos.end());
  const auto store = build_complement_of_facts(vocab, positive);
  CHECK(store.ic_count() == 1025000);
  const auto stats = theory_stats(store);
  CHECK(stats.ic_count == 1025000);
  std::uint64_t sum = 0;
  for (auto n : stats.per_predicate) sum += n;
  CHECK(sum == 1025000);
  for (int i = 0; i < 1000; ++i) {
    const Fact f = t::random_fact(rng, 150, 50, 150);
    CHECK(store.contains_ic(f) == !pos.contains(f));
  }
}

TEST_CASE("knowledge-graph complement: hand-traced fixtures") {
  const auto catmat = std::make_shared<const Vocabulary>(std::vector<std::string>{"cat"},
                                                         std::vector<std::string>{"on", "eats"},
                                                         std::vector<std::string>{"mat"});
  const KgTripleSet on_cat_mat{{"cat", "on", "mat"}};
  const auto t1 = build_from_kg_complement(on_cat_mat, catmat, 9);
  CHECK(t1.representation() == TheoryRepresentation::ExplicitNegative);
  CHECK(ic_facts(t1) == std::set<Fact>{{0, 1, 0}});

  const auto apb = std::make_shared<const Vocabulary>(std::vector<std::string>{"a"},
                                                      std::vector<std::string>{"p"},
                                                      std::vector<std::string>{"b"});
  CHECK(ic_facts(build_from_kg_complement({}, apb, 9)) == std::set<Fact>{{0, 0, 0}});

  const auto single = std::make_shared<const Vocabulary>(std::vector<std::string>{"cat"},
                                                         std::vector<std::string>{"on"},
                                                         std::vector<std::string>{"mat"});
  CHECK(build_from_kg_complement(on_cat_mat, single, 0).ic_count() == 0);
  CHECK(kDefaultKappa == 9);
}

TEST_CASE("knowledge-graph complement drops out-of-vocabulary triples") {
  const auto vocab = std::make_shared<const Vocabulary>(std::vector<std::string>{"cat"},
                                                        std::vector<std::string>{"on", "eats"},
                                                        std::vector<std::string>{"mat"});
  const KgTripleSet kg{{"cat", "on", "mat"}, {"dog", "on", "mat"}, {"cat", "on", "mat"}};
  KgBuildReport report;
  build_from_kg_complement(kg, vocab, 9, &report);
  CHECK(report.input_triples == 3);
  CHECK(report.retained_triples == 1);
  CHECK(report.dropped_triples == 1);
}

TEST_CASE("knowledge-graph complement against a transcription oracle") {
  std::mt19937_64 rng(32);
  for (int c = 0; c < 40; ++c) {
    const std::size_t ns = 1 + rng() % 4, np = 1 + rng() % 4, no = 1 + rng() % 4;
    const auto vocab = t::numbered_vocab(ns, np, no);
    std::set<Fact> known;
    KgTripleSet kg;
    for (std::size_t i = 0, n = rng() % (ns * np * no + 1); i < n; ++i) {
      const Fact f = t::random_fact(rng, ns, np, no);
      known.insert(f);
      kg.push_back({vocab->name({Domain::Subject, f.s}), vocab->name({Domain::Predicate, f.p}),
                    vocab->name({Domain::Object, f.o})});
    }
    std::set<Fact> previous;
    for (std::size_t kappa = 0; kappa <= 5; ++kappa) {
      const auto got = ic_facts(build_from_kg_complement(kg, vocab, kappa));
      CHECK(got == kg_complement_oracle(known, ns, np, no, kappa));
      for (const auto& f : got) CHECK_FALSE(known.contains(f));
      CHECK(std::includes(got.begin(), got.end(), previous.begin(), previous.end()));
      previous = got;
    }
  }
}

TEST_CASE("explicit and complement representations agree") {
  std::mt19937_64 rng(33);
  for (int c = 0; c < 30; ++c) {
    const std::size_t ns = 1 + rng() % 10, np = 1 + rng() % 10, no = 1 + rng() % 10;
    const auto vocab = t::numbered_vocab(ns, np, no);
    std::vector<Fact> positive;
    for (std::size_t i = 0, n = rng() % (ns * np * no); i < n; ++i)
      positive.push_back(t::random_fact(rng, ns, np, no));
    const auto complement = TheoryStore::complement_of(vocab, positive);
    const auto materialized = complement.materialize();
    CHECK(materialized.representation() == TheoryRepresentation::ExplicitNegative);
    CHECK(materialized.ic_count() == complement.ic_count());
    for (std::uint32_t s = 0; s < ns; ++s)
      for (std::uint32_t p = 0; p < np; ++p)
        for (std::uint32_t o = 0; o < no; ++o)
          CHECK(materialized.contains_ic({s, p, o}) == complement.contains_ic({s, p, o}));
  }
}

TEST_CASE("uniform IC sampling covers the complement") {
  const auto vocab = t::numbered_vocab(3, 3, 3);
  const std::vector<Fact> positive{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {0, 1, 2}};
  const auto store = TheoryStore::complement_of(vocab, positive);
  std::mt19937_64 rng(34);
  std::set<Fact> seen;
  for (int i = 0; i < 3000; ++i) {
    const auto ic = store.sample_ic(rng);
    REQUIRE(ic.has_value());
    CHECK(store.contains_ic(ic->fact));
    seen.insert(ic->fact);
  }
  CHECK(seen.size() == store.ic_count());
  const auto none = TheoryStore::explicit_negative(vocab, std::vector<Fact>{});
  CHECK_FALSE(none.sample_ic(rng).has_value());
}

TEST_CASE("theory files round-trip") {
  TempDir dir;
  const auto vocab = std::make_shared<const Vocabulary>(std::vector<std::string>{"cat"},
                                                        std::vector<std::string>{"on", "eats"},
                                                        std::vector<std::string>{"mat"});
  const auto store = build_from_kg_complement({{"cat", "on", "mat"}}, vocab, 9);
  save_theory(store, dir.path / "t.tsv");
  const auto back = load_theory(dir.path / "t.tsv", vocab);
  CHECK(back.contains_ic({0, 1, 0}));
  CHECK_FALSE(back.contains_ic({0, 0, 0}));
  const auto summary = summarize_theory_file(dir.path / "t.tsv");
  CHECK(summary.ic_count == 1u);

  const auto comp = TheoryStore::complement_of(vocab, std::vector<Fact>{{0, 0, 0}});
  save_theory(comp, dir.path / "c.tsv");
  const auto comp_back = load_theory(dir.path / "c.tsv", vocab);
  CHECK(comp_back.representation() == TheoryRepresentation::ComplementOfPositive);
  CHECK(comp_back.ic_count() == 1);
}

TEST_CASE("hand-written complement file loads") {
  const auto vocab = std::make_shared<const Vocabulary>(std::vector<std::string>{"a"},
                                                        std::vector<std::string>{"p", "q"},
                                                        std::vector<std::string>{"b"});
  std::istringstream in("format=complement\na\tp\tb\n");
  const auto store = read_theory(in, vocab);
  CHECK(store.representation() == TheoryRepresentation::ComplementOfPositive);
  CHECK(store.contains_ic({0, 1, 0}));
  CHECK_FALSE(store.contains_ic({0, 0, 0}));
}

TEST_CASE("malformed theory files name the line") {
  const auto vocab = std::make_shared<const Vocabulary>(std::vector<std::string>{"a"},
                                                        std::vector<std::string>{"p", "q"},
                                                        std::vector<std::string>{"b"});
  auto line_of = [&](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_theory(in, vocab);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("format=explicit-negative\na\tp\tb\na\tq\n") == 3);
  CHECK(line_of("format=explicit-negative\na\tz\tb\n") == 2);
  CHECK(line_of("format=sideways\n") == 1);
  CHECK(line_of("") == 1);
  // A count in the header makes a cut-off file detectable.
  CHECK(line_of("format=explicit-negative\tsizes=1x2x1\tcount=2\na\tp\tb\n") > 0);
}

TEST_CASE("knowledge-graph TSV parsing") {
  std::istringstream in("# comment\ncat\ton\tmat\n\ndog\teats\tbone\n");
  const auto kg = parse_kg_triples(in);
  REQUIRE(kg.size() == 2);
  CHECK(kg[1].object == "bone");
  std::istringstream bad("cat\ton\n");
  CHECK_THROWS_AS(parse_kg_triples(bad), ParseError);
}

}  // TEST_SUITE
