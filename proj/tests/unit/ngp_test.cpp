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


#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "ngpkit/error.hpp"
#include "ngpkit/fact_stream.hpp"
#include "ngpkit/harness/training_step.hpp"
#include "ngpkit/selection.hpp"
#include "oracles.hpp"

using namespace ngpkit;
namespace t = ngpkit::testing;

namespace {

// The scene of a person in a jacket in front of a horse: a seven-IC theory
// and the six most likely facts of one relation slot.
struct HorseScene {
  std::shared_ptr<const Vocabulary> vocab = std::make_shared<const Vocabulary>(
      std::vector<std::string>{"horse", "tail", "person", "hat"},
      std::vector<std::string>{"drinks", "wearing", "of", "eats", "made_of", "looking_at"},
      std::vector<std::string>{"eye", "person", "horse", "jacket", "tail", "hat"});

  Fact fact(const char* s, const char* p, const char* o) const {
    return {*vocab->find(Domain::Subject, s), *vocab->find(Domain::Predicate, p),
            *vocab->find(Domain::Object, o)};
  }

  TheoryStore theory() const {
    const std::vector<Fact> forbidden{
        fact("horse", "drinks", "eye"),    fact("horse", "wearing", "person"),
        fact("tail", "of", "person"),      fact("person", "eats", "jacket"),
        fact("tail", "made_of", "horse"),  fact("person", "made_of", "jacket"),
        fact("hat", "of", "horse")};
    return TheoryStore::explicit_negative(vocab, forbidden);
  }

  std::vector<ScoredFact> ranked() const {
    return {{fact("tail", "of", "horse"), 0.34},          {fact("horse", "wearing", "person"), 0.27},
            {fact("person", "looking_at", "tail"), 0.26}, {fact("person", "made_of", "jacket"), 0.24},
            {fact("person", "wearing", "hat"), 0.19},     {fact("tail", "made_of", "horse"), 0.19}};
  }
};

std::vector<double> dyadic(std::mt19937_64& rng, std::size_t n) {
  static const double levels[] = {1.0, 0.5, 0.25, 0.125};
  std::vector<double> out(n);
  for (auto& x : out) x = levels[rng() % 4];
  return out;
}

}  // namespace

TEST_SUITE("ngp") {

TEST_CASE("top-k of a small prediction") {
  const PredictionVector w({0.6, 0.4}, {0.7, 0.3}, {0.9, 0.1});
  const auto top = topk_facts(w, 0, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].fact == Fact{0, 0, 0});
  CHECK(top[0].likelihood == doctest::Approx(0.378));
  CHECK(top[1].fact == Fact{1, 0, 0});
  CHECK(top[1].likelihood == doctest::Approx(0.252));
  CHECK_THROWS_AS(topk_facts(w, 0, 0), ContractError);
  CHECK_THROWS_AS(topk_facts(w, 0, 9), ContractError);
}

TEST_CASE("uniform activations rank lexicographically") {
  const PredictionVector w({0.5, 0.5}, {0.5, 0.5, 0.5}, {0.5, 0.5});
  const auto all = topk_facts(w, 0, 12);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].fact < all[i].fact);
}

TEST_CASE("lazy ranking equals the sorted cross product") {
  std::mt19937_64 rng(41);
  for (int c = 0; c < 60; ++c) {
    const std::size_t ns = 1 + rng() % 12, np = 1 + rng() % 12, no = 1 + rng() % 12;
    // Half the cases use dyadic activations so that exact ties are common.
    const bool ties = c % 2 == 0;
    const auto w = ties ? PredictionVector(dyadic(rng, ns), dyadic(rng, np), dyadic(rng, no))
                        : t::random_prediction(rng, ns, np, no);
    const auto expected = t::brute_ranking(w, 0);
    const auto got = topk_facts(w, 0, expected.size());
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].fact == expected[i].fact);
      CHECK(got[i].likelihood == expected[i].likelihood);
      CHECK(std::abs(got[i].likelihood - w.likelihood(0, got[i].fact)) <= 1e-12);
    }
    const std::size_t k = 1 + rng() % expected.size();
    const auto prefix = topk_facts(w, 0, k);
    for (std::size_t i = 0; i < k; ++i) CHECK(prefix[i].fact == expected[i].fact);
  }
}

TEST_CASE("merged stream ranks all slots together") {
  std::mt19937_64 rng(42);
  const auto w = t::random_prediction(rng, 3, 3, 3, 0.0, 1.0, 3);
  std::vector<ScoredFact> all;
  for (std::size_t s = 0; s < 3; ++s)
    for (const auto& r : t::brute_ranking(w, s)) all.push_back({r.fact, r.likelihood, s});
  std::stable_sort(all.begin(), all.end(), ranks_before);
  const auto got = topk_facts_all_slots(w, all.size() + 5);
  REQUIRE(got.size() == all.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].slot == all[i].slot);
    CHECK(got[i].fact == all[i].fact);
  }
}

TEST_CASE("worked example: greedy selection and projection") {
  HorseScene scene;
  const auto theory = scene.theory();
  CHECK(theory.contains_ic(scene.fact("horse", "wearing", "person")));
  const auto ranked = scene.ranked();
  const auto picked = greedy_select_ranked(ranked, theory, 2);
  REQUIRE(picked.size() == 2);
  CHECK(picked[0].fact == scene.fact("horse", "wearing", "person"));
  CHECK(picked[1].fact == scene.fact("person", "made_of", "jacket"));
  const auto all_violated = greedy_select_ranked(ranked, theory, 10);
  CHECK(all_violated.size() == 3);
  const auto projected = itr_project_ranked(ranked, theory);
  REQUIRE(projected.has_value());
  CHECK(projected->fact == scene.fact("tail", "of", "horse"));
  CHECK(projected->likelihood == 0.34);
}

TEST_CASE("worked example: exhaustive selection over the violated ICs") {
  HorseScene scene;
  // Activations whose products are 0.27, 0.24 and 0.19 for the three
  // violated facts.
  std::vector<double> s(4, 0.0), p(6, 0.0), o(6, 0.0);
  s[0] = 0.6;    // horse
  s[1] = 0.475;  // tail
  s[2] = 0.6;    // person
  p[1] = 0.9;    // wearing
  p[4] = 0.8;    // made_of
  o[1] = 0.5;    // person
  o[2] = 0.5;    // horse
  o[3] = 0.5;    // jacket
  const PredictionVector w(s, p, o);
  const std::vector<IntegrityConstraint> violated{{scene.fact("horse", "wearing", "person")},
                                                  {scene.fact("person", "made_of", "jacket")},
                                                  {scene.fact("tail", "made_of", "horse")}};
  CHECK(w.likelihood(0, violated[0].fact) == doctest::Approx(0.27));
  CHECK(w.likelihood(0, violated[1].fact) == doctest::Approx(0.24));
  CHECK(w.likelihood(0, violated[2].fact) == doctest::Approx(0.19));
  const std::set<IntegrityConstraint> expected{violated[0], violated[1]};
  for (LossKind kind : {LossKind::DL2, LossKind::SL}) {
    const auto best = exhaustive_select(w, 0, violated, 2, kind);
    CHECK(std::set<IntegrityConstraint>(best.begin(), best.end()) == expected);
  }
  CHECK(loss_of_ic_set(LossKind::DL2, std::vector<IntegrityConstraint>(expected.begin(), expected.end()), w, 0) ==
        doctest::Approx(0.51));
  const auto greedy = greedy_select(w, 0, scene.theory(), SelectionConfig{2});
  CHECK(std::set<IntegrityConstraint>(greedy.begin(), greedy.end()) == expected);
}

TEST_CASE("greedy selection edge cases") {
  std::mt19937_64 rng(43);
  const auto vocab = t::numbered_vocab(3, 3, 3);
  const auto w = t::random_prediction(rng, 3, 3, 3);
  const auto empty = TheoryStore::explicit_negative(vocab, std::vector<Fact>{});
  CHECK(greedy_select(w, 0, empty, SelectionConfig{}).empty());
  const auto everything = TheoryStore::complement_of(vocab, std::vector<Fact>{});
  const auto one = greedy_select(w, 0, everything, SelectionConfig{1});
  REQUIRE(one.size() == 1);
  CHECK(one[0].fact == t::brute_ranking(w, 0)[0].fact);
  CHECK_THROWS_AS(SelectionConfig{0}.validate(), ValidationError);
  const auto ic = std::vector<IntegrityConstraint>{{{1, 1, 1}}};
  CHECK(exhaustive_select(w, 0, ic, 1, LossKind::SL) == ic);
  std::vector<IntegrityConstraint> many;
  for (std::uint32_t i = 0; i < 17; ++i) many.push_back({{i % 3, (i / 3) % 3, (i / 9) % 3}});
  CHECK_THROWS_AS(exhaustive_select(w, 0, many, 2, LossKind::SL), CapacityError);
}

TEST_CASE("greedy selection follows the brute-force ranking") {
  std::mt19937_64 rng(44);
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 2 + rng() % 5;
    const auto vocab = t::numbered_vocab(n, n, n);
    const auto w = t::random_prediction(rng, n, n, n);
    std::vector<Fact> forbidden;
    for (std::size_t i = 0, m = rng() % (n * n * n); i < m; ++i)
      forbidden.push_back(t::random_fact(rng, n, n, n));
    const auto store = TheoryStore::explicit_negative(vocab, forbidden);
    const std::size_t rho = 1 + rng() % 4;
    std::vector<Fact> expected;
    for (const auto& r : t::brute_ranking(w, 0)) {
      if (expected.size() == rho) break;
      if (store.contains_ic(r.fact)) expected.push_back(r.fact);
    }
    const auto got = greedy_select(w, 0, store, SelectionConfig{rho});
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].fact == expected[i]);
  }
}

TEST_CASE("greedy matches the exhaustive optimum") {
  std::mt19937_64 rng(45);
  int disjoint = 0;
  for (int c = 0; c < 500; ++c) {
    const auto vocab = t::numbered_vocab(3, 3, 3);
    const auto w = t::random_prediction(rng, 3, 3, 3);
    std::set<Fact> fs;
    for (std::size_t i = 0, m = 1 + rng() % 12; i < m; ++i) fs.insert(t::random_fact(rng, 3, 3, 3));
    const std::vector<Fact> forbidden(fs.begin(), fs.end());
    const auto store = TheoryStore::explicit_negative(vocab, forbidden);
    const std::size_t rho = 1 + rng() % 3;
    const auto greedy = greedy_select(w, 0, store, SelectionConfig{rho});
    const auto ics = store.ics();
    const auto best_dl2 = exhaustive_select(w, 0, ics, rho, LossKind::DL2);
    CHECK(loss_of_ic_set(LossKind::DL2, greedy, w, 0) == loss_of_ic_set(LossKind::DL2, best_dl2, w, 0));
    if (ics_variable_disjoint(greedy)) {
      ++disjoint;
      const auto best_sl = exhaustive_select(w, 0, ics, rho, LossKind::SL);
      CHECK(std::abs(loss_of_ic_set(LossKind::SL, greedy, w, 0) -
                     loss_of_ic_set(LossKind::SL, best_sl, w, 0)) <= 1e-12);
    }
  }
  MESSAGE("variable-disjoint greedy sets: " << disjoint << "/500");
  CHECK(disjoint > 0);
}

TEST_CASE("selection depends only on the ordering of likelihoods") {
  std::mt19937_64 rng(46);
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 3 + rng() % 6;
    const auto vocab = t::numbered_vocab(n, n, n);
    const auto w = t::random_prediction(rng, n, n, n, 0.01, 1.0);
    std::vector<Fact> forbidden;
    for (std::size_t i = 0, m = rng() % (n * n * n); i < m; ++i)
      forbidden.push_back(t::random_fact(rng, n, n, n));
    const auto store = TheoryStore::explicit_negative(vocab, forbidden);
    const auto base = t::brute_ranking(w, 0);
    std::vector<ScoredFact> ranked;
    for (const auto& r : base) ranked.push_back({r.fact, r.likelihood});
    for (auto transform : {+[](double x) { return std::sqrt(x); }, +[](double x) { return x * x * x; },
                           +[](double x) { return std::log1p(x); }}) {
      std::vector<ScoredFact> moved = ranked;
      for (auto& m : moved) m.likelihood = transform(m.likelihood);
      CHECK(greedy_select_ranked(moved, store, 3) == greedy_select_ranked(ranked, store, 3));
    }
    // Raising every activation to a power raises every product to it.
    auto powered = [&](double g) {
      std::vector<double> s, p, o;
      for (double x : w.domain(0, Domain::Subject)) s.push_back(std::pow(x, g));
      for (double x : w.domain(0, Domain::Predicate)) p.push_back(std::pow(x, g));
      for (double x : w.domain(0, Domain::Object)) o.push_back(std::pow(x, g));
      return PredictionVector(s, p, o);
    };
    const auto plain = greedy_select(w, 0, store, SelectionConfig{3});
    CHECK(greedy_select(powered(0.5), 0, store, SelectionConfig{3}) == plain);
    CHECK(greedy_select(powered(2.0), 0, store, SelectionConfig{3}) == plain);
  }
}

TEST_CASE("selection work grows linearly with rho") {
  std::mt19937_64 rng(47);
  const std::size_t n = 30;
  const auto vocab = t::numbered_vocab(n, n, n);
  std::vector<Fact> permitted;
  for (int i = 0; i < 5000; ++i) permitted.push_back(t::random_fact(rng, n, n, n));
  const auto store = TheoryStore::complement_of(vocab, permitted);
  std::vector<double> mean_pushes(11, 0.0);
  const int samples = 200;
  for (int c = 0; c < samples; ++c) {
    const auto w = t::random_prediction(rng, n, n, n);
    const auto ranking = t::brute_ranking(w, 0);
    for (std::size_t rho = 1; rho <= 10; ++rho) {
      SelectionStats stats;
      greedy_select(w, 0, store, SelectionConfig{rho}, &stats);
      // Facts walked: exactly up to the rho-th forbidden one.
      std::size_t walked = 0, found = 0;
      while (found < rho) found += store.contains_ic(ranking[walked++].fact) ? 1 : 0;
      CHECK(stats.facts_examined == walked);
      CHECK(stats.frontier_pushes <= 3 * walked + 1);
      mean_pushes[rho] += double(stats.frontier_pushes) / samples;
    }
  }
  // Per-IC cost does not grow with rho.
  for (std::size_t rho = 2; rho <= 10; ++rho) {
    CHECK(mean_pushes[rho] / double(rho) <= 1.5 * mean_pushes[1]);
  }
}

TEST_CASE("projection never violates the theory") {
  std::mt19937_64 rng(48);
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 2 + rng() % 4;
    const auto vocab = t::numbered_vocab(n, n, n);
    const auto w = t::random_prediction(rng, n, n, n);
    std::vector<Fact> forbidden;
    for (std::size_t i = 0, m = rng() % (n * n * n + 1); i < m; ++i)
      forbidden.push_back(t::random_fact(rng, n, n, n));
    const auto store = TheoryStore::explicit_negative(vocab, forbidden);
    const auto got = itr_project(w, 0, store);
    std::optional<Fact> expected;
    for (const auto& r : t::brute_ranking(w, 0)) {
      if (!store.contains_ic(r.fact)) {
        expected = r.fact;
        break;
      }
    }
    REQUIRE(got.has_value() == expected.has_value());
    if (got) {
      CHECK_FALSE(store.contains_ic(got->fact));
      CHECK(got->fact == *expected);
    }
  }
}

TEST_CASE("projection edge cases") {
  std::mt19937_64 rng(49);
  const auto vocab = t::numbered_vocab(3, 3, 3);
  const auto w = t::random_prediction(rng, 3, 3, 3);
  const auto ranking = t::brute_ranking(w, 0);
  const auto empty = TheoryStore::explicit_negative(vocab, std::vector<Fact>{});
  CHECK(itr_project(w, 0, empty)->fact == ranking[0].fact);
  const auto top_only = TheoryStore::explicit_negative(vocab, std::vector<Fact>{ranking[0].fact});
  CHECK(itr_project(w, 0, top_only)->fact == ranking[1].fact);
  const auto all = TheoryStore::complement_of(vocab, std::vector<Fact>{});
  CHECK_FALSE(itr_project(w, 0, all).has_value());
}

TEST_CASE("sample-global budget spans slots") {
  std::mt19937_64 rng(50);
  const auto vocab = t::numbered_vocab(3, 3, 3);
  const auto w = t::random_prediction(rng, 3, 3, 3, 0.0, 1.0, 2);
  const auto all = TheoryStore::complement_of(vocab, std::vector<Fact>{});
  SelectionConfig cfg{3};
  const auto global = select_for_sample(w, all, cfg);
  CHECK(global.size() == 3);
  const auto top = topk_facts_all_slots(w, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(global[i].slot == top[i].slot);
    CHECK(global[i].ic.fact == top[i].fact);
  }
  cfg.budget = SelectionBudget::PerSlot;
  CHECK(select_for_sample(w, all, cfg).size() == 6);
  cfg.strategy = SelectionStrategy::Random;
  CHECK_THROWS_AS(select_for_sample(w, all, cfg), ContractError);
  std::mt19937_64 r2(1);
  const auto random = select_for_sample(w, all, cfg, &r2);
  CHECK(random.size() == 6);
  CHECK(sample_logic_loss(LossKind::DL2, {}, w) == 0.0);
}

TEST_CASE("training step") {
  using namespace harness;
  const auto vocab = t::numbered_vocab(3, 3, 3);
  RelationModel model(4, 3, 3, 3);
  SceneSample sample;
  sample.features = {0.5, -1.0, 0.25, 2.0};
  sample.truth = {std::nullopt};
  const auto empty = TheoryStore::explicit_negative(vocab, std::vector<Fact>{});
  // No labels and nothing violated: the step leaves the model alone.
  const RelationModel before = model;
  auto d = ngp_step(sample, empty, model, SelectionConfig{}, LossWeights(1, 1), 0.1);
  CHECK(d.ls == 0.0);
  CHECK(d.ln == 0.0);
  CHECK_FALSE(d.supervised);
  CHECK(model == before);
  // With everything forbidden, only the logic term moves the model.
  const auto all = TheoryStore::complement_of(vocab, std::vector<Fact>{});
  d = ngp_step(sample, all, model, SelectionConfig{3}, LossWeights(1, 1), 0.1);
  CHECK(d.selected.size() == 3);
  CHECK(d.ls > 0.0);
  CHECK(d.grad_norm > 0.0);
  CHECK_FALSE(model == before);
  // Labelled sample, nothing violated: a pure supervised step.
  sample.truth = {Fact{1, 2, 0}};
  RelationModel a = before, b = before;
  const auto da = ngp_step(sample, empty, a, SelectionConfig{}, LossWeights(1, 1), 0.1);
  const auto db = ngp_step(sample, all, b, SelectionConfig{}, LossWeights(1, 0), 0.1);
  CHECK(da.ls == 0.0);
  CHECK(db.selected.empty());
  CHECK(a == b);
}

}  // TEST_SUITE
