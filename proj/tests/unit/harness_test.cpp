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


#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "ngpkit/error.hpp"
#include "ngpkit/harness/config.hpp"
#include "ngpkit/harness/dataset.hpp"
#include "ngpkit/harness/metrics.hpp"
#include "ngpkit/harness/model.hpp"
#include "ngpkit/harness/trainer.hpp"
#include "ngpkit/harness/training_step.hpp"
#include "oracles.hpp"

using namespace ngpkit;
using namespace ngpkit::harness;

namespace {

WorldSpec small_world(std::uint64_t seed = 3) {
  WorldSpec w;
  w.subjects = w.predicates = w.objects = 5;
  w.feature_dim = 6;
  w.train_samples = 200;
  w.val_samples = 40;
  w.test_samples = 60;
  w.seed = seed;
  return w;
}

TrainConfig small_config() {
  TrainConfig c;
  c.world = small_world();
  c.epochs = 3;
  c.eval_k = 5;
  return c;
}

RelationModel random_model(std::size_t d, std::size_t n, std::uint64_t seed) {
  RelationModel m(d, n, n, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.5);
  for (std::size_t i = 0; i < m.parameter_count(); ++i) m.set_parameter(i, g(rng));
  return m;
}

SceneSample random_sample(std::size_t d, std::size_t slots, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  SceneSample s;
  s.id = "x";
  for (std::size_t i = 0; i < slots * d; ++i) s.features.push_back(g(rng));
  for (std::size_t i = 0; i < slots; ++i) s.truth.push_back(Fact{1, 2, 0});
  return s;
}

EvalRecord record(std::vector<ScoredFact> candidates, std::vector<std::optional<Fact>> truth) {
  return {std::move(candidates), std::move(truth)};
}

std::string log_text(const TrainResult& r, std::size_t k) {
  std::ostringstream out;
  write_log_csv(out, r.log, k);
  return out.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("zero parameters give uniform distributions") {
  RelationModel m(3, 4, 5, 2);
  SceneSample s;
  s.features = {1.0, -2.0, 0.5};
  s.truth = {std::nullopt};
  const auto w = forward(m, s);
  for (double v : w.domain(0, Domain::Subject)) CHECK(v == doctest::Approx(0.25));
  for (double v : w.domain(0, Domain::Predicate)) CHECK(v == doctest::Approx(0.2));
  for (double v : w.domain(0, Domain::Object)) CHECK(v == doctest::Approx(0.5));
  s.features.pop_back();
  CHECK_THROWS_AS(forward(m, s), ValidationError);
}

TEST_CASE("softmax outputs are distributions and shift invariant") {
  std::mt19937_64 rng(61);
  auto m = random_model(4, 6, 61);
  const auto s = random_sample(4, 2, rng);
  const auto w = forward(m, s);
  for (std::size_t slot = 0; slot < 2; ++slot)
    for (Domain d : kDomains) {
      double sum = 0.0;
      for (double v : w.domain(slot, d)) sum += v;
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  for (auto& b : m.map(Domain::Object).bias) b += 7.5;
  const auto shifted = forward(m, s);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(shifted.domain(0, Domain::Object)[i] == doctest::Approx(w.domain(0, Domain::Object)[i]));
}

TEST_CASE("supervised loss") {
  const PredictionVector uniform({.25, .25, .25, .25}, {.25, .25, .25, .25}, {.25, .25, .25, .25});
  const std::vector<std::optional<Fact>> one{Fact{0, 1, 2}};
  CHECK(supervised_loss(one, uniform) == doctest::Approx(3.0 * std::log(4.0)));
  CHECK(supervised_loss(one, uniform) == doctest::Approx(4.1589).epsilon(1e-4));
  const PredictionVector onehot({1, 0}, {0, 1}, {0, 0, 1});
  CHECK(supervised_loss(one, onehot) == 0.0);
  CHECK(supervised_loss(std::vector<std::optional<Fact>>{std::nullopt}, uniform) == 0.0);
  // A zero activation on the true term is clipped, not infinite.
  const PredictionVector miss({0, 1}, {0, 1}, {0, 0, 1});
  CHECK(supervised_loss(one, miss) == doctest::Approx(-std::log(kLogEpsilon)));
}

TEST_CASE("cross-entropy gradient at the logits is w minus one-hot") {
  std::mt19937_64 rng(62);
  const auto m = random_model(5, 4, 62);
  const auto s = random_sample(5, 1, rng);
  const auto w = forward(m, s);
  const std::vector<SlotIc> none;
  const auto g = objective_gradient(m, s, none, LossKind::SL, LossWeights(1, 0));
  const Fact truth = *s.truth[0];
  for (std::uint32_t j = 0; j < 4; ++j) {
    const double ws = w.domain(0, Domain::Subject)[j];
    CHECK(g.maps[0].bias[j] == doctest::Approx(ws - (j == truth.s ? 1.0 : 0.0)).epsilon(1e-12));
    // Finite-difference oracle on the bias, which shifts the logit directly.
    const std::size_t idx = 4 * 5 + j;
    RelationModel plus = m, minus = m;
    plus.set_parameter(idx, m.parameter(idx) + 1e-6);
    minus.set_parameter(idx, m.parameter(idx) - 1e-6);
    const double numeric = (supervised_loss(s.truth, forward(plus, s)) -
                            supervised_loss(s.truth, forward(minus, s))) / 2e-6;
    CHECK(ngpkit::testing::relative_error(g.maps[0].bias[j], numeric) < 1e-6);
  }
}

TEST_CASE("end-to-end gradients match central differences") {
  std::mt19937_64 rng(63);
  const auto vocab = ngpkit::testing::numbered_vocab(5, 5, 5);
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const auto m = random_model(8, 5, 100 + c);
    auto s = random_sample(8, 2, rng);
    if (c % 3 == 0) s.truth[1].reset();
    std::vector<Fact> permitted;
    for (int i = 0; i < 30; ++i) permitted.push_back(ngpkit::testing::random_fact(rng, 5, 5, 5));
    const auto store = TheoryStore::complement_of(vocab, permitted);
    const LossKind kind = c % 2 == 0 ? LossKind::SL : LossKind::DL2;
    SelectionConfig cfg;
    cfg.loss = kind;
    const auto selected = select_for_sample(forward(m, s), store, cfg);
    const LossWeights weights(1, 1);
    const auto g = objective_gradient(m, s, selected, kind, weights);
    for (std::size_t i = 0; i < m.parameter_count(); ++i) {
      RelationModel plus = m, minus = m;
      plus.set_parameter(i, m.parameter(i) + 1e-5);
      minus.set_parameter(i, m.parameter(i) - 1e-5);
      const double numeric = (objective_value(plus, s, selected, kind, weights) -
                              objective_value(minus, s, selected, kind, weights)) / 2e-5;
      worst = std::max(worst, ngpkit::testing::relative_error(g.component(i), numeric));
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("zero learning rate leaves the model unchanged") {
  std::mt19937_64 rng(64);
  auto m = random_model(4, 3, 64);
  const RelationModel before = m;
  const auto s = random_sample(4, 1, rng);
  const auto w = forward(m, s);
  auto g = zero_activation_gradient(w);
  add_supervised_gradient(s.truth, w, 1.0, g);
  CHECK(backward_and_update(m, s, w, g, 0.0) > 0.0);
  CHECK(m == before);
}

TEST_CASE("non-finite gradients abort the update") {
  std::mt19937_64 rng(65);
  auto m = random_model(4, 3, 65);
  const auto s = random_sample(4, 1, rng);
  const auto w = forward(m, s);
  auto g = zero_activation_gradient(w);
  g[0].subject[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(backward_and_update(m, s, w, g, 0.1), SaturatedGradientError);
}

TEST_CASE("model files round-trip exactly") {
  const auto m = random_model(3, 4, 66);
  std::ostringstream out;
  write_model(out, m);
  std::istringstream in(out.str());
  CHECK(read_model(in) == m);
  std::istringstream cut(out.str().substr(0, out.str().size() / 2));
  CHECK_THROWS_AS(read_model(cut), ParseError);
  std::istringstream junk("not a model\n");
  CHECK_THROWS_AS(read_model(junk), ParseError);
}

TEST_CASE("dataset generation") {
  auto world = small_world();
  const auto a = generate_dataset(world);
  const auto b = generate_dataset(world);
  CHECK(a.permitted == b.permitted);
  REQUIRE(a.train.size() == 200);
  CHECK(a.train[17].features == b.train[17].features);
  CHECK(a.train[17].truth == b.train[17].truth);
  const std::set<Fact> permitted(a.permitted.begin(), a.permitted.end());
  for (const auto& split : {&a.train, &a.val, &a.test})
    for (const auto& s : *split) {
      CHECK(s.features.size() == s.slot_count() * a.feature_dim);
      for (const auto& t : s.truth)
        if (t) CHECK(permitted.contains(*t));
    }
  for (const auto& s : a.train) CHECK(s.has_facts());
  // Zero-shot facts exist in test and never in training.
  CHECK_FALSE(a.zero_shot_pool.empty());
  const auto seen = visible_training_facts(a);
  std::size_t unseen_in_test = 0;
  for (const auto& s : a.test)
    for (const auto& t : s.truth)
      if (t && !std::binary_search(seen.begin(), seen.end(), *t)) ++unseen_in_test;
  CHECK(unseen_in_test >= 1);
  world.retention = 2.0;
  CHECK_THROWS_AS(generate_dataset(world), ValidationError);
}

TEST_CASE("label masking is exact") {
  auto world = small_world();
  world.train_samples = 1000;
  world.retention = 0.5;
  const auto data = generate_dataset(world);
  const auto blank = std::count_if(data.train.begin(), data.train.end(),
                                   [](const SceneSample& s) { return !s.has_facts(); });
  CHECK(blank == 500);
  world.retention = 1.0;
  const auto full = generate_dataset(world);
  for (std::size_t i = 0; i < full.train.size(); ++i)
    CHECK(full.train[i].features == data.train[i].features);
}

TEST_CASE("dataset files round-trip") {
  const auto data = generate_dataset(small_world());
  std::ostringstream out;
  write_samples(out, *data.vocab, data.feature_dim, data.test);
  std::istringstream in(out.str());
  const auto back = read_samples(in, *data.vocab);
  CHECK(back.feature_dim == data.feature_dim);
  REQUIRE(back.samples.size() == data.test.size());
  for (std::size_t i = 0; i < back.samples.size(); ++i) {
    CHECK(back.samples[i].id == data.test[i].id);
    CHECK(back.samples[i].truth == data.test[i].truth);
    CHECK(back.samples[i].features == data.test[i].features);
  }
  std::istringstream nodim("a\ttest\t1,2\t-\n");
  CHECK_THROWS_AS(read_samples(nodim, *data.vocab), ParseError);
}

TEST_CASE("mean recall fixtures") {
  const Fact a{0, 0, 0}, b{0, 0, 1}, c{1, 1, 0}, d{1, 1, 1};
  const Fact decoy{2, 2, 2};
  std::vector<EvalRecord> records{
      record({{a, 0.9, 0}, {decoy, 0.1, 0}}, {a}),
      record({{b, 0.8, 0}, {decoy, 0.2, 0}}, {b}),
      record({{decoy, 0.9, 0}, {c, 0.1, 0}}, {c}),
      record({{decoy, 0.7, 0}, {d, 0.3, 0}}, {d})};
  const auto m = mean_recall_at_k(records, 3, 1);
  CHECK(m.value == doctest::Approx(0.5));
  CHECK(m.classes == 2);
  CHECK(m.per_predicate[0] == 1.0);
  CHECK(m.per_predicate[1] == 0.0);
  CHECK_FALSE(m.per_predicate[2].has_value());
  CHECK(mean_recall_at_k(records, 3, 2).value == 1.0);
  CHECK_THROWS_AS(mean_recall_at_k(records, 3, 0), ContractError);

  // Permutation and monotone rescaling leave the metric unchanged.
  std::reverse(records.begin(), records.end());
  for (auto& r : records)
    for (auto& cand : r.candidates) cand.likelihood = std::sqrt(cand.likelihood) * 0.5;
  CHECK(mean_recall_at_k(records, 3, 1).value == doctest::Approx(0.5));
}

TEST_CASE("zero-shot recall fixtures") {
  const Fact seen{0, 0, 0}, z1{1, 0, 0}, z2{1, 1, 0}, z3{1, 1, 1}, z4{2, 1, 1}, decoy{2, 2, 2};
  const std::vector<Fact> train{seen};
  const std::vector<EvalRecord> records{
      record({{z1, 0.9, 0}, {seen, 0.5, 1}}, {z1, seen}),
      record({{z2, 0.9, 0}}, {z2}),
      record({{decoy, 0.9, 0}, {z3, 0.1, 0}}, {z3}),
      record({{decoy, 0.9, 0}, {z4, 0.1, 0}}, {z4})};
  const auto z = zero_shot_recall_at_k(records, train, 1);
  CHECK(z.value == doctest::Approx(0.5));
  CHECK(z.pool_instances == 4);
  CHECK_FALSE(z.empty_pool);
  const std::vector<EvalRecord> only_seen{record({{seen, 0.9, 0}}, {seen})};
  const auto e = zero_shot_recall_at_k(only_seen, train, 1);
  CHECK(e.empty_pool);
  CHECK(e.value == 0.0);
}

TEST_CASE("a slot's label counts only when that slot's fact is ranked") {
  const Fact a{0, 0, 0};
  const std::vector<EvalRecord> records{record({{a, 0.9, 1}}, {a, std::nullopt})};
  CHECK(mean_recall_at_k(records, 1, 1).value == 0.0);
}

TEST_CASE("regularizer off matches a plain supervised loop bit for bit") {
  auto cfg = small_config();
  cfg.regularizer = Regularizer::None;
  const auto data = generate_dataset(cfg.world);
  const auto store = make_theory(cfg, data);
  const auto trained = train(cfg, data, store);

  RelationModel plain(data.feature_dim, 5, 5, 5);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i : epoch_order(cfg.world.seed, epoch, data.train.size())) {
      const auto& s = data.train[i];
      if (!s.has_facts()) continue;
      const auto w = forward(plain, s);
      auto g = zero_activation_gradient(w);
      add_supervised_gradient(s.truth, w, 1.0, g);
      backward_and_update(plain, s, w, g, cfg.learning_rate);
    }
  }
  CHECK(plain == trained.model);

  // Same with a regularizer configured but beta2 = 0.
  cfg.regularizer = Regularizer::NgpSl;
  cfg.beta2 = 0.0;
  CHECK(train(cfg, data, store).model == plain);
}

TEST_CASE("weak supervision: the logic term uses blanked samples") {
  auto cfg = small_config();
  cfg.world.retention = 0.5;
  cfg.epochs = 1;
  const auto data = generate_dataset(cfg.world);
  const auto store = make_theory(cfg, data);
  cfg.regularizer = Regularizer::None;
  const auto base = train(cfg, data, store);
  CHECK(base.log[0].skipped == 100);
  CHECK(base.log[0].steps == 100);
  cfg.regularizer = Regularizer::NgpSl;
  const auto ngp = train(cfg, data, store);
  CHECK(ngp.log[0].skipped == 0);
  CHECK(ngp.log[0].steps == 200);
  CHECK(ngp.log[0].selected_ics > 0);
}

TEST_CASE("training is deterministic") {
  auto cfg = small_config();
  cfg.regularizer = Regularizer::NgpSl;
  cfg.world.retention = 0.7;
  const auto data = generate_dataset(cfg.world);
  const auto store = make_theory(cfg, data);
  const auto a = train(cfg, data, store);
  const auto b = train(cfg, data, store);
  CHECK(a.model == b.model);
  CHECK(log_text(a, 5) == log_text(b, 5));
  cfg.selection.strategy = SelectionStrategy::Random;
  CHECK(train(cfg, data, store).model == train(cfg, data, store).model);
}

TEST_CASE("theory sources") {
  auto cfg = small_config();
  cfg.world.retention = 0.3;
  const auto data = generate_dataset(cfg.world);
  const auto from_rules = make_theory(cfg, data);
  CHECK(from_rules.ic_count() == 125 - data.permitted.size());
  cfg.theory_source = TheorySource::TrainingFactComplement;
  const auto from_train = make_theory(cfg, data);
  CHECK(from_train.ic_count() == 125 - visible_training_facts(data).size());
  CHECK(from_train.ic_count() >= from_rules.ic_count());
}

TEST_CASE("reduction sweep") {
  auto cfg = small_config();
  cfg.epochs = 1;
  cfg.sweep_retentions = {1.0, 0.8, 0.5};
  cfg.sweep_seeds = {0, 1};
  const std::vector<Regularizer> regs{Regularizer::None, Regularizer::NgpSl};
  const auto rows = run_reduction_sweep(cfg, regs, 3);
  REQUIRE(rows.size() == 12);
  CHECK(rows.front().retention == 1.0);
  for (const auto& r : rows) {
    CHECK(r.mean_recall >= 0.0);
    CHECK(r.mean_recall <= 1.0);
  }
  for (std::size_t i = 4; i < rows.size(); ++i) {
    CHECK(rows[i].labelled_samples <= rows[i - 4].labelled_samples);
  }
  // Thread count never changes the numbers.
  const auto serial = run_reduction_sweep(cfg, regs, 1);
  std::ostringstream a, b;
  write_sweep_csv(a, rows, cfg.eval_k);
  write_sweep_csv(b, serial, cfg.eval_k);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("retention,seed,regularizer,mR@5,zsR@5\n", 0) == 0);
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# world\nsubjects = 7\nretention=0.25\nregularizer = ngp-dl2\nrho = 5\n"
      "sweep_retentions = 1.0,0.75\nstrategy = random\n");
  const auto cfg = parse_config(in);
  CHECK(cfg.world.subjects == 7);
  CHECK(cfg.world.retention == 0.25);
  CHECK(cfg.regularizer == Regularizer::NgpDl2);
  CHECK(cfg.selection.rho == 5);
  CHECK(cfg.sweep_retentions == std::vector<double>{1.0, 0.75});
  CHECK(cfg.effective_selection().loss == LossKind::DL2);
  std::ostringstream out;
  write_config(out, cfg);
  std::istringstream back(out.str());
  const auto again = parse_config(back);
  std::ostringstream out2;
  write_config(out2, again);
  CHECK(out.str() == out2.str());
  for (const auto& key : config_keys()) CHECK(out.str().find(key + " =") != std::string::npos);

  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream s(text);
    try {
      parse_config(s);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("rho = 2\ncolour = red\n") == 2);
  CHECK(line_of("rho two\n") == 1);
  CHECK(line_of("\n\nrho = -1\n") == 3);
  TrainConfig bad;
  bad.selection.rho = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_FALSE(TrainConfig{}.logic_enabled());
}

}  // TEST_SUITE
