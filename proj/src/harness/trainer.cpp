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

#include "ngpkit/harness/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "../text_util.hpp"
#include "ngpkit/error.hpp"
#include "ngpkit/harness/training_step.hpp"

namespace ngpkit::harness {

TheoryStore make_theory(const TrainConfig& cfg, const Dataset& data) {
  switch (cfg.theory_source) {
    case TheorySource::PermittedComplement:
      return build_complement_of_facts(data.vocab, data.permitted);
    case TheorySource::TrainingFactComplement:
      return build_complement_of_facts(data.vocab, visible_training_facts(data));
  }
  throw ContractError("unknown theory source");
}

std::vector<std::size_t> epoch_order(std::uint64_t seed, std::size_t epoch, std::size_t n) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), 0x6e6770u};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

SplitMetrics evaluate_split(const RelationModel& model, const Dataset& data,
                            std::span<const SceneSample> samples, std::size_t k) {
  const auto records = predict_records(model, samples, k);
  const auto seen = visible_training_facts(data);
  return {mean_recall_at_k(records, data.vocab->size(Domain::Predicate), k),
          zero_shot_recall_at_k(records, seen, k)};
}

TrainResult train(const TrainConfig& cfg, const Dataset& data, const TheoryStore& store) {
  cfg.validate();
  const LossWeights weights = cfg.weights();
  const SelectionConfig selection = cfg.effective_selection();
  const bool logic = cfg.logic_enabled();
  TrainResult result;
  result.model = RelationModel(data.feature_dim, data.vocab->size(Domain::Subject),
                               data.vocab->size(Domain::Predicate),
                               data.vocab->size(Domain::Object));
  std::mt19937_64 select_rng(cfg.world.seed ^ 0x73656c656374ull);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochLog log;
    log.epoch = epoch;
    double ln_sum = 0.0, ls_sum = 0.0;
    for (std::size_t i : epoch_order(cfg.world.seed, epoch, data.train.size())) {
      const SceneSample& sample = data.train[i];
      if (!logic && !sample.has_facts()) {
        ++log.skipped;
        continue;
      }
      const StepDiagnostics d = ngp_step(sample, store, result.model, selection, weights,
                                         cfg.learning_rate, &select_rng);
      ln_sum += d.ln;
      ls_sum += d.ls;
      log.selected_ics += d.selected.size();
      ++log.steps;
    }
    if (log.steps > 0) {
      log.mean_ln = ln_sum / static_cast<double>(log.steps);
      log.mean_ls = ls_sum / static_cast<double>(log.steps);
    }
    if (!data.val.empty()) {
      const auto m = evaluate_split(result.model, data, data.val, cfg.eval_k);
      log.val_mean_recall = m.mean_recall.value;
      log.val_zero_shot_recall = m.zero_shot.value;
      log.val_zero_shot_empty = m.zero_shot.empty_pool;
    }
    result.log.push_back(log);
  }
  return result;
}

void write_log_csv(std::ostream& out, std::span<const EpochLog> log, std::size_t k) {
  out << "epoch,ln,ls,steps,skipped,selected,val_mR@" << k << ",val_zsR@" << k
      << ",val_zs_empty\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << detail::format_double(e.mean_ln) << ','
        << detail::format_double(e.mean_ls) << ',' << e.steps << ',' << e.skipped << ','
        << e.selected_ics << ',' << detail::format_double(e.val_mean_recall) << ','
        << detail::format_double(e.val_zero_shot_recall) << ','
        << (e.val_zero_shot_empty ? 1 : 0) << '\n';
  }
}

std::vector<SweepRow> run_reduction_sweep(const TrainConfig& cfg,
                                          std::span<const Regularizer> regularizers,
                                          std::size_t jobs) {
  cfg.validate();
  if (regularizers.empty()) throw ValidationError("sweep needs at least one regularizer");
  std::vector<SweepRow> rows;
  for (double r : cfg.sweep_retentions) {
    for (auto seed : cfg.sweep_seeds) {
      for (auto reg : regularizers) rows.push_back({r, seed, reg});
    }
  }
  auto run_cell = [&](SweepRow& row) {
    TrainConfig c = cfg;
    c.world.retention = row.retention;
    c.world.seed = row.seed;
    c.regularizer = row.regularizer;
    const Dataset data = generate_dataset(c.world);
    const TheoryStore store = make_theory(c, data);
    const TrainResult trained = train(c, data, store);
    const auto m = evaluate_split(trained.model, data, data.test, c.eval_k);
    row.mean_recall = m.mean_recall.value;
    row.zero_shot_recall = m.zero_shot.value;
    row.zero_shot_empty = m.zero_shot.empty_pool;
    row.labelled_samples = static_cast<std::size_t>(
        std::count_if(data.train.begin(), data.train.end(),
                      [](const SceneSample& s) { return s.has_facts(); }));
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, rows.size()));
  if (jobs == 1) {
    for (auto& row : rows) run_cell(row);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < rows.size(); i = next++) run_cell(rows[i]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, std::size_t k) {
  out << "retention,seed,regularizer,mR@" << k << ",zsR@" << k << '\n';
  for (const auto& r : rows) {
    out << r.retention << ',' << r.seed << ','
        << regularizer_name(r.regularizer) << ',' << detail::format_double(r.mean_recall) << ','
        << detail::format_double(r.zero_shot_recall) << '\n';
  }
}

}  // namespace ngpkit::harness
