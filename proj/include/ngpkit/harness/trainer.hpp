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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ngpkit/harness/config.hpp"
#include "ngpkit/harness/metrics.hpp"
#include "ngpkit/harness/model.hpp"
#include "ngpkit/theory.hpp"

namespace ngpkit::harness {

struct EpochLog {
  std::size_t epoch = 0;
  double mean_ln = 0.0;  ///< over steps taken
  double mean_ls = 0.0;
  std::size_t steps = 0;
  std::size_t skipped = 0;  ///< unlabelled samples the baseline discards
  std::size_t selected_ics = 0;
  double val_mean_recall = 0.0;
  double val_zero_shot_recall = 0.0;
  bool val_zero_shot_empty = true;
};

struct TrainResult {
  RelationModel model;
  std::vector<EpochLog> log;
};

/// The training theory named by cfg.theory_source.
TheoryStore make_theory(const TrainConfig& cfg, const Dataset& data);

/// Visiting order of the training samples in one epoch.
std::vector<std::size_t> epoch_order(std::uint64_t seed, std::size_t epoch, std::size_t n);

/// Seeded SGD over the training split. With the logic term active every
/// sample takes an ngp_step; otherwise unlabelled samples are skipped.
TrainResult train(const TrainConfig& cfg, const Dataset& data, const TheoryStore& store);

/// `epoch,ln,ls,steps,skipped,selected,val_mR@K,val_zsR@K,val_zs_empty`
void write_log_csv(std::ostream& out, std::span<const EpochLog> log, std::size_t k);

struct SplitMetrics {
  MeanRecall mean_recall;
  ZeroShotRecall zero_shot;
};

/// mR@k and zsR@k on `samples`; zero-shot relative to the labelled
/// training facts of `data`.
SplitMetrics evaluate_split(const RelationModel& model, const Dataset& data,
                            std::span<const SceneSample> samples, std::size_t k);

struct SweepRow {
  double retention = 1.0;
  std::uint64_t seed = 0;
  Regularizer regularizer = Regularizer::None;
  double mean_recall = 0.0;
  double zero_shot_recall = 0.0;
  bool zero_shot_empty = true;
  std::size_t labelled_samples = 0;
};

/// Trains every (retention, seed, regularizer) cell of cfg's sweep lists on
/// freshly generated data and scores the test split. Cells run on up to
/// `jobs` threads; rows come back in (retention, seed, regularizer) order
/// regardless.
std::vector<SweepRow> run_reduction_sweep(const TrainConfig& cfg,
                                          std::span<const Regularizer> regularizers,
                                          std::size_t jobs = 1);

/// `retention,seed,regularizer,mR@K,zsR@K`
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, std::size_t k);

}  // namespace ngpkit::harness
