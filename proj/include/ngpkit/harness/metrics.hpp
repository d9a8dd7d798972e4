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

#include <optional>
#include <span>
#include <vector>

#include "ngpkit/fact_stream.hpp"
#include "ngpkit/harness/model.hpp"

namespace ngpkit::harness {

/// Scored candidates of one sample (any order, any length) and its labels.
/// A label (slot, fact) counts as recovered when that exact slot/fact pair is
/// among the sample's k best candidates.
struct EvalRecord {
  std::vector<ScoredFact> candidates;
  std::vector<std::optional<Fact>> truth;
};

struct MeanRecall {
  double value = 0.0;
  /// Predicates with at least one label; the others are skipped, not zeroed.
  std::size_t classes = 0;
  /// Per predicate id: recall, or nullopt when the predicate has no labels.
  std::vector<std::optional<double>> per_predicate;
};

struct ZeroShotRecall {
  double value = 0.0;
  std::size_t pool_instances = 0;
  bool empty_pool = true;
};

/// Unweighted mean over predicates of recall@k across all records.
/// Throws ContractError for k = 0.
MeanRecall mean_recall_at_k(std::span<const EvalRecord> records, std::size_t predicate_count,
                            std::size_t k);

/// Recall@k over labels whose fact is not in `train_facts` (sorted). 0 with
/// empty_pool set when no such label exists.
ZeroShotRecall zero_shot_recall_at_k(std::span<const EvalRecord> records,
                                     std::span<const Fact> train_facts, std::size_t k);

/// Top-k candidates of each sample across all its slots.
std::vector<EvalRecord> predict_records(const RelationModel& model,
                                        std::span<const SceneSample> samples, std::size_t k);

}  // namespace ngpkit::harness
