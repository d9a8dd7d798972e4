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

// One optimization step of the logic-regularized objective
//   β1·supervised_loss(F, w) + β2·logic_loss(selected ICs, w)
// where the ICs are chosen from the current predictions.

#include <random>
#include <span>
#include <vector>

#include "ngpkit/harness/model.hpp"
#include "ngpkit/losses.hpp"
#include "ngpkit/selection.hpp"
#include "ngpkit/theory.hpp"

namespace ngpkit::harness {

struct StepDiagnostics {
  double ln = 0.0;
  double ls = 0.0;
  std::vector<SlotIc> selected;
  double grad_norm = 0.0;
  /// False when the sample had no labels, so only the logic term applied.
  bool supervised = false;
};

/// Logic loss used for training: SL is clipped at kLogEpsilon per slot, DL2
/// is sample_logic_loss unchanged.
double training_logic_loss(LossKind kind, std::span<const SlotIc> selected,
                           const PredictionVector& w);

/// The objective for a fixed IC selection, as a function of the model.
/// The supervised term is omitted when the sample has no labels.
double objective_value(const RelationModel& model, const SceneSample& sample,
                       std::span<const SlotIc> selected, LossKind kind,
                       const LossWeights& weights);
ModelGradient objective_gradient(const RelationModel& model, const SceneSample& sample,
                                 std::span<const SlotIc> selected, LossKind kind,
                                 const LossWeights& weights);

/// Forward, IC selection (skipped when β2 = 0), backprop, one SGD step.
/// `rng` is only consulted by random selection.
StepDiagnostics ngp_step(const SceneSample& sample, const TheoryStore& store, RelationModel& model,
                         const SelectionConfig& cfg, const LossWeights& weights, double lr,
                         std::mt19937_64* rng = nullptr);

}  // namespace ngpkit::harness
