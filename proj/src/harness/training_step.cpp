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

#include "ngpkit/harness/training_step.hpp"

#include <map>

namespace ngpkit::harness {

namespace {

std::map<std::size_t, std::vector<IntegrityConstraint>> group_by_slot(
    std::span<const SlotIc> selected) {
  std::map<std::size_t, std::vector<IntegrityConstraint>> out;
  for (const auto& s : selected) out[s.slot].push_back(s.ic);
  return out;
}

struct Evaluated {
  PredictionVector w;
  double ln = 0.0;
  double ls = 0.0;
};

Evaluated evaluate(const RelationModel& model, const SceneSample& sample,
                   std::span<const SlotIc> selected, LossKind kind) {
  Evaluated e{forward(model, sample)};
  e.ln = supervised_loss(sample.truth, e.w);
  e.ls = training_logic_loss(kind, selected, e.w);
  return e;
}

ActivationGradient activation_gradient(const SceneSample& sample, const PredictionVector& w,
                                       std::span<const SlotIc> selected, LossKind kind,
                                       const LossWeights& weights) {
  ActivationGradient g = zero_activation_gradient(w);
  if (weights.beta1() != 0.0) add_supervised_gradient(sample.truth, w, weights.beta1(), g);
  if (weights.beta2() == 0.0) return g;
  for (const auto& [slot, ics] : group_by_slot(selected)) {
    // Past the SL clip the loss is flat and contributes nothing.
    if (kind == LossKind::SL && wmc_ic_conjunction(ics, w, slot) <= kLogEpsilon) continue;
    accumulate(g, slot, loss_gradient(kind, ics, w, slot), weights.beta2());
  }
  return g;
}

}  // namespace

double training_logic_loss(LossKind kind, std::span<const SlotIc> selected,
                           const PredictionVector& w) {
  if (kind == LossKind::DL2) return sample_logic_loss(kind, selected, w);
  double total = 0.0;
  for (const auto& [slot, ics] : group_by_slot(selected)) {
    total += clipped_neg_log(wmc_ic_conjunction(ics, w, slot));
  }
  return total;
}

double objective_value(const RelationModel& model, const SceneSample& sample,
                       std::span<const SlotIc> selected, LossKind kind,
                       const LossWeights& weights) {
  const Evaluated e = evaluate(model, sample, selected, kind);
  return combined_loss(e.ln, e.ls, weights);
}

ModelGradient objective_gradient(const RelationModel& model, const SceneSample& sample,
                                 std::span<const SlotIc> selected, LossKind kind,
                                 const LossWeights& weights) {
  const PredictionVector w = forward(model, sample);
  return backprop(model, sample, w, activation_gradient(sample, w, selected, kind, weights));
}

StepDiagnostics ngp_step(const SceneSample& sample, const TheoryStore& store, RelationModel& model,
                         const SelectionConfig& cfg, const LossWeights& weights, double lr,
                         std::mt19937_64* rng) {
  StepDiagnostics d;
  const PredictionVector w = forward(model, sample);
  if (weights.beta2() != 0.0) d.selected = select_for_sample(w, store, cfg, rng);
  d.supervised = sample.has_facts();
  d.ln = supervised_loss(sample.truth, w);
  d.ls = training_logic_loss(cfg.loss, d.selected, w);
  const ActivationGradient g = activation_gradient(sample, w, d.selected, cfg.loss, weights);
  d.grad_norm = backward_and_update(model, sample, w, g, lr);
  return d;
}

}  // namespace ngpkit::harness
