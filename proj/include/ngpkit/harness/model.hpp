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

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ngpkit/harness/dataset.hpp"
#include "ngpkit/prediction.hpp"
#include "ngpkit/semantics.hpp"

namespace ngpkit::harness {

/// Row-major `outputs x inputs` weight matrix plus bias.
struct AffineMap {
  std::size_t outputs = 0;
  std::size_t inputs = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  AffineMap() = default;
  AffineMap(std::size_t out, std::size_t in);
  std::size_t parameter_count() const noexcept { return weight.size() + bias.size(); }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Three affine maps (subject, predicate, object logits) shared by every
/// slot, each followed by a softmax. Zero-initialized, so an untrained model
/// predicts uniform distributions.
class RelationModel {
 public:
  RelationModel() = default;
  RelationModel(std::size_t feature_dim, std::size_t subjects, std::size_t predicates,
                std::size_t objects);

  std::size_t feature_dim() const noexcept { return feature_dim_; }
  const AffineMap& map(Domain d) const noexcept { return maps_[static_cast<std::size_t>(d)]; }
  AffineMap& map(Domain d) noexcept { return maps_[static_cast<std::size_t>(d)]; }

  /// Flat view over all parameters: per domain, weights then bias.
  std::size_t parameter_count() const noexcept;
  double parameter(std::size_t i) const;
  void set_parameter(std::size_t i, double v);

  friend bool operator==(const RelationModel&, const RelationModel&) = default;

 private:
  std::size_t feature_dim_ = 0;
  std::array<AffineMap, 3> maps_;
};

/// Per-slot softmax distributions. Throws ValidationError on a feature
/// dimension mismatch.
PredictionVector forward(const RelationModel& model, const SceneSample& sample);

/// Dense dℓ/dw, same shape as a PredictionVector.
using ActivationGradient = std::vector<SlotActivations>;

ActivationGradient zero_activation_gradient(const PredictionVector& w);
/// g[slot][t] += scale * sparse[t]
void accumulate(ActivationGradient& g, std::size_t slot, const Gradient& sparse, double scale);

/// Σ over labelled slots of -ln w(s*) - ln w(p*) - ln w(o*), each log clipped
/// at kLogEpsilon. Unlabelled slots contribute 0.
double supervised_loss(std::span<const std::optional<Fact>> truth, const PredictionVector& w);
/// Adds scale * d(supervised_loss)/dw to g.
void add_supervised_gradient(std::span<const std::optional<Fact>> truth, const PredictionVector& w,
                             double scale, ActivationGradient& g);

/// dℓ/dθ, laid out like the model.
struct ModelGradient {
  std::array<AffineMap, 3> maps;
  double norm() const noexcept;
  bool finite() const noexcept;
  /// Same flat order as RelationModel::parameter.
  double component(std::size_t i) const;
};

/// Chain rule through the softmax (dz = w ⊙ (g - <g, w>)) and the affine maps,
/// summed over slots.
ModelGradient backprop(const RelationModel& model, const SceneSample& sample,
                       const PredictionVector& w, const ActivationGradient& g);

/// θ -= lr * grad. Throws SaturatedGradientError on a non-finite gradient,
/// leaving the model untouched.
void apply_sgd(RelationModel& model, const ModelGradient& grad, double lr);

/// backprop followed by apply_sgd; returns the gradient norm.
double backward_and_update(RelationModel& model, const SceneSample& sample,
                           const PredictionVector& w, const ActivationGradient& g, double lr);

/// Text format: header `ngpkit-model dim=D sizes=SxPxO`, then for each domain
/// one line per output row (weights then bias), values in %.17g.
void write_model(std::ostream& out, const RelationModel& model);
void save_model(const RelationModel& model, const std::filesystem::path& path);
RelationModel read_model(std::istream& in, const std::string& source = "<model>");
RelationModel load_model(const std::filesystem::path& path);

}  // namespace ngpkit::harness
