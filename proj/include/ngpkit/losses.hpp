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

#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include "ngpkit/formula.hpp"
#include "ngpkit/prediction.hpp"
#include "ngpkit/semantics.hpp"

namespace ngpkit {

enum class LossKind { SL, DL2 };

std::string_view loss_kind_name(LossKind k) noexcept;
/// Accepts "sl" / "dl2" in any case.
std::optional<LossKind> parse_loss_kind(std::string_view s) noexcept;

/// Weights of the supervised and the logic-based term of the objective.
class LossWeights {
 public:
  LossWeights() = default;
  /// Throws ValidationError on negative, non-finite, or both-zero weights.
  LossWeights(double beta1, double beta2);

  double beta1() const noexcept { return beta1_; }
  double beta2() const noexcept { return beta2_; }

 private:
  double beta1_ = 1.0;
  double beta2_ = 1.0;
};

/// Clip applied inside every logarithm on the training path.
inline constexpr double kLogEpsilon = 1e-12;

/// Returned by semantic losses when the formula has probability zero.
inline constexpr double kSaturatedLoss = std::numeric_limits<double>::infinity();

/// -ln P(f | w); kSaturatedLoss when P is zero.
double semantic_loss(const Formula& f, const PredictionVector& w, std::size_t slot);

/// -ln max(p, kLogEpsilon).
double clipped_neg_log(double p) noexcept;

/// Negation normal form: De Morgan pushes every negation onto a variable and
/// double negations cancel. Nested connectives of the same kind are kept.
Formula to_nnf(const Formula& f);

/// DL2 loss on the negation normal form: 1-w(X), w(X) for ¬X, sum for ∧,
/// product for ∨ (n-ary nodes fold left).
double dl2_loss(const Formula& f, const PredictionVector& w, std::size_t slot);

/// Loss of the conjunction of `ics`. SL uses wmc_ic_conjunction; DL2 is the
/// sum of w(p)w(s)w(o), added in ascending order so equal multisets of ICs
/// give bit-identical values.
double loss_of_ic_set(LossKind kind, std::span<const IntegrityConstraint> ics,
                      const PredictionVector& w, std::size_t slot);

/// Exact gradients. The SL variants throw SaturatedGradientError when P = 0.
Gradient loss_gradient(LossKind kind, const Formula& f, const PredictionVector& w,
                       std::size_t slot);
Gradient loss_gradient(LossKind kind, std::span<const IntegrityConstraint> ics,
                       const PredictionVector& w, std::size_t slot);

/// β1·ln + β2·ls
double combined_loss(double ln_value, double ls_value, const LossWeights& weights) noexcept;

}  // namespace ngpkit
