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
#include <span>
#include <vector>

#include "ngpkit/vocabulary.hpp"

namespace ngpkit {

/// Activations of one relation slot: one vector per domain, indexed by id.
struct SlotActivations {
  std::vector<double> subject;
  std::vector<double> predicate;
  std::vector<double> object;

  std::span<const double> domain(Domain d) const noexcept;
  std::vector<double>& domain(Domain d) noexcept;
};

/// Per-slot activations of every term, each in [0, 1]. All slots share the
/// same domain sizes.
class PredictionVector {
 public:
  PredictionVector() = default;
  /// Throws ValidationError on empty slot lists, ragged sizes, or values
  /// outside [0, 1] (NaN included).
  explicit PredictionVector(std::vector<SlotActivations> slots);

  /// Single-slot convenience constructor.
  PredictionVector(std::vector<double> subject, std::vector<double> predicate,
                   std::vector<double> object);

  std::size_t slot_count() const noexcept { return slots_.size(); }
  std::size_t size(Domain d) const noexcept { return slots_.empty() ? 0 : slots_[0].domain(d).size(); }

  const SlotActivations& slot(std::size_t i) const { return slots_.at(i); }
  std::span<const double> domain(std::size_t slot, Domain d) const { return slot_ref(slot).domain(d); }

  bool covers(TermRef t) const noexcept { return t.id < size(t.domain); }

  /// Throws MissingAssignmentError when the term is not covered.
  double value(std::size_t slot, TermRef t) const;

  /// w(p)·w(s)·w(o); the single definition of fact likelihood.
  double likelihood(std::size_t slot, const Fact& f) const;

  /// Copy with one activation replaced (value must lie in [0, 1]).
  PredictionVector with_value(std::size_t slot, TermRef t, double v) const;

 private:
  const SlotActivations& slot_ref(std::size_t i) const;

  std::vector<SlotActivations> slots_;
};

/// Product in the fixed order predicate·subject·object. Everything that ranks
/// or sums fact likelihoods goes through here so ties compare bit-exactly.
inline double fact_likelihood(double ws, double wp, double wo) noexcept { return wp * ws * wo; }

}  // namespace ngpkit
