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

// Classical, Lukasiewicz-fuzzy and probabilistic (weighted model counting)
// semantics of Formula. All functions are pure.

#include <cstddef>
#include <map>
#include <span>

#include "ngpkit/formula.hpp"
#include "ngpkit/prediction.hpp"

namespace ngpkit {

using Assignment = std::map<TermRef, bool>;

/// Sparse derivative of a scalar with respect to the activations of one slot.
using Gradient = std::map<TermRef, double>;

/// Largest variable count wmc() enumerates exactly (2^20 interpretations).
inline constexpr std::size_t kDefaultWmcVariableCap = 20;

/// Largest connected group of variable-sharing ICs handled by inclusion-exclusion.
inline constexpr std::size_t kMaxInclusionExclusionIcs = 24;

/// Throws MissingAssignmentError if a variable of `f` is unassigned.
bool eval_boolean(const Formula& f, const Assignment& a);

/// Lukasiewicz semantics: 1-x, max(0, x+y-1), min(1, x+y); n-ary nodes fold
/// left in child order.
double eval_fuzzy(const Formula& f, const PredictionVector& w, std::size_t slot);

/// P(f | w): sum over all models of f of the product of w(t) for true and
/// 1-w(t) for false variables. Exact enumeration; throws CapacityError when f
/// has more than `variable_cap` variables.
double wmc(const Formula& f, const PredictionVector& w, std::size_t slot,
           std::size_t variable_cap = kDefaultWmcVariableCap);

/// ∂P(f|w)/∂w(t) for every variable t of f, using multilinearity:
/// P(f | w(t)=1) - P(f | w(t)=0).
Gradient wmc_gradient(const Formula& f, const PredictionVector& w, std::size_t slot,
                      std::size_t variable_cap = kDefaultWmcVariableCap);

/// P(∧ ¬C_i | w) for ICs ¬C_i. ICs are grouped into variable-sharing
/// components; each component is solved by inclusion-exclusion over its
/// positive conjunctions and the components multiply. Disjoint ICs therefore
/// reduce to Π(1 - w(p)w(s)w(o)).
///
/// Throws ContractError for an empty list and CapacityError when a component
/// holds more than kMaxInclusionExclusionIcs distinct ICs.
double wmc_ic_conjunction(std::span<const IntegrityConstraint> ics, const PredictionVector& w,
                          std::size_t slot);

Gradient wmc_ic_conjunction_gradient(std::span<const IntegrityConstraint> ics,
                                     const PredictionVector& w, std::size_t slot);

/// True when no two ICs share a (domain, id) variable.
bool ics_variable_disjoint(std::span<const IntegrityConstraint> ics);

}  // namespace ngpkit
