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

// Choosing which ICs of a theory to penalize for the current predictions,
// and the inference-time projection onto the theory.

#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "ngpkit/fact_stream.hpp"
#include "ngpkit/losses.hpp"
#include "ngpkit/theory.hpp"

namespace ngpkit {

enum class SelectionStrategy { Greedy, Random, Exhaustive };
/// Global: one ρ budget over all slots of a sample. PerSlot: ρ per slot.
enum class SelectionBudget { SampleGlobal, PerSlot };
/// Only one rule exists: exact likelihood ties resolve by (slot, s, p, o) ids.
enum class TieBreak { Lexicographic };

std::optional<SelectionStrategy> parse_strategy(std::string_view s) noexcept;
std::string_view strategy_name(SelectionStrategy s) noexcept;

struct SelectionConfig {
  std::size_t rho = 3;
  LossKind loss = LossKind::SL;
  TieBreak tie_break = TieBreak::Lexicographic;
  SelectionStrategy strategy = SelectionStrategy::Greedy;
  SelectionBudget budget = SelectionBudget::SampleGlobal;

  /// Throws ValidationError when rho is zero.
  void validate() const;
};

/// An IC attached to the slot whose variables it constrains.
struct SlotIc {
  std::size_t slot = 0;
  IntegrityConstraint ic;

  friend auto operator<=>(const SlotIc&, const SlotIc&) = default;
};

struct SelectionStats {
  std::uint64_t facts_examined = 0;
  std::uint64_t frontier_pushes = 0;
};

/// Walks `next()` (a ranking of facts) and keeps the facts whose negation is
/// in `store`, stopping at `rho` ICs or when the ranking runs out.
template <class NextFact>
std::vector<SlotIc> greedy_walk(NextFact&& next, const TheoryStore& store, std::size_t rho,
                                SelectionStats* stats = nullptr) {
  std::vector<SlotIc> out;
  while (out.size() < rho) {
    std::optional<ScoredFact> f = next();
    if (!f) break;
    if (stats) ++stats->facts_examined;
    if (store.contains_ic(f->fact)) out.push_back({f->slot, {f->fact}});
  }
  return out;
}

/// Greedy selection for one slot: the ρ top-likelihood facts forbidden by the
/// theory, in ranking order. May return fewer than ρ.
std::vector<IntegrityConstraint> greedy_select(const PredictionVector& w, std::size_t slot,
                                               const TheoryStore& store,
                                               const SelectionConfig& cfg,
                                               SelectionStats* stats = nullptr);

/// Greedy selection over an explicit ranking (e.g. a model's scored facts).
/// `ranked` must already be in ranking order.
std::vector<IntegrityConstraint> greedy_select_ranked(std::span<const ScoredFact> ranked,
                                                      const TheoryStore& store, std::size_t rho);

/// Sample-level selection honouring cfg.strategy and cfg.budget. Random
/// selection needs `rng`; exhaustive selection enumerates the whole theory and
/// is limited to small theories.
std::vector<SlotIc> select_for_sample(const PredictionVector& w, const TheoryStore& store,
                                      const SelectionConfig& cfg, std::mt19937_64* rng = nullptr,
                                      SelectionStats* stats = nullptr);

/// Largest candidate list exhaustive_select accepts.
inline constexpr std::size_t kMaxExhaustiveCandidates = 16;

/// The subset of size min(ρ, |ics|) maximizing loss_of_ic_set (all sizes
/// when |ics| < ρ). Ties go to the lexicographically smallest sorted subset.
/// Returned sorted by fact.
std::vector<IntegrityConstraint> exhaustive_select(const PredictionVector& w, std::size_t slot,
                                                   std::span<const IntegrityConstraint> ics,
                                                   std::size_t rho, LossKind kind);

/// ρ distinct ICs drawn uniformly from the theory, each attached to a
/// uniformly drawn slot.
std::vector<SlotIc> random_select(const TheoryStore& store, std::size_t slot_count,
                                  std::size_t rho, std::mt19937_64& rng);

/// Sum over slots of loss_of_ic_set for the ICs attached to that slot. Slots
/// have distinct variables, so both losses add across slots. 0 for no ICs.
double sample_logic_loss(LossKind kind, std::span<const SlotIc> selected, const PredictionVector& w);

/// Most likely fact of the slot that the theory does not forbid.
std::optional<ScoredFact> itr_project(const PredictionVector& w, std::size_t slot,
                                      const TheoryStore& store);
std::optional<ScoredFact> itr_project_ranked(std::span<const ScoredFact> ranked,
                                             const TheoryStore& store);

}  // namespace ngpkit
