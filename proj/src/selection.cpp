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

#include "ngpkit/selection.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "ngpkit/error.hpp"

namespace ngpkit {

std::optional<SelectionStrategy> parse_strategy(std::string_view s) noexcept {
  if (s == "greedy") return SelectionStrategy::Greedy;
  if (s == "random") return SelectionStrategy::Random;
  if (s == "exhaustive") return SelectionStrategy::Exhaustive;
  return std::nullopt;
}

std::string_view strategy_name(SelectionStrategy s) noexcept {
  switch (s) {
    case SelectionStrategy::Greedy: return "greedy";
    case SelectionStrategy::Random: return "random";
    case SelectionStrategy::Exhaustive: return "exhaustive";
  }
  return "?";
}

void SelectionConfig::validate() const {
  if (rho < 1) throw ValidationError("rho must be at least 1");
}

namespace {

std::vector<IntegrityConstraint> strip_slots(const std::vector<SlotIc>& picked) {
  std::vector<IntegrityConstraint> out;
  out.reserve(picked.size());
  for (const auto& p : picked) out.push_back(p.ic);
  return out;
}

}  // namespace

std::vector<IntegrityConstraint> greedy_select(const PredictionVector& w, std::size_t slot,
                                               const TheoryStore& store,
                                               const SelectionConfig& cfg, SelectionStats* stats) {
  cfg.validate();
  FactStream stream(w, slot);
  auto picked = greedy_walk([&] { return stream.next(); }, store, cfg.rho, stats);
  if (stats) stats->frontier_pushes += stream.frontier_pushes();
  return strip_slots(picked);
}

std::vector<IntegrityConstraint> greedy_select_ranked(std::span<const ScoredFact> ranked,
                                                      const TheoryStore& store, std::size_t rho) {
  std::size_t i = 0;
  auto picked = greedy_walk(
      [&]() -> std::optional<ScoredFact> {
        if (i == ranked.size()) return std::nullopt;
        return ranked[i++];
      },
      store, rho);
  return strip_slots(picked);
}

std::vector<IntegrityConstraint> exhaustive_select(const PredictionVector& w, std::size_t slot,
                                                   std::span<const IntegrityConstraint> ics,
                                                   std::size_t rho, LossKind kind) {
  if (ics.size() > kMaxExhaustiveCandidates) {
    throw CapacityError("exhaustive selection limited to " +
                        std::to_string(kMaxExhaustiveCandidates) + " candidate ICs");
  }
  if (rho < 1) throw ValidationError("rho must be at least 1");
  if (ics.empty()) return {};
  const std::size_t n = ics.size();
  const std::size_t min_size = n < rho ? 1 : rho;
  const std::size_t max_size = std::min(n, rho);

  double best_loss = -1.0;
  std::vector<IntegrityConstraint> best;
  std::vector<IntegrityConstraint> subset;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size < min_size || size > max_size) continue;
    subset.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(ics[i]);
    }
    std::sort(subset.begin(), subset.end());
    const double loss = loss_of_ic_set(kind, subset, w, slot);
    if (loss > best_loss || (loss == best_loss && subset < best)) {
      best_loss = loss;
      best = subset;
    }
  }
  return best;
}

std::vector<SlotIc> random_select(const TheoryStore& store, std::size_t slot_count,
                                  std::size_t rho, std::mt19937_64& rng) {
  if (slot_count == 0) throw ContractError("random selection needs at least one slot");
  const std::uint64_t available = store.ic_count() * slot_count;
  const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(rho, available));
  std::set<SlotIc> picked;
  std::uniform_int_distribution<std::size_t> slot_dist(0, slot_count - 1);
  while (picked.size() < want) {
    const std::size_t slot = slot_dist(rng);
    picked.insert({slot, *store.sample_ic(rng)});
  }
  return {picked.begin(), picked.end()};
}

std::vector<SlotIc> select_for_sample(const PredictionVector& w, const TheoryStore& store,
                                      const SelectionConfig& cfg, std::mt19937_64* rng,
                                      SelectionStats* stats) {
  cfg.validate();
  switch (cfg.strategy) {
    case SelectionStrategy::Greedy: {
      if (cfg.budget == SelectionBudget::SampleGlobal) {
        MergedFactStream stream(w);
        auto out = greedy_walk([&] { return stream.next(); }, store, cfg.rho, stats);
        if (stats) stats->frontier_pushes += stream.frontier_pushes();
        return out;
      }
      std::vector<SlotIc> out;
      for (std::size_t s = 0; s < w.slot_count(); ++s) {
        for (const auto& ic : greedy_select(w, s, store, cfg, stats)) out.push_back({s, ic});
      }
      return out;
    }
    case SelectionStrategy::Random: {
      if (!rng) throw ContractError("random selection needs a random generator");
      if (cfg.budget == SelectionBudget::SampleGlobal) {
        return random_select(store, w.slot_count(), cfg.rho, *rng);
      }
      std::vector<SlotIc> out;
      for (std::size_t s = 0; s < w.slot_count(); ++s) {
        for (const auto& p : random_select(store, 1, cfg.rho, *rng)) out.push_back({s, p.ic});
      }
      return out;
    }
    case SelectionStrategy::Exhaustive: {
      if (store.ic_count() > kMaxExhaustiveCandidates) {
        throw CapacityError("exhaustive selection needs a theory of at most " +
                            std::to_string(kMaxExhaustiveCandidates) + " ICs");
      }
      const auto candidates = store.ics();
      std::vector<SlotIc> out;
      for (std::size_t s = 0; s < w.slot_count(); ++s) {
        for (const auto& ic : exhaustive_select(w, s, candidates, cfg.rho, cfg.loss)) {
          out.push_back({s, ic});
        }
      }
      return out;
    }
  }
  return {};
}

double sample_logic_loss(LossKind kind, std::span<const SlotIc> selected,
                         const PredictionVector& w) {
  std::map<std::size_t, std::vector<IntegrityConstraint>> by_slot;
  for (const auto& s : selected) by_slot[s.slot].push_back(s.ic);
  double total = 0.0;
  for (const auto& [slot, ics] : by_slot) total += loss_of_ic_set(kind, ics, w, slot);
  return total;
}

std::optional<ScoredFact> itr_project(const PredictionVector& w, std::size_t slot,
                                      const TheoryStore& store) {
  FactStream stream(w, slot);
  while (auto f = stream.next()) {
    if (!store.contains_ic(f->fact)) return f;
  }
  return std::nullopt;
}

std::optional<ScoredFact> itr_project_ranked(std::span<const ScoredFact> ranked,
                                             const TheoryStore& store) {
  for (const auto& f : ranked) {
    if (!store.contains_ic(f.fact)) return f;
  }
  return std::nullopt;
}

}  // namespace ngpkit
