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
#include <deque>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "ngpkit/prediction.hpp"

namespace ngpkit {

/// A candidate fact with its likelihood w(p)·w(s)·w(o) in one slot.
struct ScoredFact {
  Fact fact;
  double likelihood = 0.0;
  std::size_t slot = 0;
};

/// Total order used for every ranking: likelihood descending, then slot, then
/// (s, p, o) ids ascending.
bool ranks_before(const ScoredFact& a, const ScoredFact& b) noexcept;

/// Lazily yields the facts of one slot in ranking order without scoring all
/// of S×P×O. Each domain is sorted by activation (descending, ties by id) and
/// a frontier of rank triples is expanded through a max-heap with a visited
/// set. Facts whose likelihoods tie exactly are buffered as a group and
/// released in id order.
class FactStream {
 public:
  FactStream(const PredictionVector& w, std::size_t slot);

  std::optional<ScoredFact> next();

  std::uint64_t fact_space() const noexcept { return space_; }
  std::uint64_t emitted() const noexcept { return emitted_; }
  /// Frontier entries pushed so far; the unit of work of the enumeration.
  std::uint64_t frontier_pushes() const noexcept { return pushes_; }

 private:
  struct Entry {
    double likelihood;
    std::uint32_t rs, rp, ro;  // ranks within each sorted domain
  };
  struct Lower {
    bool operator()(const Entry& a, const Entry& b) const noexcept {
      return a.likelihood < b.likelihood;
    }
  };

  void push(std::uint32_t rs, std::uint32_t rp, std::uint32_t ro);
  ScoredFact to_scored(const Entry& e) const;

  std::size_t slot_;
  std::array<std::vector<std::uint32_t>, 3> order_;  // ids by descending activation
  std::array<std::vector<double>, 3> sorted_;        // activations in that order
  std::priority_queue<Entry, std::vector<Entry>, Lower> heap_;
  std::unordered_set<std::uint64_t> visited_;
  std::deque<ScoredFact> ready_;
  std::uint64_t space_ = 0;
  std::uint64_t emitted_ = 0;
  std::uint64_t pushes_ = 0;
};

/// Merges the per-slot streams of every slot into one ranking.
class MergedFactStream {
 public:
  explicit MergedFactStream(const PredictionVector& w);

  std::optional<ScoredFact> next();
  std::uint64_t frontier_pushes() const noexcept;

 private:
  std::vector<FactStream> streams_;
  std::vector<std::optional<ScoredFact>> heads_;
};

/// The k best facts of one slot in ranking order. Throws ContractError
/// unless 1 <= k <= |S|·|P|·|O|.
std::vector<ScoredFact> topk_facts(const PredictionVector& w, std::size_t slot, std::size_t k);

/// The k best facts across all slots (fewer if the space is smaller).
std::vector<ScoredFact> topk_facts_all_slots(const PredictionVector& w, std::size_t k);

}  // namespace ngpkit
