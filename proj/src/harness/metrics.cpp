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

#include "ngpkit/harness/metrics.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "ngpkit/error.hpp"

namespace ngpkit::harness {

namespace {

std::set<std::pair<std::size_t, Fact>> top_set(const EvalRecord& r, std::size_t k) {
  std::vector<ScoredFact> ranked = r.candidates;
  const std::size_t n = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end(),
                    ranks_before);
  std::set<std::pair<std::size_t, Fact>> out;
  for (std::size_t i = 0; i < n; ++i) out.insert({ranked[i].slot, ranked[i].fact});
  return out;
}

}  // namespace

MeanRecall mean_recall_at_k(std::span<const EvalRecord> records, std::size_t predicate_count,
                            std::size_t k) {
  if (k == 0) throw ContractError("k must be at least 1");
  std::vector<std::size_t> hits(predicate_count, 0), totals(predicate_count, 0);
  for (const auto& r : records) {
    const auto top = top_set(r, k);
    for (std::size_t slot = 0; slot < r.truth.size(); ++slot) {
      if (!r.truth[slot]) continue;
      const Fact& f = *r.truth[slot];
      if (f.p >= predicate_count) throw ContractError("label predicate outside vocabulary");
      ++totals[f.p];
      if (top.contains({slot, f})) ++hits[f.p];
    }
  }
  MeanRecall out;
  out.per_predicate.resize(predicate_count);
  double sum = 0.0;
  for (std::size_t p = 0; p < predicate_count; ++p) {
    if (totals[p] == 0) continue;
    const double recall = static_cast<double>(hits[p]) / static_cast<double>(totals[p]);
    out.per_predicate[p] = recall;
    sum += recall;
    ++out.classes;
  }
  if (out.classes > 0) out.value = sum / static_cast<double>(out.classes);
  return out;
}

ZeroShotRecall zero_shot_recall_at_k(std::span<const EvalRecord> records,
                                     std::span<const Fact> train_facts, std::size_t k) {
  if (k == 0) throw ContractError("k must be at least 1");
  std::size_t hits = 0;
  ZeroShotRecall out;
  for (const auto& r : records) {
    const auto top = top_set(r, k);
    for (std::size_t slot = 0; slot < r.truth.size(); ++slot) {
      if (!r.truth[slot]) continue;
      const Fact& f = *r.truth[slot];
      if (std::binary_search(train_facts.begin(), train_facts.end(), f)) continue;
      ++out.pool_instances;
      if (top.contains({slot, f})) ++hits;
    }
  }
  out.empty_pool = out.pool_instances == 0;
  if (!out.empty_pool) {
    out.value = static_cast<double>(hits) / static_cast<double>(out.pool_instances);
  }
  return out;
}

std::vector<EvalRecord> predict_records(const RelationModel& model,
                                        std::span<const SceneSample> samples, std::size_t k) {
  std::vector<EvalRecord> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back({topk_facts_all_slots(forward(model, s), k), s.truth});
  }
  return out;
}

}  // namespace ngpkit::harness
