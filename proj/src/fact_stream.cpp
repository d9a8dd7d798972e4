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

#include "ngpkit/fact_stream.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ngpkit/error.hpp"

namespace ngpkit {

bool ranks_before(const ScoredFact& a, const ScoredFact& b) noexcept {
  if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
  if (a.slot != b.slot) return a.slot < b.slot;
  return a.fact < b.fact;
}

FactStream::FactStream(const PredictionVector& w, std::size_t slot) : slot_(slot) {
  space_ = 1;
  for (Domain d : kDomains) {
    const auto values = w.domain(slot, d);
    auto& order = order_[static_cast<std::size_t>(d)];
    order.resize(values.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return values[a] > values[b]; });
    auto& sorted = sorted_[static_cast<std::size_t>(d)];
    sorted.reserve(order.size());
    for (auto id : order) sorted.push_back(values[id]);
    space_ *= values.size();
  }
  if (space_ > 0) push(0, 0, 0);
}

void FactStream::push(std::uint32_t rs, std::uint32_t rp, std::uint32_t ro) {
  const std::uint64_t np = sorted_[1].size();
  const std::uint64_t no = sorted_[2].size();
  const std::uint64_t key = (std::uint64_t{rs} * np + rp) * no + ro;
  if (!visited_.insert(key).second) return;
  heap_.push({fact_likelihood(sorted_[0][rs], sorted_[1][rp], sorted_[2][ro]), rs, rp, ro});
  ++pushes_;
}

ScoredFact FactStream::to_scored(const Entry& e) const {
  return {Fact{order_[0][e.rs], order_[1][e.rp], order_[2][e.ro]}, e.likelihood, slot_};
}

std::optional<ScoredFact> FactStream::next() {
  if (ready_.empty()) {
    if (heap_.empty()) return std::nullopt;
    // Successors never outrank their parent, so once the top likelihood is
    // drained every member of that tie group has been seen.
    const double level = heap_.top().likelihood;
    while (!heap_.empty() && heap_.top().likelihood == level) {
      const Entry e = heap_.top();
      heap_.pop();
      ready_.push_back(to_scored(e));
      if (e.rs + 1 < sorted_[0].size()) push(e.rs + 1, e.rp, e.ro);
      if (e.rp + 1 < sorted_[1].size()) push(e.rs, e.rp + 1, e.ro);
      if (e.ro + 1 < sorted_[2].size()) push(e.rs, e.rp, e.ro + 1);
    }
    std::sort(ready_.begin(), ready_.end(),
              [](const ScoredFact& a, const ScoredFact& b) { return a.fact < b.fact; });
  }
  ScoredFact out = ready_.front();
  ready_.pop_front();
  ++emitted_;
  return out;
}

MergedFactStream::MergedFactStream(const PredictionVector& w) {
  streams_.reserve(w.slot_count());
  for (std::size_t s = 0; s < w.slot_count(); ++s) streams_.emplace_back(w, s);
  for (auto& st : streams_) heads_.push_back(st.next());
}

std::optional<ScoredFact> MergedFactStream::next() {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < heads_.size(); ++i) {
    if (!heads_[i]) continue;
    if (!best || ranks_before(*heads_[i], *heads_[*best])) best = i;
  }
  if (!best) return std::nullopt;
  auto out = heads_[*best];
  heads_[*best] = streams_[*best].next();
  return out;
}

std::uint64_t MergedFactStream::frontier_pushes() const noexcept {
  std::uint64_t total = 0;
  for (const auto& s : streams_) total += s.frontier_pushes();
  return total;
}

std::vector<ScoredFact> topk_facts(const PredictionVector& w, std::size_t slot, std::size_t k) {
  FactStream stream(w, slot);
  if (k < 1 || k > stream.fact_space()) {
    throw ContractError("k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(stream.fact_space()) + "]");
  }
  std::vector<ScoredFact> out;
  out.reserve(k);
  while (out.size() < k) out.push_back(*stream.next());
  return out;
}

std::vector<ScoredFact> topk_facts_all_slots(const PredictionVector& w, std::size_t k) {
  MergedFactStream stream(w);
  std::vector<ScoredFact> out;
  out.reserve(k);
  while (out.size() < k) {
    auto f = stream.next();
    if (!f) break;
    out.push_back(*f);
  }
  return out;
}

}  // namespace ngpkit
