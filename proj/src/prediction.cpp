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

#include "ngpkit/prediction.hpp"

#include <string>

#include "ngpkit/error.hpp"

namespace ngpkit {

std::span<const double> SlotActivations::domain(Domain d) const noexcept {
  switch (d) {
    case Domain::Subject: return subject;
    case Domain::Predicate: return predicate;
    case Domain::Object: return object;
  }
  return {};
}

std::vector<double>& SlotActivations::domain(Domain d) noexcept {
  switch (d) {
    case Domain::Predicate: return predicate;
    case Domain::Object: return object;
    default: return subject;
  }
}

PredictionVector::PredictionVector(std::vector<SlotActivations> slots) : slots_(std::move(slots)) {
  if (slots_.empty()) throw ValidationError("prediction vector needs at least one slot");
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    for (Domain d : kDomains) {
      const auto values = slots_[i].domain(d);
      if (values.size() != slots_[0].domain(d).size()) {
        throw ValidationError("slot " + std::to_string(i) + " has a different " +
                              std::string(domain_name(d)) + " size");
      }
      for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw ValidationError("activation outside [0,1] in slot " + std::to_string(i));
        }
      }
    }
  }
}

PredictionVector::PredictionVector(std::vector<double> subject, std::vector<double> predicate,
                                   std::vector<double> object)
    : PredictionVector(std::vector<SlotActivations>{
          SlotActivations{std::move(subject), std::move(predicate), std::move(object)}}) {}

const SlotActivations& PredictionVector::slot_ref(std::size_t i) const {
  if (i >= slots_.size()) {
    throw ContractError("slot " + std::to_string(i) + " out of range");
  }
  return slots_[i];
}

double PredictionVector::value(std::size_t slot, TermRef t) const {
  const auto values = slot_ref(slot).domain(t.domain);
  if (t.id >= values.size()) {
    throw MissingAssignmentError(std::string(1, domain_tag(t.domain)) + ":" +
                                 std::to_string(t.id) + " not covered by the prediction vector");
  }
  return values[t.id];
}

double PredictionVector::likelihood(std::size_t slot, const Fact& f) const {
  return fact_likelihood(value(slot, {Domain::Subject, f.s}), value(slot, {Domain::Predicate, f.p}),
                         value(slot, {Domain::Object, f.o}));
}

PredictionVector PredictionVector::with_value(std::size_t slot, TermRef t, double v) const {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("activation outside [0,1]");
  value(slot, t);
  PredictionVector copy = *this;
  copy.slots_[slot].domain(t.domain)[t.id] = v;
  return copy;
}

}  // namespace ngpkit
