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

#include "ngpkit/losses.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "ngpkit/error.hpp"
#include "ngpkit/kernels.hpp"

namespace ngpkit {

std::string_view loss_kind_name(LossKind k) noexcept { return k == LossKind::SL ? "sl" : "dl2"; }

std::optional<LossKind> parse_loss_kind(std::string_view s) noexcept {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "sl") return LossKind::SL;
  if (lower == "dl2") return LossKind::DL2;
  return std::nullopt;
}

LossWeights::LossWeights(double beta1, double beta2) : beta1_(beta1), beta2_(beta2) {
  if (!std::isfinite(beta1) || !std::isfinite(beta2) || beta1 < 0.0 || beta2 < 0.0) {
    throw ValidationError("loss weights must be finite and nonnegative");
  }
  if (beta1 == 0.0 && beta2 == 0.0) throw ValidationError("beta1 and beta2 cannot both be zero");
}

double clipped_neg_log(double p) noexcept { return -std::log(std::max(p, kLogEpsilon)); }

double semantic_loss(const Formula& f, const PredictionVector& w, std::size_t slot) {
  const double p = wmc(f, w, slot);
  if (p <= 0.0) return kSaturatedLoss;
  return -std::log(p);
}

namespace {

Formula nnf(const Formula& f, bool negated) {
  switch (f.kind()) {
    case FormulaKind::Var: return negated ? Formula::negate(f) : f;
    case FormulaKind::Not: return nnf(f.children()[0], !negated);
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.children().size());
      for (const auto& c : f.children()) kids.push_back(nnf(c, negated));
      const bool is_and = (f.kind() == FormulaKind::And) != negated;
      return is_and ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
  }
  return f;
}

// DL2 recursion on a formula already in negation normal form.
double dl2_value(const Formula& f, const PredictionVector& w, std::size_t slot) {
  switch (f.kind()) {
    case FormulaKind::Var: return 1.0 - w.value(slot, f.term());
    case FormulaKind::Not: return w.value(slot, f.children()[0].term());
    case FormulaKind::And: {
      double acc = 0.0;
      for (const auto& c : f.children()) acc += dl2_value(c, w, slot);
      return acc;
    }
    case FormulaKind::Or: {
      const auto kids = f.children();
      double acc = dl2_value(kids[0], w, slot);
      for (std::size_t i = 1; i < kids.size(); ++i) acc *= dl2_value(kids[i], w, slot);
      return acc;
    }
  }
  return 0.0;
}

void dl2_backprop(const Formula& f, const PredictionVector& w, std::size_t slot, double upstream,
                  Gradient& grad) {
  switch (f.kind()) {
    case FormulaKind::Var:
      grad[f.term()] -= upstream;
      return;
    case FormulaKind::Not:
      grad[f.children()[0].term()] += upstream;
      return;
    case FormulaKind::And:
      for (const auto& c : f.children()) dl2_backprop(c, w, slot, upstream, grad);
      return;
    case FormulaKind::Or: {
      const auto kids = f.children();
      std::vector<double> values;
      values.reserve(kids.size());
      for (const auto& c : kids) values.push_back(dl2_value(c, w, slot));
      // Product rule without division so zero factors are handled exactly.
      for (std::size_t i = 0; i < kids.size(); ++i) {
        double others = 1.0;
        for (std::size_t j = 0; j < kids.size(); ++j) {
          if (j != i) others *= values[j];
        }
        dl2_backprop(kids[i], w, slot, upstream * others, grad);
      }
      return;
    }
  }
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, false); }

double dl2_loss(const Formula& f, const PredictionVector& w, std::size_t slot) {
  return dl2_value(to_nnf(f), w, slot);
}

namespace {

double dl2_ic_sum(std::span<const IntegrityConstraint> ics, const PredictionVector& w,
                  std::size_t slot) {
  const std::size_t n = ics.size();
  std::vector<std::uint32_t> s(n), p(n), o(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.likelihood(slot, ics[i].fact);  // coverage check
    s[i] = ics[i].fact.s;
    p[i] = ics[i].fact.p;
    o[i] = ics[i].fact.o;
  }
  std::vector<double> terms(n);
  const auto& act = w.slot(slot);
  kernels::active().gather_triple_product(act.subject.data(), act.predicate.data(),
                                          act.object.data(), s.data(), p.data(), o.data(),
                                          terms.data(), n);
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

}  // namespace

double loss_of_ic_set(LossKind kind, std::span<const IntegrityConstraint> ics,
                      const PredictionVector& w, std::size_t slot) {
  if (ics.empty()) throw ContractError("loss of an empty IC set");
  if (kind == LossKind::DL2) return dl2_ic_sum(ics, w, slot);
  const double p = wmc_ic_conjunction(ics, w, slot);
  if (p <= 0.0) return kSaturatedLoss;
  return -std::log(p);
}

namespace {

Gradient sl_from_probability(double p, Gradient dp) {
  if (p <= 0.0) {
    throw SaturatedGradientError("semantic loss gradient undefined at probability 0");
  }
  for (auto& [t, g] : dp) g = -g / p;
  return dp;
}

}  // namespace

Gradient loss_gradient(LossKind kind, const Formula& f, const PredictionVector& w,
                       std::size_t slot) {
  if (kind == LossKind::SL) return sl_from_probability(wmc(f, w, slot), wmc_gradient(f, w, slot));
  Gradient grad;
  for (const auto& t : f.variables()) grad[t] = 0.0;
  dl2_backprop(to_nnf(f), w, slot, 1.0, grad);
  return grad;
}

Gradient loss_gradient(LossKind kind, std::span<const IntegrityConstraint> ics,
                       const PredictionVector& w, std::size_t slot) {
  if (ics.empty()) throw ContractError("gradient of an empty IC set");
  if (kind == LossKind::SL) {
    return sl_from_probability(wmc_ic_conjunction(ics, w, slot),
                               wmc_ic_conjunction_gradient(ics, w, slot));
  }
  Gradient grad;
  for (const auto& ic : ics) {
    const TermRef s{Domain::Subject, ic.fact.s};
    const TermRef p{Domain::Predicate, ic.fact.p};
    const TermRef o{Domain::Object, ic.fact.o};
    const double ws = w.value(slot, s);
    const double wp = w.value(slot, p);
    const double wo = w.value(slot, o);
    grad[s] += wp * wo;
    grad[p] += ws * wo;
    grad[o] += wp * ws;
  }
  return grad;
}

double combined_loss(double ln_value, double ls_value, const LossWeights& weights) noexcept {
  return weights.beta1() * ln_value + weights.beta2() * ls_value;
}

}  // namespace ngpkit
