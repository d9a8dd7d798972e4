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

// Reference implementations the tests compare the library against. They are
// written for clarity, not speed, and share no code with src/.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ngpkit/formula.hpp"
#include "ngpkit/prediction.hpp"
#include "ngpkit/vocabulary.hpp"

namespace ngpkit::testing {

inline std::shared_ptr<const Vocabulary> numbered_vocab(std::size_t ns, std::size_t np,
                                                        std::size_t no) {
  std::vector<std::string> s, p, o;
  for (std::size_t i = 0; i < ns; ++i) s.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < np; ++i) p.push_back("p" + std::to_string(i));
  for (std::size_t i = 0; i < no; ++i) o.push_back("o" + std::to_string(i));
  return std::make_shared<const Vocabulary>(s, p, o);
}

inline double activation(const PredictionVector& w, std::size_t slot, TermRef t) {
  return w.domain(slot, t.domain)[t.id];
}

inline bool truth_of(const Formula& f, const std::map<TermRef, bool>& a) {
  switch (f.kind()) {
    case FormulaKind::Var: return a.at(f.term());
    case FormulaKind::Not: return !truth_of(f.children()[0], a);
    case FormulaKind::And:
      for (const auto& c : f.children())
        if (!truth_of(c, a)) return false;
      return true;
    case FormulaKind::Or:
      for (const auto& c : f.children())
        if (truth_of(c, a)) return true;
      return false;
  }
  return false;
}

inline void collect_vars(const Formula& f, std::set<TermRef>& out) {
  if (f.kind() == FormulaKind::Var) {
    out.insert(f.term());
    return;
  }
  for (const auto& c : f.children()) collect_vars(c, out);
}

/// Sum of interpretation weights over the models of f.
inline double brute_wmc(const Formula& f, const PredictionVector& w, std::size_t slot) {
  std::set<TermRef> vs;
  collect_vars(f, vs);
  const std::vector<TermRef> vars(vs.begin(), vs.end());
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << vars.size()); ++bits) {
    std::map<TermRef, bool> a;
    double weight = 1.0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const bool on = (bits >> i) & 1u;
      a[vars[i]] = on;
      const double x = activation(w, slot, vars[i]);
      weight *= on ? x : 1.0 - x;
    }
    if (truth_of(f, a)) total += weight;
  }
  return total;
}

/// Probability that no listed fact has all three of its terms on.
inline double brute_ic_probability(const std::vector<Fact>& forbidden, const PredictionVector& w,
                                   std::size_t slot) {
  std::set<TermRef> vs;
  for (const auto& f : forbidden) {
    vs.insert({Domain::Subject, f.s});
    vs.insert({Domain::Predicate, f.p});
    vs.insert({Domain::Object, f.o});
  }
  const std::vector<TermRef> vars(vs.begin(), vs.end());
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << vars.size()); ++bits) {
    std::map<TermRef, bool> a;
    double weight = 1.0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const bool on = (bits >> i) & 1u;
      a[vars[i]] = on;
      const double x = activation(w, slot, vars[i]);
      weight *= on ? x : 1.0 - x;
    }
    bool ok = true;
    for (const auto& f : forbidden) {
      if (a[{Domain::Subject, f.s}] && a[{Domain::Predicate, f.p}] && a[{Domain::Object, f.o}]) {
        ok = false;
        break;
      }
    }
    if (ok) total += weight;
  }
  return total;
}

struct RankedFact {
  Fact fact;
  double likelihood;
};

/// Every fact of one slot, sorted by likelihood then (s, p, o).
inline std::vector<RankedFact> brute_ranking(const PredictionVector& w, std::size_t slot) {
  std::vector<RankedFact> all;
  const auto s = w.domain(slot, Domain::Subject);
  const auto p = w.domain(slot, Domain::Predicate);
  const auto o = w.domain(slot, Domain::Object);
  for (std::uint32_t i = 0; i < s.size(); ++i)
    for (std::uint32_t j = 0; j < p.size(); ++j)
      for (std::uint32_t k = 0; k < o.size(); ++k) all.push_back({{i, j, k}, p[j] * s[i] * o[k]});
  std::stable_sort(all.begin(), all.end(), [](const RankedFact& a, const RankedFact& b) {
    if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
    return a.fact < b.fact;
  });
  return all;
}

/// Central difference of `fn` in one activation.
inline double central_difference(const std::function<double(const PredictionVector&)>& fn,
                                 const PredictionVector& w, std::size_t slot, TermRef t,
                                 double h) {
  const double x = activation(w, slot, t);
  const double lo = std::max(0.0, x - h), hi = std::min(1.0, x + h);
  return (fn(w.with_value(slot, t, hi)) - fn(w.with_value(slot, t, lo))) / (hi - lo);
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
}

inline PredictionVector random_prediction(std::mt19937_64& rng, std::size_t ns, std::size_t np,
                                          std::size_t no, double lo = 0.0, double hi = 1.0,
                                          std::size_t slots = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<SlotActivations> out(slots);
  for (auto& sa : out) {
    for (std::size_t i = 0; i < ns; ++i) sa.subject.push_back(u(rng));
    for (std::size_t i = 0; i < np; ++i) sa.predicate.push_back(u(rng));
    for (std::size_t i = 0; i < no; ++i) sa.object.push_back(u(rng));
  }
  return PredictionVector(out);
}

inline Fact random_fact(std::mt19937_64& rng, std::size_t ns, std::size_t np, std::size_t no) {
  return {static_cast<std::uint32_t>(rng() % ns), static_cast<std::uint32_t>(rng() % np),
          static_cast<std::uint32_t>(rng() % no)};
}

/// Random formula over the first `n` terms of each domain.
inline Formula random_formula(std::mt19937_64& rng, int depth, std::uint32_t n) {
  const auto pick = [&](std::uint64_t m) { return rng() % m; };
  if (depth == 0 || pick(4) == 0) {
    return Formula::var({kDomains[pick(3)], static_cast<std::uint32_t>(pick(n))});
  }
  switch (pick(3)) {
    case 0: return Formula::negate(random_formula(rng, depth - 1, n));
    case 1: {
      std::vector<Formula> c;
      for (std::uint64_t i = 0, k = 2 + pick(2); i < k; ++i)
        c.push_back(random_formula(rng, depth - 1, n));
      return Formula::conj(std::move(c));
    }
    default: {
      std::vector<Formula> c;
      for (std::uint64_t i = 0, k = 2 + pick(2); i < k; ++i)
        c.push_back(random_formula(rng, depth - 1, n));
      return Formula::disj(std::move(c));
    }
  }
}

}  // namespace ngpkit::testing
