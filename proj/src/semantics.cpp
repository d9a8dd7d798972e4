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

#include "ngpkit/semantics.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include "ngpkit/error.hpp"
#include "ngpkit/kernels.hpp"

namespace ngpkit {

bool eval_boolean(const Formula& f, const Assignment& a) {
  switch (f.kind()) {
    case FormulaKind::Var: {
      auto it = a.find(f.term());
      if (it == a.end()) {
        throw MissingAssignmentError(std::string(1, domain_tag(f.term().domain)) + ":" +
                                     std::to_string(f.term().id) + " is unassigned");
      }
      return it->second;
    }
    case FormulaKind::Not: return !eval_boolean(f.children()[0], a);
    case FormulaKind::And: {
      // Evaluate every child so missing assignments are reported regardless of order.
      bool value = true;
      for (const auto& c : f.children()) value = eval_boolean(c, a) && value;
      return value;
    }
    case FormulaKind::Or: {
      bool value = false;
      for (const auto& c : f.children()) value = eval_boolean(c, a) || value;
      return value;
    }
  }
  return false;
}

double eval_fuzzy(const Formula& f, const PredictionVector& w, std::size_t slot) {
  switch (f.kind()) {
    case FormulaKind::Var: return w.value(slot, f.term());
    case FormulaKind::Not: return 1.0 - eval_fuzzy(f.children()[0], w, slot);
    case FormulaKind::And: {
      const auto kids = f.children();
      double acc = eval_fuzzy(kids[0], w, slot);
      for (std::size_t i = 1; i < kids.size(); ++i) {
        acc = std::max(0.0, acc + eval_fuzzy(kids[i], w, slot) - 1.0);
      }
      return acc;
    }
    case FormulaKind::Or: {
      const auto kids = f.children();
      double acc = eval_fuzzy(kids[0], w, slot);
      for (std::size_t i = 1; i < kids.size(); ++i) {
        acc = std::min(1.0, acc + eval_fuzzy(kids[i], w, slot));
      }
      return acc;
    }
  }
  return 0.0;
}

namespace {

// Model set of a formula over its n variables: bit `a` is set when the
// interpretation whose i-th variable equals bit i of `a` satisfies the formula.
class ModelSet {
 public:
  ModelSet(const Formula& f, std::vector<TermRef> vars) : vars_(std::move(vars)) {
    const std::size_t n = vars_.size();
    words_ = n < 6 ? 1 : (std::size_t{1} << (n - 6));
    valid_ = n < 6 ? ((std::uint64_t{1} << (std::size_t{1} << n)) - 1) : ~std::uint64_t{0};
    bits_ = eval(f);
  }

  std::size_t variable_count() const noexcept { return vars_.size(); }
  const std::vector<TermRef>& variables() const noexcept { return vars_; }

  /// Σ over models of Π w_i / (1 - w_i), with weights in variable order.
  double weighted_count(std::span<const double> weights) const {
    const std::size_t n = vars_.size();
    const std::size_t low = std::min<std::size_t>(n, 12);
    const auto lo = weight_table(weights.subspan(0, low));
    const auto hi = weight_table(weights.subspan(low));
    const std::size_t row_words = low < 6 ? 1 : (std::size_t{1} << (low - 6));
    const auto& k = kernels::active();
    double total = 0.0;
    for (std::size_t h = 0; h < hi.size(); ++h) {
      if (hi[h] == 0.0) continue;
      total += hi[h] * k.masked_sum(lo.data(), bits_.data() + h * row_words, lo.size());
    }
    return std::clamp(total, 0.0, 1.0);
  }

 private:
  static std::vector<double> weight_table(std::span<const double> weights) {
    std::vector<double> table(std::size_t{1} << weights.size());
    table[0] = 1.0;
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const std::size_t half = std::size_t{1} << i;
      k.split_scale(table.data(), table.data() + half, half, weights[i]);
    }
    return table;
  }

  std::vector<std::uint64_t> column(std::size_t var) const {
    static constexpr std::array<std::uint64_t, 6> kPatterns = {
        0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
        0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
    std::vector<std::uint64_t> out(words_);
    for (std::size_t k = 0; k < words_; ++k) {
      if (var < 6) {
        out[k] = kPatterns[var] & valid_;
      } else {
        out[k] = ((k >> (var - 6)) & 1u) ? ~std::uint64_t{0} : 0;
      }
    }
    return out;
  }

  std::vector<std::uint64_t> eval(const Formula& f) const {
    switch (f.kind()) {
      case FormulaKind::Var: {
        const auto it = std::lower_bound(vars_.begin(), vars_.end(), f.term());
        return column(static_cast<std::size_t>(it - vars_.begin()));
      }
      case FormulaKind::Not: {
        auto v = eval(f.children()[0]);
        for (auto& x : v) x = ~x & valid_;
        return v;
      }
      case FormulaKind::And: {
        auto acc = eval(f.children()[0]);
        for (std::size_t c = 1; c < f.children().size(); ++c) {
          const auto v = eval(f.children()[c]);
          for (std::size_t k = 0; k < words_; ++k) acc[k] &= v[k];
        }
        return acc;
      }
      case FormulaKind::Or: {
        auto acc = eval(f.children()[0]);
        for (std::size_t c = 1; c < f.children().size(); ++c) {
          const auto v = eval(f.children()[c]);
          for (std::size_t k = 0; k < words_; ++k) acc[k] |= v[k];
        }
        return acc;
      }
    }
    return {};
  }

  std::vector<TermRef> vars_;
  std::size_t words_ = 1;
  std::uint64_t valid_ = ~std::uint64_t{0};
  std::vector<std::uint64_t> bits_;
};

ModelSet compile(const Formula& f, const PredictionVector& w, std::size_t slot, std::size_t cap,
                 std::vector<double>& weights) {
  auto vars = f.variables();
  if (vars.size() > cap) {
    throw CapacityError("formula has " + std::to_string(vars.size()) +
                        " variables, over the exact-enumeration cap of " + std::to_string(cap));
  }
  weights.clear();
  for (const auto& t : vars) weights.push_back(w.value(slot, t));
  return ModelSet(f, std::move(vars));
}

}  // namespace

double wmc(const Formula& f, const PredictionVector& w, std::size_t slot, std::size_t variable_cap) {
  std::vector<double> weights;
  const ModelSet models = compile(f, w, slot, variable_cap, weights);
  return models.weighted_count(weights);
}

Gradient wmc_gradient(const Formula& f, const PredictionVector& w, std::size_t slot,
                      std::size_t variable_cap) {
  std::vector<double> weights;
  const ModelSet models = compile(f, w, slot, variable_cap, weights);
  Gradient grad;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    auto pinned = weights;
    pinned[i] = 1.0;
    const double on = models.weighted_count(pinned);
    pinned[i] = 0.0;
    const double off = models.weighted_count(pinned);
    grad[models.variables()[i]] = on - off;
  }
  return grad;
}

namespace {

// ICs deduplicated and split into components of variable-sharing members.
// Variables are numbered locally; each IC is a triple of local indices.
struct IcSystem {
  std::vector<TermRef> vars;
  std::vector<std::vector<std::array<std::size_t, 3>>> components;
};

IcSystem build_system(std::span<const IntegrityConstraint> ics) {
  if (ics.empty()) throw ContractError("IC conjunction needs at least one IC");
  std::vector<Fact> facts;
  facts.reserve(ics.size());
  for (const auto& ic : ics) facts.push_back(ic.fact);
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());

  IcSystem sys;
  for (const auto& f : facts) {
    sys.vars.push_back({Domain::Subject, f.s});
    sys.vars.push_back({Domain::Predicate, f.p});
    sys.vars.push_back({Domain::Object, f.o});
  }
  std::sort(sys.vars.begin(), sys.vars.end());
  sys.vars.erase(std::unique(sys.vars.begin(), sys.vars.end()), sys.vars.end());
  auto local = [&](TermRef t) {
    return static_cast<std::size_t>(std::lower_bound(sys.vars.begin(), sys.vars.end(), t) -
                                    sys.vars.begin());
  };

  // Union-find over variables; ICs join the component of their variables.
  std::vector<std::size_t> parent(sys.vars.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::array<std::size_t, 3>> triples;
  for (const auto& f : facts) {
    std::array<std::size_t, 3> t = {local({Domain::Subject, f.s}), local({Domain::Predicate, f.p}),
                                    local({Domain::Object, f.o})};
    parent[find(t[1])] = find(t[0]);
    parent[find(t[2])] = find(t[0]);
    triples.push_back(t);
  }
  std::map<std::size_t, std::size_t> root_to_component;
  for (const auto& t : triples) {
    const auto root = find(t[0]);
    auto [it, fresh] = root_to_component.emplace(root, sys.components.size());
    if (fresh) sys.components.emplace_back();
    sys.components[it->second].push_back(t);
  }
  for (const auto& c : sys.components) {
    if (c.size() > kMaxInclusionExclusionIcs) {
      throw CapacityError("IC component of size " + std::to_string(c.size()) +
                          " exceeds the inclusion-exclusion limit of " +
                          std::to_string(kMaxInclusionExclusionIcs));
    }
  }
  return sys;
}

// P(∨ C_i) over one component via inclusion-exclusion. Supersets of a
// zero-probability conjunction are pruned since they contribute nothing.
class UnionProbability {
 public:
  UnionProbability(const std::vector<std::array<std::size_t, 3>>& ics,
                   std::span<const double> weights)
      : ics_(ics), weights_(weights), counts_(weights.size(), 0) {}

  double run() {
    total_ = 0.0;
    visit(0, 0, 1.0);
    return total_;
  }

 private:
  void visit(std::size_t next, std::size_t depth, double prod) {
    for (std::size_t j = next; j < ics_.size(); ++j) {
      double p = prod;
      for (auto v : ics_[j]) {
        if (counts_[v]++ == 0) p *= weights_[v];
      }
      if (p != 0.0) {
        total_ += (depth % 2 == 0) ? p : -p;
        visit(j + 1, depth + 1, p);
      }
      for (auto v : ics_[j]) --counts_[v];
    }
  }

  const std::vector<std::array<std::size_t, 3>>& ics_;
  std::span<const double> weights_;
  std::vector<int> counts_;
  double total_ = 0.0;
};

double component_probability(const std::vector<std::array<std::size_t, 3>>& ics,
                             std::span<const double> weights) {
  if (ics.size() == 1) {
    // Local ids follow TermRef order: subject < predicate < object.
    const auto& t = ics[0];
    return 1.0 - fact_likelihood(weights[t[0]], weights[t[1]], weights[t[2]]);
  }
  return std::clamp(1.0 - UnionProbability(ics, weights).run(), 0.0, 1.0);
}

std::vector<double> system_weights(const IcSystem& sys, const PredictionVector& w,
                                   std::size_t slot) {
  std::vector<double> weights;
  weights.reserve(sys.vars.size());
  for (const auto& t : sys.vars) weights.push_back(w.value(slot, t));
  return weights;
}

}  // namespace

double wmc_ic_conjunction(std::span<const IntegrityConstraint> ics, const PredictionVector& w,
                          std::size_t slot) {
  const IcSystem sys = build_system(ics);
  const auto weights = system_weights(sys, w, slot);
  double p = 1.0;
  for (const auto& c : sys.components) p *= component_probability(c, weights);
  return p;
}

Gradient wmc_ic_conjunction_gradient(std::span<const IntegrityConstraint> ics,
                                     const PredictionVector& w, std::size_t slot) {
  const IcSystem sys = build_system(ics);
  auto weights = system_weights(sys, w, slot);
  std::vector<double> comp_p;
  for (const auto& c : sys.components) comp_p.push_back(component_probability(c, weights));

  Gradient grad;
  for (std::size_t ci = 0; ci < sys.components.size(); ++ci) {
    double others = 1.0;
    for (std::size_t cj = 0; cj < comp_p.size(); ++cj) {
      if (cj != ci) others *= comp_p[cj];
    }
    std::vector<std::size_t> members;
    for (const auto& t : sys.components[ci]) members.insert(members.end(), t.begin(), t.end());
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (auto v : members) {
      const double saved = weights[v];
      weights[v] = 1.0;
      const double on = component_probability(sys.components[ci], weights);
      weights[v] = 0.0;
      const double off = component_probability(sys.components[ci], weights);
      weights[v] = saved;
      grad[sys.vars[v]] = others * (on - off);
    }
  }
  return grad;
}

bool ics_variable_disjoint(std::span<const IntegrityConstraint> ics) {
  std::vector<TermRef> vars;
  for (const auto& ic : ics) {
    vars.push_back({Domain::Subject, ic.fact.s});
    vars.push_back({Domain::Predicate, ic.fact.p});
    vars.push_back({Domain::Object, ic.fact.o});
  }
  std::sort(vars.begin(), vars.end());
  return std::adjacent_find(vars.begin(), vars.end()) == vars.end();
}

}  // namespace ngpkit
