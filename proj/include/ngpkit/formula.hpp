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

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ngpkit/vocabulary.hpp"

namespace ngpkit {

enum class FormulaKind : std::uint8_t { Var, Not, And, Or };

/// Immutable propositional formula over TermRef variables. Copies share
/// structure; a Formula is never null.
class Formula {
 public:
  static Formula var(TermRef t);
  static Formula negate(Formula child);
  /// n-ary connectives; both require at least two children.
  static Formula conj(std::vector<Formula> children);
  static Formula disj(std::vector<Formula> children);

  FormulaKind kind() const noexcept { return node_->kind; }
  /// Only meaningful for Var nodes.
  TermRef term() const noexcept { return node_->term; }
  std::span<const Formula> children() const noexcept { return node_->children; }

  /// Distinct variables in ascending TermRef order.
  std::vector<TermRef> variables() const;

  /// Node-identity comparison of the underlying trees (not logical equivalence).
  bool same_structure(const Formula& other) const;

 private:
  struct Node {
    FormulaKind kind;
    TermRef term;
    std::vector<Formula> children;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// The distinguished compact form ¬p(s, o).
struct IntegrityConstraint {
  Fact fact;

  friend auto operator<=>(const IntegrityConstraint&, const IntegrityConstraint&) = default;
};

/// ¬(s ∧ p ∧ o), children in subject, predicate, object order.
Formula formula_of_ic(const IntegrityConstraint& ic);

/// Inverse of formula_of_ic: recognizes Not(And(s, p, o)) in any child order.
std::optional<IntegrityConstraint> ic_of_formula(const Formula& f);

/// Conjunction of the expanded ICs; a single IC expands to itself.
Formula conjunction_of_ics(std::span<const IntegrityConstraint> ics);

/// Prefix debug syntax, e.g. `(not (and s:horse p:drinks o:eye))`. Without a
/// vocabulary the ids are printed (`s:3`).
std::string to_string(const Formula& f, const Vocabulary* vocab = nullptr);

/// Parses the prefix syntax produced by to_string. Terms are `s:NAME`,
/// `p:NAME`, `o:NAME`; with no vocabulary NAME must be a numeric id.
Formula parse_formula(std::string_view text, const Vocabulary* vocab = nullptr);

}  // namespace ngpkit
