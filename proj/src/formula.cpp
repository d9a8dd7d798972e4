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

#include "ngpkit/formula.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "ngpkit/error.hpp"
#include "text_util.hpp"

namespace ngpkit {

Formula Formula::var(TermRef t) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Var, t, {}}));
}

Formula Formula::negate(Formula child) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Not, {}, {std::move(child)}}));
}

Formula Formula::conj(std::vector<Formula> children) {
  if (children.size() < 2) throw ContractError("And needs at least two children");
  return Formula(std::make_shared<const Node>(Node{FormulaKind::And, {}, std::move(children)}));
}

Formula Formula::disj(std::vector<Formula> children) {
  if (children.size() < 2) throw ContractError("Or needs at least two children");
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Or, {}, std::move(children)}));
}

namespace {

void collect_variables(const Formula& f, std::vector<TermRef>& out) {
  if (f.kind() == FormulaKind::Var) {
    out.push_back(f.term());
    return;
  }
  for (const auto& c : f.children()) collect_variables(c, out);
}

}  // namespace

std::vector<TermRef> Formula::variables() const {
  std::vector<TermRef> out;
  collect_variables(*this, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Formula::same_structure(const Formula& other) const {
  if (kind() != other.kind()) return false;
  if (kind() == FormulaKind::Var) return term() == other.term();
  if (children().size() != other.children().size()) return false;
  for (std::size_t i = 0; i < children().size(); ++i) {
    if (!children()[i].same_structure(other.children()[i])) return false;
  }
  return true;
}

Formula formula_of_ic(const IntegrityConstraint& ic) {
  return Formula::negate(Formula::conj({Formula::var({Domain::Subject, ic.fact.s}),
                                        Formula::var({Domain::Predicate, ic.fact.p}),
                                        Formula::var({Domain::Object, ic.fact.o})}));
}

std::optional<IntegrityConstraint> ic_of_formula(const Formula& f) {
  if (f.kind() != FormulaKind::Not) return std::nullopt;
  const Formula& body = f.children()[0];
  if (body.kind() != FormulaKind::And || body.children().size() != 3) return std::nullopt;
  std::array<std::optional<std::uint32_t>, 3> ids;
  for (const auto& c : body.children()) {
    if (c.kind() != FormulaKind::Var) return std::nullopt;
    auto& slot = ids[static_cast<std::size_t>(c.term().domain)];
    if (slot) return std::nullopt;
    slot = c.term().id;
  }
  return IntegrityConstraint{Fact{*ids[0], *ids[1], *ids[2]}};
}

Formula conjunction_of_ics(std::span<const IntegrityConstraint> ics) {
  if (ics.empty()) throw ContractError("conjunction of an empty IC list");
  if (ics.size() == 1) return formula_of_ic(ics[0]);
  std::vector<Formula> parts;
  parts.reserve(ics.size());
  for (const auto& ic : ics) parts.push_back(formula_of_ic(ic));
  return Formula::conj(std::move(parts));
}

namespace {

void print(const Formula& f, const Vocabulary* vocab, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::Var:
      out += domain_tag(f.term().domain);
      out += ':';
      out += vocab ? vocab->name(f.term()) : std::to_string(f.term().id);
      return;
    case FormulaKind::Not: out += "(not "; break;
    case FormulaKind::And: out += "(and "; break;
    case FormulaKind::Or: out += "(or "; break;
  }
  bool first = true;
  for (const auto& c : f.children()) {
    if (!first) out += ' ';
    first = false;
    print(c, vocab, out);
  }
  out += ')';
}

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Vocabulary* vocab) : text_(text), vocab_(vocab) {}

  Formula parse_all() {
    Formula f = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("<formula>", 1, what + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view token() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) fail("expected a token");
    return text_.substr(start, pos_ - start);
  }

  Formula parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] != '(') return parse_term(token());
    ++pos_;
    const std::string_view op = token();
    std::vector<Formula> children;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) fail("unbalanced parenthesis");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      children.push_back(parse());
    }
    if (op == "not") {
      if (children.size() != 1) fail("not takes exactly one operand");
      return Formula::negate(std::move(children[0]));
    }
    if (children.size() < 2) fail(std::string(op) + " needs at least two operands");
    if (op == "and") return Formula::conj(std::move(children));
    if (op == "or") return Formula::disj(std::move(children));
    fail("unknown connective '" + std::string(op) + "'");
  }

  Formula parse_term(std::string_view tok) {
    if (tok.size() < 3 || tok[1] != ':') fail("malformed term '" + std::string(tok) + "'");
    Domain d;
    switch (tok[0]) {
      case 's': d = Domain::Subject; break;
      case 'p': d = Domain::Predicate; break;
      case 'o': d = Domain::Object; break;
      default: fail("unknown domain tag in '" + std::string(tok) + "'");
    }
    const std::string_view name = tok.substr(2);
    if (vocab_) {
      auto id = vocab_->find(d, name);
      if (!id) fail("unknown term '" + std::string(tok) + "'");
      return Formula::var({d, *id});
    }
    auto id = detail::parse_number<std::uint32_t>(name);
    if (!id) fail("expected numeric id in '" + std::string(tok) + "'");
    return Formula::var({d, *id});
  }

  std::string_view text_;
  const Vocabulary* vocab_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const Formula& f, const Vocabulary* vocab) {
  std::string out;
  print(f, vocab, out);
  return out;
}

Formula parse_formula(std::string_view text, const Vocabulary* vocab) {
  return FormulaParser(text, vocab).parse_all();
}

}  // namespace ngpkit
