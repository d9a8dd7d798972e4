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

#include "ngpkit/theory.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "ngpkit/error.hpp"
#include "text_util.hpp"

namespace ngpkit {

namespace {

// Bitmaps over S×P×O above this many bits are refused.
constexpr std::uint64_t kMaxDenseFactSpace = std::uint64_t{1} << 34;

constexpr std::string_view kExplicitHeader = "format=explicit-negative";
constexpr std::string_view kComplementHeader = "format=complement";

}  // namespace

std::string_view representation_name(TheoryRepresentation r) noexcept {
  return r == TheoryRepresentation::ExplicitNegative ? "explicit-negative" : "complement";
}

TheoryStore::TheoryStore(std::shared_ptr<const Vocabulary> vocab, TheoryRepresentation rep,
                         std::vector<std::uint64_t> keys)
    : vocab_(std::move(vocab)), rep_(rep), sorted_(std::move(keys)) {
  std::sort(sorted_.begin(), sorted_.end());
  sorted_.erase(std::unique(sorted_.begin(), sorted_.end()), sorted_.end());
  lookup_.reserve(sorted_.size());
  lookup_.insert(sorted_.begin(), sorted_.end());
}

namespace {

std::vector<std::uint64_t> pack_all(const Vocabulary& vocab, std::span<const Fact> facts) {
  std::vector<std::uint64_t> keys;
  keys.reserve(facts.size());
  for (const auto& f : facts) {
    vocab.validate(f);
    keys.push_back(vocab.pack(f));
  }
  return keys;
}

}  // namespace

TheoryStore TheoryStore::explicit_negative(std::shared_ptr<const Vocabulary> vocab,
                                           std::span<const Fact> forbidden) {
  if (!vocab) throw ContractError("theory needs a vocabulary");
  auto keys = pack_all(*vocab, forbidden);
  return TheoryStore(std::move(vocab), TheoryRepresentation::ExplicitNegative, std::move(keys));
}

TheoryStore TheoryStore::complement_of(std::shared_ptr<const Vocabulary> vocab,
                                       std::span<const Fact> positive) {
  if (!vocab) throw ContractError("theory needs a vocabulary");
  auto keys = pack_all(*vocab, positive);
  return TheoryStore(std::move(vocab), TheoryRepresentation::ComplementOfPositive, std::move(keys));
}

bool TheoryStore::contains_ic(const Fact& fact) const noexcept {
  if (!vocab_->contains(fact)) return false;
  const bool stored = lookup_.count(vocab_->pack(fact)) != 0;
  return rep_ == TheoryRepresentation::ExplicitNegative ? stored : !stored;
}

std::uint64_t TheoryStore::ic_count() const noexcept {
  if (rep_ == TheoryRepresentation::ExplicitNegative) return sorted_.size();
  return vocab_->fact_space() - sorted_.size();
}

std::vector<IntegrityConstraint> TheoryStore::ics() const {
  std::vector<IntegrityConstraint> out;
  out.reserve(ic_count());
  if (rep_ == TheoryRepresentation::ExplicitNegative) {
    for (auto k : sorted_) out.push_back({vocab_->unpack(k)});
    return out;
  }
  auto next_positive = sorted_.begin();
  for (std::uint64_t k = 0; k < vocab_->fact_space(); ++k) {
    if (next_positive != sorted_.end() && *next_positive == k) {
      ++next_positive;
      continue;
    }
    out.push_back({vocab_->unpack(k)});
  }
  return out;
}

TheoryStore TheoryStore::materialize() const {
  std::vector<Fact> facts;
  for (const auto& ic : ics()) facts.push_back(ic.fact);
  return explicit_negative(vocab_, facts);
}

std::optional<IntegrityConstraint> TheoryStore::sample_ic(std::mt19937_64& rng) const {
  const std::uint64_t n = ic_count();
  if (n == 0) return std::nullopt;
  const std::uint64_t r = std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
  if (rep_ == TheoryRepresentation::ExplicitNegative) return IntegrityConstraint{vocab_->unpack(sorted_[r])};
  // r-th key absent from the positive list: the fixed point of
  // key = r + |{positives <= key}|.
  std::uint64_t skipped = 0;
  while (true) {
    const std::uint64_t candidate = r + skipped;
    const auto below = static_cast<std::uint64_t>(
        std::upper_bound(sorted_.begin(), sorted_.end(), candidate) - sorted_.begin());
    if (below == skipped) return IntegrityConstraint{vocab_->unpack(candidate)};
    skipped = below;
  }
}

TheoryStore build_complement_of_facts(std::shared_ptr<const Vocabulary> vocab,
                                      std::span<const Fact> positive) {
  return TheoryStore::complement_of(std::move(vocab), positive);
}

KgTripleSet parse_kg_triples(std::istream& in, const std::string& source) {
  KgTripleSet out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(source, lineno, "expected subject<TAB>predicate<TAB>object");
    }
    out.push_back({std::string(detail::trim(fields[0])), std::string(detail::trim(fields[1])),
                   std::string(detail::trim(fields[2]))});
  }
  return out;
}

KgTripleSet load_kg_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open knowledge-graph file " + path.string());
  return parse_kg_triples(in, path.string());
}

TheoryStore build_from_kg_complement(const KgTripleSet& kg, std::shared_ptr<const Vocabulary> vocab,
                                     std::size_t kappa, KgBuildReport* report) {
  if (!vocab) throw ContractError("theory needs a vocabulary");
  const Vocabulary& v = *vocab;
  const std::uint64_t ns = v.size(Domain::Subject);
  const std::uint64_t np = v.size(Domain::Predicate);
  const std::uint64_t no = v.size(Domain::Object);
  if (v.fact_space() > kMaxDenseFactSpace) {
    throw CapacityError("vocabulary cross product too large for knowledge-graph complementation");
  }

  KgBuildReport rep;
  rep.input_triples = kg.size();
  std::vector<bool> known(v.fact_space(), false);
  std::vector<std::uint32_t> so(ns * no, 0), sp(ns * np, 0), po(np * no, 0);
  for (const auto& t : kg) {
    const auto s = v.find(Domain::Subject, t.subject);
    const auto p = v.find(Domain::Predicate, t.predicate);
    const auto o = v.find(Domain::Object, t.object);
    if (!s || !p || !o) {
      ++rep.dropped_triples;
      continue;
    }
    const std::uint64_t key = v.pack({*s, *p, *o});
    if (known[key]) continue;
    known[key] = true;
    ++rep.retained_triples;
    ++so[*s * no + *o];
    ++sp[*s * np + *p];
    ++po[*p * no + *o];
  }

  std::vector<bool> forbidden(v.fact_space(), false);
  auto forbid = [&](std::uint64_t s, std::uint64_t p, std::uint64_t o) {
    const std::uint64_t key = (s * np + p) * no + o;
    if (!known[key]) forbidden[key] = true;
  };
  for (std::uint64_t s = 0; s < ns; ++s) {
    for (std::uint64_t o = 0; o < no; ++o) {
      if (so[s * no + o] > kappa) continue;
      ++rep.sigma_pairs;
      for (std::uint64_t p = 0; p < np; ++p) forbid(s, p, o);
    }
    for (std::uint64_t p = 0; p < np; ++p) {
      if (sp[s * np + p] > kappa) continue;
      ++rep.sigma_pairs;
      for (std::uint64_t o = 0; o < no; ++o) forbid(s, p, o);
    }
  }
  for (std::uint64_t p = 0; p < np; ++p) {
    for (std::uint64_t o = 0; o < no; ++o) {
      if (po[p * no + o] > kappa) continue;
      ++rep.sigma_pairs;
      for (std::uint64_t s = 0; s < ns; ++s) forbid(s, p, o);
    }
  }

  std::vector<Fact> facts;
  for (std::uint64_t key = 0; key < v.fact_space(); ++key) {
    if (forbidden[key]) facts.push_back(v.unpack(key));
  }
  if (report) *report = rep;
  return TheoryStore::explicit_negative(std::move(vocab), facts);
}

void write_theory(std::ostream& out, const TheoryStore& store) {
  const Vocabulary& v = store.vocabulary();
  out << (store.representation() == TheoryRepresentation::ExplicitNegative ? kExplicitHeader
                                                                          : kComplementHeader)
      << "\tsizes=" << v.size(Domain::Subject) << 'x' << v.size(Domain::Predicate) << 'x'
      << v.size(Domain::Object) << "\tcount=" << store.stored_keys().size() << '\n';
  for (auto key : store.stored_keys()) {
    const Fact f = v.unpack(key);
    out << v.name({Domain::Subject, f.s}) << '\t' << v.name({Domain::Predicate, f.p}) << '\t'
        << v.name({Domain::Object, f.o}) << '\n';
  }
}

void save_theory(const TheoryStore& store, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_theory(out, store);
  if (!out) throw ValidationError("write failed for " + path.string());
}

namespace {

struct Header {
  TheoryRepresentation rep = TheoryRepresentation::ExplicitNegative;
  std::optional<std::array<std::uint64_t, 3>> sizes;
  std::optional<std::uint64_t> count;
};

Header parse_header(const std::string& line, const std::string& source) {
  const auto fields = detail::split(detail::trim(line), '\t');
  Header h;
  if (fields[0] == kExplicitHeader) {
    h.rep = TheoryRepresentation::ExplicitNegative;
  } else if (fields[0] == kComplementHeader) {
    h.rep = TheoryRepresentation::ComplementOfPositive;
  } else {
    throw ParseError(source, 1, "expected format=explicit-negative or format=complement");
  }
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto field = fields[i];
    if (field.starts_with("sizes=")) {
      const auto dims = detail::split(field.substr(6), 'x');
      std::array<std::uint64_t, 3> sizes{};
      if (dims.size() != 3) throw ParseError(source, 1, "malformed sizes field");
      for (std::size_t d = 0; d < 3; ++d) {
        auto n = detail::parse_number<std::uint64_t>(dims[d]);
        if (!n) throw ParseError(source, 1, "malformed sizes field");
        sizes[d] = *n;
      }
      h.sizes = sizes;
    } else if (field.starts_with("count=")) {
      auto n = detail::parse_number<std::uint64_t>(field.substr(6));
      if (!n) throw ParseError(source, 1, "malformed count field");
      h.count = *n;
    } else {
      throw ParseError(source, 1, "unknown header field '" + std::string(field) + "'");
    }
  }
  return h;
}

}  // namespace

TheoryStore read_theory(std::istream& in, std::shared_ptr<const Vocabulary> vocab,
                        const std::string& source) {
  if (!vocab) throw ContractError("theory needs a vocabulary");
  const Vocabulary& v = *vocab;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const Header header = parse_header(line, source);
  if (header.sizes) {
    const auto& s = *header.sizes;
    if (s[0] != v.size(Domain::Subject) || s[1] != v.size(Domain::Predicate) ||
        s[2] != v.size(Domain::Object)) {
      throw ParseError(source, 1, "theory sizes do not match the vocabulary");
    }
  }

  std::vector<Fact> facts;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 3) throw ParseError(source, lineno, "expected s<TAB>p<TAB>o");
    const auto s = v.find(Domain::Subject, fields[0]);
    const auto p = v.find(Domain::Predicate, fields[1]);
    const auto o = v.find(Domain::Object, fields[2]);
    if (!s || !p || !o) throw ParseError(source, lineno, "term not in vocabulary");
    facts.push_back({*s, *p, *o});
  }
  if (header.count && *header.count != facts.size()) {
    throw ParseError(source, lineno,
                     "truncated: header promises " + std::to_string(*header.count) +
                         " entries, found " + std::to_string(facts.size()));
  }
  return header.rep == TheoryRepresentation::ExplicitNegative
             ? TheoryStore::explicit_negative(std::move(vocab), facts)
             : TheoryStore::complement_of(std::move(vocab), facts);
}

TheoryStore load_theory(const std::filesystem::path& path, std::shared_ptr<const Vocabulary> vocab) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open theory file " + path.string());
  return read_theory(in, std::move(vocab), path.string());
}

TheoryStats theory_stats(const TheoryStore& store) {
  const Vocabulary& v = store.vocabulary();
  TheoryStats stats;
  stats.ic_count = store.ic_count();
  stats.representation = store.representation();
  stats.per_predicate.assign(v.size(Domain::Predicate), 0);
  std::vector<std::uint64_t> stored(v.size(Domain::Predicate), 0);
  for (auto key : store.stored_keys()) ++stored[v.unpack(key).p];
  const std::uint64_t per_pred_space = std::uint64_t{v.size(Domain::Subject)} * v.size(Domain::Object);
  for (std::size_t p = 0; p < stored.size(); ++p) {
    stats.per_predicate[p] = store.representation() == TheoryRepresentation::ExplicitNegative
                                 ? stored[p]
                                 : per_pred_space - stored[p];
  }
  return stats;
}

TheoryFileSummary summarize_theory_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open theory file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const Header header = parse_header(line, path.string());
  TheoryFileSummary summary;
  summary.representation = header.rep;
  summary.domain_sizes = header.sizes;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (detail::split(line, '\t').size() != 3) {
      throw ParseError(path.string(), lineno, "expected s<TAB>p<TAB>o");
    }
    ++summary.stored_lines;
  }
  if (header.count && *header.count != summary.stored_lines) {
    throw ParseError(path.string(), lineno, "truncated: entry count does not match header");
  }
  if (header.rep == TheoryRepresentation::ExplicitNegative) {
    summary.ic_count = summary.stored_lines;
  } else if (header.sizes) {
    const auto& s = *header.sizes;
    summary.ic_count = s[0] * s[1] * s[2] - summary.stored_lines;
  }
  return summary;
}

}  // namespace ngpkit
