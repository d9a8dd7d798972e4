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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "ngpkit/formula.hpp"
#include "ngpkit/vocabulary.hpp"

namespace ngpkit {

enum class TheoryRepresentation { ExplicitNegative, ComplementOfPositive };

std::string_view representation_name(TheoryRepresentation r) noexcept;

/// A set of negative atomic ICs ¬p(s, o) over a fixed vocabulary.
///
/// ExplicitNegative stores the forbidden facts; ComplementOfPositive stores
/// only the permitted facts and forbids everything else in S×P×O. Both answer
/// membership in O(1) average time through a hash of the packed fact key.
/// Stores are immutable once built.
class TheoryStore {
 public:
  static TheoryStore explicit_negative(std::shared_ptr<const Vocabulary> vocab,
                                       std::span<const Fact> forbidden);
  static TheoryStore complement_of(std::shared_ptr<const Vocabulary> vocab,
                                   std::span<const Fact> positive);

  TheoryRepresentation representation() const noexcept { return rep_; }
  const Vocabulary& vocabulary() const noexcept { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocabulary_ptr() const noexcept { return vocab_; }

  /// Whether ¬fact is in the theory. Facts outside the vocabulary are never in it.
  bool contains_ic(const Fact& fact) const noexcept;

  std::uint64_t ic_count() const noexcept;

  /// Sorted packed keys of the stored facts (forbidden or permitted, per
  /// representation).
  std::span<const std::uint64_t> stored_keys() const noexcept { return sorted_; }

  /// ExplicitNegative copy listing every IC; the complement gets enumerated.
  TheoryStore materialize() const;

  /// Every IC in ascending packed-key order. Enumerates the complement.
  std::vector<IntegrityConstraint> ics() const;

  /// A uniformly random IC, or nullopt for an empty theory.
  std::optional<IntegrityConstraint> sample_ic(std::mt19937_64& rng) const;

 private:
  TheoryStore(std::shared_ptr<const Vocabulary> vocab, TheoryRepresentation rep,
              std::vector<std::uint64_t> keys);

  std::shared_ptr<const Vocabulary> vocab_;
  TheoryRepresentation rep_;
  std::vector<std::uint64_t> sorted_;
  std::unordered_set<std::uint64_t> lookup_;
};

/// Builds the theory forbidding every fact of S×P×O that is not in `positive`.
/// Throws ValidationError on out-of-vocabulary facts.
TheoryStore build_complement_of_facts(std::shared_ptr<const Vocabulary> vocab,
                                      std::span<const Fact> positive);

/// (subject, predicate, object) names as read from a knowledge-graph file.
struct KgTriple {
  std::string subject;
  std::string predicate;
  std::string object;
};
using KgTripleSet = std::vector<KgTriple>;

/// Reads `subject<TAB>predicate<TAB>object` lines; `#` starts a comment line.
KgTripleSet parse_kg_triples(std::istream& in, const std::string& source = "<kg>");
KgTripleSet load_kg_triples(const std::filesystem::path& path);

struct KgBuildReport {
  std::size_t input_triples = 0;
  std::size_t retained_triples = 0;  ///< distinct triples inside the vocabulary
  std::size_t dropped_triples = 0;   ///< triples naming an out-of-vocabulary term
  std::size_t sigma_pairs = 0;       ///< (s,o), (s,p) and (p,o) pairs admitted
};

/// Default sparsity threshold: pairs with at most nine supporting facts.
inline constexpr std::size_t kDefaultKappa = 9;

/// Sparse-pair complementation of a knowledge graph. K' is K restricted to
/// the vocabulary. Every (s,o), (s,p) and (p,o) pair with at most `kappa`
/// supporting facts in K' is admitted (zero-support pairs included); each
/// admitted pair contributes ¬f for every completion f of the pair not in K'.
TheoryStore build_from_kg_complement(const KgTripleSet& kg, std::shared_ptr<const Vocabulary> vocab,
                                     std::size_t kappa, KgBuildReport* report = nullptr);

void write_theory(std::ostream& out, const TheoryStore& store);
void save_theory(const TheoryStore& store, const std::filesystem::path& path);

/// Parses the TSV theory format. Throws ParseError naming the offending line.
TheoryStore read_theory(std::istream& in, std::shared_ptr<const Vocabulary> vocab,
                        const std::string& source = "<theory>");
TheoryStore load_theory(const std::filesystem::path& path, std::shared_ptr<const Vocabulary> vocab);

struct TheoryStats {
  std::uint64_t ic_count = 0;
  TheoryRepresentation representation = TheoryRepresentation::ExplicitNegative;
  std::vector<std::uint64_t> per_predicate;  ///< indexed by predicate id
};

TheoryStats theory_stats(const TheoryStore& store);

/// Header-level facts of a theory file, readable without a vocabulary.
struct TheoryFileSummary {
  TheoryRepresentation representation = TheoryRepresentation::ExplicitNegative;
  std::uint64_t stored_lines = 0;
  std::optional<std::array<std::uint64_t, 3>> domain_sizes;
  /// ICs implied by the file, when computable without the vocabulary.
  std::optional<std::uint64_t> ic_count;
};

TheoryFileSummary summarize_theory_file(const std::filesystem::path& path);

}  // namespace ngpkit
