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
#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ngpkit {

enum class Domain : std::uint8_t { Subject = 0, Predicate = 1, Object = 2 };

inline constexpr std::array<Domain, 3> kDomains = {Domain::Subject, Domain::Predicate,
                                                   Domain::Object};

/// One-letter tag used in the formula debug syntax: s, p or o.
char domain_tag(Domain d) noexcept;
std::string_view domain_name(Domain d) noexcept;

/// A propositional variable: one term of one domain.
struct TermRef {
  Domain domain = Domain::Subject;
  std::uint32_t id = 0;

  friend auto operator<=>(const TermRef&, const TermRef&) = default;
};

/// A ground atom p(s, o), held as ids.
struct Fact {
  std::uint32_t s = 0;
  std::uint32_t p = 0;
  std::uint32_t o = 0;

  friend auto operator<=>(const Fact&, const Fact&) = default;
};

/// Ordered, duplicate-free name lists for the subject, predicate and object
/// domains. Ids are dense and follow list order.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> subjects, std::vector<std::string> predicates,
             std::vector<std::string> objects);

  std::size_t size(Domain d) const noexcept { return names_[index(d)].size(); }
  std::uint64_t fact_space() const noexcept {
    return std::uint64_t{size(Domain::Subject)} * size(Domain::Predicate) * size(Domain::Object);
  }

  const std::vector<std::string>& names(Domain d) const noexcept { return names_[index(d)]; }
  const std::string& name(TermRef t) const;
  std::optional<std::uint32_t> find(Domain d, std::string_view name) const;

  /// Every (domain, id) carrying `name`; a name may live in several domains.
  std::vector<TermRef> lookup(std::string_view name) const;

  bool contains(TermRef t) const noexcept { return t.id < size(t.domain); }
  bool contains(const Fact& f) const noexcept;

  /// Throws ValidationError when any id is out of range.
  void validate(const Fact& f) const;

  /// Injective packing of a fact into [0, fact_space()).
  std::uint64_t pack(const Fact& f) const noexcept {
    return (std::uint64_t{f.s} * size(Domain::Predicate) + f.p) * size(Domain::Object) + f.o;
  }
  Fact unpack(std::uint64_t key) const noexcept;

  std::string format_fact(const Fact& f) const;

 private:
  static constexpr std::size_t index(Domain d) noexcept { return static_cast<std::size_t>(d); }

  std::array<std::vector<std::string>, 3> names_;
  std::array<std::unordered_map<std::string, std::uint32_t>, 3> index_;
};

/// Reads the sectioned vocabulary format: `[subjects]`, `[predicates]`,
/// `[objects]` headers, one name per line. Blank lines are ignored.
Vocabulary parse_vocabulary(std::istream& in, const std::string& source = "<vocabulary>");
Vocabulary load_vocabulary(const std::filesystem::path& path);
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);

}  // namespace ngpkit

template <>
struct std::hash<ngpkit::TermRef> {
  std::size_t operator()(const ngpkit::TermRef& t) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{t.id} << 2) |
                                      static_cast<std::uint64_t>(t.domain));
  }
};
