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

#include "ngpkit/vocabulary.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "ngpkit/error.hpp"
#include "text_util.hpp"

namespace ngpkit {

char domain_tag(Domain d) noexcept {
  switch (d) {
    case Domain::Subject: return 's';
    case Domain::Predicate: return 'p';
    case Domain::Object: return 'o';
  }
  return '?';
}

std::string_view domain_name(Domain d) noexcept {
  switch (d) {
    case Domain::Subject: return "subjects";
    case Domain::Predicate: return "predicates";
    case Domain::Object: return "objects";
  }
  return "?";
}

Vocabulary::Vocabulary(std::vector<std::string> subjects, std::vector<std::string> predicates,
                       std::vector<std::string> objects)
    : names_{std::move(subjects), std::move(predicates), std::move(objects)} {
  for (Domain d : kDomains) {
    auto& names = names_[index(d)];
    auto& idx = index_[index(d)];
    if (names.size() > UINT32_MAX) throw ValidationError("vocabulary domain too large");
    idx.reserve(names.size());
    for (std::uint32_t i = 0; i < names.size(); ++i) {
      if (names[i].empty()) {
        throw ValidationError("empty name in " + std::string(domain_name(d)));
      }
      if (!idx.emplace(names[i], i).second) {
        throw ValidationError("duplicate name '" + names[i] + "' in " +
                              std::string(domain_name(d)));
      }
    }
  }
}

const std::string& Vocabulary::name(TermRef t) const {
  if (!contains(t)) {
    throw ValidationError("term id " + std::to_string(t.id) + " out of range for " +
                          std::string(domain_name(t.domain)));
  }
  return names_[index(t.domain)][t.id];
}

std::optional<std::uint32_t> Vocabulary::find(Domain d, std::string_view name) const {
  const auto& idx = index_[index(d)];
  auto it = idx.find(std::string(name));
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

std::vector<TermRef> Vocabulary::lookup(std::string_view name) const {
  std::vector<TermRef> out;
  for (Domain d : kDomains) {
    if (auto id = find(d, name)) out.push_back({d, *id});
  }
  return out;
}

bool Vocabulary::contains(const Fact& f) const noexcept {
  return f.s < size(Domain::Subject) && f.p < size(Domain::Predicate) &&
         f.o < size(Domain::Object);
}

void Vocabulary::validate(const Fact& f) const {
  if (!contains(f)) {
    throw ValidationError("fact (" + std::to_string(f.s) + "," + std::to_string(f.p) + "," +
                          std::to_string(f.o) + ") out of vocabulary range");
  }
}

Fact Vocabulary::unpack(std::uint64_t key) const noexcept {
  const std::uint64_t no = size(Domain::Object);
  const std::uint64_t np = size(Domain::Predicate);
  Fact f;
  f.o = static_cast<std::uint32_t>(key % no);
  key /= no;
  f.p = static_cast<std::uint32_t>(key % np);
  f.s = static_cast<std::uint32_t>(key / np);
  return f;
}

std::string Vocabulary::format_fact(const Fact& f) const {
  return name({Domain::Predicate, f.p}) + "(" + name({Domain::Subject, f.s}) + "," +
         name({Domain::Object, f.o}) + ")";
}

Vocabulary parse_vocabulary(std::istream& in, const std::string& source) {
  std::array<std::vector<std::string>, 3> lists;
  std::array<bool, 3> seen{};
  int current = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text == "[subjects]") {
        current = 0;
      } else if (text == "[predicates]") {
        current = 1;
      } else if (text == "[objects]") {
        current = 2;
      } else {
        throw ParseError(source, lineno, "unknown section " + std::string(text));
      }
      if (seen[current]) throw ParseError(source, lineno, "section repeated");
      seen[current] = true;
      continue;
    }
    if (current < 0) throw ParseError(source, lineno, "name outside of a section");
    lists[current].emplace_back(text);
  }
  for (int i = 0; i < 3; ++i) {
    if (!seen[i]) {
      throw ParseError(source, lineno,
                       "missing section [" + std::string(domain_name(kDomains[i])) + "]");
    }
  }
  try {
    return Vocabulary(std::move(lists[0]), std::move(lists[1]), std::move(lists[2]));
  } catch (const ValidationError& e) {
    throw ParseError(source, 0, e.what());
  }
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open vocabulary file " + path.string());
  return parse_vocabulary(in, path.string());
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (Domain d : kDomains) {
    out << '[' << domain_name(d) << "]\n";
    for (const auto& n : vocab.names(d)) out << n << '\n';
  }
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_vocabulary(out, vocab);
}

}  // namespace ngpkit
