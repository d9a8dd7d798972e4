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

#include "ngpkit/harness/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "../text_util.hpp"
#include "ngpkit/error.hpp"

namespace ngpkit::harness {

std::string_view split_name(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

bool SceneSample::has_facts() const noexcept {
  return std::any_of(truth.begin(), truth.end(), [](const auto& t) { return t.has_value(); });
}

std::span<const double> SceneSample::slot_features(std::size_t slot, std::size_t feature_dim) const {
  if ((slot + 1) * feature_dim > features.size()) {
    throw ValidationError("sample " + id + " has no features for slot " + std::to_string(slot));
  }
  return std::span<const double>(features).subspan(slot * feature_dim, feature_dim);
}

void WorldSpec::validate() const {
  if (subjects == 0 || predicates == 0 || objects == 0) {
    throw ValidationError("world domains must be non-empty");
  }
  if (feature_dim == 0) throw ValidationError("feature_dim must be positive");
  if (slots_per_sample == 0) throw ValidationError("slots_per_sample must be positive");
  auto fraction = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!fraction(subject_affinity) || !fraction(object_affinity)) {
    throw ValidationError("affinities must lie in [0, 1]");
  }
  if (!fraction(retention)) throw ValidationError("retention must lie in [0, 1]");
  if (!fraction(zero_shot_fraction) || zero_shot_fraction >= 1.0) {
    throw ValidationError("zero_shot_fraction must lie in [0, 1)");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ValidationError("noise must be >= 0");
  if (train_samples == 0) throw ValidationError("train_samples must be positive");
}

namespace {

std::vector<std::string> numbered(std::string_view stem, std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(stem) + "_" + std::to_string(i));
  return out;
}

// d x n matrix of N(0, 1/d) columns, stored column-major (one column per term).
std::vector<double> embedding(std::size_t d, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> m(d * n);
  for (auto& x : m) x = gauss(rng);
  return m;
}

class SampleFactory {
 public:
  SampleFactory(const WorldSpec& world, std::mt19937_64& rng)
      : world_(world),
        rng_(rng),
        es_(embedding(world.feature_dim, world.subjects, rng)),
        ep_(embedding(world.feature_dim, world.predicates, rng)),
        eo_(embedding(world.feature_dim, world.objects, rng)) {}

  SceneSample make(std::string id, Split split, std::span<const Fact> pool,
                   std::discrete_distribution<std::size_t>& pick) {
    SceneSample s;
    s.id = std::move(id);
    s.split = split;
    const std::size_t d = world_.feature_dim;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t slot = 0; slot < world_.slots_per_sample; ++slot) {
      const Fact f = pool[pick(rng_)];
      for (std::size_t k = 0; k < d; ++k) {
        const double x = world_.subject_signal * es_[f.s * d + k] +
                         world_.predicate_signal * ep_[f.p * d + k] +
                         world_.object_signal * eo_[f.o * d + k] + world_.noise * gauss(rng_);
        s.features.push_back(x);
      }
      s.truth.push_back(f);
    }
    return s;
  }

 private:
  const WorldSpec& world_;
  std::mt19937_64& rng_;
  std::vector<double> es_, ep_, eo_;
};

// Each predicate gets its Zipf share, split evenly over its facts in `pool`.
std::discrete_distribution<std::size_t> fact_picker(std::span<const Fact> pool,
                                                    std::span<const double> predicate_weight) {
  std::vector<double> count(predicate_weight.size(), 0.0);
  for (const auto& f : pool) count[f.p] += 1.0;
  std::vector<double> w;
  w.reserve(pool.size());
  for (const auto& f : pool) w.push_back(predicate_weight[f.p] / count[f.p]);
  return std::discrete_distribution<std::size_t>(w.begin(), w.end());
}

}  // namespace

Dataset generate_dataset(const WorldSpec& world) {
  world.validate();
  std::mt19937_64 rng(world.seed);
  Dataset data;
  data.vocab = std::make_shared<const Vocabulary>(numbered("subject", world.subjects),
                                                  numbered("predicate", world.predicates),
                                                  numbered("object", world.objects));
  data.feature_dim = world.feature_dim;

  std::vector<double> predicate_weight(world.predicates);
  for (std::size_t p = 0; p < world.predicates; ++p) {
    predicate_weight[p] = std::pow(static_cast<double>(p + 1), -world.predicate_skew);
  }

  // Hidden rule set. Every predicate keeps at least one subject and object.
  auto compatible = [&](std::size_t n, double affinity) {
    std::bernoulli_distribution coin(affinity);
    std::vector<bool> mask(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) any |= (mask[i] = coin(rng));
    if (!any) mask[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = true;
    return mask;
  };
  std::vector<std::size_t> per_predicate(world.predicates, 0);
  for (std::uint32_t p = 0; p < world.predicates; ++p) {
    const auto subj = compatible(world.subjects, world.subject_affinity);
    const auto obj = compatible(world.objects, world.object_affinity);
    for (std::uint32_t s = 0; s < world.subjects; ++s) {
      for (std::uint32_t o = 0; o < world.objects; ++o) {
        if (subj[s] && obj[o]) {
          data.permitted.push_back({s, p, o});
          ++per_predicate[p];
        }
      }
    }
  }
  std::sort(data.permitted.begin(), data.permitted.end());

  std::vector<std::size_t> order(data.permitted.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto pool_size = static_cast<std::size_t>(
      std::llround(world.zero_shot_fraction * static_cast<double>(data.permitted.size())));
  std::vector<bool> in_pool(data.permitted.size(), false);
  for (std::size_t i = 0; i < pool_size; ++i) in_pool[order[i]] = true;
  std::vector<Fact> seen;
  for (std::size_t i = 0; i < data.permitted.size(); ++i) {
    (in_pool[i] ? data.zero_shot_pool : seen).push_back(data.permitted[i]);
  }

  SampleFactory factory(world, rng);
  auto seen_pick = fact_picker(seen, predicate_weight);
  auto all_pick = fact_picker(data.permitted, predicate_weight);
  for (std::size_t i = 0; i < world.train_samples; ++i) {
    data.train.push_back(factory.make("train_" + std::to_string(i), Split::Train, seen, seen_pick));
  }
  for (std::size_t i = 0; i < world.val_samples; ++i) {
    data.val.push_back(factory.make("val_" + std::to_string(i), Split::Val, seen, seen_pick));
  }
  for (std::size_t i = 0; i < world.test_samples; ++i) {
    data.test.push_back(
        factory.make("test_" + std::to_string(i), Split::Test, data.permitted, all_pick));
  }

  // Exact label masking: the first `blanked` entries of a seeded permutation.
  const auto kept = static_cast<std::size_t>(
      std::llround(world.retention * static_cast<double>(world.train_samples)));
  std::vector<std::size_t> mask_order(world.train_samples);
  std::iota(mask_order.begin(), mask_order.end(), 0);
  std::shuffle(mask_order.begin(), mask_order.end(), rng);
  for (std::size_t i = 0; i < world.train_samples - kept; ++i) {
    for (auto& t : data.train[mask_order[i]].truth) t.reset();
  }
  return data;
}

std::vector<Fact> visible_training_facts(const Dataset& data) {
  std::set<Fact> facts;
  for (const auto& s : data.train) {
    for (const auto& t : s.truth) {
      if (t) facts.insert(*t);
    }
  }
  return {facts.begin(), facts.end()};
}

void write_samples(std::ostream& out, const Vocabulary& vocab, std::size_t feature_dim,
                   std::span<const SceneSample> samples) {
  out << "# dim=" << feature_dim << '\n';
  for (const auto& s : samples) {
    out << s.id << '\t' << split_name(s.split) << '\t';
    for (std::size_t i = 0; i < s.features.size(); ++i) {
      if (i) out << ',';
      out << detail::format_double(s.features[i]);
    }
    for (const auto& t : s.truth) {
      out << '\t';
      if (!t) {
        out << '-';
      } else {
        out << vocab.name({Domain::Subject, t->s}) << ',' << vocab.name({Domain::Predicate, t->p})
            << ',' << vocab.name({Domain::Object, t->o});
      }
    }
    out << '\n';
  }
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  std::vector<SceneSample> all;
  all.insert(all.end(), data.train.begin(), data.train.end());
  all.insert(all.end(), data.val.begin(), data.val.end());
  all.insert(all.end(), data.test.begin(), data.test.end());
  write_samples(out, *data.vocab, data.feature_dim, all);
}

SampleFile read_samples(std::istream& in, const Vocabulary& vocab, const std::string& source) {
  SampleFile file;
  std::string line;
  std::size_t lineno = 0;
  bool have_dim = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto text = detail::trim(std::string_view(line).substr(1));
      if (text.starts_with("dim=")) {
        auto d = detail::parse_number<std::size_t>(text.substr(4));
        if (!d || *d == 0) throw ParseError(source, lineno, "malformed dim");
        file.feature_dim = *d;
        have_dim = true;
      }
      continue;
    }
    if (!have_dim) throw ParseError(source, lineno, "missing '# dim=N' line before samples");
    const auto fields = detail::split(line, '\t');
    if (fields.size() < 4) throw ParseError(source, lineno, "expected id, split, features, slots");
    SceneSample s;
    s.id = std::string(fields[0]);
    if (fields[1] == "train") {
      s.split = Split::Train;
    } else if (fields[1] == "val") {
      s.split = Split::Val;
    } else if (fields[1] == "test") {
      s.split = Split::Test;
    } else {
      throw ParseError(source, lineno, "unknown split '" + std::string(fields[1]) + "'");
    }
    for (auto tok : detail::split(fields[2], ',')) {
      auto v = detail::parse_number<double>(tok);
      if (!v || !std::isfinite(*v)) throw ParseError(source, lineno, "bad feature value");
      s.features.push_back(*v);
    }
    for (std::size_t i = 3; i < fields.size(); ++i) {
      if (fields[i] == "-") {
        s.truth.emplace_back();
        continue;
      }
      const auto parts = detail::split(fields[i], ',');
      if (parts.size() != 3) throw ParseError(source, lineno, "slot must be s,p,o or -");
      const auto a = vocab.find(Domain::Subject, parts[0]);
      const auto b = vocab.find(Domain::Predicate, parts[1]);
      const auto c = vocab.find(Domain::Object, parts[2]);
      if (!a || !b || !c) throw ParseError(source, lineno, "slot term not in vocabulary");
      s.truth.push_back(Fact{*a, *b, *c});
    }
    if (s.features.size() != s.truth.size() * file.feature_dim) {
      throw ParseError(source, lineno, "feature count does not match slots x dim");
    }
    file.samples.push_back(std::move(s));
  }
  return file;
}

SampleFile load_samples(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset file " + path.string());
  return read_samples(in, vocab, path.string());
}

}  // namespace ngpkit::harness
