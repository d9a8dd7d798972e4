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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ngpkit/vocabulary.hpp"

namespace ngpkit::harness {

enum class Split { Train, Val, Test };

std::string_view split_name(Split s) noexcept;

/// One datum: a feature vector per relation slot and the slot's ground-truth
/// fact, if labelled.
struct SceneSample {
  std::string id;
  Split split = Split::Train;
  /// slot_count() * feature_dim values, slot-major.
  std::vector<double> features;
  std::vector<std::optional<Fact>> truth;

  std::size_t slot_count() const noexcept { return truth.size(); }
  bool has_facts() const noexcept;
  std::span<const double> slot_features(std::size_t slot, std::size_t feature_dim) const;
};

/// Parameters of the synthetic world. The hidden rule set is a type
/// compatibility: each predicate accepts a random subset of subjects (each
/// with probability `subject_affinity`) and of objects (`object_affinity`),
/// and p(s, o) is permitted iff p accepts both. Predicate frequencies follow
/// Zipf weights with exponent `predicate_skew`, giving the long tail the
/// mean-recall metric is designed for.
struct WorldSpec {
  std::size_t subjects = 10;
  std::size_t predicates = 10;
  std::size_t objects = 10;
  std::size_t feature_dim = 12;
  std::size_t slots_per_sample = 2;
  double subject_affinity = 0.4;
  double object_affinity = 0.4;
  double predicate_skew = 1.0;
  double subject_signal = 1.0;
  double predicate_signal = 0.3;
  double object_signal = 1.0;
  double noise = 0.5;
  std::size_t train_samples = 2000;
  std::size_t val_samples = 300;
  std::size_t test_samples = 500;
  /// Fraction of training samples that keep their ground truth.
  double retention = 1.0;
  /// Fraction of permitted facts never shown in training.
  double zero_shot_fraction = 0.2;
  std::uint64_t seed = 0;

  /// Throws ValidationError on empty domains, fractions outside [0, 1], or
  /// a zero feature dimension.
  void validate() const;
};

struct Dataset {
  std::shared_ptr<const Vocabulary> vocab;
  std::size_t feature_dim = 0;
  /// The hidden rule set, sorted.
  std::vector<Fact> permitted;
  /// Permitted facts withheld from the train and validation splits, sorted.
  std::vector<Fact> zero_shot_pool;
  std::vector<SceneSample> train;
  std::vector<SceneSample> val;
  std::vector<SceneSample> test;
};

/// Deterministic in world.seed.
Dataset generate_dataset(const WorldSpec& world);

/// Distinct facts labelled in the training split (blanked samples excluded), sorted.
std::vector<Fact> visible_training_facts(const Dataset& data);

/// TSV: `sample_id<TAB>split<TAB>f1,f2,...<TAB>slot_0<TAB>slot_1...` where a
/// slot is `subject,predicate,object` names or `-`. A `# dim=N` line leads.
void write_samples(std::ostream& out, const Vocabulary& vocab, std::size_t feature_dim,
                   std::span<const SceneSample> samples);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

struct SampleFile {
  std::size_t feature_dim = 0;
  std::vector<SceneSample> samples;
};

SampleFile read_samples(std::istream& in, const Vocabulary& vocab,
                        const std::string& source = "<dataset>");
SampleFile load_samples(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace ngpkit::harness
