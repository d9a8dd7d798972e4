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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ngpkit/harness/dataset.hpp"
#include "ngpkit/losses.hpp"
#include "ngpkit/selection.hpp"

namespace ngpkit::harness {

/// `none` is the supervised baseline; the others add the selected-IC loss.
enum class Regularizer { None, NgpSl, NgpDl2 };

std::optional<Regularizer> parse_regularizer(std::string_view s) noexcept;
std::string_view regularizer_name(Regularizer r) noexcept;

/// Where the training theory comes from: the complement of the world's
/// permitted facts, or the complement of the labelled training facts.
enum class TheorySource { PermittedComplement, TrainingFactComplement };

std::optional<TheorySource> parse_theory_source(std::string_view s) noexcept;
std::string_view theory_source_name(TheorySource t) noexcept;

struct TrainConfig {
  WorldSpec world;
  SelectionConfig selection;
  double beta1 = 1.0;
  double beta2 = 1.0;
  double learning_rate = 0.05;
  std::size_t epochs = 15;
  Regularizer regularizer = Regularizer::None;
  TheorySource theory_source = TheorySource::PermittedComplement;
  std::size_t eval_k = 20;
  std::vector<double> sweep_retentions{1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
  std::vector<std::uint64_t> sweep_seeds{0, 1, 2, 3, 4};

  /// Throws ValidationError on any out-of-range field.
  void validate() const;
  /// Whether the logic term is active (a regularizer is set and β2 > 0).
  bool logic_enabled() const noexcept;
  /// β2 forced to 0 when no regularizer is set.
  LossWeights weights() const;
  /// Selection config with the loss kind implied by the regularizer.
  SelectionConfig effective_selection() const;
};

/// Sets one field by its config key; throws ValidationError on an unknown
/// key or malformed value. List values are comma-separated.
void set_config_value(TrainConfig& cfg, std::string_view key, std::string_view value);

/// Every config key, in the order write_config emits them.
std::vector<std::string> config_keys();

/// `key = value` lines; `#` comments and blank lines ignored. Later keys win.
TrainConfig parse_config(std::istream& in, const std::string& source = "<config>");
TrainConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const TrainConfig& cfg);

}  // namespace ngpkit::harness
