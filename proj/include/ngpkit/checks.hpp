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

// Randomized self-checks behind the `check` command. Each suite draws its
// instances from a seeded generator and compares a fast path against a slow
// one; a report counts the cases that disagreed.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ngpkit {

struct CheckReport {
  std::string suite;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  std::string note;
  double seconds = 0.0;

  bool passed() const noexcept { return failures == 0 && cases > 0; }
};

/// |a - b| / max(|a|, |b|, 1e-3): relative error with a floor so that
/// gradients near zero are compared absolutely.
double gradient_error(double analytic, double numeric) noexcept;

/// wmc_ic_conjunction against enumeration over the conjunction formula
/// (≤ 8 ICs, ≤ 12 variables); tolerance 1e-12.
CheckReport check_wmc_oracle(std::size_t cases, std::uint64_t seed);

/// Greedy selection against the exhaustive optimum (theory ≤ 12 ICs, ρ ≤ 3):
/// DL2 equal exactly; SL within 1e-12 whenever the greedy set is
/// variable-disjoint. The note reports the disjoint-case rate.
CheckReport check_greedy_optimality(std::size_t cases, std::uint64_t seed);

/// SL and DL2 gradients (formulas and IC sets) against central differences,
/// tolerance 1e-5.
CheckReport check_loss_gradients(std::size_t cases, std::uint64_t seed);

/// Gradient of the training objective with respect to every model parameter
/// against central differences (|S|=|P|=|O|=5, d=8), tolerance 1e-4.
CheckReport check_model_gradients(std::size_t cases, std::uint64_t seed);

/// "wmc", "greedy", "gradient" (loss and model), "all".
std::vector<std::string> check_suite_names();
/// Throws ValidationError for an unknown suite name. The model-gradient check
/// runs max(1, cases / 25) instances.
std::vector<CheckReport> run_checks(std::string_view suite, std::size_t cases,
                                    std::uint64_t seed);

}  // namespace ngpkit
