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

#include "ngpkit/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>

#include "../text_util.hpp"
#include "ngpkit/error.hpp"

namespace ngpkit::harness {

std::optional<Regularizer> parse_regularizer(std::string_view s) noexcept {
  if (s == "none") return Regularizer::None;
  if (s == "ngp-sl") return Regularizer::NgpSl;
  if (s == "ngp-dl2") return Regularizer::NgpDl2;
  return std::nullopt;
}

std::string_view regularizer_name(Regularizer r) noexcept {
  switch (r) {
    case Regularizer::None: return "none";
    case Regularizer::NgpSl: return "ngp-sl";
    case Regularizer::NgpDl2: return "ngp-dl2";
  }
  return "?";
}

std::optional<TheorySource> parse_theory_source(std::string_view s) noexcept {
  if (s == "permitted-complement") return TheorySource::PermittedComplement;
  if (s == "training-fact-complement") return TheorySource::TrainingFactComplement;
  return std::nullopt;
}

std::string_view theory_source_name(TheorySource t) noexcept {
  switch (t) {
    case TheorySource::PermittedComplement: return "permitted-complement";
    case TheorySource::TrainingFactComplement: return "training-fact-complement";
  }
  return "?";
}

void TrainConfig::validate() const {
  world.validate();
  selection.validate();
  if (!(beta1 >= 0.0) || !(beta2 >= 0.0) || !std::isfinite(beta1) || !std::isfinite(beta2)) {
    throw ValidationError("beta1 and beta2 must be finite and non-negative");
  }
  if (beta1 == 0.0 && !logic_enabled()) throw ValidationError("objective has no active term");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be finite and non-negative");
  }
  if (eval_k == 0) throw ValidationError("eval_k must be at least 1");
  for (double r : sweep_retentions) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("sweep retentions must lie in [0, 1]");
  }
}

bool TrainConfig::logic_enabled() const noexcept {
  return regularizer != Regularizer::None && beta2 > 0.0;
}

LossWeights TrainConfig::weights() const {
  return LossWeights(beta1, logic_enabled() ? beta2 : 0.0);
}

SelectionConfig TrainConfig::effective_selection() const {
  SelectionConfig s = selection;
  if (regularizer == Regularizer::NgpSl) s.loss = LossKind::SL;
  if (regularizer == Regularizer::NgpDl2) s.loss = LossKind::DL2;
  return s;
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ValidationError("bad value '" + std::string(value) + "' for " + std::string(key));
}

template <class T>
T number(std::string_view key, std::string_view value) {
  auto v = detail::parse_number<T>(value);
  if (!v) bad_value(key, value);
  return *v;
}

template <class T>
std::vector<T> number_list(std::string_view key, std::string_view value) {
  std::vector<T> out;
  for (auto tok : detail::split(value, ',')) out.push_back(number<T>(key, tok));
  if (out.empty()) bad_value(key, value);
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += detail::format_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

struct Field {
  std::function<void(TrainConfig&, std::string_view)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define NGPKIT_SIZE_FIELD(name, member)                                                  \
  {name,                                                                                 \
   {[](TrainConfig& c, std::string_view v) { c.member = number<std::size_t>(name, v); }, \
    [](const TrainConfig& c) { return std::to_string(c.member); }}}
#define NGPKIT_REAL_FIELD(name, member)                                             \
  {name,                                                                            \
   {[](TrainConfig& c, std::string_view v) { c.member = number<double>(name, v); }, \
    [](const TrainConfig& c) { return detail::format_double(c.member); }}}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      NGPKIT_SIZE_FIELD("subjects", world.subjects),
      NGPKIT_SIZE_FIELD("predicates", world.predicates),
      NGPKIT_SIZE_FIELD("objects", world.objects),
      NGPKIT_SIZE_FIELD("feature_dim", world.feature_dim),
      NGPKIT_SIZE_FIELD("slots_per_sample", world.slots_per_sample),
      NGPKIT_REAL_FIELD("subject_affinity", world.subject_affinity),
      NGPKIT_REAL_FIELD("object_affinity", world.object_affinity),
      NGPKIT_REAL_FIELD("predicate_skew", world.predicate_skew),
      NGPKIT_REAL_FIELD("subject_signal", world.subject_signal),
      NGPKIT_REAL_FIELD("predicate_signal", world.predicate_signal),
      NGPKIT_REAL_FIELD("object_signal", world.object_signal),
      NGPKIT_REAL_FIELD("noise", world.noise),
      NGPKIT_SIZE_FIELD("train_samples", world.train_samples),
      NGPKIT_SIZE_FIELD("val_samples", world.val_samples),
      NGPKIT_SIZE_FIELD("test_samples", world.test_samples),
      NGPKIT_REAL_FIELD("retention", world.retention),
      NGPKIT_REAL_FIELD("zero_shot_fraction", world.zero_shot_fraction),
      {"seed",
       {[](TrainConfig& c, std::string_view v) { c.world.seed = number<std::uint64_t>("seed", v); },
        [](const TrainConfig& c) { return std::to_string(c.world.seed); }}},
      NGPKIT_SIZE_FIELD("rho", selection.rho),
      {"loss",
       {[](TrainConfig& c, std::string_view v) {
          auto k = parse_loss_kind(v);
          if (!k) bad_value("loss", v);
          c.selection.loss = *k;
        },
        [](const TrainConfig& c) { return std::string(loss_kind_name(c.selection.loss)); }}},
      {"strategy",
       {[](TrainConfig& c, std::string_view v) {
          auto s = parse_strategy(v);
          if (!s) bad_value("strategy", v);
          c.selection.strategy = *s;
        },
        [](const TrainConfig& c) { return std::string(strategy_name(c.selection.strategy)); }}},
      {"budget",
       {[](TrainConfig& c, std::string_view v) {
          if (v == "sample") {
            c.selection.budget = SelectionBudget::SampleGlobal;
          } else if (v == "slot") {
            c.selection.budget = SelectionBudget::PerSlot;
          } else {
            bad_value("budget", v);
          }
        },
        [](const TrainConfig& c) {
          return std::string(c.selection.budget == SelectionBudget::SampleGlobal ? "sample" : "slot");
        }}},
      {"tie_break",
       {[](TrainConfig& c, std::string_view v) {
          if (v != "lexicographic") bad_value("tie_break", v);
          c.selection.tie_break = TieBreak::Lexicographic;
        },
        [](const TrainConfig&) { return std::string("lexicographic"); }}},
      NGPKIT_REAL_FIELD("beta1", beta1),
      NGPKIT_REAL_FIELD("beta2", beta2),
      NGPKIT_REAL_FIELD("learning_rate", learning_rate),
      NGPKIT_SIZE_FIELD("epochs", epochs),
      {"regularizer",
       {[](TrainConfig& c, std::string_view v) {
          auto r = parse_regularizer(v);
          if (!r) bad_value("regularizer", v);
          c.regularizer = *r;
        },
        [](const TrainConfig& c) { return std::string(regularizer_name(c.regularizer)); }}},
      {"theory_source",
       {[](TrainConfig& c, std::string_view v) {
          auto t = parse_theory_source(v);
          if (!t) bad_value("theory_source", v);
          c.theory_source = *t;
        },
        [](const TrainConfig& c) { return std::string(theory_source_name(c.theory_source)); }}},
      NGPKIT_SIZE_FIELD("eval_k", eval_k),
      {"sweep_retentions",
       {[](TrainConfig& c, std::string_view v) {
          c.sweep_retentions = number_list<double>("sweep_retentions", v);
        },
        [](const TrainConfig& c) { return join(c.sweep_retentions); }}},
      {"sweep_seeds",
       {[](TrainConfig& c, std::string_view v) {
          c.sweep_seeds = number_list<std::uint64_t>("sweep_seeds", v);
        },
        [](const TrainConfig& c) { return join(c.sweep_seeds); }}},
  };
  return table;
}

#undef NGPKIT_SIZE_FIELD
#undef NGPKIT_REAL_FIELD

}  // namespace

void set_config_value(TrainConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      field.set(cfg, detail::trim(value));
      return;
    }
  }
  throw ValidationError("unknown config key '" + std::string(key) + "'");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [name, field] : fields()) out.push_back(name);
  return out;
}

TrainConfig parse_config(std::istream& in, const std::string& source) {
  TrainConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, lineno, "expected key = value");
    try {
      set_config_value(cfg, detail::trim(text.substr(0, eq)), text.substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return cfg;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

void write_config(std::ostream& out, const TrainConfig& cfg) {
  for (const auto& [name, field] : fields()) out << name << " = " << field.get(cfg) << '\n';
}

}  // namespace ngpkit::harness
