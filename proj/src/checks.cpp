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

#include "ngpkit/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>

#include "ngpkit/error.hpp"
#include "ngpkit/harness/training_step.hpp"
#include "ngpkit/losses.hpp"
#include "ngpkit/selection.hpp"
#include "ngpkit/semantics.hpp"

namespace ngpkit {

double gradient_error(double analytic, double numeric) noexcept {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) / scale;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<double> activations(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

PredictionVector random_prediction(std::mt19937_64& rng, std::size_t ns, std::size_t np,
                                   std::size_t no, double lo = 0.02, double hi = 0.98) {
  return PredictionVector(activations(rng, ns, lo, hi), activations(rng, np, lo, hi),
                          activations(rng, no, lo, hi));
}

Fact random_fact(std::mt19937_64& rng, std::size_t ns, std::size_t np, std::size_t no) {
  return {static_cast<std::uint32_t>(pick(rng, 0, ns - 1)),
          static_cast<std::uint32_t>(pick(rng, 0, np - 1)),
          static_cast<std::uint32_t>(pick(rng, 0, no - 1))};
}

std::vector<IntegrityConstraint> random_ics(std::mt19937_64& rng, std::size_t count,
                                            std::size_t ns, std::size_t np, std::size_t no) {
  std::vector<IntegrityConstraint> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({random_fact(rng, ns, np, no)});
  return out;
}

Formula random_formula(std::mt19937_64& rng, std::size_t depth) {
  if (depth == 0 || pick(rng, 0, 3) == 0) {
    const auto d = kDomains[pick(rng, 0, 2)];
    return Formula::var({d, static_cast<std::uint32_t>(pick(rng, 0, 1))});
  }
  switch (pick(rng, 0, 2)) {
    case 0: return Formula::negate(random_formula(rng, depth - 1));
    case 1:
    case 2: {
      std::vector<Formula> kids;
      const std::size_t n = pick(rng, 2, 3);
      for (std::size_t i = 0; i < n; ++i) kids.push_back(random_formula(rng, depth - 1));
      return pick(rng, 0, 1) ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
  }
  return Formula::var({Domain::Subject, 0});
}

// Every variable of w's slot 0, as TermRefs.
std::vector<TermRef> all_terms(const PredictionVector& w) {
  std::vector<TermRef> out;
  for (Domain d : kDomains) {
    for (std::uint32_t i = 0; i < w.size(d); ++i) out.push_back({d, i});
  }
  return out;
}

template <class LossFn>
double max_fd_error(const PredictionVector& w, const Gradient& analytic, LossFn&& loss) {
  constexpr double h = 1e-6;
  double worst = 0.0;
  for (const TermRef t : all_terms(w)) {
    const double v = w.value(0, t);
    const double numeric =
        (loss(w.with_value(0, t, v + h)) - loss(w.with_value(0, t, v - h))) / (2.0 * h);
    const auto it = analytic.find(t);
    const double a = it == analytic.end() ? 0.0 : it->second;
    worst = std::max(worst, gradient_error(a, numeric));
  }
  return worst;
}

}  // namespace

CheckReport check_wmc_oracle(std::size_t cases, std::uint64_t seed) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  CheckReport r;
  r.suite = "wmc";
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t ns = pick(rng, 1, 4), np = pick(rng, 1, 4), no = pick(rng, 1, 4);
    const auto w = random_prediction(rng, ns, np, no, 0.0, 1.0);
    const auto ics = random_ics(rng, pick(rng, 1, 8), ns, np, no);
    const double fast = wmc_ic_conjunction(ics, w, 0);
    const double slow = wmc(conjunction_of_ics(ics), w, 0);
    const double err = std::abs(fast - slow);
    r.max_error = std::max(r.max_error, err);
    ++r.cases;
    if (!(err <= 1e-12)) ++r.failures;
  }
  r.seconds = seconds_since(t0);
  return r;
}

CheckReport check_greedy_optimality(std::size_t cases, std::uint64_t seed) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  CheckReport r;
  r.suite = "greedy";
  std::size_t disjoint = 0;
  auto vocab_for = [](std::size_t ns, std::size_t np, std::size_t no) {
    auto names = [](char c, std::size_t n) {
      std::vector<std::string> v;
      for (std::size_t i = 0; i < n; ++i) v.push_back(std::string(1, c) + std::to_string(i));
      return v;
    };
    return std::make_shared<const Vocabulary>(names('s', ns), names('p', np), names('o', no));
  };
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t ns = pick(rng, 2, 4), np = pick(rng, 2, 4), no = pick(rng, 2, 4);
    const auto vocab = vocab_for(ns, np, no);
    std::set<Fact> forbidden;
    const std::size_t want = std::min<std::size_t>(pick(rng, 1, 12), ns * np * no);
    while (forbidden.size() < want) forbidden.insert(random_fact(rng, ns, np, no));
    const std::vector<Fact> fv(forbidden.begin(), forbidden.end());
    const auto store = TheoryStore::explicit_negative(vocab, fv);
    const auto w = random_prediction(rng, ns, np, no);
    const std::size_t rho = pick(rng, 1, 3);
    const auto candidates = store.ics();
    SelectionConfig cfg;
    cfg.rho = rho;
    const auto greedy = greedy_select(w, 0, store, cfg);
    ++r.cases;

    const double greedy_dl2 = loss_of_ic_set(LossKind::DL2, greedy, w, 0);
    const auto best_dl2 = exhaustive_select(w, 0, candidates, rho, LossKind::DL2);
    const double best_dl2_loss = loss_of_ic_set(LossKind::DL2, best_dl2, w, 0);
    bool ok = greedy_dl2 == best_dl2_loss;
    r.max_error = std::max(r.max_error, std::abs(greedy_dl2 - best_dl2_loss));

    if (ics_variable_disjoint(greedy)) {
      ++disjoint;
      const double greedy_sl = loss_of_ic_set(LossKind::SL, greedy, w, 0);
      const auto best_sl = exhaustive_select(w, 0, candidates, rho, LossKind::SL);
      const double best_sl_loss = loss_of_ic_set(LossKind::SL, best_sl, w, 0);
      const double err = std::abs(greedy_sl - best_sl_loss);
      r.max_error = std::max(r.max_error, err);
      ok = ok && err <= 1e-12;
    }
    if (!ok) ++r.failures;
  }
  r.note = "disjoint-case rate " + std::to_string(disjoint) + "/" + std::to_string(r.cases);
  r.seconds = seconds_since(t0);
  return r;
}

CheckReport check_loss_gradients(std::size_t cases, std::uint64_t seed) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  CheckReport r;
  r.suite = "loss-gradient";
  for (std::size_t c = 0; c < cases; ++c) {
    const auto kind = c % 2 == 0 ? LossKind::SL : LossKind::DL2;
    double err = 0.0;
    if (c % 4 < 2) {
      const auto w = random_prediction(rng, 2, 2, 2, 0.05, 0.95);
      const Formula f = random_formula(rng, 3);
      auto loss = [&](const PredictionVector& v) {
        return kind == LossKind::SL ? semantic_loss(f, v, 0) : dl2_loss(f, v, 0);
      };
      // Instances are drawn with P bounded away from 0 (P >= 1e-3).
      if (kind == LossKind::SL && wmc(f, w, 0) < 1e-3) {
        --c;
        continue;
      }
      err = max_fd_error(w, loss_gradient(kind, f, w, 0), loss);
    } else {
      const std::size_t ns = pick(rng, 1, 4), np = pick(rng, 1, 4), no = pick(rng, 1, 4);
      const auto w = random_prediction(rng, ns, np, no, 0.05, 0.95);
      const auto ics = random_ics(rng, pick(rng, 1, 6), ns, np, no);
      if (kind == LossKind::SL && wmc_ic_conjunction(ics, w, 0) < 1e-3) {
        --c;
        continue;
      }
      auto loss = [&](const PredictionVector& v) { return loss_of_ic_set(kind, ics, v, 0); };
      err = max_fd_error(w, loss_gradient(kind, ics, w, 0), loss);
    }
    r.max_error = std::max(r.max_error, err);
    ++r.cases;
    if (!(err <= 1e-5)) ++r.failures;
  }
  r.seconds = seconds_since(t0);
  return r;
}

CheckReport check_model_gradients(std::size_t cases, std::uint64_t seed) {
  using namespace harness;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CheckReport r;
  r.suite = "model-gradient";
  constexpr std::size_t n = 5, d = 8;
  std::vector<std::string> sn, pn, on;
  for (std::size_t i = 0; i < n; ++i) {
    sn.push_back("s" + std::to_string(i));
    pn.push_back("p" + std::to_string(i));
    on.push_back("o" + std::to_string(i));
  }
  const auto vocab = std::make_shared<const Vocabulary>(sn, pn, on);
  for (std::size_t c = 0; c < cases; ++c) {
    RelationModel model(d, n, n, n);
    for (std::size_t i = 0; i < model.parameter_count(); ++i) {
      model.set_parameter(i, 0.5 * gauss(rng));
    }
    SceneSample sample;
    sample.id = "check_" + std::to_string(c);
    const std::size_t slots = pick(rng, 1, 2);
    for (std::size_t s = 0; s < slots; ++s) {
      for (std::size_t k = 0; k < d; ++k) sample.features.push_back(gauss(rng));
      if (pick(rng, 0, 2) == 0) {
        sample.truth.emplace_back();
      } else {
        sample.truth.push_back(random_fact(rng, n, n, n));
      }
    }
    std::set<Fact> permitted;
    while (permitted.size() < 30) permitted.insert(random_fact(rng, n, n, n));
    const std::vector<Fact> pv(permitted.begin(), permitted.end());
    const auto store = TheoryStore::complement_of(vocab, pv);
    SelectionConfig cfg;
    cfg.loss = c % 2 == 0 ? LossKind::SL : LossKind::DL2;
    const LossWeights weights(1.0, 1.0);
    const auto selected = select_for_sample(forward(model, sample), store, cfg);
    const auto analytic = objective_gradient(model, sample, selected, cfg.loss, weights);

    constexpr double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < model.parameter_count(); ++i) {
      RelationModel plus = model, minus = model;
      plus.set_parameter(i, model.parameter(i) + h);
      minus.set_parameter(i, model.parameter(i) - h);
      const double numeric = (objective_value(plus, sample, selected, cfg.loss, weights) -
                              objective_value(minus, sample, selected, cfg.loss, weights)) /
                             (2.0 * h);
      worst = std::max(worst, gradient_error(analytic.component(i), numeric));
    }
    r.max_error = std::max(r.max_error, worst);
    ++r.cases;
    if (!(worst <= 1e-4)) ++r.failures;
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<std::string> check_suite_names() { return {"wmc", "greedy", "gradient", "all"}; }

std::vector<CheckReport> run_checks(std::string_view suite, std::size_t cases,
                                    std::uint64_t seed) {
  if (cases == 0) throw ValidationError("--cases must be at least 1");
  const bool all = suite == "all";
  std::vector<CheckReport> out;
  if (all || suite == "wmc") out.push_back(check_wmc_oracle(cases, seed));
  if (all || suite == "greedy") out.push_back(check_greedy_optimality(cases, seed));
  if (all || suite == "gradient") {
    out.push_back(check_loss_gradients(cases, seed));
    out.push_back(check_model_gradients(std::max<std::size_t>(1, cases / 25), seed));
  }
  if (out.empty()) throw ValidationError("unknown check suite '" + std::string(suite) + "'");
  return out;
}

}  // namespace ngpkit
