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

#include "ngpkit/harness/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "../text_util.hpp"
#include "ngpkit/error.hpp"
#include "ngpkit/kernels.hpp"
#include "ngpkit/losses.hpp"

namespace ngpkit::harness {

AffineMap::AffineMap(std::size_t out, std::size_t in)
    : outputs(out), inputs(in), weight(out * in, 0.0), bias(out, 0.0) {}

RelationModel::RelationModel(std::size_t feature_dim, std::size_t subjects,
                             std::size_t predicates, std::size_t objects)
    : feature_dim_(feature_dim),
      maps_{AffineMap(subjects, feature_dim), AffineMap(predicates, feature_dim),
            AffineMap(objects, feature_dim)} {
  if (feature_dim == 0 || subjects == 0 || predicates == 0 || objects == 0) {
    throw ValidationError("model dimensions must be positive");
  }
}

std::size_t RelationModel::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& m : maps_) n += m.parameter_count();
  return n;
}

namespace {

template <class Maps>
auto& flat_ref(Maps& maps, std::size_t i) {
  for (auto& m : maps) {
    if (i < m.weight.size()) return m.weight[i];
    i -= m.weight.size();
    if (i < m.bias.size()) return m.bias[i];
    i -= m.bias.size();
  }
  throw ContractError("parameter index out of range");
}

void softmax_into(const AffineMap& m, std::span<const double> x, std::vector<double>& out) {
  out.resize(m.outputs);
  for (std::size_t j = 0; j < m.outputs; ++j) {
    out[j] = m.bias[j] +
             kernels::dot(std::span<const double>(m.weight).subspan(j * m.inputs, m.inputs), x);
  }
  const double top = *std::max_element(out.begin(), out.end());
  double total = 0.0;
  for (auto& z : out) {
    z = std::exp(z - top);
    total += z;
  }
  for (auto& z : out) z /= total;
}

}  // namespace

double RelationModel::parameter(std::size_t i) const { return flat_ref(maps_, i); }
void RelationModel::set_parameter(std::size_t i, double v) { flat_ref(maps_, i) = v; }

PredictionVector forward(const RelationModel& model, const SceneSample& sample) {
  const std::size_t d = model.feature_dim();
  if (sample.slot_count() == 0) throw ValidationError("sample " + sample.id + " has no slots");
  if (sample.features.size() != sample.slot_count() * d) {
    throw ValidationError("sample " + sample.id + " has " + std::to_string(sample.features.size()) +
                          " features, model expects " + std::to_string(sample.slot_count() * d));
  }
  std::vector<SlotActivations> slots(sample.slot_count());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto x = sample.slot_features(s, d);
    for (Domain dom : kDomains) softmax_into(model.map(dom), x, slots[s].domain(dom));
  }
  return PredictionVector(std::move(slots));
}

ActivationGradient zero_activation_gradient(const PredictionVector& w) {
  ActivationGradient g(w.slot_count());
  for (auto& slot : g) {
    for (Domain d : kDomains) slot.domain(d).assign(w.size(d), 0.0);
  }
  return g;
}

void accumulate(ActivationGradient& g, std::size_t slot, const Gradient& sparse, double scale) {
  auto& dst = g.at(slot);
  for (const auto& [t, v] : sparse) dst.domain(t.domain).at(t.id) += scale * v;
}

double supervised_loss(std::span<const std::optional<Fact>> truth, const PredictionVector& w) {
  if (truth.size() > w.slot_count()) throw ContractError("more labelled slots than predictions");
  double total = 0.0;
  for (std::size_t s = 0; s < truth.size(); ++s) {
    if (!truth[s]) continue;
    const Fact& f = *truth[s];
    total += clipped_neg_log(w.value(s, {Domain::Subject, f.s})) +
             clipped_neg_log(w.value(s, {Domain::Predicate, f.p})) +
             clipped_neg_log(w.value(s, {Domain::Object, f.o}));
  }
  return total;
}

void add_supervised_gradient(std::span<const std::optional<Fact>> truth, const PredictionVector& w,
                             double scale, ActivationGradient& g) {
  for (std::size_t s = 0; s < truth.size(); ++s) {
    if (!truth[s]) continue;
    const Fact& f = *truth[s];
    const std::array<TermRef, 3> terms{TermRef{Domain::Subject, f.s},
                                       TermRef{Domain::Predicate, f.p},
                                       TermRef{Domain::Object, f.o}};
    for (const auto& t : terms) {
      const double v = w.value(s, t);
      // Past the clip the loss is flat.
      if (v > kLogEpsilon) g.at(s).domain(t.domain).at(t.id) -= scale / v;
    }
  }
}

double ModelGradient::norm() const noexcept {
  double sq = 0.0;
  for (const auto& m : maps) {
    for (double v : m.weight) sq += v * v;
    for (double v : m.bias) sq += v * v;
  }
  return std::sqrt(sq);
}

bool ModelGradient::finite() const noexcept {
  for (const auto& m : maps) {
    for (double v : m.weight) {
      if (!std::isfinite(v)) return false;
    }
    for (double v : m.bias) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

double ModelGradient::component(std::size_t i) const { return flat_ref(maps, i); }

ModelGradient backprop(const RelationModel& model, const SceneSample& sample,
                       const PredictionVector& w, const ActivationGradient& g) {
  const std::size_t d = model.feature_dim();
  if (g.size() != w.slot_count()) throw ContractError("gradient does not match prediction slots");
  ModelGradient out;
  for (Domain dom : kDomains) {
    const auto& m = model.map(dom);
    out.maps[static_cast<std::size_t>(dom)] = AffineMap(m.outputs, m.inputs);
  }
  std::vector<double> dz;
  for (std::size_t s = 0; s < w.slot_count(); ++s) {
    const auto x = sample.slot_features(s, d);
    for (Domain dom : kDomains) {
      const auto ws = w.domain(s, dom);
      const auto gs = std::span<const double>(g[s].domain(dom));
      if (gs.size() != ws.size()) throw ContractError("gradient does not cover the vocabulary");
      const double inner = kernels::dot(gs, ws);
      dz.resize(ws.size());
      for (std::size_t j = 0; j < ws.size(); ++j) dz[j] = ws[j] * (gs[j] - inner);
      auto& gm = out.maps[static_cast<std::size_t>(dom)];
      for (std::size_t j = 0; j < ws.size(); ++j) {
        if (dz[j] == 0.0) continue;
        kernels::axpy(dz[j], x, std::span<double>(gm.weight).subspan(j * d, d));
        gm.bias[j] += dz[j];
      }
    }
  }
  return out;
}

void apply_sgd(RelationModel& model, const ModelGradient& grad, double lr) {
  if (!grad.finite()) {
    throw SaturatedGradientError("non-finite parameter gradient (norm " +
                                 detail::format_double(grad.norm()) + ")");
  }
  if (lr == 0.0) return;
  for (Domain dom : kDomains) {
    auto& m = model.map(dom);
    const auto& gm = grad.maps[static_cast<std::size_t>(dom)];
    kernels::axpy(-lr, gm.weight, m.weight);
    kernels::axpy(-lr, gm.bias, m.bias);
  }
}

double backward_and_update(RelationModel& model, const SceneSample& sample,
                           const PredictionVector& w, const ActivationGradient& g, double lr) {
  const ModelGradient grad = backprop(model, sample, w, g);
  apply_sgd(model, grad, lr);
  return grad.norm();
}

void write_model(std::ostream& out, const RelationModel& model) {
  out << "ngpkit-model dim=" << model.feature_dim() << " sizes=" << model.map(Domain::Subject).outputs
      << 'x' << model.map(Domain::Predicate).outputs << 'x' << model.map(Domain::Object).outputs
      << '\n';
  for (Domain dom : kDomains) {
    const auto& m = model.map(dom);
    for (std::size_t j = 0; j < m.outputs; ++j) {
      out << domain_tag(dom);
      for (std::size_t k = 0; k < m.inputs; ++k) {
        out << ' ' << detail::format_double(m.weight[j * m.inputs + k]);
      }
      out << ' ' << detail::format_double(m.bias[j]) << '\n';
    }
  }
}

void save_model(const RelationModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_model(out, model);
}

RelationModel read_model(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "empty model file");
  std::istringstream head(line);
  std::string magic, dim_tok, size_tok;
  head >> magic >> dim_tok >> size_tok;
  if (magic != "ngpkit-model" || !dim_tok.starts_with("dim=") || !size_tok.starts_with("sizes=")) {
    throw ParseError(source, 1, "expected 'ngpkit-model dim=D sizes=SxPxO'");
  }
  const auto dim = detail::parse_number<std::size_t>(std::string_view(dim_tok).substr(4));
  const auto parts = detail::split(std::string_view(size_tok).substr(6), 'x');
  if (!dim || parts.size() != 3) throw ParseError(source, 1, "malformed model header");
  std::array<std::size_t, 3> sizes{};
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = detail::parse_number<std::size_t>(parts[i]);
    if (!v) throw ParseError(source, 1, "malformed model sizes");
    sizes[i] = *v;
  }
  RelationModel model;
  try {
    model = RelationModel(*dim, sizes[0], sizes[1], sizes[2]);
  } catch (const ValidationError& e) {
    throw ParseError(source, 1, e.what());
  }
  std::size_t lineno = 1;
  for (Domain dom : kDomains) {
    auto& m = model.map(dom);
    for (std::size_t j = 0; j < m.outputs; ++j) {
      ++lineno;
      if (!std::getline(in, line)) throw ParseError(source, lineno, "truncated model file");
      const auto toks = detail::split(detail::trim(line), ' ');
      if (toks.size() != m.inputs + 2 || toks[0].size() != 1 || toks[0][0] != domain_tag(dom)) {
        throw ParseError(source, lineno, "malformed parameter row");
      }
      for (std::size_t k = 0; k <= m.inputs; ++k) {
        auto v = detail::parse_number<double>(toks[k + 1]);
        if (!v || !std::isfinite(*v)) throw ParseError(source, lineno, "bad parameter value");
        (k < m.inputs ? m.weight[j * m.inputs + k] : m.bias[j]) = *v;
      }
    }
  }
  return model;
}

RelationModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path.string());
  return read_model(in, path.string());
}

}  // namespace ngpkit::harness
