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

// ngpkit command-line front end.
//
// Exit codes: 0 success, 1 validation failure (bad usage, bad input files,
// failed checks), 2 internal error.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "ngpkit/checks.hpp"
#include "ngpkit/error.hpp"
#include "ngpkit/harness/config.hpp"
#include "ngpkit/harness/dataset.hpp"
#include "ngpkit/harness/trainer.hpp"
#include "ngpkit/kernels.hpp"
#include "ngpkit/selection.hpp"
#include "ngpkit/theory.hpp"

namespace fs = std::filesystem;
using namespace ngpkit;
using namespace ngpkit::harness;

namespace {

using Clock = std::chrono::steady_clock;

struct Common {
  std::optional<std::uint64_t> seed;
  bool force = false;
};

std::uint64_t resolve_seed(const Common& c, std::optional<std::uint64_t> from_file = {}) {
  if (c.seed) return *c.seed;
  if (from_file) return *from_file;
  if (const char* env = std::getenv("NGPKIT_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("NGPKIT_SEED is not an unsigned integer: " + std::string(env));
  }
  return 0;
}

void claim_output(const fs::path& out, bool force, std::initializer_list<fs::path> inputs = {}) {
  for (const auto& in : inputs) {
    if (!in.empty() && fs::exists(in) && fs::exists(out) && fs::equivalent(in, out)) {
      throw ValidationError("output " + out.string() + " would overwrite an input file");
    }
  }
  if (fs::exists(out) && !force) {
    throw ValidationError("output " + out.string() + " exists; pass --force to overwrite");
  }
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  writer(out);
  if (!out) throw ValidationError("write failed for " + path.string());
}

std::shared_ptr<const Vocabulary> vocab_from(const fs::path& path) {
  return std::make_shared<const Vocabulary>(load_vocabulary(path));
}

std::vector<Fact> facts_by_name(const KgTripleSet& triples, const Vocabulary& vocab) {
  std::vector<Fact> out;
  for (const auto& t : triples) {
    const auto s = vocab.find(Domain::Subject, t.subject);
    const auto p = vocab.find(Domain::Predicate, t.predicate);
    const auto o = vocab.find(Domain::Object, t.object);
    if (!s || !p || !o) {
      throw ValidationError("fact " + t.predicate + "(" + t.subject + "," + t.object +
                            ") names a term outside the vocabulary");
    }
    out.push_back({*s, *p, *o});
  }
  return out;
}

// ---- theory ---------------------------------------------------------------

struct TheoryBuildArgs {
  std::string mode;
  std::size_t kappa = kDefaultKappa;
  fs::path vocab, in, out;
};

int run_theory_build(const TheoryBuildArgs& a, const Common& c) {
  claim_output(a.out, c.force, {a.vocab, a.in});
  const auto vocab = vocab_from(a.vocab);
  const auto triples = load_kg_triples(a.in);
  if (a.mode == "kg-complement") {
    KgBuildReport report;
    const auto store = build_from_kg_complement(triples, vocab, a.kappa, &report);
    save_theory(store, a.out);
    std::cout << "input_triples\t" << report.input_triples << "\nretained_triples\t"
              << report.retained_triples << "\ndropped_triples\t" << report.dropped_triples
              << "\nsigma_pairs\t" << report.sigma_pairs << "\nic_count\t" << store.ic_count()
              << '\n';
  } else {
    const auto store = build_complement_of_facts(vocab, facts_by_name(triples, *vocab));
    save_theory(store, a.out);
    std::cout << "ic_count\t" << store.ic_count() << '\n';
  }
  return 0;
}

int run_theory_stats(const fs::path& file, const fs::path& vocab_path) {
  if (vocab_path.empty()) {
    const auto s = summarize_theory_file(file);
    std::cout << "representation\t" << representation_name(s.representation) << '\n';
    std::cout << "stored_lines\t" << s.stored_lines << '\n';
    if (s.ic_count) {
      std::cout << "ic_count\t" << *s.ic_count << '\n';
    } else {
      std::cout << "ic_count\tunknown (complement file without sizes; pass --vocab)\n";
    }
    return 0;
  }
  const auto vocab = vocab_from(vocab_path);
  const auto stats = theory_stats(load_theory(file, vocab));
  std::cout << "representation\t" << representation_name(stats.representation) << '\n';
  std::cout << "ic_count\t" << stats.ic_count << '\n';
  for (std::uint32_t p = 0; p < stats.per_predicate.size(); ++p) {
    std::cout << "predicate\t" << vocab->name({Domain::Predicate, p}) << '\t'
              << stats.per_predicate[p] << '\n';
  }
  return 0;
}

// ---- training ------------------------------------------------------------

struct ConfigArgs {
  fs::path config;
  std::vector<std::string> sets;
  std::string regularizer, loss, strategy;
  std::optional<std::size_t> rho, epochs;
  std::optional<double> lr, beta1, beta2, retention;
};

void add_config_flags(CLI::App* cmd, ConfigArgs& a) {
  cmd->add_option("--config", a.config, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", a.sets, "override one config key (key=value), repeatable");
  cmd->add_option("--regularizer", a.regularizer, "none | ngp-sl | ngp-dl2");
  cmd->add_option("--loss", a.loss, "selection loss: sl | dl2");
  cmd->add_option("--strategy", a.strategy, "greedy | random | exhaustive");
  cmd->add_option("--rho", a.rho, "ICs selected per sample");
  cmd->add_option("--epochs", a.epochs);
  cmd->add_option("--lr", a.lr, "learning rate");
  cmd->add_option("--beta1", a.beta1);
  cmd->add_option("--beta2", a.beta2);
  cmd->add_option("--retention", a.retention, "fraction of training samples keeping labels");
}

TrainConfig resolve_config(const ConfigArgs& a, const Common& c) {
  TrainConfig cfg;
  bool file_seed = false;
  if (!a.config.empty()) {
    cfg = load_config(a.config);
    std::ifstream in(a.config);
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto key = line.substr(0, eq);
      key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
      if (key == "seed") file_seed = true;
    }
  }
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got " + kv);
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    if (kv.substr(0, eq) == "seed") file_seed = true;
  }
  if (!a.regularizer.empty()) set_config_value(cfg, "regularizer", a.regularizer);
  if (!a.loss.empty()) set_config_value(cfg, "loss", a.loss);
  if (!a.strategy.empty()) set_config_value(cfg, "strategy", a.strategy);
  if (a.rho) cfg.selection.rho = *a.rho;
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.lr) cfg.learning_rate = *a.lr;
  if (a.beta1) cfg.beta1 = *a.beta1;
  if (a.beta2) cfg.beta2 = *a.beta2;
  if (a.retention) cfg.world.retention = *a.retention;
  cfg.world.seed = resolve_seed(c, file_seed ? std::optional(cfg.world.seed) : std::nullopt);
  cfg.validate();
  return cfg;
}

struct TrainArgs {
  ConfigArgs cfg;
  fs::path log = "train_log.csv";
  fs::path model = "model.txt";
  fs::path export_dir;
};

int run_train(const TrainArgs& a, const Common& c) {
  const TrainConfig cfg = resolve_config(a.cfg, c);
  claim_output(a.log, c.force, {a.cfg.config});
  claim_output(a.model, c.force, {a.cfg.config});
  const Dataset data = generate_dataset(cfg.world);
  const TheoryStore store = make_theory(cfg, data);
  const TrainResult result = train(cfg, data, store);
  write_file(a.log, [&](std::ostream& o) { write_log_csv(o, result.log, cfg.eval_k); });
  save_model(result.model, a.model);
  if (!a.export_dir.empty()) {
    fs::create_directories(a.export_dir);
    const auto vocab_path = a.export_dir / "vocab.txt";
    const auto theory_path = a.export_dir / "theory.tsv";
    const auto data_path = a.export_dir / "dataset.tsv";
    const auto cfg_path = a.export_dir / "config.cfg";
    for (const auto& p : {vocab_path, theory_path, data_path, cfg_path}) claim_output(p, c.force);
    save_vocabulary(*data.vocab, vocab_path);
    save_theory(store, theory_path);
    save_dataset(data, data_path);
    write_file(cfg_path, [&](std::ostream& o) { write_config(o, cfg); });
  }
  const auto& last = result.log.back();
  std::cout << "epochs\t" << result.log.size() << "\nfinal_ln\t" << last.mean_ln << "\nfinal_ls\t"
            << last.mean_ls << "\nval_mR@" << cfg.eval_k << '\t' << last.val_mean_recall
            << "\nlog\t" << a.log.string() << "\nmodel\t" << a.model.string() << '\n';
  return 0;
}

struct EvalArgs {
  ConfigArgs cfg;
  fs::path model;
  std::string split = "test";
  std::optional<std::size_t> k;
  fs::path per_predicate;
};

int run_eval(const EvalArgs& a, const Common& c) {
  TrainConfig cfg = resolve_config(a.cfg, c);
  if (a.k) cfg.eval_k = *a.k;
  if (cfg.eval_k == 0) throw ValidationError("--k must be at least 1");
  const Dataset data = generate_dataset(cfg.world);
  const RelationModel model = load_model(a.model);
  const auto& samples = a.split == "val" ? data.val : a.split == "train" ? data.train : data.test;
  if (a.split != "val" && a.split != "train" && a.split != "test") {
    throw ValidationError("--split must be train, val or test");
  }
  const auto m = evaluate_split(model, data, samples, cfg.eval_k);
  const std::size_t skipped = data.vocab->size(Domain::Predicate) - m.mean_recall.classes;
  std::cout << "split\t" << a.split << "\nmR@" << cfg.eval_k << '\t' << m.mean_recall.value
            << "\nzsR@" << cfg.eval_k << '\t' << m.zero_shot.value << "\nzs_pool\t"
            << m.zero_shot.pool_instances << (m.zero_shot.empty_pool ? " (empty)" : "")
            << "\npredicates_counted\t" << m.mean_recall.classes
            << "\npredicates_skipped_no_labels\t" << skipped << '\n';
  if (!a.per_predicate.empty()) {
    claim_output(a.per_predicate, c.force);
    write_file(a.per_predicate, [&](std::ostream& o) {
      o << "predicate,recall@" << cfg.eval_k << '\n';
      for (std::uint32_t p = 0; p < m.mean_recall.per_predicate.size(); ++p) {
        o << data.vocab->name({Domain::Predicate, p}) << ',';
        if (const auto& v = m.mean_recall.per_predicate[p]) {
          o << *v;
        } else {
          o << "skipped";
        }
        o << '\n';
      }
    });
  }
  return 0;
}

// ---- projection and selection ---------------------------------------------

struct ProjectArgs {
  fs::path theory, weights, input, vocab, out;
};

std::string fact_names(const Vocabulary& v, const Fact& f) {
  return v.name({Domain::Subject, f.s}) + '\t' + v.name({Domain::Predicate, f.p}) + '\t' +
         v.name({Domain::Object, f.o});
}

int run_project(const ProjectArgs& a, const Common& c) {
  const auto vocab = vocab_from(a.vocab);
  const auto store = load_theory(a.theory, vocab);
  const auto model = load_model(a.weights);
  const auto file = load_samples(a.input, *vocab);
  if (file.feature_dim != model.feature_dim()) {
    throw ValidationError("dataset dim " + std::to_string(file.feature_dim) +
                          " does not match model dim " + std::to_string(model.feature_dim()));
  }
  std::ostringstream body;
  body << "sample_id\tslot\tsubject\tpredicate\tobject\tlikelihood\n";
  for (const auto& s : file.samples) {
    const auto w = forward(model, s);
    for (std::size_t slot = 0; slot < w.slot_count(); ++slot) {
      body << s.id << '\t' << slot << '\t';
      if (auto f = itr_project(w, slot, store)) {
        body << fact_names(*vocab, f->fact) << '\t' << std::setprecision(17) << f->likelihood
             << '\n';
      } else {
        body << "-\t-\t-\t-\n";
      }
    }
  }
  if (a.out.empty()) {
    std::cout << body.str();
  } else {
    claim_output(a.out, c.force, {a.theory, a.weights, a.input, a.vocab});
    write_file(a.out, [&](std::ostream& o) { o << body.str(); });
  }
  return 0;
}

struct SelectArgs {
  fs::path theory, weights, input, vocab;
  std::size_t rho = 3;
  std::string loss = "sl", strategy = "greedy", budget = "sample";
  std::size_t limit = 10;
};

int run_select(const SelectArgs& a, const Common& c) {
  SelectionConfig cfg;
  cfg.rho = a.rho;
  const auto kind = parse_loss_kind(a.loss);
  const auto strategy = parse_strategy(a.strategy);
  if (!kind) throw ValidationError("--loss must be sl or dl2");
  if (!strategy) throw ValidationError("--strategy must be greedy, random or exhaustive");
  if (a.budget != "sample" && a.budget != "slot") throw ValidationError("--budget must be sample or slot");
  cfg.loss = *kind;
  cfg.strategy = *strategy;
  cfg.budget = a.budget == "sample" ? SelectionBudget::SampleGlobal : SelectionBudget::PerSlot;
  cfg.validate();
  const auto vocab = vocab_from(a.vocab);
  const auto store = load_theory(a.theory, vocab);
  const auto model = load_model(a.weights);
  const auto file = load_samples(a.input, *vocab);
  std::mt19937_64 rng(resolve_seed(c));
  std::cout << "sample_id\tslot\tic\tlikelihood\tsample_loss\n";
  std::size_t shown = 0;
  for (const auto& s : file.samples) {
    if (shown++ == a.limit) break;
    const auto w = forward(model, s);
    const auto picked = select_for_sample(w, store, cfg, &rng);
    const double loss = sample_logic_loss(cfg.loss, picked, w);
    if (picked.empty()) std::cout << s.id << "\t-\t-\t-\t0\n";
    for (const auto& p : picked) {
      std::cout << s.id << '\t' << p.slot << "\tnot " << vocab->format_fact(p.ic.fact) << '\t'
                << w.likelihood(p.slot, p.ic.fact) << '\t' << loss << '\n';
    }
  }
  return 0;
}

// ---- sweep, check, bench --------------------------------------------------

struct SweepArgs {
  ConfigArgs cfg;
  fs::path out = "sweep.csv";
  std::size_t jobs = 1;
  std::vector<std::string> regularizers{"none", "ngp-sl"};
};

int run_sweep(const SweepArgs& a, const Common& c) {
  const TrainConfig cfg = resolve_config(a.cfg, c);
  claim_output(a.out, c.force, {a.cfg.config});
  std::vector<Regularizer> regs;
  for (const auto& r : a.regularizers) {
    auto v = parse_regularizer(r);
    if (!v) throw ValidationError("unknown regularizer '" + r + "'");
    regs.push_back(*v);
  }
  const auto rows = run_reduction_sweep(cfg, regs, a.jobs);
  write_file(a.out, [&](std::ostream& o) { write_sweep_csv(o, rows, cfg.eval_k); });
  std::cout << "rows\t" << rows.size() << "\nout\t" << a.out.string() << '\n';
  return 0;
}

int run_check(const std::string& suite, std::size_t cases, const Common& c) {
  const auto reports = run_checks(suite, cases, resolve_seed(c));
  bool ok = true;
  std::cout << std::left << std::setw(16) << "suite" << std::setw(8) << "cases" << std::setw(10)
            << "failures" << std::setw(14) << "max_error" << std::setw(10) << "seconds"
            << "result\n";
  for (const auto& r : reports) {
    ok = ok && r.passed();
    std::cout << std::left << std::setw(16) << r.suite << std::setw(8) << r.cases << std::setw(10)
              << r.failures << std::setw(14) << std::setprecision(3) << r.max_error
              << std::setw(10) << std::fixed << std::setprecision(2) << r.seconds
              << std::defaultfloat << (r.passed() ? "PASS" : "FAIL");
    if (!r.note.empty()) std::cout << "  (" << r.note << ')';
    std::cout << '\n';
  }
  return ok ? 0 : 1;
}

struct BenchArgs {
  std::size_t subjects = 150, predicates = 50, objects = 150;
  std::size_t positives = 100000;
  std::size_t queries = 1000000;
  std::size_t samples = 10000;
  std::size_t rho = 3;
  std::size_t jobs = 1;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int run_bench(const BenchArgs& a, const Common& c) {
  std::mt19937_64 rng(resolve_seed(c));
  auto names = [](const char* stem, std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(stem + std::to_string(i));
    return v;
  };
  const auto vocab = std::make_shared<const Vocabulary>(
      names("s", a.subjects), names("p", a.predicates), names("o", a.objects));
  const std::uint64_t space = vocab->fact_space();
  if (a.positives > space) throw ValidationError("--positives exceeds the fact space");
  std::set<std::uint64_t> keys;
  std::uniform_int_distribution<std::uint64_t> any(0, space - 1);
  while (keys.size() < a.positives) keys.insert(any(rng));
  std::vector<Fact> positives;
  for (auto k : keys) positives.push_back(vocab->unpack(k));

  auto t0 = Clock::now();
  const auto store = build_complement_of_facts(vocab, positives);
  const double build_s = seconds_since(t0);

  std::vector<Fact> probes(std::min<std::size_t>(a.queries, 1 << 20));
  for (auto& f : probes) f = vocab->unpack(any(rng));
  const std::size_t jobs = std::max<std::size_t>(1, a.jobs);
  std::atomic<std::uint64_t> hits{0};
  t0 = Clock::now();
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t] {
      std::uint64_t local = 0;
      for (std::size_t q = t; q < a.queries; q += jobs) {
        local += store.contains_ic(probes[q % probes.size()]) ? 1 : 0;
      }
      hits += local;
    });
  }
  for (auto& th : pool) th.join();
  const double query_s = seconds_since(t0);

  SelectionConfig cfg;
  cfg.rho = a.rho;
  std::gamma_distribution<double> gamma(1.0, 1.0);
  auto dist = [&](std::size_t n) {
    std::vector<double> v(n);
    double total = 0.0;
    for (auto& x : v) total += (x = gamma(rng));
    for (auto& x : v) x /= total;
    return v;
  };
  std::vector<PredictionVector> inputs;
  for (std::size_t i = 0; i < a.samples; ++i) {
    inputs.emplace_back(dist(a.subjects), dist(a.predicates), dist(a.objects));
  }
  std::size_t picked = 0;
  t0 = Clock::now();
  for (const auto& w : inputs) picked += greedy_select(w, 0, store, cfg).size();
  const double select_s = seconds_since(t0);

  std::cout << "kernel_backend\t" << kernels::backend_name(kernels::active_backend()) << '\n'
            << "vocabulary\t" << a.subjects << 'x' << a.predicates << 'x' << a.objects << '\n'
            << "positives\t" << a.positives << "\nic_count\t" << store.ic_count() << '\n'
            << "build_seconds\t" << build_s << '\n'
            << "membership_queries_per_second\t" << static_cast<double>(a.queries) / query_s
            << "\nmembership_hits\t" << hits.load() << '\n'
            << "greedy_ms_per_sample\t" << 1e3 * select_s / static_cast<double>(a.samples)
            << "\ngreedy_selected_total\t" << picked << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ngpkit: logic-based losses, IC theories and guided constraint selection"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", common.seed, "random seed (default: NGPKIT_SEED or 0)");
    cmd->add_flag("--force", common.force, "overwrite existing output files");
  };

  auto* theory = app.add_subcommand("theory", "build or inspect IC theories");
  theory->require_subcommand(1);
  TheoryBuildArgs tb;
  auto* tbuild = theory->add_subcommand("build", "build a theory file");
  tbuild->add_option("--mode", tb.mode, "kg-complement | fact-complement")
      ->required()
      ->check(CLI::IsMember({"kg-complement", "fact-complement"}));
  tbuild->add_option("--kappa", tb.kappa, "sparsity threshold for kg-complement");
  tbuild->add_option("--vocab", tb.vocab)->required()->check(CLI::ExistingFile);
  tbuild->add_option("--in", tb.in, "triples TSV")->required()->check(CLI::ExistingFile);
  tbuild->add_option("--out", tb.out)->required();
  add_common(tbuild);
  fs::path stats_file, stats_vocab;
  auto* tstats = theory->add_subcommand("stats", "print IC counts of a theory file");
  tstats->add_option("file", stats_file)->required()->check(CLI::ExistingFile);
  tstats->add_option("--vocab", stats_vocab, "vocabulary for per-predicate counts")
      ->check(CLI::ExistingFile);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "train on a synthetic world");
  add_config_flags(train_cmd, ta.cfg);
  train_cmd->add_option("--log", ta.log, "per-epoch CSV log");
  train_cmd->add_option("--model", ta.model, "final parameters");
  train_cmd->add_option("--export", ta.export_dir, "also write vocab, theory, dataset, config");
  add_common(train_cmd);

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "score a model on a regenerated split");
  add_config_flags(eval_cmd, ea.cfg);
  eval_cmd->add_option("--model", ea.model)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", ea.split, "train | val | test");
  eval_cmd->add_option("--k", ea.k, "cut-off (default eval_k)");
  eval_cmd->add_option("--per-predicate", ea.per_predicate, "per-predicate recall CSV");
  add_common(eval_cmd);

  ProjectArgs pa;
  auto* project_cmd = app.add_subcommand("project", "most likely fact allowed by a theory");
  project_cmd->add_option("--theory", pa.theory)->required()->check(CLI::ExistingFile);
  project_cmd->add_option("--weights", pa.weights, "model file")->required()->check(CLI::ExistingFile);
  project_cmd->add_option("--input", pa.input, "dataset TSV")->required()->check(CLI::ExistingFile);
  project_cmd->add_option("--vocab", pa.vocab)->required()->check(CLI::ExistingFile);
  project_cmd->add_option("--out", pa.out, "TSV output (default stdout)");
  add_common(project_cmd);

  SelectArgs sa;
  auto* select_cmd = app.add_subcommand("select", "show the ICs selected per sample");
  select_cmd->add_option("--theory", sa.theory)->required()->check(CLI::ExistingFile);
  select_cmd->add_option("--weights", sa.weights, "model file")->required()->check(CLI::ExistingFile);
  select_cmd->add_option("--input", sa.input, "dataset TSV")->required()->check(CLI::ExistingFile);
  select_cmd->add_option("--vocab", sa.vocab)->required()->check(CLI::ExistingFile);
  select_cmd->add_option("--rho", sa.rho);
  select_cmd->add_option("--loss", sa.loss, "sl | dl2");
  select_cmd->add_option("--strategy", sa.strategy, "greedy | random | exhaustive");
  select_cmd->add_option("--budget", sa.budget, "sample | slot");
  select_cmd->add_option("--limit", sa.limit, "samples to show");
  add_common(select_cmd);

  SweepArgs swa;
  auto* sweep_cmd = app.add_subcommand("sweep", "label-reduction sweep");
  add_config_flags(sweep_cmd, swa.cfg);
  sweep_cmd->add_option("--out", swa.out, "results CSV");
  sweep_cmd->add_option("--jobs", swa.jobs, "parallel cells");
  sweep_cmd->add_option("--regularizers", swa.regularizers, "e.g. none ngp-sl ngp-dl2");
  add_common(sweep_cmd);

  std::string suite = "all";
  std::size_t cases = 500;
  auto* check_cmd = app.add_subcommand("check", "randomized property suites");
  check_cmd->add_option("--suite", suite)->check(CLI::IsMember(check_suite_names()));
  check_cmd->add_option("--cases", cases);
  add_common(check_cmd);

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "theory-scale and selection benchmarks");
  bench_cmd->add_option("--subjects", ba.subjects);
  bench_cmd->add_option("--predicates", ba.predicates);
  bench_cmd->add_option("--objects", ba.objects);
  bench_cmd->add_option("--positives", ba.positives);
  bench_cmd->add_option("--queries", ba.queries);
  bench_cmd->add_option("--samples", ba.samples);
  bench_cmd->add_option("--rho", ba.rho);
  bench_cmd->add_option("--jobs", ba.jobs, "threads for membership queries");
  add_common(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (tbuild->parsed()) return run_theory_build(tb, common);
    if (tstats->parsed()) return run_theory_stats(stats_file, stats_vocab);
    if (train_cmd->parsed()) return run_train(ta, common);
    if (eval_cmd->parsed()) return run_eval(ea, common);
    if (project_cmd->parsed()) return run_project(pa, common);
    if (select_cmd->parsed()) return run_select(sa, common);
    if (sweep_cmd->parsed()) return run_sweep(swa, common);
    if (check_cmd->parsed()) return run_check(suite, cases, common);
    if (bench_cmd->parsed()) return run_bench(ba, common);
  } catch (const SaturatedGradientError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
