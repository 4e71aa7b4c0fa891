#pragma once

// Command-line front end: gen | run | bench | sweep | validate.
//
// Experiment settings come from an optional JSON config file, then the
// CASCADE_GUARD_SEED environment variable (seed only), then flags.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cascade_guard/cascade.hpp"
#include "cascade_guard/dataset.hpp"
#include "cascade_guard/errors.hpp"
#include "cascade_guard/harness.hpp"

namespace cascade_guard::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitValidateFailed = 2;

struct SweepSpec {
  std::string axis;
  std::vector<double> values;
};

struct FileConfig {
  ExperimentConfig experiment;
  std::optional<SweepSpec> sweep;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

inline QueryKind query_from(const std::string& s) {
  const auto q = parse_query(s);
  if (!q) throw ConfigError("unknown query '" + s + "' (expected at, pt or rt)");
  return *q;
}

inline Method method_from(const std::string& s) {
  const auto m = parse_method(s);
  if (!m) throw ConfigError("unknown method '" + s + "'");
  return *m;
}

inline EstimatorChoice estimator_from(const std::string& s) {
  const auto e = parse_estimator(s);
  if (!e) throw ConfigError("unknown estimator '" + s + "'");
  return *e;
}

inline GeneratorSpec generator_from(const json& j) {
  reject_unknown(j, {"kind", "n", "pos_frac", "classes", "seed", "adversarial", "noise"}, "generator");
  GeneratorSpec g;
  if (j.contains("kind")) g.kind = get_as<std::string>(j, "kind");
  if (j.contains("n")) g.n = get_as<std::size_t>(j, "n");
  if (j.contains("pos_frac")) g.pos_frac = get_as<double>(j, "pos_frac");
  if (j.contains("classes")) g.classes = get_as<std::uint32_t>(j, "classes");
  if (j.contains("seed")) g.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("noise")) g.noise = get_as<double>(j, "noise");
  if (j.contains("adversarial")) {
    const auto& a = j.at("adversarial");
    reject_unknown(a, {"start_rank", "width"}, "generator.adversarial");
    g.adversarial_start = a.contains("start_rank") ? get_as<std::size_t>(a, "start_rank") : 0;
    g.adversarial_width = a.contains("width") ? get_as<std::size_t>(a, "width") : 0;
  }
  return g;
}

}  // namespace detail

/// Parses a config document. Unknown keys are errors.
inline FileConfig parse_config(const nlohmann::json& j) {
  using detail::get_as;
  detail::reject_unknown(j,
                         {"dataset", "generator", "query", "target", "delta", "budget", "method", "M", "c", "eta",
                          "beta", "r", "estimator", "naive_sample", "runs", "seed", "jobs", "out", "sweep"},
                         "config");
  FileConfig fc;
  auto& cfg = fc.experiment;
  if (j.contains("dataset")) cfg.dataset_path = get_as<std::string>(j, "dataset");
  if (j.contains("generator")) cfg.generator = detail::generator_from(j.at("generator"));
  if (j.contains("query")) cfg.query.kind = detail::query_from(get_as<std::string>(j, "query"));
  if (j.contains("target")) cfg.query.target = get_as<double>(j, "target");
  if (j.contains("delta")) cfg.query.delta = get_as<double>(j, "delta");
  if (j.contains("budget") && !j.at("budget").is_null()) cfg.query.budget = get_as<std::size_t>(j, "budget");
  if (j.contains("method")) cfg.method = detail::method_from(get_as<std::string>(j, "method"));
  if (j.contains("M")) cfg.params.M = get_as<std::size_t>(j, "M");
  if (j.contains("c") && !j.at("c").is_null()) cfg.params.c = get_as<std::size_t>(j, "c");
  if (j.contains("eta")) cfg.params.eta = get_as<std::size_t>(j, "eta");
  if (j.contains("beta")) cfg.params.beta = get_as<double>(j, "beta");
  if (j.contains("r")) cfg.params.r = get_as<std::size_t>(j, "r");
  if (j.contains("estimator")) cfg.params.estimator = detail::estimator_from(get_as<std::string>(j, "estimator"));
  if (j.contains("naive_sample")) cfg.params.naive_sample = get_as<std::size_t>(j, "naive_sample");
  if (j.contains("runs")) cfg.runs = get_as<std::size_t>(j, "runs");
  if (j.contains("seed")) cfg.base_seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("jobs")) cfg.jobs = get_as<std::size_t>(j, "jobs");
  if (j.contains("out")) cfg.out = get_as<std::string>(j, "out");
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    detail::reject_unknown(s, {"axis", "values"}, "sweep");
    fc.sweep = SweepSpec{get_as<std::string>(s, "axis"), get_as<std::vector<double>>(s, "values")};
  }
  return fc;
}

inline FileConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

namespace detail {

/// Raw flag values; an option applies only when given on the command line.
struct ExperimentFlags {
  std::string config, dataset, query, method, estimator, out;
  double target = 0, delta = 0, beta = 0;
  std::size_t budget = 0, M = 0, c = 0, eta = 0, r = 0, runs = 0, jobs = 0;
  std::uint64_t seed = 0;
  std::string axis;
  std::vector<double> values;
  CLI::App* app = nullptr;

  void attach(CLI::App* sub, bool with_sweep) {
    app = sub;
    sub->add_option("--config", config, "JSON config file");
    sub->add_option("--dataset", dataset, "dataset CSV");
    sub->add_option("--query", query, "at | pt | rt");
    sub->add_option("--target", target, "quality target T");
    sub->add_option("--delta", delta, "failure probability");
    sub->add_option("--budget", budget, "oracle label budget k (pt/rt)");
    sub->add_option("--method", method, "naive | u | a | aa | am");
    sub->add_option("--M", M, "candidate thresholds");
    sub->add_option("--c", c, "minimum samples per threshold");
    sub->add_option("--eta", eta, "tolerated rejections");
    sub->add_option("--beta", beta, "minimum positive density");
    sub->add_option("--r", r, "density window size");
    sub->add_option("--estimator", estimator, "betting_wr | betting_iid | hoeffding | chernoff");
    sub->add_option("--runs", runs, "repetitions");
    sub->add_option("--seed", seed, "base seed");
    sub->add_option("--jobs", jobs, "worker threads");
    sub->add_option("--out", out, "output path");
    if (with_sweep) {
      sub->add_option("--axis", axis, "M | c | eta | beta | T | k");
      sub->add_option("--values", values, "axis values")->delimiter(',');
    }
  }

  bool given(const char* name) const { return app->count(name) > 0; }

  FileConfig resolve() const {
    FileConfig fc = given("--config") ? load_config(config) : FileConfig{};
    auto& cfg = fc.experiment;
    if (const char* env = std::getenv("CASCADE_GUARD_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        cfg.base_seed = std::stoull(env, &used);
        if (env[used] != '\0') throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("CASCADE_GUARD_SEED is not an unsigned integer: ") + env);
      }
    }
    if (given("--dataset")) {
      cfg.dataset_path = dataset;
      cfg.generator.reset();
    }
    if (given("--query")) cfg.query.kind = query_from(query);
    if (given("--target")) cfg.query.target = target;
    if (given("--delta")) cfg.query.delta = delta;
    if (given("--budget")) cfg.query.budget = budget;
    if (given("--method")) cfg.method = method_from(method);
    if (given("--M")) cfg.params.M = M;
    if (given("--c")) cfg.params.c = c;
    if (given("--eta")) cfg.params.eta = eta;
    if (given("--beta")) cfg.params.beta = beta;
    if (given("--r")) cfg.params.r = r;
    if (given("--estimator")) cfg.params.estimator = estimator_from(estimator);
    if (given("--runs")) cfg.runs = runs;
    if (given("--seed")) cfg.base_seed = seed;
    if (given("--jobs")) cfg.jobs = jobs;
    if (given("--out")) cfg.out = out;
    if (app->get_option_no_throw("--axis") != nullptr && (given("--axis") || given("--values"))) {
      SweepSpec s = fc.sweep.value_or(SweepSpec{});
      if (given("--axis")) s.axis = axis;
      if (given("--values")) s.values = values;
      fc.sweep = s;
    }
    // An AT query carries no budget even if a shared config sets one.
    if (cfg.query.kind == QueryKind::AT) cfg.query.budget.reset();
    if (cfg.query.kind != QueryKind::AT && !cfg.query.budget) cfg.query.budget = 400;
    cfg.validate();
    return fc;
  }
};

struct GenFlags {
  std::string kind = "synthetic", input, out;
  std::size_t n = 10000, start_rank = 0, width = 100;
  std::uint32_t classes = 2;
  double pos_frac = 0.05, sigma = 0.0;
  std::uint64_t seed = 0;
};

inline Dataset generate(const GenFlags& g) {
  if (g.kind == "synthetic") return gen_synthetic(g.n, g.pos_frac, g.seed);
  if (g.kind == "calibrated") return gen_calibrated(g.n, g.classes, g.seed);
  if (g.kind == "adversarial" || g.kind == "noise") {
    if (g.input.empty()) throw ConfigError("gen --kind " + g.kind + " needs --input");
    const Dataset base = load_dataset(g.input);
    if (g.kind == "adversarial") return gen_adversarial(base, g.start_rank, g.width);
    return inject_noise(base, g.sigma, g.seed);
  }
  throw ConfigError("unknown generator kind '" + g.kind + "'");
}

inline std::string sweep_path(const std::string& out, const std::string& axis, double v) {
  std::string stem = out;
  if (stem.size() >= 5 && stem.compare(stem.size() - 5, 5, ".json") == 0) stem.resize(stem.size() - 5);
  std::ostringstream name;
  name << stem << '_' << axis << '_' << v << ".json";
  return name.str();
}

}  // namespace detail

/// Runs one command line; returns the process exit code.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Threshold selection for proxy/oracle model cascades with statistical guarantees"};
  app.require_subcommand(1);

  detail::GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "write a dataset CSV");
  gen_cmd->add_option("--kind", gen.kind, "synthetic | adversarial | noise | calibrated");
  gen_cmd->add_option("--n", gen.n, "records");
  gen_cmd->add_option("--pos-frac", gen.pos_frac, "fraction of positives (synthetic)");
  gen_cmd->add_option("--classes", gen.classes, "label classes (calibrated)");
  gen_cmd->add_option("--input", gen.input, "input dataset (adversarial, noise)");
  gen_cmd->add_option("--start-rank", gen.start_rank, "first ascending-score rank to flip (adversarial)");
  gen_cmd->add_option("--width", gen.width, "ranks to flip (adversarial)");
  gen_cmd->add_option("--sigma", gen.sigma, "score noise std (noise)");
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--out", gen.out, "output CSV")->required();

  detail::ExperimentFlags run_flags, bench_flags, sweep_flags;
  auto* run_cmd = app.add_subcommand("run", "one seeded run; prints the outcome JSON");
  run_flags.attach(run_cmd, false);
  auto* bench_cmd = app.add_subcommand("bench", "repeated runs; writes a JSON report and CSV");
  bench_flags.attach(bench_cmd, false);
  auto* sweep_cmd = app.add_subcommand("sweep", "one report per parameter value");
  sweep_flags.attach(sweep_cmd, true);

  std::size_t trials = 2000, vjobs = 1;
  std::uint64_t vseed = 1;
  std::string vout;
  auto* validate_cmd = app.add_subcommand("validate", "Monte Carlo check of estimator false-positive rates");
  validate_cmd->add_option("--trials", trials, "trials per grid cell (>= 500)");
  validate_cmd->add_option("--seed", vseed, "seed");
  validate_cmd->add_option("--jobs", vjobs, "worker threads");
  validate_cmd->add_option("--out", vout, "also write the summary JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*gen_cmd) {
      const Dataset ds = detail::generate(gen);
      save_dataset(ds, gen.out);
      out << "wrote " << ds.size() << " records (" << ds.positives() << " positive) to " << gen.out << "\n";
      return kExitOk;
    }
    if (*run_cmd) {
      const auto fc = run_flags.resolve();
      const auto& cfg = fc.experiment;
      const Dataset ds = load_experiment_dataset(cfg);
      const std::uint64_t seed = derive_seed(cfg.base_seed, 0);
      const auto outcome = run_once(ds, cfg, seed);
      nlohmann::ordered_json j;
      j["config"] = config_to_json(cfg);
      j["seed"] = seed;
      j["outcome"] = outcome_to_json(outcome);
      const auto row = evaluate_run(ds, cfg, seed, outcome);
      j["utility"] = row.utility;
      j["met_target"] = row.met_target;
      const std::string text = j.dump(2);
      if (!cfg.out.empty()) {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + cfg.out + "'");
        f << text << '\n';
      }
      out << text << "\n";
      return kExitOk;
    }
    if (*bench_cmd) {
      const auto fc = bench_flags.resolve();
      const auto& cfg = fc.experiment;
      if (cfg.out.empty()) throw ConfigError("bench needs --out");
      const auto rep = run_trials(cfg);
      save_report(rep, cfg.out);
      out << "runs=" << rep.runs.size() << " mean_utility=" << rep.aggregates.mean_utility
          << " met_fraction=" << rep.aggregates.met_fraction << "\n";
      return kExitOk;
    }
    if (*sweep_cmd) {
      const auto fc = sweep_flags.resolve();
      const auto& cfg = fc.experiment;
      if (!fc.sweep || fc.sweep->axis.empty() || fc.sweep->values.empty()) {
        throw ConfigError("sweep needs --axis and --values");
      }
      if (cfg.out.empty()) throw ConfigError("sweep needs --out");
      const Dataset ds = load_experiment_dataset(cfg);
      const auto reports = sweep(cfg, ds, fc.sweep->axis, fc.sweep->values);
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto path = detail::sweep_path(cfg.out, fc.sweep->axis, fc.sweep->values[i]);
        save_report(reports[i], path);
        out << fc.sweep->axis << "=" << fc.sweep->values[i] << " mean_utility=" << reports[i].aggregates.mean_utility
            << " met_fraction=" << reports[i].aggregates.met_fraction << " -> " << path << "\n";
      }
      return kExitOk;
    }
    if (*validate_cmd) {
      const auto summary = validate_estimators(trials, vseed, vjobs);
      const std::string text = validation_to_json(summary).dump(2);
      if (!vout.empty()) {
        std::ofstream f(vout, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + vout + "'");
        f << text << '\n';
      }
      out << text << "\n";
      return summary.pass ? kExitOk : kExitValidateFailed;
    }
  } catch (const std::invalid_argument& e) {  // ConfigError, ParameterError, InvalidTaskError
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace cascade_guard::cli
