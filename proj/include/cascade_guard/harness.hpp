#pragma once

// Repeated-run experiment engine. The harness owns the dataset and builds a
// fresh oracle per run, so algorithms never see ground truth directly.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade_guard/cascade.hpp"
#include "cascade_guard/dataset.hpp"
#include "cascade_guard/errors.hpp"
#include "cascade_guard/estimation.hpp"
#include "cascade_guard/parallel.hpp"
#include "cascade_guard/rng.hpp"
#include "cascade_guard/sampling.hpp"

namespace cascade_guard {

/// Recipe for an in-memory dataset: a base generator plus optional
/// transforms, applied in the order adversarial, noise.
struct GeneratorSpec {
  std::string kind = "synthetic";  // synthetic | calibrated
  std::size_t n = 10000;
  double pos_frac = 0.05;
  std::uint32_t classes = 2;
  std::uint64_t seed = 0;
  std::optional<std::size_t> adversarial_start;
  std::size_t adversarial_width = 0;
  double noise = 0.0;

  Dataset make() const {
    Dataset ds;
    if (kind == "synthetic") {
      ds = gen_synthetic(n, pos_frac, seed);
    } else if (kind == "calibrated") {
      ds = gen_calibrated(n, classes, seed);
    } else {
      throw ConfigError("unknown generator kind '" + kind + "'");
    }
    if (adversarial_start) ds = gen_adversarial(ds, *adversarial_start, adversarial_width);
    if (noise > 0.0) ds = inject_noise(ds, noise, derive_seed(seed, 1));
    return ds;
  }
};

struct ExperimentConfig {
  std::string dataset_path;  // used when no generator is given
  std::optional<GeneratorSpec> generator;
  QuerySpec query;
  Method method = Method::A;
  AlgoParams params;
  std::size_t runs = 50;
  std::uint64_t base_seed = 0;
  std::size_t jobs = 1;  // never affects results
  std::string out;

  void validate() const {
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (!method_applies(query.kind, method)) {
      throw ConfigError("method '" + std::string(to_string(method)) + "' does not apply to " +
                        std::string(to_string(query.kind)) + " queries");
    }
    try {
      query.validate();
      params.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
};

inline Dataset load_experiment_dataset(const ExperimentConfig& cfg) {
  if (cfg.generator) return cfg.generator->make();
  if (cfg.dataset_path.empty()) throw ConfigError("no dataset or generator given");
  return load_dataset(cfg.dataset_path);
}

struct RunRow {
  std::uint64_t seed = 0;
  std::map<std::uint32_t, double> thresholds;
  std::map<std::uint32_t, Sentinel> sentinels;
  std::size_t cost = 0;
  double utility = 0.0;
  bool met_target = false;
  std::optional<bool> met_target_dense;  // RT only
};

struct Aggregates {
  double mean_utility = 0.0;
  double std_utility = 0.0;
  double met_fraction = 0.0;
  std::optional<double> met_fraction_dense;
};

struct ExperimentReport {
  nlohmann::ordered_json config;
  std::vector<RunRow> runs;
  Aggregates aggregates;
};

// ---------------------------------------------------------------------------
// Evaluation against ground truth

/// Fraction of records whose final AT answer equals the oracle label.
inline double answer_accuracy(const Dataset& ds, const CascadeOutcome& out) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) ok += out.answer[i] == ds[i].oracle_label ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(ds.size());
}

inline RunRow evaluate_run(const Dataset& ds, const ExperimentConfig& cfg, std::uint64_t seed,
                           const CascadeOutcome& out) {
  RunRow row;
  row.seed = seed;
  row.thresholds = out.thresholds;
  row.sentinels = out.sentinels;
  row.cost = out.cost;
  const double T = cfg.query.target;
  switch (cfg.query.kind) {
    case QueryKind::AT:
      row.utility = static_cast<double>(ds.size() - out.cost) / static_cast<double>(ds.size());
      row.met_target = answer_accuracy(ds, out) >= T;
      break;
    case QueryKind::PT: {
      const double rho = out.threshold();
      row.utility = metric_at(ds, Metric::Recall, rho).value_or(0.0);
      const auto p = metric_at(ds, Metric::Precision, rho);
      row.met_target = !p || *p >= T;  // empty claim: vacuously met
      break;
    }
    case QueryKind::RT: {
      const double rho = out.threshold();
      row.utility = metric_at(ds, Metric::Precision, rho).value_or(0.0);
      const auto r = metric_at(ds, Metric::Recall, rho);
      row.met_target = !r || *r >= T;
      const auto rd = dense_recall(ds, cfg.params.beta, cfg.params.r, rho);
      row.met_target_dense = !rd || *rd >= T;
      break;
    }
  }
  return row;
}

inline Aggregates aggregate(const std::vector<RunRow>& rows) {
  Aggregates agg;
  if (rows.empty()) return agg;
  const double n = static_cast<double>(rows.size());
  double sum = 0.0;
  std::size_t met = 0;
  std::size_t met_dense = 0;
  bool has_dense = false;
  for (const auto& r : rows) {
    sum += r.utility;
    met += r.met_target ? 1 : 0;
    if (r.met_target_dense) {
      has_dense = true;
      met_dense += *r.met_target_dense ? 1 : 0;
    }
  }
  agg.mean_utility = sum / n;
  double sq = 0.0;
  for (const auto& r : rows) sq += (r.utility - agg.mean_utility) * (r.utility - agg.mean_utility);
  agg.std_utility = std::sqrt(sq / n);
  agg.met_fraction = static_cast<double>(met) / n;
  if (has_dense) agg.met_fraction_dense = static_cast<double>(met_dense) / n;
  return agg;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  if (cfg.generator) {
    const auto& g = *cfg.generator;
    nlohmann::ordered_json gj{{"kind", g.kind}, {"n", g.n}, {"seed", g.seed}};
    if (g.kind == "synthetic") gj["pos_frac"] = g.pos_frac;
    if (g.kind == "calibrated") gj["classes"] = g.classes;
    if (g.adversarial_start) {
      gj["adversarial"] = {{"start_rank", *g.adversarial_start}, {"width", g.adversarial_width}};
    }
    if (g.noise > 0.0) gj["noise"] = g.noise;
    j["generator"] = gj;
  } else {
    j["dataset"] = cfg.dataset_path;
  }
  j["query"] = to_string(cfg.query.kind);
  j["target"] = cfg.query.target;
  j["delta"] = cfg.query.delta;
  j["budget"] = cfg.query.budget ? nlohmann::ordered_json(*cfg.query.budget) : nlohmann::ordered_json(nullptr);
  j["method"] = to_string(cfg.method);
  j["M"] = cfg.params.M;
  j["c"] = cfg.params.c ? nlohmann::ordered_json(*cfg.params.c) : nlohmann::ordered_json(nullptr);
  j["eta"] = cfg.params.eta;
  j["beta"] = cfg.params.beta;
  j["r"] = cfg.params.r;
  j["estimator"] = to_string(cfg.params.estimator);
  j["naive_sample"] = cfg.params.naive_sample;
  j["runs"] = cfg.runs;
  j["seed"] = cfg.base_seed;
  return j;
}

inline nlohmann::ordered_json thresholds_json(const std::map<std::uint32_t, double>& th,
                                              const std::map<std::uint32_t, Sentinel>& sent) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [cls, rho] : th) {
    nlohmann::ordered_json e;
    e["threshold"] = std::isfinite(rho) ? nlohmann::ordered_json(rho) : nlohmann::ordered_json(nullptr);
    e["sentinel"] = to_string(sent.at(cls));
    j[std::to_string(cls)] = e;
  }
  return j;
}

inline nlohmann::ordered_json outcome_to_json(const CascadeOutcome& out) {
  nlohmann::ordered_json j;
  j["thresholds"] = thresholds_json(out.thresholds, out.sentinels);
  j["cost"] = out.cost;
  j["labeled"] = out.labeled.size();
  std::size_t returned = 0;
  for (auto a : out.answer) returned += a != 0 ? 1 : 0;
  j["answer_nonzero"] = returned;
  return j;
}

inline nlohmann::ordered_json report_to_json(const ExperimentReport& rep) {
  nlohmann::ordered_json j;
  j["config"] = rep.config;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& r : rep.runs) {
    nlohmann::ordered_json rj;
    rj["seed"] = r.seed;
    rj["thresholds"] = thresholds_json(r.thresholds, r.sentinels);
    rj["cost"] = r.cost;
    rj["utility"] = r.utility;
    rj["met_target"] = r.met_target;
    rj["met_target_dense"] = r.met_target_dense ? nlohmann::ordered_json(*r.met_target_dense) : nlohmann::ordered_json(nullptr);
    runs.push_back(rj);
  }
  j["runs"] = runs;
  nlohmann::ordered_json agg;
  agg["mean_utility"] = rep.aggregates.mean_utility;
  agg["std_utility"] = rep.aggregates.std_utility;
  agg["met_fraction"] = rep.aggregates.met_fraction;
  if (rep.aggregates.met_fraction_dense) agg["met_fraction_dense"] = *rep.aggregates.met_fraction_dense;
  j["aggregates"] = agg;
  return j;
}

namespace detail {
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

/// One row per run: seed,class,threshold,sentinel,cost,utility,met_target,met_target_dense
/// (one line per class for per-class thresholds).
inline void write_report_csv(std::ostream& out, const ExperimentReport& rep) {
  out << "seed,class,threshold,sentinel,cost,utility,met_target,met_target_dense\n";
  for (const auto& r : rep.runs) {
    for (const auto& [cls, rho] : r.thresholds) {
      out << r.seed << ',' << cls << ',' << detail::format_double(rho) << ',' << to_string(r.sentinels.at(cls)) << ','
          << r.cost << ',' << detail::format_double(r.utility) << ',' << (r.met_target ? 1 : 0) << ','
          << (r.met_target_dense ? (*r.met_target_dense ? "1" : "0") : "") << '\n';
    }
  }
}

/// Writes `<path>` (JSON) and the CSV companion next to it (`.json` replaced
/// by `.csv`, or `.csv` appended).
inline void save_report(const ExperimentReport& rep, const std::string& path) {
  std::ofstream js(path, std::ios::binary);
  if (!js) throw ConfigError("cannot write report '" + path + "'");
  js << report_to_json(rep).dump(2) << '\n';
  std::string csv = path;
  if (csv.size() >= 5 && csv.compare(csv.size() - 5, 5, ".json") == 0) {
    csv.replace(csv.size() - 5, 5, ".csv");
  } else {
    csv += ".csv";
  }
  std::ofstream cs(csv, std::ios::binary);
  if (!cs) throw ConfigError("cannot write report '" + csv + "'");
  write_report_csv(cs, rep);
}

// ---------------------------------------------------------------------------
// Runs

inline CascadeOutcome run_once(const Dataset& ds, const ExperimentConfig& cfg, std::uint64_t seed) {
  auto oracle = BudgetedOracle::create(ds, cfg.query.budget, seed);
  return run_query(oracle, cfg.query, cfg.params, cfg.method);
}

inline ExperimentReport run_trials(const ExperimentConfig& cfg, const Dataset& ds) {
  cfg.validate();
  if (ds.empty()) throw ConfigError("dataset is empty");
  if (cfg.query.kind != QueryKind::AT && !ds.is_binary()) {
    throw ConfigError("PT/RT queries need binary labels");
  }
  ExperimentReport rep;
  rep.config = config_to_json(cfg);
  rep.runs.resize(cfg.runs);
  parallel_for(cfg.runs, cfg.jobs, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(cfg.base_seed, i);
    rep.runs[i] = evaluate_run(ds, cfg, seed, run_once(ds, cfg, seed));
  });
  rep.aggregates = aggregate(rep.runs);
  return rep;
}

inline ExperimentReport run_trials(const ExperimentConfig& cfg) { return run_trials(cfg, load_experiment_dataset(cfg)); }

/// Whether sweeping `axis` changes anything for the configured method.
inline bool axis_applies(const ExperimentConfig& cfg, const std::string& axis) {
  const QueryKind q = cfg.query.kind;
  const Method m = cfg.method;
  if (axis == "T") return true;
  if (axis == "k") return q != QueryKind::AT;
  if (axis == "M") return (q == QueryKind::PT && m == Method::A) || q == QueryKind::AT;
  if (axis == "c") return (q == QueryKind::PT && m == Method::A) || m == Method::AA || m == Method::AM;
  if (axis == "eta") return (q == QueryKind::PT && m != Method::Naive) || m == Method::AA || m == Method::AM;
  if (axis == "beta") return q == QueryKind::RT && m == Method::A;
  return false;
}

inline ExperimentConfig with_axis(ExperimentConfig cfg, const std::string& axis, double v) {
  auto count = [&](const char* name) {
    if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError(std::string(name) + " values must be non-negative integers");
    return static_cast<std::size_t>(v);
  };
  if (axis == "M") cfg.params.M = count("M");
  else if (axis == "c") cfg.params.c = count("c");
  else if (axis == "eta") cfg.params.eta = count("eta");
  else if (axis == "beta") cfg.params.beta = v;
  else if (axis == "T") cfg.query.target = v;
  else if (axis == "k") cfg.query.budget = count("k");
  return cfg;
}

inline std::vector<ExperimentReport> sweep(const ExperimentConfig& cfg, const Dataset& ds, const std::string& axis,
                                           const std::vector<double>& values) {
  if (!axis_applies(cfg, axis)) {
    throw ConfigError("sweep axis '" + axis + "' does not apply to method '" + std::string(to_string(cfg.method)) + "'");
  }
  std::vector<ExperimentReport> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(run_trials(with_axis(cfg, axis, v), ds));
  return out;
}

// ---------------------------------------------------------------------------
// Estimator validation

struct EstimatorCheck {
  EstimatorKind kind = EstimatorKind::LowerIID;
  double mu = 0.0;
  double m = 0.0;
  double alpha = 0.0;
  double rate = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct ValidationSummary {
  std::vector<EstimatorCheck> checks;
  bool pass = false;
};

/// Signature of mc_false_positive_rate minus the job count; injectable so
/// tests can substitute a deliberately broken estimator.
using FireRateFn = std::function<double(EstimatorKind, double mu, double m, double alpha, std::size_t horizon,
                                        std::size_t trials, std::uint64_t seed)>;

inline std::string_view to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::LowerIID: return "lower_iid";
    case EstimatorKind::UpperIID: return "upper_iid";
    case EstimatorKind::LowerWR: return "lower_wr";
    case EstimatorKind::Hoeffding: return "hoeffding";
    case EstimatorKind::Chernoff: return "chernoff";
  }
  return "?";
}

inline ValidationSummary validate_estimators(std::size_t trials, std::uint64_t seed, std::size_t jobs = 1,
                                             FireRateFn rate = {}) {
  if (trials < 500) throw ParameterError("validate_estimators: trials must be >= 500");
  if (!rate) {
    rate = [jobs](EstimatorKind k, double mu, double m, double a, std::size_t h, std::size_t t, std::uint64_t s) {
      return mc_false_positive_rate(k, mu, m, a, h, t, s, jobs);
    };
  }
  constexpr std::size_t kHorizon = 1000;
  struct Cell {
    EstimatorKind kind;
    double mu;
    double m;
  };
  std::vector<Cell> grid;
  for (auto kind : {EstimatorKind::LowerIID, EstimatorKind::LowerWR, EstimatorKind::Hoeffding, EstimatorKind::Chernoff}) {
    grid.push_back({kind, 0.85, 0.9});
    grid.push_back({kind, 0.6, 0.7});
  }
  grid.push_back({EstimatorKind::UpperIID, 0.95, 0.9});

  ValidationSummary sum;
  sum.pass = true;
  std::uint64_t cell = 0;
  for (double alpha : {0.05, 0.1}) {
    for (const auto& g : grid) {
      EstimatorCheck c{g.kind, g.mu, g.m, alpha};
      c.rate = rate(g.kind, g.mu, g.m, alpha, kHorizon, trials, derive_seed(seed, cell++));
      c.bound = false_positive_bound(alpha, trials);
      c.pass = c.rate <= c.bound;
      sum.pass = sum.pass && c.pass;
      sum.checks.push_back(c);
    }
  }
  return sum;
}

inline nlohmann::ordered_json validation_to_json(const ValidationSummary& s) {
  nlohmann::ordered_json j;
  j["pass"] = s.pass;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : s.checks) {
    checks.push_back({{"kind", to_string(c.kind)},
                      {"mu", c.mu},
                      {"m", c.m},
                      {"alpha", c.alpha},
                      {"rate", c.rate},
                      {"bound", c.bound},
                      {"pass", c.pass}});
  }
  j["checks"] = checks;
  return j;
}

}  // namespace cascade_guard
