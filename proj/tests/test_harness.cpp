#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cascade_guard/harness.hpp"

namespace cg = cascade_guard;

namespace {

cg::ExperimentConfig pt_config(std::size_t runs = 8) {
  cg::ExperimentConfig cfg;
  cfg.query = {cg::QueryKind::PT, 0.9, 0.1, 300};
  cfg.method = cg::Method::A;
  cfg.runs = runs;
  cfg.base_seed = 5;
  return cfg;
}

std::string csv_of(const cg::ExperimentReport& rep) {
  std::ostringstream s;
  cg::write_report_csv(s, rep);
  return s.str();
}

}  // namespace

TEST(Harness, SingleRunAggregates) {
  const auto ds = cg::gen_synthetic(3000, 0.1, 1);
  const auto rep = cg::run_trials(pt_config(1), ds);
  ASSERT_EQ(rep.runs.size(), 1u);
  EXPECT_EQ(rep.aggregates.mean_utility, rep.runs[0].utility);
  EXPECT_EQ(rep.aggregates.std_utility, 0.0);
  EXPECT_EQ(rep.aggregates.met_fraction, rep.runs[0].met_target ? 1.0 : 0.0);
  EXPECT_EQ(rep.runs[0].seed, cg::derive_seed(5, 0));
}

TEST(Harness, DeterministicAcrossRepeatsAndJobs) {
  const auto ds = cg::gen_synthetic(3000, 0.1, 1);
  auto cfg = pt_config(12);
  const auto a = cg::run_trials(cfg, ds);
  const auto b = cg::run_trials(cfg, ds);
  cfg.jobs = 4;
  const auto c = cg::run_trials(cfg, ds);
  EXPECT_EQ(cg::report_to_json(a).dump(), cg::report_to_json(b).dump());
  EXPECT_EQ(cg::report_to_json(a).dump(), cg::report_to_json(c).dump());
  EXPECT_EQ(csv_of(a), csv_of(c));
}

TEST(Harness, ConfigEchoOmitsExecutionSettings) {
  auto cfg = pt_config();
  cfg.generator = cg::GeneratorSpec{};
  cfg.jobs = 3;
  cfg.out = "x.json";
  const auto j = cg::config_to_json(cfg);
  EXPECT_FALSE(j.contains("jobs"));
  EXPECT_FALSE(j.contains("out"));
  EXPECT_EQ(j["method"], "a");
  EXPECT_EQ(j["budget"], 300);
}

TEST(Harness, AggregatesAndFlagsMatchRecomputation) {
  const auto ds = cg::gen_synthetic(4000, 0.3, 2);
  for (auto q : {cg::QueryKind::PT, cg::QueryKind::RT}) {
    auto cfg = pt_config(10);
    cfg.query.kind = q;
    cfg.method = cg::Method::U;
    const auto rep = cg::run_trials(cfg, ds);
    double sum = 0, met = 0;
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
      const auto& row = rep.runs[i];
      const auto out = cg::run_once(ds, cfg, row.seed);
      EXPECT_EQ(out.thresholds, row.thresholds);
      const double rho = out.threshold();
      const auto p = cg::metric_at(ds, cg::Metric::Precision, rho);
      const auto r = cg::metric_at(ds, cg::Metric::Recall, rho);
      if (q == cg::QueryKind::PT) {
        EXPECT_EQ(row.utility, r.value_or(0.0));
        EXPECT_EQ(row.met_target, !p || *p >= 0.9);
        EXPECT_FALSE(row.met_target_dense);
      } else {
        EXPECT_EQ(row.utility, p.value_or(0.0));
        EXPECT_EQ(row.met_target, !r || *r >= 0.9);
        ASSERT_TRUE(row.met_target_dense);
      }
      sum += row.utility;
      met += row.met_target;
    }
    const double mean = sum / 10;
    double sq = 0;
    for (const auto& row : rep.runs) sq += (row.utility - mean) * (row.utility - mean);
    EXPECT_NEAR(rep.aggregates.mean_utility, mean, 1e-12);
    EXPECT_NEAR(rep.aggregates.std_utility, std::sqrt(sq / 10), 1e-12);
    EXPECT_DOUBLE_EQ(rep.aggregates.met_fraction, met / 10);
    EXPECT_EQ(rep.aggregates.met_fraction_dense.has_value(), q == cg::QueryKind::RT);
  }
}

TEST(Harness, AccuracyUtilityIsAvoidedFraction) {
  const auto ds = cg::gen_calibrated(2000, 3, 4);
  cg::ExperimentConfig cfg;
  cfg.query = {cg::QueryKind::AT, 0.8, 0.1, std::nullopt};
  cfg.method = cg::Method::AA;
  cfg.runs = 3;
  const auto rep = cg::run_trials(cfg, ds);
  for (const auto& row : rep.runs) {
    EXPECT_DOUBLE_EQ(row.utility, (2000.0 - static_cast<double>(row.cost)) / 2000.0);
    const auto out = cg::run_once(ds, cfg, row.seed);
    EXPECT_EQ(row.met_target, cg::answer_accuracy(ds, out) >= 0.8);
  }
}

TEST(Harness, RejectsBadConfigs) {
  const auto multi = cg::gen_calibrated(300, 3, 1);
  EXPECT_THROW(cg::run_trials(pt_config(), multi), cg::ConfigError);
  auto cfg = pt_config();
  cfg.method = cg::Method::AA;
  EXPECT_THROW(cfg.validate(), cg::ConfigError);
  cfg = pt_config();
  cfg.runs = 0;
  EXPECT_THROW(cfg.validate(), cg::ConfigError);
  cfg = pt_config();
  cfg.query.target = 1.5;
  EXPECT_THROW(cfg.validate(), cg::ConfigError);
  cg::ExperimentConfig empty;
  EXPECT_THROW(cg::load_experiment_dataset(empty), cg::ConfigError);
}

TEST(Sweep, CandidateCountAndTarget) {
  const auto ds = cg::gen_synthetic(3000, 0.1, 3);
  const auto reps = cg::sweep(pt_config(5), ds, "M", {1, 20});
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_EQ(reps[0].config["M"], 1);
  EXPECT_EQ(reps[1].config["M"], 20);
  // A single candidate can only be the top record.
  EXPECT_LE(reps[0].aggregates.mean_utility, reps[1].aggregates.mean_utility);

  cg::ExperimentConfig at;
  at.query = {cg::QueryKind::AT, 0.9, 0.1, std::nullopt};
  at.method = cg::Method::AA;
  at.runs = 3;
  const auto cal = cg::gen_calibrated(2000, 2, 3);
  const auto t = cg::sweep(at, cal, "T", {0.7, 0.9});
  EXPECT_EQ(t[0].config["target"], 0.7);
  EXPECT_GE(t[0].aggregates.mean_utility, t[1].aggregates.mean_utility);

  const auto one = cg::sweep(pt_config(3), ds, "k", {200});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].config["budget"], 200);
}

TEST(Sweep, InapplicableAxisIsConfigError) {
  const auto ds = cg::gen_synthetic(500, 0.1, 3);
  auto cfg = pt_config(2);
  EXPECT_THROW(cg::sweep(cfg, ds, "beta", {0.1}), cg::ConfigError);
  cfg.method = cg::Method::Naive;
  EXPECT_THROW(cg::sweep(cfg, ds, "M", {5}), cg::ConfigError);
  EXPECT_THROW(cg::sweep(pt_config(2), ds, "bogus", {1}), cg::ConfigError);
  EXPECT_THROW(cg::sweep(pt_config(2), ds, "M", {2.5}), cg::ConfigError);
}

TEST(Validate, SoundEstimatorsPass) {
  const auto s = cg::validate_estimators(500, 3, 2);
  EXPECT_TRUE(s.pass);
  EXPECT_EQ(s.checks.size(), 18u);
  for (const auto& c : s.checks) {
    EXPECT_LE(c.rate, c.bound);
    EXPECT_DOUBLE_EQ(c.bound, cg::false_positive_bound(c.alpha, 500));
  }
}

TEST(Validate, DetectsBrokenEstimator) {
  // A "test" with no margin: accept whenever the sample mean reaches m.
  cg::FireRateFn broken = [](cg::EstimatorKind k, double mu, double m, double a, std::size_t h, std::size_t t,
                             std::uint64_t seed) {
    if (k == cg::EstimatorKind::UpperIID) return cg::mc_false_positive_rate(k, mu, m, a, h, t, seed);
    return cg::mc_false_positive_rate(cg::EstimatorKind::Hoeffding, mu, m, 1.0, h / 50, t, seed);
  };
  // Short horizon keeps the naive mean near the target often enough to fire.
  const auto s = cg::validate_estimators(500, 3, 1, broken);
  EXPECT_FALSE(s.pass);
}

TEST(Validate, DeterministicAndPreconditions) {
  const auto a = cg::validation_to_json(cg::validate_estimators(500, 9, 1)).dump();
  const auto b = cg::validation_to_json(cg::validate_estimators(500, 9, 3)).dump();
  EXPECT_EQ(a, b);
  EXPECT_THROW(cg::validate_estimators(499, 1), cg::ParameterError);
}
