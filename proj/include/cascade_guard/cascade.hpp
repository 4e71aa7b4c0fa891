#pragma once

// Cascade threshold selection. Each algorithm picks a proxy-score threshold
// rho: records scoring above it take the proxy's answer, the rest go to the
// oracle. Labels are only ever observed through a BudgetedOracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cascade_guard/dataset.hpp"
#include "cascade_guard/errors.hpp"
#include "cascade_guard/estimation.hpp"
#include "cascade_guard/sampling.hpp"

namespace cascade_guard {

enum class EstimatorChoice { BettingWR, BettingIID, Hoeffding, Chernoff };

enum class Method { Naive, U, A, AA, AM };

enum class Sentinel { None, UseOracleForAll, IncludeAll };

inline constexpr double kAboveAll = std::numeric_limits<double>::infinity();

struct AlgoParams {
  std::size_t M = 20;
  std::size_t eta = 0;
  std::optional<std::size_t> c;  // default max(10, ceil(0.02 n))
  double beta = 0.02;
  std::size_t r = 150;
  EstimatorChoice estimator = EstimatorChoice::BettingWR;
  std::size_t naive_sample = 400;  // label budget of the AT naive analog

  std::size_t min_samples(std::size_t n) const {
    if (c) return *c;
    return std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(0.02 * static_cast<double>(n))));
  }

  void validate() const {
    if (M < 1) throw ParameterError("M must be >= 1");
    if (r < 1) throw ParameterError("r must be >= 1");
    if (!(beta >= 0.0 && beta < 1.0)) throw ParameterError("beta must lie in [0, 1)");
    if (naive_sample < 1) throw ParameterError("naive_sample must be >= 1");
  }
};

struct CascadeOutcome {
  // Effective threshold per proxy class (key 0 unless AM): +inf under
  // UseOracleForAll; under IncludeAll, -inf or the RT-A cutoff (everything
  // in the searched region is returned).
  std::map<std::uint32_t, double> thresholds;
  std::map<std::uint32_t, Sentinel> sentinels;
  std::size_t cost = 0;
  std::vector<std::size_t> labeled;  // ascending record indices
  // AT: final label per record. PT/RT: 1 if the record is returned.
  std::vector<std::uint32_t> answer;

  double threshold(std::uint32_t cls = 0) const { return thresholds.at(cls); }
  Sentinel sentinel(std::uint32_t cls = 0) const { return sentinels.at(cls); }
  bool any(Sentinel s) const {
    return std::any_of(sentinels.begin(), sentinels.end(), [s](const auto& kv) { return kv.second == s; });
  }
};

// ---------------------------------------------------------------------------
// Selection rules

/// Smallest candidate with a true estimate and at most `eta` false estimates
/// at candidates >= it. `candidates` must be descending.
inline std::optional<double> select_with_tolerance(std::span<const double> candidates,
                                                   std::span<const std::uint8_t> estimates, std::size_t eta) {
  if (candidates.size() != estimates.size()) throw ParameterError("estimates not aligned with candidates");
  std::optional<double> best;
  std::size_t misses = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!estimates[i]) {
      if (++misses > eta) break;
    } else {
      best = candidates[i];
    }
  }
  return best;
}

/// Target the proxy region must meet so that, with the oracle answering the
/// rest, overall accuracy is at least T.
inline double adjusted_accuracy_target(std::size_t N, std::size_t N_rho, double T) {
  if (N_rho < 1 || N_rho > N) throw ParameterError("adjusted_accuracy_target: need 1 <= N_rho <= N");
  const double nr = static_cast<double>(N_rho);
  return std::max(0.0, (nr - static_cast<double>(N) * (1.0 - T)) / nr);
}

namespace detail {

inline EstimatorKind lower_kind(EstimatorChoice e) {
  switch (e) {
    case EstimatorChoice::BettingWR: return EstimatorKind::LowerWR;
    case EstimatorChoice::BettingIID: return EstimatorKind::LowerIID;
    case EstimatorChoice::Hoeffding: return EstimatorKind::Hoeffding;
    case EstimatorChoice::Chernoff: return EstimatorKind::Chernoff;
  }
  return EstimatorKind::LowerWR;
}

inline bool is_fixed_sample(EstimatorChoice e) {
  return e == EstimatorChoice::Hoeffding || e == EstimatorChoice::Chernoff;
}

/// Whole-stream test of "mean >= m". Targets outside (0, 1) are decided
/// without statistics: m <= 0 always holds, m >= 1 is never established.
inline bool stream_validates(EstimatorKind kind, std::span<const std::uint8_t> stream, double m, double alpha,
                             std::size_t population) {
  if (m <= 0.0) return true;
  if (m >= 1.0) return false;
  return estimator_accepts(kind, stream, m, alpha, population);
}

/// Whether `count` observations could validate m at all, i.e. whether an
/// all-positive stream of that length would.
inline bool could_validate(EstimatorKind kind, std::size_t count, double m, double alpha, std::size_t population) {
  if (count == 0) return false;
  const std::vector<std::uint8_t> ones(count, 1);
  return stream_validates(kind, ones, m, alpha, population);
}

/// Sequential lower test fed one observation at a time (betting kinds only).
class LowerTest {
 public:
  // m outside (0, 1) is decided up front; the dummy state is never stepped.
  LowerTest(EstimatorKind kind, double m, double alpha, std::size_t population)
      : state_(BettingState::make(to_betting(kind), m > 0.0 && m < 1.0 ? m : 0.5, alpha, population)),
        active_(m > 0.0 && m < 1.0),
        fired_(m <= 0.0) {}
  void observe(bool y) {
    if (fired_ || !active_) return;
    state_.step(y);
    fired_ = state_.fired();
  }
  bool fired() const noexcept { return fired_; }

 private:
  BettingState state_;
  bool active_;
  bool fired_ = false;
};

/// Running mean and population std of a 0/1 stream.
struct BinaryMoments {
  std::size_t count = 0;
  std::size_t ones = 0;
  void add(bool y) {
    ++count;
    ones += y ? 1 : 0;
  }
  double mean() const { return static_cast<double>(ones) / static_cast<double>(count); }
  double stddev() const {
    const double p = mean();
    return std::sqrt(p * (1.0 - p));
  }
  /// The target sits within one standard deviation of the mean: too close to
  /// settle without many more samples.
  bool hopeless(double target, std::size_t min_count) const {
    return count >= min_count && mean() - stddev() < target;
  }
};

inline std::vector<std::size_t> sorted_labeled(const BudgetedOracle& oracle) {
  std::vector<std::size_t> out = oracle.labeled();
  std::sort(out.begin(), out.end());
  return out;
}

/// PT/RT answer: score > rho, plus every record observed positive.
inline CascadeOutcome selection_outcome(const BudgetedOracle& oracle, double rho, Sentinel sentinel) {
  const Dataset& ds = oracle.dataset();
  CascadeOutcome out;
  out.thresholds[0] = rho;
  out.sentinels[0] = sentinel;
  out.cost = oracle.charges();
  out.labeled = sorted_labeled(oracle);
  out.answer.assign(ds.size(), 0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds[i].proxy_score > rho) out.answer[i] = 1;
  }
  for (auto i : out.labeled) {
    if (ds[i].oracle_label == 1) out.answer[i] = 1;
  }
  return out;
}

inline CascadeOutcome pt_outcome(const BudgetedOracle& oracle, std::optional<double> rho) {
  return rho ? selection_outcome(oracle, *rho, Sentinel::None)
             : selection_outcome(oracle, kAboveAll, Sentinel::UseOracleForAll);
}

/// Draws labels until the budget (or population) runs out; returns the draws
/// in order.
template <typename DrawFn>
std::vector<Draw> draw_all(DrawFn&& draw) {
  std::vector<Draw> out;
  for (;;) {
    DrawResult res = draw();
    if (!std::holds_alternative<Draw>(res)) break;
    out.push_back(std::get<Draw>(res));
  }
  return out;
}

/// Distinct scores of the given records, descending.
inline std::vector<double> distinct_scores_desc(const Dataset& ds, const std::vector<Draw>& draws) {
  std::vector<double> s;
  s.reserve(draws.size());
  for (const auto& d : draws) s.push_back(ds[d.index].proxy_score);
  std::sort(s.begin(), s.end(), std::greater<>());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline std::vector<std::uint8_t> positives_above(const Dataset& ds, const std::vector<Draw>& draws, double rho) {
  std::vector<std::uint8_t> stream;
  for (const auto& d : draws) {
    if (ds[d.index].proxy_score > rho) stream.push_back(d.label == 1 ? 1 : 0);
  }
  return stream;
}

inline void require_binary(const Dataset& ds) {
  if (!ds.is_binary()) throw InvalidTaskError("PT/RT queries require binary labels");
}

inline void require_budget(const BudgetedOracle& oracle) {
  if (!oracle.bounded()) throw ParameterError("PT/RT queries require a budgeted oracle");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Precision target

inline CascadeOutcome run_pt(BudgetedOracle& oracle, double T, double delta, const AlgoParams& params,
                             Method method) {
  params.validate();
  const Dataset& ds = oracle.dataset();
  detail::require_binary(ds);
  detail::require_budget(oracle);
  const double alpha = delta / static_cast<double>(params.eta + 1);

  if (method == Method::Naive || method == Method::U) {
    const auto sample = detail::draw_all([&] { return oracle.draw_uniform(); });
    const auto cands = detail::distinct_scores_desc(ds, sample);
    if (method == Method::Naive) {
      std::optional<double> best;
      const double a = delta / static_cast<double>(std::max<std::size_t>(1, cands.size()));
      for (double rho : cands) {
        const auto stream = detail::positives_above(ds, sample, rho);
        std::size_t pos = 0;
        for (auto y : stream) pos += y;
        if (T <= 0.0 || fixed_sample_test(FixedKind::Hoeffding, pos, stream.size(), T, a)) best = rho;
      }
      return detail::pt_outcome(oracle, best);
    }
    const EstimatorKind kind = detail::lower_kind(params.estimator);
    std::vector<double> tried;
    std::vector<std::uint8_t> estimates;
    std::size_t misses = 0;
    for (double rho : cands) {
      const auto stream = detail::positives_above(ds, sample, rho);
      const std::size_t n_rho = ds.count_above(rho);
      // Too few observations to ever reject: no evidence either way.
      if (!detail::could_validate(kind, stream.size(), T, alpha, n_rho)) continue;
      const bool ok = detail::stream_validates(kind, stream, T, alpha, n_rho);
      tried.push_back(rho);
      estimates.push_back(ok ? 1 : 0);
      if (!ok && ++misses > params.eta) break;
    }
    return detail::pt_outcome(oracle, select_with_tolerance(tried, estimates, params.eta));
  }

  if (method != Method::A) throw ParameterError("PT supports methods naive, u and a");
  if (detail::is_fixed_sample(params.estimator)) {
    throw ParameterError("adaptive sampling requires a betting estimator");
  }
  const EstimatorKind kind = detail::lower_kind(params.estimator);
  const auto cands = candidate_thresholds(ds, std::min(params.M, ds.size()));
  const std::size_t min_count = params.min_samples(ds.size());
  std::vector<double> tried;
  std::vector<std::uint8_t> estimates;
  std::size_t misses = 0;
  for (double rho : cands) {
    const std::size_t n_rho = ds.count_above(rho);
    detail::LowerTest test(kind, T, alpha, std::max<std::size_t>(1, n_rho));
    detail::BinaryMoments moments;
    std::optional<bool> verdict;
    while (!verdict) {
      if (test.fired()) {
        verdict = true;
        break;
      }
      DrawResult res = oracle.draw_above(rho);
      if (std::holds_alternative<BudgetExhausted>(res)) break;
      if (std::holds_alternative<PopulationExhausted>(res)) {
        // Region fully labelled: its precision is known exactly.
        const auto p = metric_at(ds, Metric::Precision, rho);
        verdict = !p || *p >= T;
        break;
      }
      const bool y = std::get<Draw>(res).label == 1;
      test.observe(y);
      moments.add(y);
      if (!test.fired() && params.eta > 0 && moments.hopeless(T, min_count)) verdict = false;
    }
    if (!verdict) break;  // out of budget
    tried.push_back(rho);
    estimates.push_back(*verdict ? 1 : 0);
    if (!*verdict && ++misses > params.eta) break;
  }
  return detail::pt_outcome(oracle, select_with_tolerance(tried, estimates, params.eta));
}

// ---------------------------------------------------------------------------
// Accuracy target

namespace detail {

/// One proxy class (or the whole dataset) as seen by the AT algorithms.
struct AtRegion {
  Dataset local;                         // records of the region, indexed locally
  std::vector<std::size_t> global;       // local index -> dataset index
  std::optional<std::uint32_t> cls;      // draw restriction, if any
};

inline AtRegion whole_region(const Dataset& ds) {
  AtRegion reg;
  reg.local = ds;
  reg.global.resize(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) reg.global[i] = i;
  return reg;
}

inline AtRegion class_region(const Dataset& ds, std::uint32_t cls) {
  AtRegion reg;
  reg.cls = cls;
  std::vector<Record> recs;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds[i].proxy_label == cls) {
      recs.push_back(ds[i]);
      reg.global.push_back(i);
    }
  }
  reg.local = Dataset(std::move(recs));
  return reg;
}

/// Adaptive accuracy search over one region; nullopt if nothing validates.
inline std::optional<double> search_accuracy(BudgetedOracle& oracle, const AtRegion& reg, double T, double alpha,
                                             const AlgoParams& params) {
  const Dataset& local = reg.local;
  const std::size_t N = local.size();
  if (N == 0) return std::nullopt;
  const EstimatorKind kind = lower_kind(params.estimator);
  const std::size_t min_count = params.min_samples(N);
  const auto cands = candidate_thresholds(local, std::min(params.M, N));
  const Dataset& ds = oracle.dataset();

  std::vector<double> tried;
  std::vector<std::uint8_t> estimates;
  std::size_t misses = 0;
  for (double rho : cands) {
    const std::size_t n_rho = local.count_above(rho);
    bool ok = true;
    if (n_rho > 0) {
      const double t_rho = adjusted_accuracy_target(N, n_rho, T);
      LowerTest test(kind, t_rho, alpha, n_rho);
      BinaryMoments moments;
      std::optional<bool> verdict;
      while (!verdict) {
        if (test.fired()) {
          verdict = true;
          break;
        }
        DrawResult res = reg.cls ? oracle.draw_above_in_class(*reg.cls, rho) : oracle.draw_above(rho);
        if (!std::holds_alternative<Draw>(res)) {
          // Unbounded oracle: only population exhaustion ends the stream.
          const double acc = static_cast<double>(local.agreements_in_top(n_rho)) / static_cast<double>(n_rho);
          verdict = acc >= t_rho;
          break;
        }
        const auto& d = std::get<Draw>(res);
        const bool y = ds[d.index].proxy_label == d.label;
        test.observe(y);
        moments.add(y);
        if (!test.fired() && moments.hopeless(t_rho, min_count)) verdict = false;
      }
      ok = *verdict;
    }
    tried.push_back(rho);
    estimates.push_back(ok ? 1 : 0);
    if (!ok && ++misses > params.eta) break;
  }
  return select_with_tolerance(tried, estimates, params.eta);
}

/// Assembles the AT answer: proxy labels on each region's D^rho minus the
/// labelled records, oracle labels elsewhere.
inline CascadeOutcome at_outcome(const BudgetedOracle& oracle, const std::vector<AtRegion>& regions,
                                 const std::vector<std::optional<double>>& rhos) {
  const Dataset& ds = oracle.dataset();
  CascadeOutcome out;
  out.labeled = sorted_labeled(oracle);
  out.answer.resize(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.answer[i] = ds[i].oracle_label;
  std::size_t proxied = 0;
  for (std::size_t k = 0; k < regions.size(); ++k) {
    const auto& reg = regions[k];
    const std::uint32_t key = reg.cls.value_or(0);
    out.thresholds[key] = rhos[k].value_or(kAboveAll);
    out.sentinels[key] = rhos[k] ? Sentinel::None : Sentinel::UseOracleForAll;
    if (!rhos[k]) continue;
    for (std::size_t li = 0; li < reg.global.size(); ++li) {
      const std::size_t gi = reg.global[li];
      if (ds[gi].proxy_score > *rhos[k] && !oracle.is_cached(gi)) {
        out.answer[gi] = ds[gi].proxy_label;
        ++proxied;
      }
    }
  }
  out.cost = ds.size() - proxied;
  return out;
}

}  // namespace detail

inline CascadeOutcome run_at(BudgetedOracle& oracle, double T, double delta, const AlgoParams& params,
                             Method method) {
  params.validate();
  const Dataset& ds = oracle.dataset();
  if (ds.empty()) throw ParameterError("run_at: empty dataset");
  const double alpha = delta / static_cast<double>(params.eta + 1);

  if (method == Method::AA || method == Method::AM) {
    if (detail::is_fixed_sample(params.estimator)) {
      throw ParameterError("adaptive sampling requires a betting estimator");
    }
    std::vector<detail::AtRegion> regions;
    if (method == Method::AA) {
      regions.push_back(detail::whole_region(ds));
    } else {
      for (auto cls : ds.proxy_classes()) regions.push_back(detail::class_region(ds, cls));
    }
    const double a = alpha / static_cast<double>(regions.size());
    std::vector<std::optional<double>> rhos;
    for (const auto& reg : regions) rhos.push_back(detail::search_accuracy(oracle, reg, T, a, params));
    return detail::at_outcome(oracle, regions, rhos);
  }

  if (method != Method::Naive) throw ParameterError("AT supports methods naive, aa and am");
  // Fixed uniform sample tested with Hoeffding at delta/|C_M|.
  oracle.limit_spending(params.naive_sample);
  const auto sample = detail::draw_all([&] { return oracle.draw_uniform(); });
  oracle.limit_spending(std::nullopt);
  const auto cands = candidate_thresholds(ds, std::min(params.M, ds.size()));
  const double a = delta / static_cast<double>(cands.size());
  std::optional<double> best;
  for (double rho : cands) {
    const std::size_t n_rho = ds.count_above(rho);
    if (n_rho == 0) {
      best = rho;
      continue;
    }
    const double t_rho = adjusted_accuracy_target(ds.size(), n_rho, T);
    std::size_t agree = 0;
    std::size_t total = 0;
    for (const auto& d : sample) {
      if (ds[d.index].proxy_score > rho) {
        ++total;
        agree += ds[d.index].proxy_label == d.label ? 1 : 0;
      }
    }
    if (t_rho <= 0.0 || fixed_sample_test(FixedKind::Hoeffding, agree, total, t_rho, a)) best = rho;
  }
  return detail::at_outcome(oracle, {detail::whole_region(ds)}, {best});
}

// ---------------------------------------------------------------------------
// Recall target

namespace detail {

/// Uniform-sample recall search over the records scoring above `floor`.
/// Returns the largest validated candidate, or nullopt.
inline std::optional<double> search_recall(BudgetedOracle& oracle, double floor, double T, double alpha,
                                           EstimatorChoice estimator) {
  const Dataset& ds = oracle.dataset();
  const auto sample = draw_all([&] { return oracle.draw_above(floor); });
  std::vector<Draw> positives;
  for (const auto& d : sample) {
    if (d.label == 1) positives.push_back(d);
  }
  if (positives.empty()) return std::nullopt;
  // The number of positives is unknown, so the without-replacement form does
  // not apply; the default falls back to the i.i.d. test.
  const EstimatorKind kind = estimator == EstimatorChoice::BettingWR ? EstimatorKind::LowerIID : lower_kind(estimator);
  for (double rho : distinct_scores_desc(ds, positives)) {
    std::vector<std::uint8_t> stream;
    stream.reserve(positives.size());
    for (const auto& d : positives) stream.push_back(ds[d.index].proxy_score > rho ? 1 : 0);
    if (stream_validates(kind, stream, T, alpha, stream.size())) return rho;
  }
  return std::nullopt;
}

/// With no validated candidate, every record of the searched region (score >
/// floor) is returned.
inline CascadeOutcome rt_outcome(const BudgetedOracle& oracle, std::optional<double> rho, double floor = kBelowAll) {
  return rho ? selection_outcome(oracle, *rho, Sentinel::None) : selection_outcome(oracle, floor, Sentinel::IncludeAll);
}

}  // namespace detail

inline CascadeOutcome run_rt(BudgetedOracle& oracle, double T, double delta, const AlgoParams& params,
                             Method method) {
  params.validate();
  const Dataset& ds = oracle.dataset();
  detail::require_binary(ds);
  detail::require_budget(oracle);

  if (method == Method::U) {
    return detail::rt_outcome(oracle, detail::search_recall(oracle, kBelowAll, T, delta, params.estimator));
  }
  if (method != Method::A) throw ParameterError("RT supports methods u and a");
  const std::size_t k = *oracle.budget_remaining();
  if (k < 2) throw ParameterError("RT method a needs a budget of at least 2");
  const std::size_t half = k / 2;
  const double half_delta = delta / 2.0;

  // Phase 1: binary search for the lowest score where positives are still
  // dense, probing density windows with the upper test "density < beta".
  double rho = 0.5;
  double cutoff = 0.0;
  bool moved = false;
  if (params.beta > 0.0) {
    oracle.limit_spending(half);
    for (int iter = 0; iter < 64; ++iter) {
      auto test = BettingState::upper_iid(params.beta, half_delta);
      bool sparse = false;
      for (;;) {
        DrawResult res = oracle.draw_window_iid(rho, params.r);
        if (!std::holds_alternative<Draw>(res)) break;
        const Draw& d = std::get<Draw>(res);
        test.step(d.label == 1);
        if (test.fired()) {
          sparse = true;
          break;
        }
        // Once the whole window is labelled its density is known exactly.
        if (!d.charged && oracle.window_fully_labeled(rho, params.r)) {
          sparse = *positive_density(ds, rho, params.r) < params.beta;
          break;
        }
      }
      if (!sparse) break;
      cutoff = rho;
      moved = true;
      rho = (1.0 + rho) / 2.0;
    }
  }

  // Phase 2: uniform recall search above the cutoff.
  oracle.limit_spending(half);
  const double floor = moved ? cutoff : kBelowAll;
  const auto best = detail::search_recall(oracle, floor, T, half_delta, params.estimator);
  oracle.limit_spending(std::nullopt);
  return detail::rt_outcome(oracle, best, floor);
}

// ---------------------------------------------------------------------------
// Dispatch and names

inline bool method_applies(QueryKind q, Method m) {
  switch (q) {
    case QueryKind::PT: return m == Method::Naive || m == Method::U || m == Method::A;
    case QueryKind::AT: return m == Method::Naive || m == Method::AA || m == Method::AM;
    case QueryKind::RT: return m == Method::U || m == Method::A;
  }
  return false;
}

inline CascadeOutcome run_query(BudgetedOracle& oracle, const QuerySpec& q, const AlgoParams& params,
                                Method method) {
  switch (q.kind) {
    case QueryKind::PT: return run_pt(oracle, q.target, q.delta, params, method);
    case QueryKind::AT: return run_at(oracle, q.target, q.delta, params, method);
    case QueryKind::RT: return run_rt(oracle, q.target, q.delta, params, method);
  }
  throw ParameterError("unknown query kind");
}

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Naive: return "naive";
    case Method::U: return "u";
    case Method::A: return "a";
    case Method::AA: return "aa";
    case Method::AM: return "am";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::Naive, Method::U, Method::A, Method::AA, Method::AM}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

inline std::string_view to_string(QueryKind q) {
  switch (q) {
    case QueryKind::AT: return "at";
    case QueryKind::PT: return "pt";
    case QueryKind::RT: return "rt";
  }
  return "?";
}

inline std::optional<QueryKind> parse_query(std::string_view s) {
  for (QueryKind q : {QueryKind::AT, QueryKind::PT, QueryKind::RT}) {
    if (s == to_string(q)) return q;
  }
  return std::nullopt;
}

inline std::string_view to_string(EstimatorChoice e) {
  switch (e) {
    case EstimatorChoice::BettingWR: return "betting_wr";
    case EstimatorChoice::BettingIID: return "betting_iid";
    case EstimatorChoice::Hoeffding: return "hoeffding";
    case EstimatorChoice::Chernoff: return "chernoff";
  }
  return "?";
}

inline std::optional<EstimatorChoice> parse_estimator(std::string_view s) {
  for (auto e : {EstimatorChoice::BettingWR, EstimatorChoice::BettingIID, EstimatorChoice::Hoeffding,
                 EstimatorChoice::Chernoff}) {
    if (s == to_string(e)) return e;
  }
  return std::nullopt;
}

inline std::string_view to_string(Sentinel s) {
  switch (s) {
    case Sentinel::None: return "none";
    case Sentinel::UseOracleForAll: return "use_oracle_for_all";
    case Sentinel::IncludeAll: return "include_all";
  }
  return "?";
}

}  // namespace cascade_guard
