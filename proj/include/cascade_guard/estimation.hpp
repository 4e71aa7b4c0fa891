#pragma once

// Statistical tests for "the mean of a Bernoulli stream is at least m".
//
// Betting tests keep a capital process K that grows when observations exceed
// the hypothesised mean; crossing 1/alpha rejects "mean < m" (lower tests) or
// "mean > m" (upper test) with false-positive probability at most alpha, at
// any stopping time. Capital is tracked in log space.
//
// Fixed-sample tests (Hoeffding, Chernoff) are evaluated once on the totals
// and are valid only for a sample size fixed in advance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cascade_guard/errors.hpp"
#include "cascade_guard/parallel.hpp"
#include "cascade_guard/rng.hpp"

namespace cascade_guard {

enum class BettingKind { LowerIID, UpperIID, LowerWR };
enum class FixedKind { Hoeffding, Chernoff };
enum class EstimatorKind { LowerIID, UpperIID, LowerWR, Hoeffding, Chernoff };

constexpr bool is_betting(EstimatorKind k) noexcept {
  return k == EstimatorKind::LowerIID || k == EstimatorKind::UpperIID || k == EstimatorKind::LowerWR;
}

constexpr BettingKind to_betting(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::UpperIID: return BettingKind::UpperIID;
    case EstimatorKind::LowerWR: return BettingKind::LowerWR;
    default: return BettingKind::LowerIID;
  }
}

constexpr FixedKind to_fixed(EstimatorKind k) {
  return k == EstimatorKind::Chernoff ? FixedKind::Chernoff : FixedKind::Hoeffding;
}

/// Incremental state of one betting test. Value type: copy to branch.
class BettingState {
 public:
  static BettingState lower_iid(double m, double alpha) { return {BettingKind::LowerIID, m, alpha, 0}; }
  static BettingState upper_iid(double m, double alpha) { return {BettingKind::UpperIID, m, alpha, 0}; }
  static BettingState lower_wr(double m, double alpha, std::size_t population) {
    if (population < 1) throw ParameterError("without-replacement test needs population >= 1");
    return {BettingKind::LowerWR, m, alpha, population};
  }

  static BettingState make(BettingKind kind, double m, double alpha, std::optional<std::size_t> population = {}) {
    if (kind == BettingKind::LowerWR) {
      if (!population) throw ParameterError("without-replacement test needs a population size");
      return lower_wr(m, alpha, *population);
    }
    return {kind, m, alpha, 0};
  }

  /// Consumes one observation.
  void step(bool y) {
    if (kind_ == BettingKind::LowerWR && steps_ >= population_) {
      throw StateError("without-replacement test stepped past its population");
    }
    const double yv = y ? 1.0 : 0.0;
    const double i1 = static_cast<double>(steps_ + 1);
    const double lambda = std::sqrt(2.0 * std::log(2.0 / alpha_) / (i1 * std::log(i1 + 1.0) * variance_estimate()));

    last_log_factor_ = 0.0;
    switch (kind_) {
      case BettingKind::LowerIID: {
        const double bet = std::min(lambda, 3.0 / (4.0 * m_));
        last_log_factor_ = std::log1p(bet * (yv - m_));
        break;
      }
      case BettingKind::UpperIID: {
        const double bet = std::min(lambda, 3.0 / (4.0 * (1.0 - m_)));
        last_log_factor_ = std::log1p(-bet * (yv - m_));
        break;
      }
      case BettingKind::LowerWR: {
        const double mw = next_wr_target();
        if (mw < 0.0 || (mw == 0.0 && y)) {
          // Observed positives already exceed N*m: the population mean is
          // certainly above m.
          fired_ = true;
          refuted_ = true;
        } else if (mw > 0.0) {
          const double bet = std::min(lambda, 3.0 / (4.0 * mw));
          last_log_factor_ = std::log1p(bet * (yv - mw));
        }
        break;
      }
    }
    log_capital_ += last_log_factor_;

    ++steps_;
    sum_y_ += y ? 1 : 0;
    const double mu = mean_estimate();
    sum_sq_dev_ += (yv - mu) * (yv - mu);
    if (log_capital_ >= -std::log(alpha_)) fired_ = true;
  }

  BettingKind kind() const noexcept { return kind_; }
  double target() const noexcept { return m_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t sum_y() const noexcept { return sum_y_; }
  double sum_sq_dev() const noexcept { return sum_sq_dev_; }
  double log_capital() const noexcept { return log_capital_; }
  double capital() const { return std::exp(log_capital_); }
  double last_log_factor() const noexcept { return last_log_factor_; }
  bool fired() const noexcept { return fired_; }
  std::optional<std::size_t> population() const {
    if (kind_ != BettingKind::LowerWR) return std::nullopt;
    return population_;
  }
  bool exhausted_refuted() const noexcept { return refuted_; }

  /// mu_hat_i = (1/2 + sum y) / (i + 1)
  double mean_estimate() const noexcept {
    return (0.5 + static_cast<double>(sum_y_)) / static_cast<double>(steps_ + 1);
  }
  /// sigma_hat^2_i = (1/4 + sum (y_j - mu_hat_j)^2) / (i + 1)
  double variance_estimate() const noexcept { return (0.25 + sum_sq_dev_) / static_cast<double>(steps_ + 1); }

  /// Conditional target (N*m - sum y) / (N - i) for the next observation.
  double next_wr_target() const {
    return (static_cast<double>(population_) * m_ - static_cast<double>(sum_y_)) /
           static_cast<double>(population_ - steps_);
  }

 private:
  BettingState(BettingKind kind, double m, double alpha, std::size_t population)
      : kind_(kind), m_(m), alpha_(alpha), population_(population) {
    if (!(m > 0.0 && m < 1.0)) throw ParameterError("betting target m must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  }

  BettingKind kind_ = BettingKind::LowerIID;
  double m_ = 0.0;
  double alpha_ = 0.0;
  std::size_t population_ = 0;
  std::size_t steps_ = 0;
  std::size_t sum_y_ = 0;
  double sum_sq_dev_ = 0.0;
  double log_capital_ = 0.0;
  double last_log_factor_ = 0.0;
  bool fired_ = false;
  bool refuted_ = false;
};

inline BettingState betting_step(BettingState state, bool y) {
  state.step(y);
  return state;
}

/// 1-based index of the first observation after which the test has fired.
inline std::optional<std::size_t> anytime_test(BettingKind kind, std::span<const std::uint8_t> stream, double m,
                                               double alpha, std::optional<std::size_t> population = {}) {
  auto state = BettingState::make(kind, m, alpha, population);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    state.step(stream[i] != 0);
    if (state.fired()) return i + 1;
  }
  return std::nullopt;
}

/// Margin added to T by the fixed-sample tests.
inline double fixed_sample_margin(FixedKind kind, std::size_t total, double target, double alpha) {
  const double log_inv = std::log(1.0 / alpha);
  const double k = static_cast<double>(total);
  if (kind == FixedKind::Hoeffding) return std::sqrt(log_inv / (2.0 * k));
  return std::sqrt(2.0 * (1.0 - target) * log_inv / k);
}

/// positives/total >= T + margin. alpha = 1 is allowed (zero margin).
inline bool fixed_sample_test(FixedKind kind, std::size_t positives, std::size_t total, double target,
                              double alpha) {
  if (positives > total) throw ParameterError("fixed_sample_test: positives > total");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("fixed_sample_test: alpha must lie in (0, 1]");
  if (total == 0) return false;
  const double observed = static_cast<double>(positives) / static_cast<double>(total);
  return observed >= target + fixed_sample_margin(kind, total, target, alpha);
}

/// Whether `kind` accepts target m on the whole stream.
inline bool estimator_accepts(EstimatorKind kind, std::span<const std::uint8_t> stream, double m, double alpha,
                              std::optional<std::size_t> population = {}) {
  if (is_betting(kind)) {
    if (kind == EstimatorKind::LowerWR && !population) population = stream.size();
    return anytime_test(to_betting(kind), stream, m, alpha, population).has_value();
  }
  std::size_t pos = 0;
  for (auto y : stream) pos += y != 0 ? 1 : 0;
  return fixed_sample_test(to_fixed(kind), pos, stream.size(), m, alpha);
}

/// Largest target T in (0, 1) the estimator accepts on `stream`, to within
/// `resolution`, found by bisection. 0 for an empty stream.
inline double max_supported_target(std::span<const std::uint8_t> stream, EstimatorKind kind, double alpha,
                                   double resolution, std::optional<std::size_t> population = {}) {
  if (!(resolution > 0.0)) throw ParameterError("resolution must be positive");
  if (kind == EstimatorKind::UpperIID) throw ParameterError("max_supported_target applies to lower tests");
  if (stream.empty()) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (estimator_accepts(kind, stream, mid, alpha, population)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

/// Fraction of seeded Bernoulli(mu) streams of length `horizon` on which the
/// test ever fires. For LowerWR the stream is a shuffled population of size
/// `horizon` holding exactly round(mu*horizon) ones. Fixed-sample kinds are
/// evaluated once, on the full horizon.
inline double mc_false_positive_rate(EstimatorKind kind, double mu, double m, double alpha, std::size_t horizon,
                                     std::size_t trials, std::uint64_t seed, std::size_t jobs = 1) {
  if (trials < 100) throw ParameterError("mc_false_positive_rate: trials must be >= 100");
  if (horizon < 1) throw ParameterError("mc_false_positive_rate: horizon must be >= 1");
  if (!(mu >= 0.0 && mu <= 1.0)) throw ParameterError("mc_false_positive_rate: mu outside [0, 1]");
  if (kind == EstimatorKind::UpperIID ? !(mu > m) : !(mu < m)) {
    throw ParameterError("mc_false_positive_rate: mu must lie on the null side of m");
  }
  std::vector<std::uint8_t> fired(trials, 0);
  parallel_for(trials, jobs, [&](std::size_t t) {
    Engine eng = make_engine(derive_seed(seed, t));
    std::vector<std::uint8_t> stream(horizon, 0);
    if (kind == EstimatorKind::LowerWR) {
      const auto ones = static_cast<std::size_t>(std::llround(mu * static_cast<double>(horizon)));
      std::fill(stream.begin(), stream.begin() + static_cast<std::ptrdiff_t>(ones), 1);
      std::shuffle(stream.begin(), stream.end(), eng);
    } else {
      std::bernoulli_distribution coin(mu);
      for (auto& y : stream) y = coin(eng) ? 1 : 0;
    }
    fired[t] = estimator_accepts(kind, stream, m, alpha, horizon) ? 1 : 0;
  });
  std::size_t count = 0;
  for (auto f : fired) count += f;
  return static_cast<double>(count) / static_cast<double>(trials);
}

/// alpha plus three binomial standard deviations over `trials`.
inline double false_positive_bound(double alpha, std::size_t trials) {
  return alpha + 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(trials));
}

}  // namespace cascade_guard
