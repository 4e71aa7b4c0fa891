#pragma once

// Budgeted oracle access. All records are placed in one random order; a draw
// "above rho" returns the next record of that order with score > rho, so
// every threshold sees a uniform without-replacement stream of its region and
// labels bought for one threshold are replayed for free at another.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <tuple>
#include <variant>
#include <vector>

#include "cascade_guard/dataset.hpp"
#include "cascade_guard/errors.hpp"
#include "cascade_guard/rng.hpp"

namespace cascade_guard {

struct Draw {
  std::size_t index = 0;  // record index into the dataset
  std::uint32_t label = 0;
  bool charged = false;

  friend bool operator==(const Draw&, const Draw&) = default;
};
struct BudgetExhausted {
  friend bool operator==(const BudgetExhausted&, const BudgetExhausted&) = default;
};
struct PopulationExhausted {
  friend bool operator==(const PopulationExhausted&, const PopulationExhausted&) = default;
};

using DrawResult = std::variant<Draw, BudgetExhausted, PopulationExhausted>;

inline constexpr double kBelowAll = -std::numeric_limits<double>::infinity();

class BudgetedOracle {
 public:
  /// The dataset must outlive the oracle. `budget` absent means unbounded.
  static BudgetedOracle create(const Dataset& ds, std::optional<std::size_t> budget, std::uint64_t seed) {
    return BudgetedOracle(ds, budget, seed);
  }

  const Dataset& dataset() const noexcept { return *ds_; }
  std::span<const std::size_t> permutation() const noexcept { return perm_; }

  /// Distinct labels purchased so far.
  std::size_t charges() const noexcept { return charges_; }
  bool bounded() const noexcept { return budget_.has_value(); }
  std::optional<std::size_t> budget() const noexcept { return budget_; }
  /// Labels that may still be bought, honouring any spending limit.
  std::optional<std::size_t> budget_remaining() const {
    std::optional<std::size_t> rem;
    if (budget_) rem = *budget_ - charges_;
    if (limit_) {
      const std::size_t lim = *limit_ > charges_ ? *limit_ - charges_ : 0;
      rem = rem ? std::min(*rem, lim) : lim;
    }
    return rem;
  }

  /// Caps further purchases at `extra` labels (nullopt lifts the cap). Used to
  /// split one budget into phases.
  void limit_spending(std::optional<std::size_t> extra) {
    limit_ = extra ? std::optional<std::size_t>(charges_ + *extra) : std::nullopt;
  }

  bool is_cached(std::size_t index) const { return cached_[index] != 0; }
  /// Record indices in purchase order.
  const std::vector<std::size_t>& labeled() const noexcept { return purchase_order_; }

  /// Next record of the permutation with score > rho.
  DrawResult draw_above(double rho) {
    return draw_filtered(above_cursors_[rho], [&](std::size_t i) { return (*ds_)[i].proxy_score > rho; });
  }

  /// Uniform without-replacement draw from the whole dataset.
  DrawResult draw_uniform() { return draw_above(kBelowAll); }

  /// draw_above restricted to records whose proxy label is `cls`.
  DrawResult draw_above_in_class(std::uint32_t cls, double rho) {
    return draw_filtered(class_cursors_[{cls, rho}], [&](std::size_t i) {
      const auto& r = (*ds_)[i];
      return r.proxy_label == cls && r.proxy_score > rho;
    });
  }

  /// Without-replacement draw from the density window D_r^rho.
  DrawResult draw_window(double rho, std::size_t r) {
    const RankRange w = density_window(*ds_, rho, r);
    return draw_filtered(window_cursors_[{rho, r}], [&](std::size_t i) {
      const std::size_t rank = rank_[i];
      return rank >= w.first && rank < w.last;
    });
  }

  bool window_fully_labeled(double rho, std::size_t r) const {
    const RankRange w = density_window(*ds_, rho, r);
    const auto order = ds_->score_order();
    for (std::size_t p = w.first; p < w.last; ++p) {
      if (!cached_[order[p]]) return false;
    }
    return true;
  }

  /// With-replacement uniform draw from D_r^rho. Re-drawing a cached record
  /// is free.
  DrawResult draw_window_iid(double rho, std::size_t r) {
    const RankRange w = density_window(*ds_, rho, r);
    if (w.empty()) return PopulationExhausted{};
    std::uniform_int_distribution<std::size_t> pick(w.first, w.last - 1);
    const std::size_t index = ds_->score_order()[pick(eng_)];
    if (!is_cached(index) && budget_remaining() == std::size_t{0}) return BudgetExhausted{};
    return label(index);
  }

 private:
  BudgetedOracle(const Dataset& ds, std::optional<std::size_t> budget, std::uint64_t seed)
      : ds_(&ds), budget_(budget), eng_(make_engine(seed)) {
    const std::size_t n = ds.size();
    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    std::shuffle(perm_.begin(), perm_.end(), eng_);
    cached_.assign(n, 0);
    rank_.resize(n);
    const auto order = ds.score_order();
    for (std::size_t p = 0; p < n; ++p) rank_[order[p]] = p;
  }

  Draw label(std::size_t index) {
    Draw d{index, (*ds_)[index].oracle_label, false};
    if (!cached_[index]) {
      cached_[index] = 1;
      purchase_order_.push_back(index);
      ++charges_;
      d.charged = true;
    }
    return d;
  }

  template <typename Pred>
  DrawResult draw_filtered(std::size_t& cursor, Pred&& in_region) {
    while (cursor < perm_.size() && !in_region(perm_[cursor])) ++cursor;
    if (cursor == perm_.size()) return PopulationExhausted{};
    const std::size_t index = perm_[cursor];
    if (!is_cached(index) && budget_remaining() == std::size_t{0}) return BudgetExhausted{};
    ++cursor;
    return label(index);
  }

  const Dataset* ds_;
  std::optional<std::size_t> budget_;
  std::optional<std::size_t> limit_;
  Engine eng_;
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> rank_;
  std::vector<std::uint8_t> cached_;
  std::vector<std::size_t> purchase_order_;
  std::size_t charges_ = 0;
  std::map<double, std::size_t> above_cursors_;
  std::map<std::pair<std::uint32_t, double>, std::size_t> class_cursors_;
  std::map<std::pair<double, std::size_t>, std::size_t> window_cursors_;
};

}  // namespace cascade_guard
