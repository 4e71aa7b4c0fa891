#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <variant>
#include <vector>

#include "cascade_guard/sampling.hpp"

namespace cg = cascade_guard;

namespace {

cg::Dataset d6() {
  const double scores[] = {0.1, 0.3, 0.5, 0.7, 0.8, 0.9};
  const std::uint32_t labels[] = {0, 0, 1, 0, 1, 1};
  std::vector<cg::Record> recs;
  for (std::size_t i = 0; i < 6; ++i) recs.push_back({i, scores[i], labels[i], labels[i]});
  return cg::Dataset(std::move(recs));
}

bool is_draw(const cg::DrawResult& r) { return std::holds_alternative<cg::Draw>(r); }
bool is_budget(const cg::DrawResult& r) { return std::holds_alternative<cg::BudgetExhausted>(r); }
bool is_population(const cg::DrawResult& r) { return std::holds_alternative<cg::PopulationExhausted>(r); }

}  // namespace

TEST(BudgetedOracle, SameSeedSamePermutation) {
  const auto ds = cg::gen_synthetic(500, 0.1, 1);
  auto a = cg::BudgetedOracle::create(ds, 10, 77);
  auto b = cg::BudgetedOracle::create(ds, 10, 77);
  auto c = cg::BudgetedOracle::create(ds, 10, 78);
  EXPECT_TRUE(std::equal(a.permutation().begin(), a.permutation().end(), b.permutation().begin()));
  EXPECT_FALSE(std::equal(a.permutation().begin(), a.permutation().end(), c.permutation().begin()));
  std::set<std::size_t> seen(a.permutation().begin(), a.permutation().end());
  EXPECT_EQ(seen.size(), 500u);
}

TEST(BudgetedOracle, BudgetModes) {
  const auto ds = d6();
  auto unbounded = cg::BudgetedOracle::create(ds, std::nullopt, 1);
  EXPECT_FALSE(unbounded.bounded());
  for (int i = 0; i < 6; ++i) EXPECT_TRUE(is_draw(unbounded.draw_uniform()));
  EXPECT_TRUE(is_population(unbounded.draw_uniform()));

  auto zero = cg::BudgetedOracle::create(ds, 0, 1);
  EXPECT_TRUE(is_budget(zero.draw_uniform()));
  EXPECT_TRUE(is_budget(zero.draw_above(0.0)));
  EXPECT_TRUE(is_budget(zero.draw_window(0.0, 3)));
  EXPECT_TRUE(is_budget(zero.draw_window_iid(0.0, 3)));

  auto one = cg::BudgetedOracle::create(ds, 1, 1);
  const auto first = one.draw_uniform();
  ASSERT_TRUE(is_draw(first));
  EXPECT_TRUE(std::get<cg::Draw>(first).charged);
  EXPECT_TRUE(is_budget(one.draw_uniform()));
  EXPECT_TRUE(is_budget(one.draw_uniform()));  // cursor did not advance
  EXPECT_EQ(one.budget_remaining(), 0u);
}

TEST(BudgetedOracle, PopulationExhaustedAboveMaxScore) {
  const auto ds = d6();
  auto o = cg::BudgetedOracle::create(ds, 5, 3);
  EXPECT_TRUE(is_population(o.draw_above(0.9)));
  EXPECT_TRUE(is_population(o.draw_above(2.0)));
  EXPECT_EQ(o.charges(), 0u);
}

TEST(BudgetedOracle, StreamEqualsFilteredPermutation) {
  const auto ds = cg::gen_synthetic(300, 0.3, 4);
  auto o = cg::BudgetedOracle::create(ds, std::nullopt, 9);
  for (double rho : {0.2, 0.5, 0.9, 0.0}) {
    std::vector<std::size_t> expected;
    for (auto idx : o.permutation()) {
      if (ds[idx].proxy_score > rho) expected.push_back(idx);
    }
    std::vector<std::size_t> got;
    for (;;) {
      auto r = o.draw_above(rho);
      if (!is_draw(r)) {
        EXPECT_TRUE(is_population(r));
        break;
      }
      const auto& d = std::get<cg::Draw>(r);
      EXPECT_EQ(d.label, ds[d.index].oracle_label);
      got.push_back(d.index);
    }
    EXPECT_EQ(got, expected) << "rho=" << rho;
  }
}

TEST(BudgetedOracle, ReplaysCachedLabelsForFree) {
  const auto ds = cg::gen_synthetic(200, 0.2, 5);
  auto o = cg::BudgetedOracle::create(ds, 200, 11);
  std::set<std::size_t> high;
  for (int i = 0; i < 10; ++i) {
    auto r = o.draw_above(0.7);
    ASSERT_TRUE(is_draw(r));
    EXPECT_TRUE(std::get<cg::Draw>(r).charged);
    high.insert(std::get<cg::Draw>(r).index);
  }
  const std::size_t charges = o.charges();
  std::size_t replays = 0;
  for (;;) {
    auto r = o.draw_above(0.3);
    if (!is_draw(r)) break;
    const auto& d = std::get<cg::Draw>(r);
    if (high.count(d.index)) {
      EXPECT_FALSE(d.charged);
      ++replays;
    } else {
      EXPECT_TRUE(d.charged);
    }
  }
  EXPECT_EQ(replays, high.size());
  EXPECT_GE(o.charges(), charges);
}

TEST(BudgetedOracle, BudgetConservationAndNoRepeats) {
  const auto ds = cg::gen_synthetic(400, 0.2, 6);
  auto o = cg::BudgetedOracle::create(ds, 57, 2);
  std::size_t charged = 0;
  for (double rho : {0.9, 0.6, 0.3, -1.0}) {
    std::set<std::size_t> seen;
    for (;;) {
      auto r = o.draw_above(rho);
      if (!is_draw(r)) break;
      const auto& d = std::get<cg::Draw>(r);
      EXPECT_TRUE(seen.insert(d.index).second);
      charged += d.charged ? 1 : 0;
      EXPECT_EQ(charged, o.charges());
      EXPECT_EQ(o.labeled().size(), o.charges());
      EXPECT_EQ(*o.budget_remaining(), 57 - o.charges());
    }
  }
  EXPECT_EQ(o.charges(), 57u);
}

TEST(BudgetedOracle, SpendingLimitSplitsBudget) {
  const auto ds = cg::gen_synthetic(400, 0.2, 6);
  auto o = cg::BudgetedOracle::create(ds, 20, 2);
  o.limit_spending(5);
  std::size_t n = 0;
  while (is_draw(o.draw_uniform())) ++n;
  EXPECT_EQ(n, 5u);
  o.limit_spending(100);
  while (is_draw(o.draw_uniform())) ++n;
  EXPECT_EQ(o.charges(), 20u);
}

TEST(DrawWindow, SizeCacheAndEmpty) {
  const auto ds = d6();
  auto o = cg::BudgetedOracle::create(ds, 10, 4);
  // Window at 0.6, r=2: records 0.7 and 0.8.
  std::set<std::size_t> got;
  for (int i = 0; i < 2; ++i) {
    auto r = o.draw_window(0.6, 2);
    ASSERT_TRUE(is_draw(r));
    got.insert(std::get<cg::Draw>(r).index);
  }
  EXPECT_EQ(got, (std::set<std::size_t>{3, 4}));
  EXPECT_TRUE(is_population(o.draw_window(0.6, 2)));
  // Same records through another window are free.
  auto r = o.draw_window(0.75, 1);
  ASSERT_TRUE(is_draw(r));
  EXPECT_EQ(std::get<cg::Draw>(r).index, 4u);
  EXPECT_FALSE(std::get<cg::Draw>(r).charged);
  EXPECT_TRUE(is_population(o.draw_window(0.95, 2)));
  EXPECT_TRUE(o.window_fully_labeled(0.6, 2));
  EXPECT_FALSE(o.window_fully_labeled(0.0, 6));
}

TEST(DrawWindowIid, StaysInWindowAndRepeatsAreFree) {
  const auto ds = cg::gen_synthetic(1000, 0.1, 8);
  auto o = cg::BudgetedOracle::create(ds, 30, 4);
  const auto w = cg::density_window(ds, 0.5, 20);
  std::set<std::size_t> window;
  for (std::size_t p = w.first; p < w.last; ++p) window.insert(ds.score_order()[p]);
  std::size_t draws = 0;
  for (; draws < 500; ++draws) {
    auto r = o.draw_window_iid(0.5, 20);
    ASSERT_TRUE(is_draw(r));
    EXPECT_TRUE(window.count(std::get<cg::Draw>(r).index));
  }
  EXPECT_LE(o.charges(), 20u);
  EXPECT_TRUE(o.window_fully_labeled(0.5, 20));
  EXPECT_TRUE(is_population(o.draw_window_iid(1.5, 20)));
}

TEST(DrawAboveInClass, RestrictsToProxyClass) {
  const auto ds = cg::gen_calibrated(300, 3, 2);
  auto o = cg::BudgetedOracle::create(ds, std::nullopt, 5);
  std::size_t n = 0;
  for (;;) {
    auto r = o.draw_above_in_class(1, 0.5);
    if (!is_draw(r)) break;
    const auto& rec = ds[std::get<cg::Draw>(r).index];
    EXPECT_EQ(rec.proxy_label, 1u);
    EXPECT_GT(rec.proxy_score, 0.5);
    ++n;
  }
  std::size_t expected = 0;
  for (const auto& rec : ds.records()) expected += rec.proxy_label == 1 && rec.proxy_score > 0.5;
  EXPECT_EQ(n, expected);
}

// Chi-square goodness of fit of the first uniform draw over 10 records;
// critical value for 9 degrees of freedom at 0.001 is 27.877.
TEST(BudgetedOracle, FirstDrawIsUniform) {
  std::vector<cg::Record> recs;
  for (std::size_t i = 0; i < 10; ++i) recs.push_back({i, 0.05 + 0.09 * static_cast<double>(i), 0, 0});
  cg::Dataset ds(recs);
  std::vector<double> counts(10, 0.0);
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    auto o = cg::BudgetedOracle::create(ds, 1, static_cast<std::uint64_t>(s));
    counts[std::get<cg::Draw>(o.draw_above(0.0)).index] += 1;
  }
  double chi2 = 0;
  for (double c : counts) chi2 += (c - seeds / 10.0) * (c - seeds / 10.0) / (seeds / 10.0);
  EXPECT_LT(chi2, 27.877);
}
