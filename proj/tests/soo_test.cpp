#include "mlsoo/soo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace mlsoo;

namespace {

auto constant(double v) {
  return [v](std::span<const double>) { return v; };
}

struct Counting {
  std::size_t* calls;
  double operator()(std::span<const double> x) const {
    ++*calls;
    return -(x[0] - 0.25) * (x[0] - 0.25);
  }
};

template <class F>
Soo<BoxPartition<F>> engine_for(F f, std::size_t dims, std::size_t budget = 1000,
                                 DepthCap cap = h_max_default, bool reuse = true) {
  return Soo<BoxPartition<F>>(BoxPartition<F>(std::move(f)), SooOptions{budget, std::move(cap), reuse});
}

DepthCap uncapped() {
  return [](std::size_t) { return std::size_t{1000}; };
}

} // namespace

TEST(DepthCap, CeilSqrt) {
  EXPECT_EQ(h_max_default(1), 1u);
  EXPECT_EQ(h_max_default(100), 10u);
  EXPECT_EQ(h_max_default(101), 11u);
  EXPECT_EQ(h_max_default(99), 10u);
  std::size_t prev = 0;
  for (std::size_t n = 1; n < 5000; ++n) {
    const auto h = h_max_default(n);
    EXPECT_GE(h, prev);
    EXPECT_GE(h, 1u);
    prev = h;
  }
}

TEST(Box, RejectsDegenerateDimensions) {
  EXPECT_THROW(Box({}), ConfigError);
  EXPECT_THROW(Box({{0.0, 1.0}, {2.0, 2.0}}), ConfigError);
  EXPECT_NO_THROW(Box::uniform(3, -1.0, 1.0));
}

TEST(Tree, SelectExpandable) {
  auto e = engine_for(constant(0.0), 1, 100, uncapped());
  auto& t = e.tree();
  t.add_root(BoxCell{{0.5}, {1.0}}, 0.0);
  std::vector<double> s1{0.1, 0.2, 0.05};
  auto kids = t.add_children(0, {BoxCell{{1}, {1}}, BoxCell{{2}, {1}}, BoxCell{{3}, {1}}}, s1);
  std::vector<double> s2{0.3, 0.7, 0.3};
  auto grand = t.add_children(kids[1], {BoxCell{{1}, {1}}, BoxCell{{2}, {1}}, BoxCell{{3}, {1}}}, s2);

  EXPECT_EQ(t.select_expandable(2, kNegInf), grand[1]);
  EXPECT_FALSE(t.select_expandable(2, 0.8).has_value());
  EXPECT_FALSE(t.select_expandable(0, kNegInf).has_value());  // root is no longer a leaf
  EXPECT_FALSE(t.select_expandable(7, kNegInf).has_value());
}

TEST(Tree, TieBreakPrefersEarliestLeaf) {
  Tree<BoxCell> t;
  t.add_root(BoxCell{{0}, {1}}, 0.0);
  std::vector<double> s{0.5, 0.1, 0.5};
  auto kids = t.add_children(0, {BoxCell{}, BoxCell{}, BoxCell{}}, s);
  EXPECT_EQ(t.select_expandable(1, 0.0), kids[0]);
  EXPECT_EQ(t.best(), kids[0]);
}

TEST(Expand, OneDimensionalThirds) {
  auto e = engine_for(constant(1.0), 1);
  e.initialize(BoxCell::from_box(Box::uniform(1, -4.0, 4.0)));
  auto kids = e.expand(0);
  ASSERT_EQ(kids.size(), 3u);
  const auto& t = e.tree();
  EXPECT_DOUBLE_EQ(t[kids[0]].cell.center[0], -8.0 / 3.0);
  EXPECT_EQ(t[kids[1]].cell.center[0], 0.0);
  EXPECT_DOUBLE_EQ(t[kids[2]].cell.center[0], 8.0 / 3.0);
  for (auto k : kids) {
    EXPECT_DOUBLE_EQ(t[k].cell.width[0], 8.0 / 3.0);
    EXPECT_EQ(t[k].depth, 1u);
  }
}

TEST(Expand, SplitsLongestDimension) {
  BoxPartition part(constant(0.0));
  auto kids = part.split(BoxCell{{0.5, 0.5}, {1.0, 1.0 / 3.0}});
  for (const auto& k : kids) {
    EXPECT_DOUBLE_EQ(k.width[0], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(k.width[1], 1.0 / 3.0);
    EXPECT_EQ(k.center[1], 0.5);
  }
  // Equal widths: lowest index.
  auto even = part.split(BoxCell{{0.5, 0.5}, {1.0, 1.0}});
  EXPECT_DOUBLE_EQ(even[0].width[0], 1.0 / 3.0);
  EXPECT_EQ(even[0].width[1], 1.0);
}

TEST(Expand, CountsFreshEvaluationsOnly) {
  std::size_t calls = 0;
  auto e = engine_for(Counting{&calls}, 1);
  e.initialize(BoxCell::from_box(Box::uniform(1, 0.0, 1.0)));
  ASSERT_EQ(e.evaluations(), 1u);
  const double root_score = e.tree()[0].score;
  auto kids = e.expand(0);
  EXPECT_EQ(e.evaluations(), 3u);
  EXPECT_EQ(calls, 3u);
  // Middle child inherits the parent's value bit for bit.
  EXPECT_EQ(e.tree()[kids[1]].score, root_score);

  // Literal pseudocode: every child is evaluated and charged.
  std::size_t calls_literal = 0;
  auto lit = engine_for(Counting{&calls_literal}, 1, 1000, h_max_default, false);
  lit.initialize(BoxCell::from_box(Box::uniform(1, 0.0, 1.0)));
  lit.expand(0);
  EXPECT_EQ(lit.evaluations(), 4u);
  EXPECT_EQ(calls_literal, 4u);
}

TEST(Expand, NaNObjectiveAbortsRun) {
  auto e = engine_for([](std::span<const double> x) { return x[0] > 0.6 ? std::nan("") : 0.0; }, 1);
  e.initialize(BoxCell::from_box(Box::uniform(1, 0.0, 1.0)));
  EXPECT_THROW(e.expand(0), ObjectiveError);
}

TEST(Sweep, FreshTreeExpandsRootOnce) {
  auto e = engine_for(constant(0.0), 2, 1000, [](std::size_t) { return std::size_t{1}; });
  e.initialize(BoxCell::from_box(Box::uniform(2, 0.0, 1.0)));
  EXPECT_EQ(e.sweep(), 1u);
  EXPECT_EQ(e.tree().size(), 4u);
}

TEST(Sweep, CapExhaustedMeansNoExpansion) {
  auto e = engine_for(constant(0.0), 1, 1000, [](std::size_t) { return std::size_t{0}; });
  e.initialize(BoxCell::from_box(Box::uniform(1, 0.0, 1.0)));
  e.expand(0);  // every leaf now at depth 1 > h_max = 0
  EXPECT_EQ(e.sweep(), 0u);
}

TEST(Sweep, ShallowMaximumBlocksDeeperLeaves) {
  // Hand trace: leaves 0.9 (h=1) and 0.5 (h=2). v_max becomes 0.9 after the
  // h=1 expansion, so the h=2 leaf is not expanded. Center reuse is off so
  // the new depth-2 children score 0 instead of inheriting the 0.9.
  auto e = engine_for(constant(0.0), 1, 1000, uncapped(), false);
  auto& t = e.tree();
  t.add_root(BoxCell{{0.5}, {1.0}}, 0.0);
  std::vector<double> s1{0.9, 0.2, 0.1};
  auto h1 = t.add_children(0, {{{1.0 / 6}, {1.0 / 3}}, {{0.5}, {1.0 / 3}}, {{5.0 / 6}, {1.0 / 3}}}, s1);
  std::vector<double> s2{0.5, 0.3, 0.4};
  auto h2 = t.add_children(h1[1], {{{7.0 / 18}, {1.0 / 9}}, {{0.5}, {1.0 / 9}}, {{11.0 / 18}, {1.0 / 9}}}, s2);

  EXPECT_EQ(e.sweep(), 1u);
  EXPECT_FALSE(t[h1[0]].is_leaf());
  for (auto id : h2)
    EXPECT_TRUE(t[id].is_leaf());
}

TEST(Sweep, InfeasibleLeavesNeverBlockFeasibleSiblings) {
  auto e = engine_for(constant(0.0), 1, 1000, uncapped());
  auto& t = e.tree();
  t.add_root(BoxCell{{0.5}, {1.0}}, 0.0);
  std::vector<double> s1{kNegInf, kNegInf, 0.3};
  auto h1 = t.add_children(0, {{{1.0 / 6}, {1.0 / 3}}, {{0.5}, {1.0 / 3}}, {{5.0 / 6}, {1.0 / 3}}}, s1);
  EXPECT_EQ(t.select_expandable(1, kNegInf), h1[2]);

  // A depth with only infeasible leaves is skipped without touching v_max.
  std::vector<double> s2{kNegInf, kNegInf, kNegInf};
  t.add_children(h1[2], {{{13.0 / 18}, {1.0 / 9}}, {{5.0 / 6}, {1.0 / 9}}, {{17.0 / 18}, {1.0 / 9}}}, s2);
  EXPECT_FALSE(t.select_expandable(2, kNegInf).has_value());
  EXPECT_EQ(e.sweep(), 0u);
}

TEST(SooRun, RejectsZeroBudget) {
  EXPECT_THROW(soo_run(constant(0.0), Box::uniform(1, 0, 1), 0), ConfigError);
}

TEST(SooRun, FindsOneThird) {
  auto f = [](std::span<const double> x) { return -(x[0] - 1.0 / 3.0) * (x[0] - 1.0 / 3.0); };
  // Dense grid oracle at 1e-6 resolution.
  double grid_arg = 0.0, grid_best = kNegInf;
  for (int i = 0; i <= 1000000; ++i) {
    const double x = i * 1e-6;
    const double v = f(std::span<const double>(&x, 1));
    if (v > grid_best) {
      grid_best = v;
      grid_arg = x;
    }
  }
  auto res = soo_run(f, Box::uniform(1, 0.0, 1.0), 500);
  EXPECT_NEAR(res.best().cell.center[0], grid_arg, 1e-4);
  EXPECT_LE(res.evaluations, 501u);
}

TEST(SooRun, ConstantFunctionHasFlatTrace) {
  auto res = soo_run(constant(0.0), Box::uniform(1, 0.0, 1.0), 50);
  EXPECT_EQ(res.best().score, 0.0);
  for (const auto& r : res.trace)
    EXPECT_EQ(r.best_score, 0.0);
}

TEST(SooRun, BudgetOfOneEvaluatesRootOnly) {
  auto f = [](std::span<const double> x) {
    return -(x[0] - 0.5) * (x[0] - 0.5) - (x[1] - 0.5) * (x[1] - 0.5);
  };
  auto res = soo_run(f, Box::uniform(2, 0.0, 1.0), 1);
  ASSERT_EQ(res.trace.size(), 1u);
  EXPECT_EQ(res.best().cell.center, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(res.best().score, 0.0);
}

TEST(SooRun, LipschitzRegretBound) {
  // Regret of -|x - 0.37| is at most the half-width of the deepest leaf
  // containing the optimiser, hence at most the width at the best's depth
  // whenever the best sits at least that deep.
  auto f = [](std::span<const double> x) { return -std::abs(x[0] - 0.37); };
  auto res = soo_run(f, Box::uniform(1, 0.0, 1.0), 300);
  const double regret = -res.best().score;
  std::size_t deepest = 0;
  for (const auto& nd : res.tree.nodes())
    if (nd.is_leaf() && std::abs(nd.cell.center[0] - 0.37) <= 0.5 * nd.cell.width[0])
      deepest = std::max(deepest, nd.depth);
  EXPECT_LE(regret, std::pow(3.0, -static_cast<double>(deepest)));
  EXPECT_LE(regret, std::pow(3.0, -static_cast<double>(res.best().depth)));
}

// Structural, monotonicity, budget and determinism properties over random
// multimodal objectives.
TEST(SooProperties, RandomObjectives) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> dims(1, 4);
  std::uniform_int_distribution<std::size_t> budgets(1, 400);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = dims(rng);
    std::vector<double> a(d), b(d);
    for (std::size_t i = 0; i < d; ++i) {
      a[i] = u(rng);
      b[i] = 5.0 + 20.0 * u(rng);
    }
    auto f = [a, b](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i)
        s += -std::abs(x[i] - a[i]) + 0.1 * std::sin(b[i] * x[i]);
      return s;
    };
    const std::size_t budget = budgets(rng);
    auto res = soo_run(f, Box::uniform(d, 0.0, 1.0), budget);

    EXPECT_LE(res.evaluations, budget + 1);  // K - 2 overshoot
    EXPECT_EQ(res.trace.size(), res.evaluations);
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      EXPECT_EQ(res.trace[i].n, res.trace[i - 1].n + 1);
      EXPECT_GE(res.trace[i].best_score, res.trace[i - 1].best_score);
    }
    double max_score = kNegInf;
    for (const auto& nd : res.tree.nodes()) {
      max_score = std::max(max_score, nd.score);
      if (nd.is_leaf())
        continue;
      ASSERT_EQ(nd.children.size(), 3u);
      const auto& mid = res.tree[nd.children[1]];
      EXPECT_EQ(mid.score, nd.score);
      EXPECT_EQ(mid.cell.center, nd.cell.center);
      // Children tile the parent's interval along the split dimension.
      std::size_t split = d;
      for (std::size_t i = 0; i < d; ++i)
        if (mid.cell.width[i] != nd.cell.width[i])
          split = i;
      ASSERT_LT(split, d);
      double sum = 0.0;
      for (auto c : nd.children)
        sum += res.tree[c].cell.width[split];
      EXPECT_NEAR(sum, nd.cell.width[split], 1e-15);
      const auto& lo = res.tree[nd.children[0]].cell;
      const auto& hi = res.tree[nd.children[2]].cell;
      EXPECT_NEAR(lo.center[split] - 0.5 * lo.width[split], nd.cell.center[split] - 0.5 * nd.cell.width[split], 1e-15);
      EXPECT_NEAR(hi.center[split] + 0.5 * hi.width[split], nd.cell.center[split] + 0.5 * nd.cell.width[split], 1e-15);
    }
    EXPECT_EQ(res.best().score, max_score);

    auto again = soo_run(f, Box::uniform(d, 0.0, 1.0), budget);
    ASSERT_EQ(again.trace.size(), res.trace.size());
    for (std::size_t i = 0; i < res.trace.size(); ++i)
      EXPECT_EQ(again.trace[i].best_score, res.trace[i].best_score);
  }
}
