#include <gtest/gtest.h>

#include <cmath>

#include "dadic/ancilla.hpp"
#include "dadic/classical.hpp"
#include "dadic/ensemble.hpp"

using namespace dadic;

TEST(Classical, CriticalPointIsHalfOnTheBalancedLine) {
  for (int d = 2; d <= 10; ++d) EXPECT_EQ(classical_pc((d - 1.0L) / d, d), 0.5) << "d=" << d;
}

TEST(Classical, CriticalPointFormula) {
  EXPECT_NEAR(classical_pc(0.5, 3), std::log(0.5) / (std::log(0.5) - std::log(3.0)), 1e-15);
  // Stronger expansion needs more control; stronger contraction less.
  EXPECT_GT(classical_pc(0.5, 2), classical_pc(0.5, 4));
  EXPECT_LT(classical_pc(0.2, 2), classical_pc(0.8, 2));
  EXPECT_THROW(classical_pc(0.0, 2), std::invalid_argument);
  EXPECT_THROW(classical_pc(1.0, 2), std::invalid_argument);
  EXPECT_THROW(classical_pc(0.5, 1), std::invalid_argument);
}

TEST(Classical, DriftAndDepth) {
  EXPECT_DOUBLE_EQ(drift_velocity(0.25), -0.5);
  EXPECT_DOUBLE_EQ(drift_velocity(0.5), 0.0);
  EXPECT_DOUBLE_EQ(effective_depth(0.25, 64, 16), 2.0);
}

TEST(Classical, ControlledMapTransition) {
  // d = 2, a = 1/2: p_c = 1/2. Well above it orbits reach 0, well below not.
  ControlledMapParams mp;
  mp.d = 2;
  mp.a = 0.5;
  mp.steps = 4000;
  auto fraction = [&](double p) {
    mp.p = p;
    int hit = 0;
    for (int r = 0; r < 200; ++r) hit += simulate_controlled_map(mp, 0.7, r).has_value();
    return hit / 200.0;
  };
  EXPECT_GT(fraction(0.8), 0.95);
  EXPECT_LT(fraction(0.2), 0.05);
}

TEST(Classical, ControlledMapEdges) {
  ControlledMapParams mp;
  mp.p = 1.0;
  mp.a = 0.5;
  mp.steps = 100;
  // (1/2)^k * 0.7 < 1e-12 first at k = 40.
  EXPECT_EQ(simulate_controlled_map(mp, 0.7, 0), 40);
  EXPECT_EQ(simulate_controlled_map(mp, 0.0, 0), 0);
  mp.p = 0.0;
  EXPECT_FALSE(simulate_controlled_map(mp, 0.7, 0).has_value());
  EXPECT_THROW(simulate_controlled_map(mp, 1.2, 0), std::invalid_argument);
}

TEST(Classical, WrapTimeAtFullControlIsL) {
  for (int L : {8, 16, 32})
    for (std::uint64_t r = 0; r < 10; ++r) EXPECT_EQ(rw_wrap_time(L, 1.0, 4, r), L);
}

TEST(Classical, WrapTimeWithoutControl) {
  // Pure rightward motion measures L sites in L - 1 steps.
  EXPECT_EQ(rw_wrap_time(16, 0.0, 0, 0), 15);
}

TEST(Classical, WrapTimeCapCensors) {
  EXPECT_EQ(rw_wrap_time(64, 0.5, 0, 0, 10), 10);
}

TEST(Classical, WrapTimeMatchesAncillaOnSameDecimalPath) {
  // At q = 1 the ancilla purifies exactly when every site has been measured,
  // which is the walk's coverage time along the same decimal path.
  for (double p : {0.3, 0.5, 0.7})
    for (std::uint64_t r = 0; r < 50; ++r) {
      auto cp = CircuitParams::make(16, p, 1.0, 8);
      cp.t_max = 100000;
      Trajectory traj(cp, r);
      ConnectivityState s(16);
      std::vector<char> seen(16, 0);
      int remaining = 16;
      std::int64_t t = 0, cover = -1;
      while (s.ancilla_entropy() == 1) {
        const auto ev = traj.next();
        s.apply(ev);
        ++t;
        auto mark = [&](int k) {
          if (!seen[k]) {
            seen[k] = 1;
            --remaining;
          }
        };
        mark(ev.site);
        if (ev.kind == StepKind::Chaotic) mark(wrap(ev.site + 1, 16));
        if (remaining == 0 && cover < 0) cover = t;
      }
      EXPECT_EQ(t, cover);
    }
}
