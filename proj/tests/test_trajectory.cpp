#include <gtest/gtest.h>

#include <cmath>

#include "dadic/classical.hpp"
#include "dadic/trajectory.hpp"

using namespace dadic;

TEST(Trajectory, ValidationRejectsBadParams) {
  auto cp = CircuitParams::make(8, 0.5, 0.5);
  EXPECT_NO_THROW(cp.validate());
  auto bad = cp;
  bad.L = 7;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cp;
  bad.L = 2;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cp;
  bad.p = 1.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cp;
  bad.q = -0.1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cp;
  bad.t_max = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cp;
  bad.decimal_start = 8;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_EQ(cp.t_max, 128);
}

TEST(Trajectory, AllControlSweepsLeft) {
  auto cp = CircuitParams::make(10, 1.0, 0.7, 3);
  cp.t_max = 30;
  const auto ev = generate_trajectory(cp, 0);
  for (std::size_t k = 0; k < ev.size(); ++k) {
    EXPECT_EQ(ev[k].kind, StepKind::Control);
    EXPECT_EQ(ev[k].site, ev[k].decimal_before);
    EXPECT_EQ(ev[k].decimal_after, wrap(ev[k].decimal_before - 1, 10));
  }
  EXPECT_EQ(ev[9].decimal_after, 0);
}

TEST(Trajectory, AllChaoticNoMeasurementsWindsRight) {
  auto cp = CircuitParams::make(8, 0.0, 0.0, 3);
  cp.t_max = 24;
  const auto ev = generate_trajectory(cp, 5);
  for (std::size_t k = 0; k < ev.size(); ++k) {
    EXPECT_EQ(ev[k].kind, StepKind::Chaotic);
    EXPECT_FALSE(ev[k].measure_left);
    EXPECT_FALSE(ev[k].measure_right);
    EXPECT_EQ(ev[k].decimal_before, static_cast<int>(k % 8));
  }
}

TEST(Trajectory, DecimalChainsAndReplays) {
  auto cp = CircuitParams::make(12, 0.4, 0.3, 11);
  cp.decimal_start = 5;
  const auto a = generate_trajectory(cp, 2);
  const auto b = generate_trajectory(cp, 2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.front().decimal_before, 5);
  for (std::size_t k = 1; k < a.size(); ++k) {
    EXPECT_EQ(a[k].decimal_before, a[k - 1].decimal_after);
    const int step = wrap(a[k].decimal_after - a[k].decimal_before, 12);
    EXPECT_TRUE(step == 1 || step == 11);
  }
  EXPECT_NE(a, generate_trajectory(cp, 3));
}

TEST(Trajectory, ControlFractionConcentrates) {
  auto cp = CircuitParams::make(16, 0.5, 0.5, 1);
  Trajectory t(cp, 0);
  const int n = 100000;
  int control = 0;
  for (int i = 0; i < n; ++i) control += t.next().kind == StepKind::Control;
  EXPECT_NEAR(static_cast<double>(control) / n, 0.5, 0.005);
}

TEST(Trajectory, DriftMatchesVelocity) {
  for (double p : {0.25, 0.5, 0.8}) {
    auto cp = CircuitParams::make(16, p, 0.5, 2);
    Trajectory t(cp, 0);
    const int n = 100000;
    // Control moves the decimal left, so the velocity counts leftward steps.
    long disp = 0;
    for (int i = 0; i < n; ++i) disp += t.next().kind == StepKind::Control ? 1 : -1;
    const double v = drift_velocity(p);
    const double se = std::sqrt((1 - v * v) / n);
    EXPECT_NEAR(static_cast<double>(disp) / n, v, 5 * se) << "p=" << p;
  }
}

TEST(Trajectory, MeasurementFlagsIndependentOfEachOther) {
  auto cp = CircuitParams::make(16, 0.0, 0.3, 4);
  Trajectory t(cp, 0);
  const int n = 100000;
  int l = 0, r = 0, both = 0;
  for (int i = 0; i < n; ++i) {
    const auto e = t.next();
    l += e.measure_left;
    r += e.measure_right;
    both += e.measure_left && e.measure_right;
  }
  EXPECT_NEAR(l / double(n), 0.3, 0.007);
  EXPECT_NEAR(r / double(n), 0.3, 0.007);
  EXPECT_NEAR(both / double(n), 0.09, 0.005);
}

TEST(Trajectory, StreamLayoutIndependentOfOutcome) {
  // Three uniforms per step regardless of kind: changing p only moves the
  // thresholds, so the measure flags of chaotic steps agree across p.
  auto a = CircuitParams::make(8, 0.0, 0.5, 9);
  auto b = CircuitParams::make(8, 0.3, 0.5, 9);
  a.t_max = b.t_max = 500;
  const auto ea = generate_trajectory(a, 0), eb = generate_trajectory(b, 0);
  for (std::size_t k = 0; k < ea.size(); ++k)
    if (eb[k].kind == StepKind::Chaotic) {
      EXPECT_EQ(ea[k].measure_left, eb[k].measure_left);
      EXPECT_EQ(ea[k].measure_right, eb[k].measure_right);
    }
}
