#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "dadic/mincut.hpp"
#include "dadic/oracle.hpp"

using namespace dadic;

namespace {

void expect_matches_oracle(const DistanceMatrix& d, const ExplicitLattice& lat) {
  for (int i = 0; i < d.size(); ++i) {
    const auto row = lat.cut_row(i);
    for (int j = 0; j < d.size(); ++j) EXPECT_EQ(d(i, j), row[j]) << "(" << i << "," << j << ")";
  }
}

}  // namespace

TEST(Mincut, ProductInitIsZero) {
  DistanceMatrix d(8, InitialState::Product);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) EXPECT_EQ(d(i, j), 0);
  EXPECT_FALSE(d.check_invariants());
}

TEST(Mincut, MaximallyEntangledInitIsCyclicDistance) {
  DistanceMatrix d(4, InitialState::MaximallyEntangled);
  EXPECT_EQ(d(0, 1), 1);
  EXPECT_EQ(d(0, 2), 2);
  EXPECT_EQ(d(0, 3), 1);
  EXPECT_EQ(d(1, 2), 1);
  EXPECT_EQ(d(1, 3), 2);
  EXPECT_EQ(d(2, 3), 1);
  EXPECT_FALSE(d.check_invariants());
}

TEST(Mincut, RejectsBadSize) {
  EXPECT_THROW(DistanceMatrix(3, InitialState::Product), std::invalid_argument);
  EXPECT_THROW(DistanceMatrix(255, InitialState::Product), std::invalid_argument);
}

TEST(Mincut, MeasurementOnZeroMatrix) {
  DistanceMatrix d(8, InitialState::Product);
  d.apply_measurement(5);
  EXPECT_EQ(d, DistanceMatrix(8, InitialState::Product));
}

TEST(Mincut, MeasurementOnMaximallyEntangledL4) {
  DistanceMatrix d(4, InitialState::MaximallyEntangled);
  d.apply_measurement(2);
  EXPECT_EQ(d(2, 1), 0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j && !((i == 1 && j == 2) || (i == 2 && j == 1))) EXPECT_EQ(d(i, j), 1) << i << "," << j;
  ExplicitLattice lat(4, InitialState::MaximallyEntangled);
  lat.measure(2);
  expect_matches_oracle(d, lat);
}

TEST(Mincut, SingleGateOnZeroMatrix) {
  DistanceMatrix d(8, InitialState::Product);
  d.apply_chaotic(3, false, false);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const int expected = (i == 3) != (j == 3) ? 1 : 0;
      EXPECT_EQ(d(i, j), expected);
    }
  ExplicitLattice lat(8, InitialState::Product);
  lat.gate(3);
  expect_matches_oracle(d, lat);
}

TEST(Mincut, GateWithMeasurementsAgainstOracle) {
  for (bool ml : {false, true})
    for (bool mr : {false, true})
      for (auto init : {InitialState::Product, InitialState::MaximallyEntangled}) {
        DistanceMatrix d(8, init);
        ExplicitLattice lat(8, init);
        d.apply_chaotic(3, ml, mr);
        lat.gate(3);
        if (ml) lat.measure(3);
        if (mr) lat.measure(4);
        expect_matches_oracle(d, lat);
      }
}

TEST(Mincut, MaximallyEntangledGateAtZero) {
  DistanceMatrix d(6, InitialState::MaximallyEntangled);
  ExplicitLattice lat(6, InitialState::MaximallyEntangled);
  d.apply_chaotic(0, false, false);
  lat.gate(0);
  expect_matches_oracle(d, lat);
}

TEST(Mincut, MeasurementEqualsShortestPathsWithZeroedLink) {
  // Independent reference: all-pairs shortest paths of the vertex graph whose
  // edge weights are the current distances, with link (i-1, i) set to zero.
  Rng pick(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int L = 4 + 2 * static_cast<int>(pick.uniform() * 4);
    auto cp = CircuitParams::make(L, pick.uniform(), pick.uniform(), 77);
    cp.t_max = 40;
    Trajectory traj(cp, static_cast<std::uint64_t>(trial));
    DistanceMatrix d(L, trial % 2 ? InitialState::MaximallyEntangled : InitialState::Product);
    const int steps = static_cast<int>(pick.uniform() * 30);
    for (int s = 0; s < steps; ++s) d.apply(traj.next());
    const int i = static_cast<int>(pick.uniform() * L);
    std::vector<std::vector<int>> w(L, std::vector<int>(L));
    for (int a = 0; a < L; ++a)
      for (int b = 0; b < L; ++b) w[a][b] = d(a, b);
    const int im = wrap(i - 1, L);
    w[i][im] = w[im][i] = 0;
    for (int k = 0; k < L; ++k)
      for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b) w[a][b] = std::min(w[a][b], w[a][k] + w[k][b]);
    DistanceMatrix before = d;
    d.apply_measurement(i);
    for (int a = 0; a < L; ++a)
      for (int b = 0; b < L; ++b) {
        ASSERT_EQ(d(a, b), w[a][b]) << "trial " << trial;
        ASSERT_LE(d(a, b), before(a, b));
      }
  }
}

TEST(Mincut, ChaoticTouchesOnlyRowBeforeMeasurements) {
  auto cp = CircuitParams::make(10, 0.3, 0.4, 8);
  Trajectory traj(cp, 0);
  DistanceMatrix d(10, InitialState::Product);
  for (int s = 0; s < 200; ++s) {
    const auto ev = traj.next();
    if (ev.kind == StepKind::Chaotic) {
      DistanceMatrix before = d;
      d.apply_chaotic(ev.site, false, false);
      for (int a = 0; a < 10; ++a)
        for (int b = 0; b < 10; ++b)
          if (a != ev.site && b != ev.site) ASSERT_EQ(d(a, b), before(a, b));
      d = before;
    }
    d.apply(ev);
  }
}

TEST(Mincut, HalfCutFillsToCapWithoutMeasurements) {
  for (int L : {8, 12, 16}) {
    auto cp = CircuitParams::make(L, 0.0, 0.0, 1);
    Trajectory traj(cp, 0);
    DistanceMatrix d(L, InitialState::Product);
    ExplicitLattice lat(L, InitialState::Product);
    for (std::int64_t s = 0; s < cp.t_max; ++s) {
      const auto ev = traj.next();
      d.apply(ev);
      lat.apply(ev);
      ASSERT_EQ(half_cut_entropy(d, traj.decimal()),
                lat.shortest_cut(traj.decimal(), traj.decimal() + L / 2)) << "L=" << L << " step " << s;
    }
    EXPECT_EQ(half_cut_entropy(d, traj.decimal()), L / 2);
  }
}

TEST(Mincut, EntropyReadouts) {
  DistanceMatrix p(8, InitialState::Product);
  DistanceMatrix m(8, InitialState::MaximallyEntangled);
  EXPECT_EQ(entropy_contiguous(p, 1, 5), 0);
  EXPECT_EQ(entropy_contiguous(m, 1, 5), 4);
  EXPECT_EQ(entropy_contiguous(m, 6, 1), 3);
  EXPECT_THROW(entropy_contiguous(m, 2, 10), std::invalid_argument);
  EXPECT_EQ(half_cut_entropy(p, 3), 0);
  EXPECT_EQ(half_cut_entropy(m, 3), 4);
}

TEST(Mincut, QuarterObservablesOnInitialStates) {
  for (int anchor : {0, 3}) {
    QuarterPartition part(anchor, 8);
    DistanceMatrix p(8, InitialState::Product);
    DistanceMatrix m(8, InitialState::MaximallyEntangled);
    EXPECT_EQ(mutual_info_I2(p, part), 0);
    EXPECT_EQ(tripartite_I3(p, part), 0);
    EXPECT_EQ(mutual_info_I2(m, part), 0);
    // Quarters of 2 qudits each: S(A)=S(B)=S(C)=S(D)=2, S(AB)=S(BC)=S(AC)=4.
    EXPECT_EQ(tripartite_I3(m, part), -4);
  }
  EXPECT_THROW(QuarterPartition(0, 10), std::invalid_argument);
  QuarterPartition part(6, 8);
  EXPECT_EQ(part.vertex(0), 6);
  EXPECT_EQ(part.vertex(1), 0);
  EXPECT_EQ(part.vertex(3), 4);
}

TEST(Mincut, QuarterObservablesMatchOracleFormula) {
  for (std::uint64_t r = 0; r < 30; ++r) {
    auto cp = CircuitParams::make(12, 0.2, 0.3, 4);
    Trajectory traj(cp, r);
    DistanceMatrix d(12, InitialState::Product);
    ExplicitLattice lat(12, InitialState::Product);
    for (int s = 0; s < 50; ++s) {
      const auto ev = traj.next();
      d.apply(ev);
      lat.apply(ev);
    }
    QuarterPartition part(traj.decimal(), 12);
    auto S = [&](int k1, int k2) { return lat.shortest_cut(part.vertex(k1), part.vertex(k2)); };
    const int i2 = std::max(0, S(0, 1) + S(2, 3) - S(1, 2) - S(3, 0));
    EXPECT_EQ(mutual_info_I2(d, part), i2);
    EXPECT_EQ(tripartite_I3(d, part), i2 + S(1, 2) + S(3, 0) - S(0, 2) - S(1, 3));
    EXPECT_LE(tripartite_I3(d, part), 0);
  }
}

TEST(Mincut, InvariantCheckerFlagsViolations) {
  DistanceMatrix d(8, InitialState::MaximallyEntangled);
  EXPECT_FALSE(d.check_invariants().has_value());
  d.set_cap_bias(-1);
  d.apply_chaotic(3, false, false);
  EXPECT_TRUE(d.check_invariants().has_value());
}
