#include <gtest/gtest.h>

#include "dadic/ancilla.hpp"
#include "dadic/oracle.hpp"

using namespace dadic;

TEST(BitRow, Basics) {
  BitRow r(70);
  EXPECT_FALSE(r.any());
  r.set(0);
  r.set(69);
  EXPECT_EQ(r.count(), 2);
  EXPECT_TRUE(r.test(69));
  r.reset(69);
  EXPECT_FALSE(r.test(69));
  BitRow full(70, true);
  EXPECT_EQ(full.count(), 70);
  EXPECT_TRUE(full.intersects(r));
  r.clear();
  EXPECT_FALSE(full.intersects(r));
}

TEST(Ancilla, FreshState) {
  ConnectivityState s(4);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(s.row(i).count(), 4);
    EXPECT_TRUE(s.ancilla().test(i));
  }
  EXPECT_EQ(s.ancilla_entropy(), 1);
  EXPECT_TRUE(s.consistent());
  EXPECT_THROW(ConnectivityState(2), std::invalid_argument);
}

TEST(Ancilla, MeasureIsolatesQudit) {
  ConnectivityState s(4);
  s.measure(0);
  EXPECT_EQ(s.row(0).count(), 1);
  EXPECT_TRUE(s.row(0).test(0));
  for (int j = 1; j < 4; ++j) EXPECT_FALSE(s.connected(j, 0));
  EXPECT_FALSE(s.ancilla().test(0));
  for (int j = 1; j < 4; ++j) EXPECT_TRUE(s.ancilla().test(j));
  EXPECT_TRUE(s.consistent());
}

TEST(Ancilla, MeasuringEverySitePurifies) {
  ConnectivityState s(8);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(s.ancilla_entropy(), 1);
    s.measure(i);
  }
  EXPECT_EQ(s.ancilla_entropy(), 0);
  for (int i = 0; i < 8; ++i) s.gate(i);
  EXPECT_EQ(s.ancilla_entropy(), 0);
}

TEST(Ancilla, GateMergesSingletons) {
  ConnectivityState s(6);
  for (int i = 0; i < 6; ++i) s.measure(i);
  s.gate(0);
  EXPECT_TRUE(s.connected(0, 1));
  EXPECT_TRUE(s.connected(1, 0));
  EXPECT_FALSE(s.connected(0, 2));
  s.gate(5);  // wraps onto qudits 5 and 0
  EXPECT_TRUE(s.connected(5, 1));
  EXPECT_TRUE(s.consistent());
}

TEST(Ancilla, GateSpreadsAncillaConnection) {
  // Isolate every qudit except 0, which keeps its tie to the ancilla.
  ConnectivityState s(6);
  for (int i = 1; i < 6; ++i) s.measure(i);
  EXPECT_TRUE(s.ancilla().test(0));
  EXPECT_FALSE(s.ancilla().test(1));
  s.gate(0);
  EXPECT_TRUE(s.ancilla().test(1));
  EXPECT_FALSE(s.ancilla().test(2));
}

TEST(Ancilla, CorrelationUnmeasuredCircuitIsOne) {
  auto cp = CircuitParams::make(8, 0.0, 0.0, 2);
  Trajectory traj(cp, 0);
  ConnectivityState s(8);
  for (std::int64_t t = 1; t <= cp.t_max; ++t) {
    s.apply(traj.next());
    if (t == cp.t_max / 2) s.couple_probes();
  }
  EXPECT_EQ(s.correlation(), 1);
}

TEST(Ancilla, CorrelationFullMeasurementIsZero) {
  for (int L : {6, 8, 12})
    for (std::uint64_t r = 0; r < 20; ++r) {
      auto cp = CircuitParams::make(L, 0.0, 1.0, 2);
      Trajectory traj(cp, r);
      ConnectivityState s(L);
      ExplicitLattice lat(L, InitialState::Product);
      for (std::int64_t t = 1; t <= cp.t_max; ++t) {
        const auto ev = traj.next();
        s.apply(ev);
        lat.apply(ev);
        if (t == cp.t_max / 2) {
          s.couple_probes();
          lat.couple_probes();
        }
      }
      EXPECT_EQ(s.correlation(), 0);
      EXPECT_FALSE(lat.probe_hit());
    }
}

TEST(Ancilla, CorrelationNeedsJoinedProbeClusters) {
  // Probe 1 later reaches qudit 4, but only after probe 2's link through it
  // has been measured away.
  ConnectivityState s(8);
  ExplicitLattice lat(8, InitialState::Product);
  for (int k = 0; k < 8; ++k) {
    s.measure(k);
    lat.measure(k);
  }
  s.couple_probes();
  lat.couple_probes();
  s.measure(4);
  lat.measure(4);
  for (int k = 0; k < 4; ++k) {
    s.gate(k);
    lat.gate(k);
  }
  EXPECT_TRUE(s.probe1().test(4));
  EXPECT_EQ(s.correlation(), 0);
  EXPECT_FALSE(lat.probe_hit());
  s.gate(4);
  lat.gate(4);
  EXPECT_EQ(s.correlation(), 0);
  EXPECT_FALSE(lat.probe_hit());
}

TEST(Ancilla, CorrelationIsSticky) {
  auto cp = CircuitParams::make(8, 0.2, 0.3, 6);
  for (std::uint64_t r = 0; r < 50; ++r) {
    Trajectory traj(cp, r);
    ConnectivityState s(8);
    int prev = 0;
    for (std::int64_t t = 1; t <= cp.t_max; ++t) {
      s.apply(traj.next());
      if (t == cp.t_max / 2) s.couple_probes();
      if (t >= cp.t_max / 2) {
        ASSERT_GE(s.correlation(), prev);
        prev = s.correlation();
      }
    }
  }
}

TEST(Ancilla, PurificationAtFullControlTakesL) {
  for (int L : {8, 16, 32})
    for (double q : {0.0, 0.5, 1.0}) {
      auto cp = CircuitParams::make(L, 1.0, q, 3);
      Trajectory traj(cp, 0);
      ConnectivityState s(L);
      std::int64_t t = 0;
      while (s.ancilla_entropy() == 1) {
        s.apply(traj.next());
        ++t;
      }
      EXPECT_EQ(t, L);
    }
}

TEST(Ancilla, ClustersMatchOracleOnRandomPrefixes) {
  Rng pick(11);
  for (int trial = 0; trial < 150; ++trial) {
    const int L = 4 + 2 * static_cast<int>(pick.uniform() * 5);
    auto cp = CircuitParams::make(L, pick.uniform(), pick.uniform(), 21);
    Trajectory traj(cp, static_cast<std::uint64_t>(trial));
    ConnectivityState s(L);
    ExplicitLattice lat(L, InitialState::Product);
    for (int t = 0; t < 40; ++t) {
      const auto ev = traj.next();
      s.apply(ev);
      lat.apply(ev);
      ASSERT_EQ(s.cluster_labels(), lat.cluster_labels()) << "trial " << trial << " step " << t;
      ASSERT_EQ(s.ancilla_entropy() == 1, lat.boundary_connected());
      ASSERT_TRUE(s.consistent());
    }
  }
}
