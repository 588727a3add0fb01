#pragma once

// Step-by-step comparison of the incremental models against the explicit
// lattice built from the same trajectory.

#include <cstdint>
#include <optional>
#include <string>

#include "dadic/ancilla.hpp"
#include "dadic/mincut.hpp"
#include "dadic/oracle.hpp"
#include "dadic/trajectory.hpp"

namespace dadic {

struct Mismatch {
  std::uint64_t master_seed = 0;
  std::uint64_t realization = 0;
  std::int64_t step = 0;
  std::string quantity;
  int i = -1, j = -1;
  long long expected = 0, got = 0;

  std::string describe() const {
    std::string s = "seed=" + std::to_string(master_seed) + " realization=" + std::to_string(realization) +
                    " step=" + std::to_string(step) + " " + quantity;
    if (i >= 0) s += " i=" + std::to_string(i);
    if (j >= 0) s += " j=" + std::to_string(j);
    return s + " oracle=" + std::to_string(expected) + " model=" + std::to_string(got);
  }
};

struct EquivalenceOptions {
  bool check_mincut = true;
  bool check_ancilla = true;
  int cap_bias = 0;  ///< nonzero only for fault-injection runs
};

/// Runs t steps of one realization, comparing after every step: the full
/// distance matrix against dual-graph BFS, cluster labels against union-find,
/// S_a against boundary connectivity, and (after coupling at t/2) the probe
/// correlation. Returns the first mismatch.
inline std::optional<Mismatch> check_realization(const CircuitParams& params, std::uint64_t realization_index,
                                                 std::int64_t t, const EquivalenceOptions& opt = {}) {
  params.validate();
  ExplicitLattice lat(params.L, params.initial_state);
  DistanceMatrix dm(params.L, params.initial_state);
  dm.set_cap_bias(opt.cap_bias);
  ConnectivityState cs(params.L);
  Trajectory traj(params, realization_index);
  const int L = params.L;
  auto mismatch = [&](std::int64_t step, std::string what, int i, int j, long long expected, long long got) {
    return Mismatch{params.master_seed, realization_index, step, std::move(what), i, j, expected, got};
  };
  for (std::int64_t s = 1; s <= t; ++s) {
    const StepEvent ev = traj.next();
    lat.apply(ev);
    if (opt.check_mincut) dm.apply(ev);
    if (opt.check_ancilla) cs.apply(ev);
    if (s == t / 2 && t >= 2) {
      lat.couple_probes();
      if (opt.check_ancilla) cs.couple_probes();
    }
    if (opt.check_mincut) {
      for (int i = 0; i < L; ++i) {
        const auto row = lat.cut_row(i);
        for (int j = 0; j < L; ++j)
          if (row[j] != dm(i, j)) return mismatch(s, "distance", i, j, row[j], dm(i, j));
      }
    }
    if (opt.check_ancilla) {
      const auto expected = lat.cluster_labels();
      const auto got = cs.cluster_labels();
      for (int i = 0; i < L; ++i)
        if (expected[i] != got[i]) return mismatch(s, "cluster_label", i, -1, expected[i], got[i]);
      const int sa = lat.boundary_connected() ? 1 : 0;
      if (sa != cs.ancilla_entropy()) return mismatch(s, "s_a", -1, -1, sa, cs.ancilla_entropy());
      if (s >= t / 2 && t >= 2) {
        const int c = lat.probe_hit() ? 1 : 0;
        if (c != cs.correlation()) return mismatch(s, "corr", -1, -1, c, cs.correlation());
      }
    }
  }
  return std::nullopt;
}

}  // namespace dadic
