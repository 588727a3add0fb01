#pragma once

// Classical antecedents of the circuit: the d-adic map under stochastic
// control, and the random walk of the decimal point that governs purification
// when every gate is followed by measurements.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dadic/rng.hpp"
#include "dadic/trajectory.hpp"

namespace dadic {

/// Critical control probability of x -> d x mod 1 interleaved with
/// x -> (1 - a) x: ln(1-a) / (ln(1-a) - ln d). Takes a in extended precision
/// so a = (d-1)/d lands on 1/2 after rounding.
inline double classical_pc(long double a, int d) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("classical_pc: a must lie in (0, 1)");
  if (d < 2) throw std::invalid_argument("classical_pc: d must be >= 2");
  const long double contraction = std::log1p(-a);
  const long double expansion = std::log(static_cast<long double>(d));
  return static_cast<double>(contraction / (contraction - expansion));
}

/// Mean signed displacement of the decimal point per step.
constexpr double drift_velocity(double p) noexcept { return 2.0 * p - 1.0; }

/// Number of times a drifting decimal point winds around the ring in t steps.
inline double effective_depth(double p, double t, int L) { return std::abs(drift_velocity(p)) * t / L; }

struct ControlledMapParams {
  int d = 2;
  double a = 0.5;
  double p = 0.5;
  std::int64_t steps = 1000;
  double epsilon = 1e-12;
  std::uint64_t master_seed = 0;

  void validate() const {
    if (d < 2) throw std::invalid_argument("ControlledMapParams: d must be >= 2");
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("ControlledMapParams: a must lie in [0,1]");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("ControlledMapParams: p must lie in [0,1]");
    if (steps < 0) throw std::invalid_argument("ControlledMapParams: steps must be >= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("ControlledMapParams: epsilon must be positive");
  }
};

/// First step at which |x| < epsilon, or nullopt if never reached.
///
/// Doubles hold only ~53 binary digits, so a plain x -> d x mod 1 turns every
/// orbit into a finite expansion that collapses onto 0. After each chaotic
/// step the digit entering at the precision floor is drawn at random, which
/// mimics the expansion of a generic irrational.
inline std::optional<std::int64_t> simulate_controlled_map(const ControlledMapParams& params, double x0,
                                                           std::uint64_t realization_index) {
  params.validate();
  if (!(x0 >= 0.0 && x0 < 1.0)) throw std::invalid_argument("simulate_controlled_map: x0 must lie in [0,1)");
  Rng rng(derive_stream_seed(params.master_seed, realization_index));
  const double floor_scale = 0x1.0p-52;
  const double contraction = 1.0 - params.a;
  double x = x0;
  if (std::abs(x) < params.epsilon) return 0;
  for (std::int64_t t = 1; t <= params.steps; ++t) {
    if (rng.bernoulli(params.p)) {
      x *= contraction;
    } else {
      const double refill = rng.uniform() * floor_scale;
      x = std::fmod(params.d * x + refill, 1.0);
    }
    if (std::abs(x) < params.epsilon) return t;
  }
  return std::nullopt;
}

/// Time for the decimal point to measure every site under q = 1 semantics.
///
/// The walker starts at site 0. A control step (probability p) measures the
/// current site and moves left; a chaotic step moves right and measures the two
/// gate sites. Returns the first step after which every site has been
/// measured, capped at `cap` when the walk is still incomplete. One uniform
/// is consumed per step.
inline std::int64_t rw_wrap_time(int L, double p, std::uint64_t master_seed, std::uint64_t realization_index,
                                 std::int64_t cap = std::numeric_limits<std::int64_t>::max()) {
  if (L < 2) throw std::invalid_argument("rw_wrap_time: L must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("rw_wrap_time: p must lie in [0,1]");
  Rng rng(derive_stream_seed(master_seed, realization_index));
  std::vector<char> seen(static_cast<std::size_t>(L), 0);
  int remaining = L;
  auto mark = [&](int s) {
    if (!seen[s]) {
      seen[s] = 1;
      --remaining;
    }
  };
  int pos = 0;
  for (std::int64_t t = 1; t <= cap; ++t) {
    if (rng.bernoulli(p)) {
      mark(pos);
      pos = wrap(pos - 1, L);
    } else {
      mark(pos);
      mark(wrap(pos + 1, L));
      pos = wrap(pos + 1, L);
    }
    if (remaining == 0) return t;
  }
  return cap;
}

}  // namespace dadic
