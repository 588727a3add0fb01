#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dadic/rng.hpp"

namespace dadic {

enum class InitialState { Product, MaximallyEntangled };

inline const char* to_string(InitialState s) {
  return s == InitialState::Product ? "product" : "maximally_entangled";
}

/// Cyclic site arithmetic on a ring of L sites.
constexpr int wrap(int i, int L) noexcept {
  const int r = i % L;
  return r < 0 ? r + L : r;
}

/// Definition of one stochastic circuit ensemble.
struct CircuitParams {
  int L = 16;
  double p = 0.0;  ///< control probability per step
  double q = 0.0;  ///< measurement probability per gate leg after a chaotic step
  std::int64_t t_max = 0;
  std::uint64_t master_seed = 0;
  InitialState initial_state = InitialState::Product;
  int decimal_start = 0;

  static std::int64_t default_t_max(int L) { return 2 * static_cast<std::int64_t>(L) * L; }

  /// Builds params with t_max = 2 L^2.
  static CircuitParams make(int L, double p, double q, std::uint64_t seed = 0) {
    CircuitParams cp;
    cp.L = L;
    cp.p = p;
    cp.q = q;
    cp.t_max = default_t_max(L);
    cp.master_seed = seed;
    return cp;
  }

  void validate() const {
    if (L < 4 || L % 2 != 0) throw std::invalid_argument("L must be an even integer >= 4, got " + std::to_string(L));
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0,1]");
    if (t_max < 1) throw std::invalid_argument("t_max must be positive");
    if (decimal_start < 0 || decimal_start >= L) throw std::invalid_argument("decimal_start must lie in [0, L)");
  }
};

enum class StepKind : std::uint8_t { Control, Chaotic };

/// One time step of the circuit.
///
/// Control: qudit `site` (= decimal_before) is measured, decimal moves left.
/// Chaotic: decimal moves right, a gate acts on qudits (site, site+1) with
/// site = decimal_before, then each of the two qudits is optionally measured.
struct StepEvent {
  StepKind kind = StepKind::Control;
  int site = 0;
  bool measure_left = false;
  bool measure_right = false;
  int decimal_before = 0;
  int decimal_after = 0;

  bool operator==(const StepEvent&) const = default;
};

/// Draws the next event. Always consumes three uniforms in the order
/// (step type, left measurement, right measurement) so that the stream layout
/// does not depend on the outcome.
inline StepEvent next_step(const CircuitParams& params, int decimal, Rng& rng) {
  const bool control = rng.bernoulli(params.p);
  const bool ml = rng.bernoulli(params.q);
  const bool mr = rng.bernoulli(params.q);
  StepEvent ev;
  ev.decimal_before = decimal;
  ev.site = decimal;
  if (control) {
    ev.kind = StepKind::Control;
    ev.decimal_after = wrap(decimal - 1, params.L);
  } else {
    ev.kind = StepKind::Chaotic;
    ev.measure_left = ml;
    ev.measure_right = mr;
    ev.decimal_after = wrap(decimal + 1, params.L);
  }
  return ev;
}

/// Lazily generated event stream of one realization.
class Trajectory {
 public:
  Trajectory(const CircuitParams& params, std::uint64_t realization_index)
      : params_(params),
        rng_(derive_stream_seed(params.master_seed, realization_index)),
        decimal_(params.decimal_start) {}

  StepEvent next() {
    StepEvent ev = next_step(params_, decimal_, rng_);
    decimal_ = ev.decimal_after;
    ++steps_;
    return ev;
  }

  int decimal() const { return decimal_; }
  std::int64_t steps_taken() const { return steps_; }
  const CircuitParams& params() const { return params_; }

 private:
  CircuitParams params_;
  Rng rng_;
  int decimal_;
  std::int64_t steps_ = 0;
};

inline std::vector<StepEvent> generate_trajectory(const CircuitParams& params,
                                                  std::uint64_t realization_index) {
  params.validate();
  Trajectory traj(params, realization_index);
  std::vector<StepEvent> events;
  events.reserve(static_cast<std::size_t>(params.t_max));
  for (std::int64_t t = 0; t < params.t_max; ++t) events.push_back(traj.next());
  return events;
}

}  // namespace dadic
