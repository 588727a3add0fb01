#pragma once

// Minimal-cut entanglement model: all-pairs dual-graph distances between the
// L final-time vertices, updated event by event.
//
// Vertex i is the face between qudit lines i and i+1 (labeled by the qudit on
// its left). Measuring qudit i zeroes the link between vertices i-1 and i; a
// gate on qudits (i, i+1) replaces vertex i by a fresh face adjacent only to
// vertices i-1 and i+1.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dadic/trajectory.hpp"

namespace dadic {

/// Largest possible cut between two final-time vertices: the number of qudit
/// lines between them going the short way round.
constexpr int physical_cap(int i, int j, int L) noexcept {
  const int a = wrap(i - j, L);
  const int b = L - a;
  return a < b ? a : b;
}

class DistanceMatrix {
 public:
  using Entry = std::uint8_t;
  static constexpr int kMaxL = 254;

  DistanceMatrix(int L, InitialState init) : L_(L), stride_(((L + 31) / 32) * 32) {
    if (L < 4 || L > kMaxL) throw std::invalid_argument("DistanceMatrix: L must lie in [4, 254]");
    d_.assign(static_cast<std::size_t>(L_) * stride_, 0);
    if (init == InitialState::MaximallyEntangled) {
      for (int i = 0; i < L_; ++i)
        for (int j = 0; j < L_; ++j) at(i, j) = static_cast<Entry>(physical_cap(i, j, L_));
    }
  }

  int size() const { return L_; }
  int operator()(int i, int j) const { return d_[idx(i, j)]; }

  /// Measurement of qudit i: link (i-1, i) drops to zero, rows i and i-1 are
  /// equalized to their elementwise minimum, then one triangle pass through
  /// the equalized row.
  void apply_measurement(int i) {
    i = wrap(i, L_);
    const int im = wrap(i - 1, L_);
    Entry* ri = row(i);
    Entry* rm = row(im);
    for (int j = 0; j < L_; ++j) {
      const Entry m = std::min(ri[j], rm[j]);
      ri[j] = m;
      rm[j] = m;
    }
    for (int j = 0; j < L_; ++j) {
      at(j, i) = ri[j];
      at(j, im) = ri[j];
    }
    // d_jk <- min(d_jk, d'_ij + d'_ik). Entries with j or k in {i, i-1} are
    // fixed points of this rule, so the pass runs over the full matrix.
    std::copy(ri, ri + stride_, scratch_.begin());
    const Entry* __restrict src = scratch_.data();
    for (int j = 0; j < L_; ++j) {
      const Entry dij = src[j];
      Entry* __restrict rj = row(j);
      for (int k = 0; k < stride_; ++k) {
        const Entry via = static_cast<Entry>(dij + src[k]);
        rj[k] = rj[k] < via ? rj[k] : via;
      }
    }
  }

  /// Gate on qudits (i, i+1) creating a new vertex i, clamped to the physical
  /// cap, followed by the optional measurements of qudits i and i+1.
  void apply_chaotic(int i, bool measure_left, bool measure_right) {
    i = wrap(i, L_);
    const int ip = wrap(i + 1, L_);
    const int im = wrap(i - 1, L_);
    for (int j = 0; j < L_; ++j) {
      if (j == i) continue;
      int v = 1 + std::min(at(ip, j), at(im, j));
      const int cap = physical_cap(i, j, L_) + cap_bias_;
      if (v > cap) v = std::max(cap, 0);
      at(i, j) = static_cast<Entry>(v);
      at(j, i) = static_cast<Entry>(v);
    }
    at(i, i) = 0;
    if (measure_left) apply_measurement(i);
    if (measure_right) apply_measurement(ip);
  }

  void apply(const StepEvent& ev) {
    if (ev.kind == StepKind::Control)
      apply_measurement(ev.site);
    else
      apply_chaotic(ev.site, ev.measure_left, ev.measure_right);
  }

  /// Fault injection for checker self-tests: shifts the cap used by
  /// apply_chaotic. Zero in every real run.
  void set_cap_bias(int bias) { cap_bias_ = bias; }

  /// First violated invariant (symmetry, zero diagonal, cap, triangle), if any.
  std::optional<std::string> check_invariants() const {
    for (int i = 0; i < L_; ++i) {
      if (at(i, i) != 0) return "nonzero diagonal at " + std::to_string(i);
      for (int j = 0; j < L_; ++j) {
        if (at(i, j) != at(j, i))
          return "asymmetry at (" + std::to_string(i) + "," + std::to_string(j) + ")";
        if (at(i, j) > physical_cap(i, j, L_))
          return "cap exceeded at (" + std::to_string(i) + "," + std::to_string(j) + ")";
      }
    }
    for (int i = 0; i < L_; ++i)
      for (int j = 0; j < L_; ++j)
        for (int k = 0; k < L_; ++k)
          if (at(i, j) > at(i, k) + at(k, j))
            return "triangle violated for (" + std::to_string(i) + "," + std::to_string(j) + ") via " +
                   std::to_string(k);
    return std::nullopt;
  }

  bool operator==(const DistanceMatrix& o) const { return L_ == o.L_ && d_ == o.d_; }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * stride_ + j; }
  Entry& at(int i, int j) { return d_[idx(i, j)]; }
  Entry at(int i, int j) const { return d_[idx(i, j)]; }
  Entry* row(int i) { return d_.data() + static_cast<std::size_t>(i) * stride_; }

  int L_;
  int stride_;
  int cap_bias_ = 0;
  std::vector<Entry> d_;
  std::vector<Entry> scratch_ = std::vector<Entry>(static_cast<std::size_t>(stride_), 0);
};

/// Entropy of the qudits strictly between two boundary vertices
/// (qudits v_left+1 ... v_right in cyclic order).
inline int entropy_contiguous(const DistanceMatrix& d, int v_left, int v_right) {
  const int L = d.size();
  v_left = wrap(v_left, L);
  v_right = wrap(v_right, L);
  if (v_left == v_right) throw std::invalid_argument("entropy_contiguous: boundary vertices must differ");
  return d(v_left, v_right);
}

/// Entropy of the L/2 qudits to the right of the decimal point.
inline int half_cut_entropy(const DistanceMatrix& d, int decimal) {
  const int L = d.size();
  return d(wrap(decimal, L), wrap(decimal + L / 2, L));
}

/// Four consecutive regions A, B, C, D of L/4 qudits each. Region A starts
/// right of vertex `anchor`.
struct QuarterPartition {
  int anchor = 0;
  int L = 0;

  QuarterPartition(int anchor_vertex, int size) : anchor(wrap(anchor_vertex, size)), L(size) {
    if (L % 4 != 0) throw std::invalid_argument("QuarterPartition: L must be divisible by 4");
  }

  /// Boundary vertex k in {0,1,2,3}: A = (v0, v1], B = (v1, v2], ...
  int vertex(int k) const { return wrap(anchor + k * (L / 4), L); }
};

struct QuarterEntropies {
  int a, b, c, d, ab, bc;
};

inline QuarterEntropies quarter_entropies(const DistanceMatrix& dm, const QuarterPartition& part) {
  const int v0 = part.vertex(0), v1 = part.vertex(1), v2 = part.vertex(2), v3 = part.vertex(3);
  return {dm(v0, v1), dm(v1, v2), dm(v2, v3), dm(v3, v0), dm(v0, v2), dm(v1, v3)};
}

/// I2(A, C) = max(0, S(A) + S(C) - S(B) - S(D)).
inline int mutual_info_I2(const DistanceMatrix& dm, const QuarterPartition& part) {
  const auto s = quarter_entropies(dm, part);
  return std::max(0, s.a + s.c - s.b - s.d);
}

/// I3(A, B, C) = I2(A, C) + S(B) + S(D) - S(A u B) - S(B u C).
inline int tripartite_I3(const DistanceMatrix& dm, const QuarterPartition& part) {
  const auto s = quarter_entropies(dm, part);
  return std::max(0, s.a + s.c - s.b - s.d) + s.b + s.d - s.ab - s.bc;
}

}  // namespace dadic
