#pragma once

// Cluster connectivity of the percolation lattice at the current time slice,
// tracked as an L x L boolean matrix c plus bit lists recording which qudits
// are connected to the initial-time ancilla (a) and to two probe ancillas
// coupled mid-circuit (a1, a2).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dadic/trajectory.hpp"

namespace dadic {

/// Packed bit row of length L.
class BitRow {
 public:
  BitRow() = default;
  explicit BitRow(int L, bool value = false)
      : words_(static_cast<std::size_t>((L + 63) / 64), value ? ~0ULL : 0ULL), L_(L) {
    trim();
  }

  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
  void set(int i) { words_[i >> 6] |= 1ULL << (i & 63); }
  void reset(int i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
  void clear() { std::fill(words_.begin(), words_.end(), 0ULL); }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  int count() const {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }
  bool intersects(const BitRow& o) const {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & o.words_[k]) return true;
    return false;
  }
  BitRow& operator|=(const BitRow& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  int size() const { return L_; }
  bool operator==(const BitRow&) const = default;

 private:
  void trim() {
    if (L_ % 64 != 0 && !words_.empty()) words_.back() &= (1ULL << (L_ % 64)) - 1;
  }
  std::vector<std::uint64_t> words_;
  int L_ = 0;
};

class ConnectivityState {
 public:
  /// Fresh state: the initial-time boundary connects every qudit to every
  /// other and to the ancilla.
  explicit ConnectivityState(int L) : L_(L), a_(L, true) {
    if (L < 4) throw std::invalid_argument("ConnectivityState: L must be >= 4");
    c_.assign(static_cast<std::size_t>(L), BitRow(L, true));
  }

  int size() const { return L_; }
  bool connected(int i, int j) const { return c_[i].test(j); }
  const BitRow& row(int i) const { return c_[i]; }
  const BitRow& ancilla() const { return a_; }
  bool probes_coupled() const { return coupled_; }
  const BitRow& probe1() const { return a1_; }
  const BitRow& probe2() const { return a2_; }

  /// Measurement of qudit i disconnects it from every qudit and every ancilla.
  void measure(int i) {
    i = wrap(i, L_);
    c_[i].clear();
    c_[i].set(i);
    for (int j = 0; j < L_; ++j)
      if (j != i) c_[j].reset(i);
    a_.reset(i);
    if (coupled_) {
      a1_.reset(i);
      a2_.reset(i);
    }
  }

  /// Gate on qudits (i, i+1): merges their clusters.
  void gate(int i) {
    i = wrap(i, L_);
    const int ip = wrap(i + 1, L_);
    BitRow merged = c_[i];
    merged |= c_[ip];
    // Every member of the merged cluster is now connected to every other; for
    // j outside it, c'_ij = 0 and row j is untouched.
    for (int j = 0; j < L_; ++j)
      if (merged.test(j)) c_[j] |= merged;
    close_over(a_);
    if (coupled_) {
      close_over(a1_);
      close_over(a2_);
      update_sticky();
    }
  }

  void apply(const StepEvent& ev) {
    if (ev.kind == StepKind::Control) {
      measure(ev.site);
    } else {
      gate(ev.site);
      if (ev.measure_left) measure(ev.site);
      if (ev.measure_right) measure(ev.site + 1);
    }
  }

  /// Couples probe ancilla 1 to qudit 0 and probe ancilla 2 to qudit L/2.
  void couple_probes() {
    a1_ = c_[0];
    a2_ = c_[L_ / 2];
    coupled_ = true;
    joined_ = false;
    update_sticky();
  }

  /// S_a: 1 while any qudit still connects to the initial-time ancilla.
  int ancilla_entropy() const { return a_.any() ? 1 : 0; }

  /// Correlation C of the two probes: 1 once their clusters have joined, i.e.
  /// some qudit has been connected to both.
  int correlation() const { return joined_ ? 1 : 0; }

  /// Canonical cluster labels: each qudit gets the smallest index in its row.
  std::vector<int> cluster_labels() const {
    std::vector<int> lab(static_cast<std::size_t>(L_));
    for (int i = 0; i < L_; ++i) {
      int m = i;
      for (int j = 0; j < i; ++j)
        if (c_[i].test(j)) {
          m = j;
          break;
        }
      lab[i] = m;
    }
    return lab;
  }

  /// True if c is symmetric with unit diagonal and `a` is constant on clusters.
  bool consistent() const {
    for (int i = 0; i < L_; ++i) {
      if (!c_[i].test(i)) return false;
      for (int j = 0; j < L_; ++j) {
        if (c_[i].test(j) != c_[j].test(i)) return false;
        if (c_[i].test(j) && a_.test(i) && !a_.test(j)) return false;
      }
    }
    return true;
  }

 private:
  // a_j <- OR_k (c'_jk AND a_k), evaluated with the post-merge rows.
  void close_over(BitRow& a) const {
    BitRow next(L_);
    for (int j = 0; j < L_; ++j)
      if (c_[j].intersects(a)) next.set(j);
    a = std::move(next);
  }

  // Only gates and coupling can join the probe clusters; measurements only
  // remove qudits.
  void update_sticky() {
    if (a1_.intersects(a2_)) joined_ = true;
  }

  int L_;
  std::vector<BitRow> c_;
  BitRow a_;
  BitRow a1_, a2_;
  bool coupled_ = false;
  bool joined_ = false;
};

}  // namespace dadic
