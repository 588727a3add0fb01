#pragma once

// Reference implementations used to validate the incremental models.
//
// ExplicitLattice materializes the whole spacetime lattice of one trajectory:
// the primal percolation lattice (gate sites joined by qudit-line bonds, cut by
// measurements) and its dual graph (faces joined across qudit-line segments,
// weight 0 if the segment was measured and 1 otherwise). Queries rebuild from
// scratch: 0-1 BFS for cuts, union-find for clusters. It is slow on purpose.
//
// wetting_p0 builds the p = 0 circuit as a regular tilted square lattice with
// twisted periodic boundaries straight from lattice coordinates, without the
// event stream.

#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dadic/rng.hpp"
#include "dadic/trajectory.hpp"

namespace dadic {

/// Weighted quick-union with path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

namespace detail {

struct WeightedEdge {
  int u, v;
  int w;
};

/// 0-1 BFS from `source` over an undirected graph with 0/1 weights.
inline std::vector<int> zero_one_bfs(int n_vertices, const std::vector<WeightedEdge>& edges,
                                     const std::vector<std::vector<int>>& adj, int source) {
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> dist(static_cast<std::size_t>(n_vertices), kInf);
  std::deque<int> dq;
  dist[source] = 0;
  dq.push_back(source);
  while (!dq.empty()) {
    const int x = dq.front();
    dq.pop_front();
    for (int e : adj[x]) {
      const auto& ed = edges[e];
      const int y = ed.u == x ? ed.v : ed.u;
      const int nd = dist[x] + ed.w;
      if (nd < dist[y]) {
        dist[y] = nd;
        if (ed.w == 0)
          dq.push_front(y);
        else
          dq.push_back(y);
      }
    }
  }
  return dist;
}

}  // namespace detail

class ExplicitLattice {
 public:
  ExplicitLattice(int L, InitialState init) : L_(L) {
    if (L < 4 || L % 2 != 0) throw std::invalid_argument("ExplicitLattice: L must be even and >= 4");
    // Primal site 0 is the initial-time boundary; every qudit line starts there.
    num_sites_ = 1;
    for (int k = 0; k < L_; ++k) top_bond_.push_back(add_bond(0));

    // Dual: one initial face per column. A product state merges them through a
    // bottom vertex at zero cost; a maximally entangled state leaves only the
    // unit-cost crossings of the initial line segments.
    int bottom = -1;
    if (init == InitialState::Product) bottom = add_face();
    for (int k = 0; k < L_; ++k) top_face_.push_back(add_face());
    if (bottom >= 0)
      for (int k = 0; k < L_; ++k) add_edge(bottom, top_face_[k], 0);
    for (int k = 0; k < L_; ++k) top_edge_.push_back(add_edge(top_face_[wrap(k - 1, L_)], top_face_[k], 1));
  }

  int size() const { return L_; }
  int num_faces() const { return static_cast<int>(adj_.size()); }
  int num_dual_edges() const { return static_cast<int>(edges_.size()); }
  int num_sites() const { return num_sites_; }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }

  /// Gate site on qudits (i, i+1): both lines end their current segment here
  /// and start a new one; the face between them is replaced by a new face.
  void gate(int i) {
    i = wrap(i, L_);
    const int ip = wrap(i + 1, L_);
    const int g = num_sites_++;
    bonds_[top_bond_[i]].upper = g;
    bonds_[top_bond_[ip]].upper = g;
    top_bond_[i] = add_bond(g);
    top_bond_[ip] = add_bond(g);

    const int f = add_face();
    top_edge_[i] = add_edge(top_face_[wrap(i - 1, L_)], f, 1);
    top_edge_[ip] = add_edge(f, top_face_[ip], 1);
    top_face_[i] = f;
  }

  /// Measurement cuts the current segment of qudit line k.
  void measure(int k) {
    k = wrap(k, L_);
    bonds_[top_bond_[k]].cut = true;
    edges_[top_edge_[k]].w = 0;
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

  /// Attaches probe ancillas to qudits 0 and L/2 through single-qudit coupling
  /// sites. The dual graph is unchanged: the new segment sits between the same
  /// two faces as the old one.
  void couple_probes() {
    probe1_ = attach_probe(0);
    probe2_ = attach_probe(L_ / 2);
  }

  /// Dual-graph shortest path between final-time vertices.
  int shortest_cut(int v1, int v2) const {
    v1 = wrap(v1, L_);
    v2 = wrap(v2, L_);
    if (v1 == v2) throw std::invalid_argument("shortest_cut: vertices must differ");
    const auto dist = detail::zero_one_bfs(num_faces(), edges_, adj_, top_face_[v1]);
    const int d = dist[top_face_[v2]];
    if (d == std::numeric_limits<int>::max()) throw std::logic_error("shortest_cut: disconnected dual graph");
    return d;
  }

  /// Distances from final vertex v to every final vertex.
  std::vector<int> cut_row(int v) const {
    const auto dist = detail::zero_one_bfs(num_faces(), edges_, adj_, top_face_[wrap(v, L_)]);
    std::vector<int> out(static_cast<std::size_t>(L_));
    for (int k = 0; k < L_; ++k) out[k] = dist[top_face_[k]];
    return out;
  }

  /// Canonical cluster labels of the current qudits (smallest member index).
  /// A qudit whose current segment is cut is a cluster of its own.
  std::vector<int> cluster_labels() const {
    UnionFind uf = primal_clusters();
    std::vector<int> lab(static_cast<std::size_t>(L_));
    for (int i = 0; i < L_; ++i) {
      lab[i] = i;
      if (bonds_[top_bond_[i]].cut) continue;
      const auto ri = uf.find(static_cast<std::size_t>(bonds_[top_bond_[i]].lower));
      for (int j = 0; j < i; ++j) {
        const auto& bj = bonds_[top_bond_[j]];
        if (!bj.cut && uf.find(static_cast<std::size_t>(bj.lower)) == ri) {
          lab[i] = j;
          break;
        }
      }
    }
    return lab;
  }

  /// True if some current qudit is connected through uncut bonds to the
  /// initial-time boundary.
  bool boundary_connected() const {
    UnionFind uf = primal_clusters();
    for (int k = 0; k < L_; ++k) {
      const auto& b = bonds_[top_bond_[k]];
      if (!b.cut && uf.same(static_cast<std::size_t>(b.lower), 0)) return true;
    }
    return false;
  }

  /// Probe correlation: the two probe sites share a primal cluster. Closed
  /// bonds are never cut later, so this is monotone in time.
  bool probe_hit() const {
    if (probe1_ < 0) return false;
    return primal_clusters().same(static_cast<std::size_t>(probe1_), static_cast<std::size_t>(probe2_));
  }

 private:
  struct Bond {
    int lower;
    int upper;  // -1 while the segment is still open at the top
    bool cut;
  };

  int add_bond(int lower) {
    bonds_.push_back({lower, -1, false});
    return static_cast<int>(bonds_.size()) - 1;
  }
  int add_face() {
    adj_.emplace_back();
    return static_cast<int>(adj_.size()) - 1;
  }
  int add_edge(int u, int v, int w) {
    edges_.push_back({u, v, w});
    const int e = static_cast<int>(edges_.size()) - 1;
    adj_[u].push_back(e);
    if (v != u) adj_[v].push_back(e);
    return e;
  }

  int attach_probe(int k) {
    const int probe = num_sites_++;
    const int h = num_sites_++;
    bonds_[top_bond_[k]].upper = h;
    bonds_.push_back({probe, h, false});
    top_bond_[k] = add_bond(h);
    return probe;
  }

  UnionFind primal_clusters() const {
    UnionFind uf(static_cast<std::size_t>(num_sites_));
    for (const auto& b : bonds_)
      if (b.upper >= 0 && !b.cut) uf.unite(static_cast<std::size_t>(b.lower), static_cast<std::size_t>(b.upper));
    return uf;
  }

  int L_;
  int num_sites_ = 0;
  std::vector<Bond> bonds_;
  std::vector<int> top_bond_;
  std::vector<detail::WeightedEdge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> top_face_;
  std::vector<int> top_edge_;
  int probe1_ = -1, probe2_ = -1;
};

/// Lattice of the first t events of a realization.
inline ExplicitLattice build_lattice(const CircuitParams& params, std::uint64_t realization_index,
                                     std::int64_t t) {
  params.validate();
  if (t < 0 || t > params.t_max) throw std::invalid_argument("build_lattice: t must lie in [0, t_max]");
  ExplicitLattice lat(params.L, params.initial_state);
  Trajectory traj(params, realization_index);
  for (std::int64_t s = 0; s < t; ++s) lat.apply(traj.next());
  return lat;
}

struct WettingResult {
  int s_half = 0;
  int s_a = 0;
};

/// Stream salt separating wetting draws from trajectory draws.
inline constexpr std::uint64_t kWettingSalt = 0x5745545449474EULL;

/// Half-cut entropy and ancilla entropy of one p = 0 realization computed on
/// the brickwork lattice.
///
/// Gate sites sit at (x, tau) with x in [0, L) the left qudit of the gate and
/// tau = x + 2r for round r in [0, rounds). Each site has an up-left leg
/// (qudit x) to (x-1, tau+1) and an up-right leg (qudit x+1) to (x+1, tau+1),
/// each cut independently with probability q. Columns are identified with a
/// twist, (x + L, tau) ~ (x, tau - (L - 2)). Faces are labeled by their
/// bottom site; faces below the first row merge into the product-state
/// initial boundary. The initial-time ancilla connects to every first-row leg.
inline WettingResult wetting_p0(int L, double q, int rounds, std::uint64_t master_seed,
                                std::uint64_t realization_index) {
  if (L < 4 || L % 2 != 0) throw std::invalid_argument("wetting_p0: L must be even and >= 4");
  if (rounds < 1) throw std::invalid_argument("wetting_p0: rounds must be positive");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("wetting_p0: q must lie in [0,1]");

  const int n_sites = L * rounds;
  const int bottom = n_sites;  // shared id of the bottom face and the bottom primal site
  const int twist = L - 2;

  auto site_id = [&](int x, int tau) -> int {
    // Normalize the column through the twisted identification.
    while (x >= L) {
      x -= L;
      tau -= twist;
    }
    while (x < 0) {
      x += L;
      tau += twist;
    }
    const int rel = tau - x;
    if (rel < 0) return bottom;
    if (rel % 2 != 0) throw std::logic_error("wetting_p0: parity violated");
    const int r = rel / 2;
    if (r >= rounds) return -1;  // above the last row
    return r * L + x;
  };

  Rng rng(derive_stream_seed(master_seed ^ kWettingSalt, realization_index));
  // cut[2*s] = up-left leg of site s, cut[2*s+1] = up-right leg.
  std::vector<char> cut(static_cast<std::size_t>(2 * n_sites));
  for (int r = 0; r < rounds; ++r)
    for (int x = 0; x < L; ++x) {
      const int s = r * L + x;
      cut[2 * s] = rng.bernoulli(q);
      cut[2 * s + 1] = rng.bernoulli(q);
    }

  // Dual graph: vertex s is the face directly above site s; `bottom` is the
  // merged initial face.
  std::vector<detail::WeightedEdge> edges;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_sites + 1));
  auto add_edge = [&](int u, int v, int w) {
    edges.push_back({u, v, w});
    const int e = static_cast<int>(edges.size()) - 1;
    adj[u].push_back(e);
    if (v != u) adj[v].push_back(e);
  };
  auto face_above = [&](int x, int center) { return site_id(x, center - 1); };

  UnionFind uf(static_cast<std::size_t>(n_sites + 1));
  std::vector<int> open_leg_site;  // lower site of every leg left open at the top
  for (int r = 0; r < rounds; ++r)
    for (int x = 0; x < L; ++x) {
      const int s = r * L + x;
      const int tau = x + 2 * r;
      // Up-left leg: left face centered at (x-1, tau), right face above s.
      add_edge(face_above(x - 1, tau), s, cut[2 * s] ? 0 : 1);
      // Up-right leg: left face above s, right face centered at (x+1, tau).
      add_edge(s, face_above(x + 1, tau), cut[2 * s + 1] ? 0 : 1);

      const int up_left = site_id(x - 1, tau + 1);
      const int up_right = site_id(x + 1, tau + 1);
      if (up_left >= 0) {
        if (!cut[2 * s]) uf.unite(static_cast<std::size_t>(s), static_cast<std::size_t>(up_left));
      } else if (!cut[2 * s]) {
        open_leg_site.push_back(s);
      }
      if (up_right >= 0) {
        if (!cut[2 * s + 1]) uf.unite(static_cast<std::size_t>(s), static_cast<std::size_t>(up_right));
      } else if (!cut[2 * s + 1]) {
        open_leg_site.push_back(s);
      }
      // Legs arriving from below the first row come from the initial boundary.
      if (site_id(x - 1, tau - 1) == bottom) uf.unite(static_cast<std::size_t>(s), static_cast<std::size_t>(bottom));
      if (site_id(x + 1, tau - 1) == bottom) uf.unite(static_cast<std::size_t>(s), static_cast<std::size_t>(bottom));
    }

  WettingResult res;
  // Top face of column x sits above site (x, round rounds-1); after whole
  // rounds the decimal point is back at column 0.
  const int top0 = (rounds - 1) * L + 0;
  const int top_half = (rounds - 1) * L + L / 2;
  const auto dist = detail::zero_one_bfs(n_sites + 1, edges, adj, top0);
  res.s_half = dist[top_half];
  for (int s : open_leg_site)
    if (uf.same(static_cast<std::size_t>(s), static_cast<std::size_t>(bottom))) {
      res.s_a = 1;
      break;
    }
  return res;
}

}  // namespace dadic
