#pragma once

// Finite-size scaling: master-curve data collapse (two-parameter, dynamic,
// amplitude), crossings, logarithmic and power-law fits, cutoff sweeps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_fit.h>
#include <gsl/gsl_multimin.h>

#include "dadic/ensemble.hpp"

namespace dadic {

/// One finite-size curve: observable mean and standard error vs. a control
/// variable, sorted by x.
struct Curve {
  double L = 0;
  std::vector<double> x, y, sigma;

  std::size_t size() const { return x.size(); }
  void sort_by_x();
};

inline void Curve::sort_by_x() {
  std::vector<std::size_t> idx(x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  Curve c;
  c.L = L;
  for (auto i : idx) {
    c.x.push_back(x[i]);
    c.y.push_back(y[i]);
    c.sigma.push_back(sigma[i]);
  }
  *this = std::move(c);
}

/// Raised when data cannot support a collapse (too few sizes, flat curves,
/// no overlap after rescaling).
class CollapseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchBox {
  double lo0, hi0;      ///< first parameter (x_c, z or beta)
  double lo1 = 0, hi1 = 0;  ///< second parameter (nu); unused for one-parameter fits
};

/// How other curves are evaluated at a point in the collapse objective.
enum class Interpolation { Linear, Cubic };

struct CollapseOptions {
  int grid = 41;
  int bootstrap = 100;
  std::uint64_t seed = 0;
  /// Residual variance floor, as a fraction of the rescaled y range.
  double floor_fraction = 1e-3;
  /// Minimum fraction of points that must lie inside some other curve's range.
  double min_overlap = 0.5;
  Interpolation interpolation = Interpolation::Cubic;
};

struct CollapseFit {
  double x_c = 0;
  double nu = 0;
  double quality = 0;
  double sigma_xc = 0;
  double sigma_nu = 0;
  double L_min = 0;
};

enum class ExponentKind { ZFromTimeCollapse, ZFromAlphaRatio, EtaPowerlaw, AlphaL, AlphaT, Beta };

inline const char* to_string(ExponentKind k) {
  switch (k) {
    case ExponentKind::ZFromTimeCollapse: return "z_from_time_collapse";
    case ExponentKind::ZFromAlphaRatio: return "z_from_alpha_ratio";
    case ExponentKind::EtaPowerlaw: return "eta_powerlaw";
    case ExponentKind::AlphaL: return "alpha_L";
    case ExponentKind::AlphaT: return "alpha_T";
    case ExponentKind::Beta: return "beta";
  }
  return "?";
}

struct ExponentFit {
  ExponentKind kind = ExponentKind::Beta;
  double value = 0;
  double error = 0;
  double quality = 0;
  bool poor_fit = false;  ///< power law fits worse than an exponential
  double window_lo = 0, window_hi = 0;
};

// ---------------------------------------------------------------------------
// Collapse objective

/// Curve in collapse coordinates; X must be sorted.
struct Rescaled {
  std::vector<double> X, Y, S;
};

inline constexpr double kNoOverlapPenalty = 1e12;

/// Master-curve residual: each point is compared with the piecewise-linear
/// interpolation of every other curve whose X range covers it, weighted by
/// the inverse combined variance. Returns the mean residual, or
/// kNoOverlapPenalty when too few points are covered.
inline double master_curve_quality(const std::vector<Rescaled>& curves, double floor_fraction, double min_overlap,
                                   Interpolation interp = Interpolation::Cubic) {
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  std::size_t total = 0;
  for (const auto& c : curves) {
    for (double y : c.Y) {
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    total += c.X.size();
  }
  if (!(ymax > ymin)) throw CollapseError("degenerate flat curves");
  const double floor2 = std::pow(floor_fraction * (ymax - ymin), 2);

  double sum = 0;
  std::size_t terms = 0, covered = 0;
  for (std::size_t a = 0; a < curves.size(); ++a) {
    const auto& ca = curves[a];
    for (std::size_t i = 0; i < ca.X.size(); ++i) {
      bool any = false;
      for (std::size_t b = 0; b < curves.size(); ++b) {
        if (b == a) continue;
        const auto& cb = curves[b];
        if (cb.X.size() < 2 || ca.X[i] < cb.X.front() || ca.X[i] > cb.X.back()) continue;
        auto it = std::upper_bound(cb.X.begin(), cb.X.end(), ca.X[i]);
        std::size_t k = static_cast<std::size_t>(it - cb.X.begin());
        if (k == cb.X.size()) k = cb.X.size() - 1;
        if (k == 0) k = 1;
        // Cubic Lagrange stencil around the bracketing pair, narrowed at the ends.
        std::size_t first = k - 1, last = k;
        if (interp == Interpolation::Cubic) {
          first = k >= 2 ? k - 2 : k - 1;
          last = std::min(k + 1, cb.X.size() - 1);
        }
        for (std::size_t m = first; m < last; ++m)
          if (!(cb.X[m + 1] > cb.X[m])) {
            first = k - 1;
            last = k;
            break;
          }
        double yi = 0, si2 = 0;
        if (!(cb.X[last] > cb.X[first])) {
          yi = cb.Y[first];
          si2 = cb.S[first] * cb.S[first];
        } else {
          for (std::size_t m = first; m <= last; ++m) {
            double w = 1;
            for (std::size_t l = first; l <= last; ++l)
              if (l != m) w *= (ca.X[i] - cb.X[l]) / (cb.X[m] - cb.X[l]);
            yi += w * cb.Y[m];
            si2 += std::pow(w * cb.S[m], 2);
          }
        }
        const double d = ca.Y[i] - yi;
        sum += d * d / (ca.S[i] * ca.S[i] + si2 + floor2);
        ++terms;
        any = true;
      }
      if (any) ++covered;
    }
  }
  if (terms == 0 || static_cast<double>(covered) < min_overlap * static_cast<double>(total)) return kNoOverlapPenalty;
  return sum / static_cast<double>(terms);
}

namespace detail {

struct GslMinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct GslVectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

using Objective = std::function<double(const std::vector<double>&)>;

inline double gsl_objective(const gsl_vector* v, void* params) {
  const auto& f = *static_cast<const Objective*>(params);
  std::vector<double> x(v->size);
  for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
  return f(x);
}

/// Nelder-Mead refinement (GSL nmsimplex2) from x0 with initial step sizes.
inline std::vector<double> simplex_minimize(const Objective& f, std::vector<double> x0, const std::vector<double>& step,
                                            int max_iter = 2000, double size_tol = 1e-7) {
  const std::size_t n = x0.size();
  gsl_multimin_function fn{&gsl_objective, n, const_cast<Objective*>(&f)};
  std::unique_ptr<gsl_vector, GslVectorDeleter> x(gsl_vector_alloc(n)), ss(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set(ss.get(), i, step[i]);
  }
  std::unique_ptr<gsl_multimin_fminimizer, GslMinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), ss.get());
  for (int it = 0; it < max_iter; ++it) {
    if (gsl_multimin_fminimizer_iterate(m.get())) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), size_tol) == GSL_SUCCESS) break;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = gsl_vector_get(m->x, i);
  return out;
}

/// Coarse grid over the box followed by simplex refinement. Evaluations
/// outside the box are penalized so the refinement stays inside it.
inline std::vector<double> grid_then_simplex(const Objective& f, const std::vector<double>& lo,
                                             const std::vector<double>& hi, int grid) {
  const std::size_t n = lo.size();
  Objective boxed = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return 2 * kNoOverlapPenalty;
    return f(x);
  };
  std::vector<double> best(n), cur(n);
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<int> idx(n, 0);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) cur[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (grid - 1);
    const double v = boxed(cur);
    if (v < best_val) {
      best_val = v;
      best = cur;
    }
    std::size_t d = 0;
    while (d < n && ++idx[d] == grid) idx[d++] = 0;
    if (d == n) break;
  }
  if (best_val >= kNoOverlapPenalty) throw CollapseError("no overlap between rescaled curves anywhere in the search box");
  std::vector<double> step(n);
  for (std::size_t i = 0; i < n; ++i) step[i] = (hi[i] - lo[i]) / (grid - 1);
  auto refined = simplex_minimize(boxed, best, step);
  return boxed(refined) <= best_val ? refined : best;
}

inline double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline std::vector<Curve> perturb(const std::vector<Curve>& curves, std::mt19937_64& gen) {
  std::vector<Curve> out = curves;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& c : out)
    for (std::size_t i = 0; i < c.size(); ++i) c.y[i] += c.sigma[i] * normal(gen);
  return out;
}

inline void check_sizes(const std::vector<Curve>& curves, std::size_t min_sizes) {
  std::set<double> Ls;
  for (const auto& c : curves) {
    if (c.size() < 2) throw CollapseError("each curve needs at least two points");
    Ls.insert(c.L);
  }
  if (Ls.size() < min_sizes)
    throw CollapseError("need at least " + std::to_string(min_sizes) + " distinct system sizes, got " +
                        std::to_string(Ls.size()));
}

inline double min_L(const std::vector<Curve>& curves) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : curves) m = std::min(m, c.L);
  return m;
}

/// Generic collapse driver: central fit by grid + simplex, then a bootstrap
/// over Gaussian-perturbed means, each replica refit from scratch.
template <class Transform>
std::pair<std::vector<double>, std::vector<double>> fit_collapse(const std::vector<Curve>& curves,
                                                                 const std::vector<double>& lo,
                                                                 const std::vector<double>& hi,
                                                                 const CollapseOptions& opt, Transform transform,
                                                                 double* quality) {
  auto make_objective = [&](const std::vector<Curve>& data) {
    return Objective([&data, &opt, transform](const std::vector<double>& theta) {
      std::vector<Rescaled> rs;
      rs.reserve(data.size());
      for (const auto& c : data) rs.push_back(transform(c, theta));
      return master_curve_quality(rs, opt.floor_fraction, opt.min_overlap, opt.interpolation);
    });
  };
  const auto central_obj = make_objective(curves);
  const auto best = grid_then_simplex(central_obj, lo, hi, opt.grid);
  if (quality) *quality = central_obj(best);

  const std::size_t n = lo.size();
  std::vector<std::vector<double>> samples(n);
  std::mt19937_64 gen(derive_stream_seed(opt.seed, 0x424F4F54ULL));
  for (int b = 0; b < opt.bootstrap; ++b) {
    const auto data = perturb(curves, gen);
    const auto fit = grid_then_simplex(make_objective(data), lo, hi, opt.grid);
    for (std::size_t i = 0; i < n; ++i) samples[i].push_back(fit[i]);
  }
  // Inflate by the root of the quality when the residuals exceed the errors.
  const double inflate = std::sqrt(std::max(1.0, central_obj(best)));
  std::vector<double> err(n);
  for (std::size_t i = 0; i < n; ++i) err[i] = inflate * stddev(samples[i]);
  return {best, err};
}

}  // namespace detail

/// Two-parameter collapse y(x, L) = f((x - x_c) L^{1/nu}). The box gives
/// [x_c lo, hi] and [nu lo, hi].
inline CollapseFit collapse_two_param(const std::vector<Curve>& curves, const SearchBox& box,
                                      const CollapseOptions& opt = {}) {
  detail::check_sizes(curves, 3);
  if (!(box.lo1 > 0)) throw std::invalid_argument("collapse_two_param: nu range must be positive");
  auto transform = [](const Curve& c, const std::vector<double>& th) {
    Rescaled r;
    const double s = std::pow(c.L, 1.0 / th[1]);
    for (std::size_t i = 0; i < c.size(); ++i) r.X.push_back((c.x[i] - th[0]) * s);
    r.Y = c.y;
    r.S = c.sigma;
    return r;
  };
  CollapseFit fit;
  auto [best, err] = detail::fit_collapse(curves, {box.lo0, box.lo1}, {box.hi0, box.hi1}, opt, transform, &fit.quality);
  fit.x_c = best[0];
  fit.nu = best[1];
  fit.sigma_xc = err[0];
  fit.sigma_nu = err[1];
  fit.L_min = detail::min_L(curves);
  return fit;
}

enum class TimeRescale {
  PerDepth,  ///< x = log(t/L) - z log L: time counted in sweeps of the ring
  Raw        ///< x = log(t) - z log L
};

/// Dynamic exponent from collapsing time curves (x = t) in log-time
/// coordinates. Points with t <= 0 are dropped.
inline ExponentFit collapse_dynamic(const std::vector<Curve>& curves, TimeRescale mode, double z_lo = 0.2,
                                    double z_hi = 4.0, const CollapseOptions& opt = {}) {
  detail::check_sizes(curves, 2);
  auto transform = [mode](const Curve& c, const std::vector<double>& th) {
    Rescaled r;
    const double shift = th[0] * std::log(c.L) + (mode == TimeRescale::PerDepth ? std::log(c.L) : 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!(c.x[i] > 0)) continue;
      r.X.push_back(std::log(c.x[i]) - shift);
      r.Y.push_back(c.y[i]);
      r.S.push_back(c.sigma[i]);
    }
    return r;
  };
  ExponentFit fit;
  fit.kind = ExponentKind::ZFromTimeCollapse;
  auto [best, err] = detail::fit_collapse(curves, {z_lo}, {z_hi}, opt, transform, &fit.quality);
  fit.value = best[0];
  fit.error = err[0];
  fit.window_lo = z_lo;
  fit.window_hi = z_hi;
  return fit;
}

/// Amplitude exponent from collapsing y / L^beta across sizes at common x.
inline ExponentFit fit_beta(const std::vector<Curve>& curves, double beta_lo = 0.0, double beta_hi = 1.5,
                            const CollapseOptions& opt = {}) {
  detail::check_sizes(curves, 2);
  bool positive = false;
  for (const auto& c : curves)
    for (double y : c.y) positive |= y > 0;
  if (!positive) throw CollapseError("fit_beta: non-positive data everywhere");
  auto transform = [](const Curve& c, const std::vector<double>& th) {
    Rescaled r;
    const double s = std::pow(c.L, -th[0]);
    r.X = c.x;
    for (std::size_t i = 0; i < c.size(); ++i) {
      r.Y.push_back(c.y[i] * s);
      r.S.push_back(c.sigma[i] * s);
    }
    return r;
  };
  ExponentFit fit;
  fit.kind = ExponentKind::Beta;
  auto [best, err] = detail::fit_collapse(curves, {beta_lo}, {beta_hi}, opt, transform, &fit.quality);
  fit.value = best[0];
  fit.error = err[0];
  fit.window_lo = beta_lo;
  fit.window_hi = beta_hi;
  return fit;
}

// ---------------------------------------------------------------------------
// Crossings

struct Crossing {
  double L1, L2;
  double x;
  double inv_L_mean;  ///< 2 / (L1 + L2), the abscissa for drift plots
};

/// Linear-interpolation crossings of every pair of curves over their common
/// x range.
inline std::vector<Crossing> crossing_points(const std::vector<Curve>& curves) {
  if (curves.size() < 2) throw CollapseError("crossing_points: need at least two curves");
  auto interp = [](const Curve& c, double x) {
    auto it = std::upper_bound(c.x.begin(), c.x.end(), x);
    std::size_t k = static_cast<std::size_t>(it - c.x.begin());
    if (k == c.x.size()) k = c.x.size() - 1;
    if (k == 0) k = 1;
    const double w = (x - c.x[k - 1]) / (c.x[k] - c.x[k - 1]);
    return (1 - w) * c.y[k - 1] + w * c.y[k];
  };
  std::vector<Crossing> out;
  for (std::size_t a = 0; a < curves.size(); ++a)
    for (std::size_t b = a + 1; b < curves.size(); ++b) {
      const auto &ca = curves[a], &cb = curves[b];
      if (ca.size() < 2 || cb.size() < 2) continue;
      const double lo = std::max(ca.x.front(), cb.x.front()), hi = std::min(ca.x.back(), cb.x.back());
      if (!(hi > lo)) continue;
      std::set<double> xs{lo, hi};
      for (double x : ca.x)
        if (x > lo && x < hi) xs.insert(x);
      for (double x : cb.x)
        if (x > lo && x < hi) xs.insert(x);
      std::vector<double> grid(xs.begin(), xs.end());
      for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double d0 = interp(ca, grid[k]) - interp(cb, grid[k]);
        const double d1 = interp(ca, grid[k + 1]) - interp(cb, grid[k + 1]);
        if (d0 == 0 && k > 0) continue;
        if (d0 == 0 || (d0 < 0) != (d1 < 0)) {
          const double x = d0 == 0 ? grid[k] : grid[k] + (grid[k + 1] - grid[k]) * d0 / (d0 - d1);
          out.push_back({ca.L, cb.L, x, 2.0 / (ca.L + cb.L)});
        }
      }
    }
  if (out.empty()) throw CollapseError("no crossing in range");
  return out;
}

// ---------------------------------------------------------------------------
// Linear-regression fits

namespace detail {

struct LineFit {
  double c0, c1, cov11, chisq;
};

/// Weighted straight-line fit; weights 1/(sigma^2 + floor^2).
inline LineFit weighted_line(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& sigma) {
  const std::size_t n = x.size();
  double ymin = *std::min_element(y.begin(), y.end()), ymax = *std::max_element(y.begin(), y.end());
  double floor = 1e-3 * (ymax - ymin);
  if (!(floor > 0)) floor = 1e-12;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / (sigma[i] * sigma[i] + floor * floor);
  LineFit f{};
  double cov00, cov01;
  gsl_fit_wlinear(x.data(), 1, w.data(), 1, y.data(), 1, n, &f.c0, &f.c1, &cov00, &cov01, &f.cov11, &f.chisq);
  // Scale the parameter covariance by the reduced chi-square when the
  // residual scatter exceeds the quoted errors.
  if (n > 2) {
    const double red = f.chisq / static_cast<double>(n - 2);
    if (red > 1) f.cov11 *= red;
  }
  return f;
}

}  // namespace detail

/// Slope of mean vs. log(abscissa) over [lo, hi].
inline ExponentFit fit_log_growth(const Curve& series, double lo, double hi, ExponentKind kind = ExponentKind::AlphaT) {
  if (!(lo > 0)) throw std::invalid_argument("fit_log_growth: window must be positive");
  std::vector<double> x, y, s;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series.x[i] >= lo && series.x[i] <= hi) {
      x.push_back(std::log(series.x[i]));
      y.push_back(series.y[i]);
      s.push_back(series.sigma[i]);
    }
  if (x.size() < 4) throw CollapseError("fit_log_growth: window holds fewer than 4 points");
  const auto f = detail::weighted_line(x, y, s);
  ExponentFit out;
  out.kind = kind;
  out.value = f.c1;
  out.error = std::sqrt(f.cov11);
  out.quality = f.chisq;
  out.window_lo = lo;
  out.window_hi = hi;
  return out;
}

/// z = alpha_L / alpha_T with first-order error propagation.
inline ExponentFit z_from_alpha_ratio(const ExponentFit& alpha_L, const ExponentFit& alpha_T) {
  if (alpha_T.value == 0) throw CollapseError("z_from_alpha_ratio: alpha_T is zero");
  ExponentFit out;
  out.kind = ExponentKind::ZFromAlphaRatio;
  out.value = alpha_L.value / alpha_T.value;
  out.error = std::abs(out.value) * std::hypot(alpha_L.error / alpha_L.value, alpha_T.error / alpha_T.value);
  return out;
}

struct PowerLawData {
  std::vector<double> L, y, sigma;
};

/// eta from y ~ L^{-eta}: log-log regression. Zero means are dropped. The
/// error is the larger of the regression error and half the spread of the
/// estimates from `alternates` (the same data at neighboring control values).
/// Flags the fit as poor when y ~ exp(-L/xi) fits better.
inline ExponentFit fit_powerlaw(const PowerLawData& data, const std::vector<PowerLawData>& alternates = {}) {
  auto one = [](const PowerLawData& d, double* chisq_pl, double* chisq_exp) {
    std::vector<double> lx, L, ly, s;
    for (std::size_t i = 0; i < d.L.size(); ++i) {
      if (!(d.y[i] > 0)) continue;
      lx.push_back(std::log(d.L[i]));
      L.push_back(d.L[i]);
      ly.push_back(std::log(d.y[i]));
      s.push_back(d.sigma[i] / d.y[i]);
    }
    if (lx.size() < 3) throw CollapseError("fit_powerlaw: fewer than 3 sizes with nonzero means");
    const auto pl = detail::weighted_line(lx, ly, s);
    if (chisq_pl) *chisq_pl = pl.chisq;
    if (chisq_exp) *chisq_exp = detail::weighted_line(L, ly, s).chisq;
    return std::pair{-pl.c1, std::sqrt(pl.cov11)};
  };
  double chi_pl = 0, chi_exp = 0;
  auto [eta, err] = one(data, &chi_pl, &chi_exp);
  double lo = eta, hi = eta;
  for (const auto& alt : alternates) {
    const double e = one(alt, nullptr, nullptr).first;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  ExponentFit out;
  out.kind = ExponentKind::EtaPowerlaw;
  out.value = eta;
  out.error = std::max(err, (hi - lo) / 2);
  out.quality = chi_pl;
  out.poor_fit = chi_exp < chi_pl;
  return out;
}

// ---------------------------------------------------------------------------
// Cutoff sweeps

struct LminRow {
  double L_min;
  CollapseFit fit;
  bool stabilized;  ///< agrees with the previous cutoff within combined errors
};

inline std::vector<LminRow> lmin_sweep(const std::vector<Curve>& curves, const std::vector<double>& L_mins,
                                       const SearchBox& box, const CollapseOptions& opt = {}) {
  std::vector<LminRow> rows;
  for (double lmin : L_mins) {
    std::vector<Curve> kept;
    for (const auto& c : curves)
      if (c.L >= lmin) kept.push_back(c);
    std::set<double> Ls;
    for (const auto& c : kept) Ls.insert(c.L);
    if (Ls.size() < 3) throw CollapseError("lmin_sweep: fewer than 3 sizes remain for L_min = " + format_double(lmin));
    LminRow row{lmin, collapse_two_param(kept, box, opt), false};
    if (!rows.empty()) {
      const auto& prev = rows.back().fit;
      row.stabilized = std::abs(row.fit.x_c - prev.x_c) < std::hypot(row.fit.sigma_xc, prev.sigma_xc) &&
                       std::abs(row.fit.nu - prev.nu) < std::hypot(row.fit.sigma_nu, prev.sigma_nu);
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Dataset adapters

enum class Axis { P, Q };

/// Curves of `obs` vs. p or q (the other held at `fixed`), one per L, at the
/// checkpoint chosen by `time_of(L)`. With no selector the last recorded
/// time of each cell is used.
inline std::vector<Curve> curves_vs_control(const std::vector<ObservableRecord>& records, Observable obs, Axis axis,
                                            double fixed, const std::function<std::int64_t(int)>& time_of = {}) {
  std::map<std::pair<int, double>, const ObservableRecord*> pick;
  for (const auto& r : records) {
    if (r.observable != obs) continue;
    const double other = axis == Axis::Q ? r.p : r.q;
    if (std::abs(other - fixed) > 1e-12) continue;
    const double x = axis == Axis::Q ? r.q : r.p;
    auto key = std::pair{r.L, x};
    if (time_of) {
      if (r.t == time_of(r.L)) pick[key] = &r;
    } else if (!pick.count(key) || pick[key]->t < r.t) {
      pick[key] = &r;
    }
  }
  std::map<int, Curve> by_L;
  for (const auto& [key, r] : pick) {
    auto& c = by_L[key.first];
    c.L = key.first;
    c.x.push_back(key.second);
    c.y.push_back(r->mean);
    c.sigma.push_back(r->std_error);
  }
  std::vector<Curve> out;
  for (auto& [L, c] : by_L) {
    c.sort_by_x();
    out.push_back(std::move(c));
  }
  return out;
}

/// Curves of `obs` vs. time at fixed (p, q), one per L.
inline std::vector<Curve> curves_vs_time(const std::vector<ObservableRecord>& records, Observable obs, double p,
                                         double q) {
  std::map<int, Curve> by_L;
  for (const auto& r : records) {
    if (r.observable != obs || std::abs(r.p - p) > 1e-12 || std::abs(r.q - q) > 1e-12) continue;
    auto& c = by_L[r.L];
    c.L = r.L;
    c.x.push_back(static_cast<double>(r.t));
    c.y.push_back(r.mean);
    c.sigma.push_back(r.std_error);
  }
  std::vector<Curve> out;
  for (auto& [L, c] : by_L) {
    c.sort_by_x();
    out.push_back(std::move(c));
  }
  return out;
}

/// Plot-ready rescaled curves for a two-parameter collapse.
inline void write_rescaled_csv(std::ostream& os, const std::vector<Curve>& curves, double x_c, double nu) {
  os << "L,x,x_scaled,y,stderr\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.size(); ++i)
      os << format_double(c.L) << ',' << format_double(c.x[i]) << ','
         << format_double((c.x[i] - x_c) * std::pow(c.L, 1.0 / nu)) << ',' << format_double(c.y[i]) << ','
         << format_double(c.sigma[i]) << '\n';
}

}  // namespace dadic
