#pragma once

// Ensembles of realizations: checkpointed observables, streaming aggregation,
// parameter grids, CSV output and run manifests.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <exception>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "dadic/ancilla.hpp"
#include "dadic/mincut.hpp"
#include "dadic/rng.hpp"
#include "dadic/trajectory.hpp"

#ifndef DADIC_VERSION
#define DADIC_VERSION "0.0.0"
#endif

namespace dadic {

inline constexpr const char* kVersion = DADIC_VERSION;

enum class Observable { SHalf, SA, I2, I3, TPure, Corr };

inline constexpr Observable kAllObservables[] = {Observable::SHalf, Observable::SA, Observable::I2,
                                                 Observable::I3,    Observable::TPure, Observable::Corr};

inline const char* to_string(Observable o) {
  switch (o) {
    case Observable::SHalf: return "s_half";
    case Observable::SA: return "s_a";
    case Observable::I2: return "i2";
    case Observable::I3: return "i3";
    case Observable::TPure: return "t_pure";
    case Observable::Corr: return "corr";
  }
  return "?";
}

inline Observable parse_observable(std::string_view s) {
  for (auto o : kAllObservables)
    if (s == to_string(o)) return o;
  throw std::invalid_argument("unknown observable '" + std::string(s) + "'");
}

inline bool needs_mincut(Observable o) {
  return o == Observable::SHalf || o == Observable::I2 || o == Observable::I3;
}

/// Strictly increasing list of snapshot times in [1, t_max] containing t_max/2
/// and t_max.
class CheckpointSchedule {
 public:
  CheckpointSchedule() = default;

  explicit CheckpointSchedule(std::vector<std::int64_t> times, std::int64_t t_max) : times_(std::move(times)) {
    if (t_max < 2) throw std::invalid_argument("CheckpointSchedule: t_max must be >= 2");
    std::sort(times_.begin(), times_.end());
    times_.erase(std::unique(times_.begin(), times_.end()), times_.end());
    if (!times_.empty() && (times_.front() < 1 || times_.back() > t_max))
      throw std::invalid_argument("CheckpointSchedule: times must lie in [1, t_max]");
    for (auto t : {t_max / 2, t_max})
      if (!std::binary_search(times_.begin(), times_.end(), t)) times_.insert(std::upper_bound(times_.begin(), times_.end(), t), t);
  }

  /// 1..10, then a geometric grid of ratio 1.2, plus t_max/2 and t_max.
  static CheckpointSchedule make_default(std::int64_t t_max) {
    std::vector<std::int64_t> ts;
    for (std::int64_t t = 1; t <= std::min<std::int64_t>(10, t_max); ++t) ts.push_back(t);
    double g = 10.0;
    while (true) {
      g *= 1.2;
      const auto t = static_cast<std::int64_t>(std::ceil(g));
      if (t > t_max) break;
      ts.push_back(t);
    }
    return CheckpointSchedule(std::move(ts), t_max);
  }

  const std::vector<std::int64_t>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }

 private:
  std::vector<std::int64_t> times_;
};

/// Streaming mean and variance.
class Welford {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct ObservableRecord {
  int L = 0;
  double p = 0.0;
  double q = 0.0;
  std::int64_t t = 0;
  Observable observable = Observable::SA;
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  std::int64_t censored = 0;

  bool operator==(const ObservableRecord&) const = default;
};

enum class QuarterAnchor { Decimal, Fixed };

struct EnsembleConfig {
  std::int64_t n_realizations = 1000;
  std::vector<Observable> observables{Observable::SHalf, Observable::SA};
  std::optional<CheckpointSchedule> schedule;  ///< default schedule of the cell's t_max when empty
  unsigned threads = 1;
  QuarterAnchor anchor = QuarterAnchor::Decimal;
};

/// Raw samples of one realization: values[o][k] is observable o at checkpoint k.
/// t_pure has a single entry per realization.
struct RealizationSamples {
  std::vector<std::vector<double>> values;
  bool censored = false;
};

namespace detail {

inline bool has(const std::vector<Observable>& obs, Observable o) {
  return std::find(obs.begin(), obs.end(), o) != obs.end();
}

}  // namespace detail

/// Runs one realization and snapshots every requested observable.
inline RealizationSamples simulate_realization(const CircuitParams& params, std::uint64_t realization_index,
                                               const std::vector<Observable>& observables,
                                               const CheckpointSchedule& schedule,
                                               QuarterAnchor anchor = QuarterAnchor::Decimal) {
  const bool use_dm = std::any_of(observables.begin(), observables.end(), needs_mincut);
  const bool want_sa = detail::has(observables, Observable::SA);
  const bool want_tp = detail::has(observables, Observable::TPure);
  const bool want_corr = detail::has(observables, Observable::Corr);
  const bool use_anc = want_sa || want_tp || want_corr;
  const bool want_quarter = detail::has(observables, Observable::I2) || detail::has(observables, Observable::I3);
  if (want_quarter && params.L % 4 != 0) throw std::invalid_argument("i2/i3 need L divisible by 4");
  if (want_corr && params.t_max % 2 != 0) throw std::invalid_argument("corr needs an even t_max");

  std::optional<DistanceMatrix> dm;
  std::optional<ConnectivityState> cs;
  if (use_dm) dm.emplace(params.L, params.initial_state);
  if (use_anc) cs.emplace(params.L);

  const auto& times = schedule.times();
  RealizationSamples out;
  out.values.resize(observables.size());
  for (std::size_t o = 0; o < observables.size(); ++o) {
    if (observables[o] == Observable::TPure)
      out.values[o].assign(1, static_cast<double>(params.t_max));
    else
      out.values[o].assign(times.size(), 0.0);
  }

  // Once purified, S_a stays zero, so runs that only need S_a or t_pure stop.
  const bool ancilla_only = !use_dm && !want_corr;
  std::optional<std::int64_t> t_pure;
  Trajectory traj(params, realization_index);
  std::size_t next = 0;
  const std::int64_t t_half = params.t_max / 2;
  for (std::int64_t t = 1; t <= params.t_max && next < times.size(); ++t) {
    const StepEvent ev = traj.next();
    if (dm) dm->apply(ev);
    if (cs) {
      cs->apply(ev);
      if (want_corr && t == t_half) cs->couple_probes();
      if (!t_pure && cs->ancilla_entropy() == 0) {
        t_pure = t;
        if (ancilla_only) break;
      }
    }
    if (t != times[next]) continue;
    const int decimal = traj.decimal();
    for (std::size_t o = 0; o < observables.size(); ++o) {
      double v = 0.0;
      switch (observables[o]) {
        case Observable::SHalf: v = half_cut_entropy(*dm, decimal); break;
        case Observable::SA: v = cs->ancilla_entropy(); break;
        case Observable::I2:
          v = mutual_info_I2(*dm, QuarterPartition(anchor == QuarterAnchor::Decimal ? decimal : 0, params.L));
          break;
        case Observable::I3:
          v = tripartite_I3(*dm, QuarterPartition(anchor == QuarterAnchor::Decimal ? decimal : 0, params.L));
          break;
        case Observable::Corr: v = t >= t_half ? cs->correlation() : 0.0; break;
        case Observable::TPure: continue;
      }
      out.values[o][next] = v;
    }
    ++next;
  }
  // Remaining checkpoints after an early stop read S_a = 0.
  for (std::size_t o = 0; o < observables.size(); ++o) {
    if (observables[o] == Observable::TPure) {
      if (t_pure)
        out.values[o][0] = static_cast<double>(*t_pure);
      else
        out.censored = true;
    }
  }
  return out;
}

namespace detail {

/// Runs `count` independent jobs over a pool of `threads` workers. The first
/// exception thrown by any job is rethrown after all workers join.
inline void parallel_for(std::int64_t count, unsigned threads, const std::function<void(std::int64_t)>& job) {
  threads = std::max(1u, threads);
  if (threads == 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        while (!failed.load(std::memory_order_relaxed)) {
          const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
          if (i >= count) break;
          try {
            job(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// All raw samples of a cell, indexed by realization.
inline std::vector<RealizationSamples> sample_cell(const CircuitParams& params, const EnsembleConfig& config) {
  params.validate();
  if (config.n_realizations < 1) throw std::invalid_argument("n_realizations must be >= 1");
  if (config.observables.empty()) throw std::invalid_argument("no observables requested");
  const CheckpointSchedule schedule =
      config.schedule ? *config.schedule : CheckpointSchedule::make_default(params.t_max);
  if (schedule.times().back() > params.t_max) throw std::invalid_argument("checkpoint beyond t_max");
  std::vector<RealizationSamples> samples(static_cast<std::size_t>(config.n_realizations));
  detail::parallel_for(config.n_realizations, config.threads, [&](std::int64_t r) {
    samples[r] = simulate_realization(params, static_cast<std::uint64_t>(r), config.observables, schedule,
                                      config.anchor);
  });
  return samples;
}

/// Means and standard errors of every observable at every checkpoint of one
/// (L, p, q) cell. Aggregation runs in realization order, so the output does
/// not depend on the thread count.
inline std::vector<ObservableRecord> run_cell(const CircuitParams& params, const EnsembleConfig& config) {
  const auto samples = sample_cell(params, config);
  const CheckpointSchedule schedule =
      config.schedule ? *config.schedule : CheckpointSchedule::make_default(params.t_max);
  std::vector<ObservableRecord> records;
  for (std::size_t o = 0; o < config.observables.size(); ++o) {
    const Observable obs = config.observables[o];
    const std::size_t nk = obs == Observable::TPure ? 1 : schedule.size();
    for (std::size_t k = 0; k < nk; ++k) {
      const std::int64_t t = obs == Observable::TPure ? params.t_max : schedule.times()[k];
      if (obs == Observable::Corr && t < params.t_max / 2) continue;
      Welford w;
      std::int64_t censored = 0;
      for (const auto& s : samples) {
        w.add(s.values[o][k]);
        if (obs == Observable::TPure && s.censored) ++censored;
      }
      records.push_back({params.L, params.p, params.q, t, obs, w.mean(), w.std_error(), w.count(), censored});
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader = "L,p,q,t,observable,mean,stderr,n,censored";

/// Shortest round-trip decimal representation.
inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

inline void write_csv(std::ostream& os, const std::vector<ObservableRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.L << ',' << format_double(r.p) << ',' << format_double(r.q) << ',' << r.t << ',' << to_string(r.observable)
       << ',' << format_double(r.mean) << ',' << format_double(r.std_error) << ',' << r.n << ',' << r.censored << '\n';
  }
}

/// Schema violation in an input CSV; the message names the offending column.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& column, std::size_t line_no) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw SchemaError("line " + std::to_string(line_no) + ": cannot parse column '" + column + "' value '" + s + "'");
  return v;
}

}  // namespace detail

inline std::vector<ObservableRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw SchemaError("empty CSV: missing header");
  const auto header = detail::split_csv_line(line);
  const std::vector<std::string> required{"L", "p", "q", "t", "observable", "mean", "stderr", "n", "censored"};
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const auto& name : required)
    if (!col.count(name)) throw SchemaError("missing column '" + name + "'");

  std::vector<ObservableRecord> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != header.size())
      throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                        " fields, got " + std::to_string(f.size()));
    ObservableRecord r;
    r.L = detail::parse_number<int>(f[col["L"]], "L", line_no);
    r.p = detail::parse_number<double>(f[col["p"]], "p", line_no);
    r.q = detail::parse_number<double>(f[col["q"]], "q", line_no);
    r.t = detail::parse_number<std::int64_t>(f[col["t"]], "t", line_no);
    try {
      r.observable = parse_observable(f[col["observable"]]);
    } catch (const std::invalid_argument& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": column 'observable': " + e.what());
    }
    r.mean = detail::parse_number<double>(f[col["mean"]], "mean", line_no);
    r.std_error = detail::parse_number<double>(f[col["stderr"]], "stderr", line_no);
    r.n = detail::parse_number<std::int64_t>(f[col["n"]], "n", line_no);
    r.censored = detail::parse_number<std::int64_t>(f[col["censored"]], "censored", line_no);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grids

struct CellKey {
  int L;
  double p;
  double q;
  auto operator<=>(const CellKey&) const = default;
};

struct GridSpec {
  std::vector<int> Ls;
  std::vector<double> ps;
  std::vector<double> qs;
  std::optional<std::int64_t> t_max;  ///< 2 L^2 per cell when empty
  std::uint64_t master_seed = 0;
  InitialState initial_state = InitialState::Product;

  /// Cells in sweep order: L outermost, then p, then q.
  std::vector<CellKey> cells() const {
    std::vector<CellKey> out;
    for (int L : Ls)
      for (double p : ps)
        for (double q : qs) out.push_back({L, p, q});
    return out;
  }

  CircuitParams params_for(const CellKey& c) const {
    CircuitParams cp = CircuitParams::make(c.L, c.p, c.q, master_seed);
    if (t_max) cp.t_max = *t_max;
    cp.initial_state = initial_state;
    return cp;
  }
};

struct CellFailure {
  CellKey cell;
  std::string message;
};

struct GridResult {
  std::vector<ObservableRecord> records;
  std::vector<CellFailure> failures;
  std::map<CellKey, std::int64_t> realizations;  ///< per-cell realization counts
};

/// Sweeps every cell of the grid. Every cell uses the same per-realization
/// seeds, so adding or reordering cells leaves existing cells unchanged.
/// Records found in `existing` for a cell are reused instead of rerunning it.
/// Output is in grid order.
inline GridResult run_grid(const GridSpec& grid, const EnsembleConfig& config,
                           const std::vector<ObservableRecord>& existing = {},
                           const std::function<void(const CellKey&)>& on_cell_done = {}) {
  std::map<CellKey, std::vector<ObservableRecord>> done;
  for (const auto& r : existing) done[{r.L, r.p, r.q}].push_back(r);

  GridResult result;
  for (const auto& cell : grid.cells()) {
    if (auto it = done.find(cell); it != done.end()) {
      result.records.insert(result.records.end(), it->second.begin(), it->second.end());
      result.realizations[cell] = it->second.empty() ? 0 : it->second.front().n;
      continue;
    }
    try {
      const auto params = grid.params_for(cell);
      EnsembleConfig cfg = config;
      if (cfg.schedule && cfg.schedule->times().back() > params.t_max) cfg.schedule.reset();
      auto recs = run_cell(params, cfg);
      result.records.insert(result.records.end(), recs.begin(), recs.end());
      result.realizations[cell] = config.n_realizations;
    } catch (const std::exception& e) {
      result.failures.push_back({cell, e.what()});
    }
    if (on_cell_done) on_cell_done(cell);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Manifest

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json make_manifest(const GridSpec& grid, const EnsembleConfig& config, const GridResult& result,
                                    std::chrono::system_clock::time_point started,
                                    std::chrono::system_clock::time_point finished) {
  nlohmann::json j;
  j["tool"] = "dadic";
  j["version"] = kVersion;
  j["generator"] = kGeneratorName;
  j["master_seed"] = grid.master_seed;
  j["params"]["L"] = grid.Ls;
  j["params"]["p"] = grid.ps;
  j["params"]["q"] = grid.qs;
  j["params"]["t_max"] = grid.t_max ? nlohmann::json(*grid.t_max) : nlohmann::json("2L^2");
  j["params"]["initial_state"] = to_string(grid.initial_state);
  j["params"]["n"] = config.n_realizations;
  j["params"]["anchor"] = config.anchor == QuarterAnchor::Decimal ? "decimal" : "fixed";
  std::vector<std::string> obs;
  for (auto o : config.observables) obs.push_back(to_string(o));
  j["params"]["observables"] = obs;
  if (config.schedule)
    j["params"]["checkpoints"] = config.schedule->times();
  else
    j["params"]["checkpoints"] = "default";
  j["threads"] = config.threads;
  j["started"] = utc_timestamp(started);
  j["finished"] = utc_timestamp(finished);
  j["wall_seconds"] = std::chrono::duration<double>(finished - started).count();
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& [cell, n] : result.realizations)
    cells.push_back({{"L", cell.L}, {"p", cell.p}, {"q", cell.q}, {"n", n}});
  auto& failed = j["failed_cells"] = nlohmann::json::array();
  for (const auto& f : result.failures)
    failed.push_back({{"L", f.cell.L}, {"p", f.cell.p}, {"q", f.cell.q}, {"error", f.message}});
  return j;
}

}  // namespace dadic
