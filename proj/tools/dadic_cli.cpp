// dadic: simulation sweeps, oracle checks, classical models and scaling fits.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dadic/dadic.hpp"

namespace {

using namespace dadic;
using nlohmann::json;

enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2, kOracleMismatch = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& flag) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError(flag + ": cannot parse '" + s + "'");
  return v;
}

/// "a,b,c" or "start:stop:step" (inclusive, values rounded to 12 decimals).
/// When the third field exceeds stop - start the reading would collapse to a
/// single value, so it is taken as start:step:stop instead (0:0.05:0.5).
std::vector<double> parse_values(const std::string& spec, const std::string& flag) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw UsageError(flag + ": range must be start:stop:step");
    double a = to_double(parts[0], flag), b = to_double(parts[1], flag), step = to_double(parts[2], flag);
    if (step > b - a && b > 0 && step > a) std::swap(b, step);
    if (!(step > 0) || b < a) throw UsageError(flag + ": invalid range '" + spec + "'");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(std::round((a + k * step) * 1e12) / 1e12);
  } else {
    for (const auto& item : split(spec, ',')) out.push_back(to_double(item, flag));
  }
  if (out.empty()) throw UsageError(flag + ": empty value list");
  return out;
}

std::vector<int> parse_ints(const std::string& spec, const std::string& flag) {
  std::vector<int> out;
  for (double v : parse_values(spec, flag)) {
    if (v != std::floor(v)) throw UsageError(flag + ": expected integers, got '" + spec + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  return os;
}

std::vector<ObservableRecord> load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read '" + path + "'");
  return read_csv(is);
}

json to_json(const CollapseFit& f) {
  return {{"x_c", f.x_c}, {"nu", f.nu}, {"quality", f.quality}, {"sigma_xc", f.sigma_xc},
          {"sigma_nu", f.sigma_nu}, {"L_min", f.L_min}};
}

json to_json(const ExponentFit& f) {
  return {{"kind", to_string(f.kind)}, {"value", f.value},         {"error", f.error},
          {"quality", f.quality},      {"poor_fit", f.poor_fit},    {"window", {f.window_lo, f.window_hi}}};
}

void emit_json(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    auto os = open_out(out);
    os << j.dump(2) << '\n';
  }
}

// ---------------------------------------------------------------------------

struct SimArgs {
  std::string L = "16", p = "0", q = "0.5";
  std::int64_t tmax = 0;
  std::int64_t n = 1000;
  std::uint64_t seed = 0;
  std::string obs = "s_half,s_a";
  std::string checkpoints = "default";
  std::string out = "run.csv";
  unsigned threads = 1;
  bool resume = false;
  std::string initial = "product";
  std::string anchor = "decimal";
};

int cmd_sim(const SimArgs& a) {
  GridSpec grid;
  grid.Ls = parse_ints(a.L, "--L");
  grid.ps = parse_values(a.p, "--p");
  grid.qs = parse_values(a.q, "--q");
  for (double v : grid.ps)
    if (v < 0 || v > 1) throw UsageError("--p: values must lie in [0,1]");
  for (double v : grid.qs)
    if (v < 0 || v > 1) throw UsageError("--q: values must lie in [0,1]");
  for (int L : grid.Ls)
    if (L < 4 || L % 2) throw UsageError("--L: sizes must be even and >= 4");
  if (a.tmax < 0) throw UsageError("--tmax must be positive");
  if (a.tmax > 0) grid.t_max = a.tmax;
  grid.master_seed = a.seed;
  if (a.initial == "product")
    grid.initial_state = InitialState::Product;
  else if (a.initial == "me")
    grid.initial_state = InitialState::MaximallyEntangled;
  else
    throw UsageError("--initial must be 'product' or 'me'");

  EnsembleConfig cfg;
  if (a.n < 1) throw UsageError("--n must be >= 1");
  cfg.n_realizations = a.n;
  cfg.threads = a.threads;
  cfg.observables.clear();
  try {
    for (const auto& o : split(a.obs, ',')) cfg.observables.push_back(parse_observable(o));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--obs: ") + e.what());
  }
  if (cfg.observables.empty()) throw UsageError("--obs: no observables");
  if (a.anchor == "fixed")
    cfg.anchor = QuarterAnchor::Fixed;
  else if (a.anchor != "decimal")
    throw UsageError("--anchor must be 'decimal' or 'fixed'");
  if (a.checkpoints != "default") {
    std::vector<std::int64_t> ts;
    for (double v : parse_values(a.checkpoints, "--checkpoints")) ts.push_back(static_cast<std::int64_t>(v));
    if (!grid.t_max) throw UsageError("--checkpoints requires --tmax");
    try {
      cfg.schedule = CheckpointSchedule(ts, *grid.t_max);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--checkpoints: ") + e.what());
    }
  }

  std::vector<ObservableRecord> existing;
  if (a.resume && std::filesystem::exists(a.out)) existing = load_csv(a.out);

  const auto started = std::chrono::system_clock::now();
  const auto result = run_grid(grid, cfg, existing, [](const CellKey& c) {
    std::cerr << "cell L=" << c.L << " p=" << format_double(c.p) << " q=" << format_double(c.q) << " done\n";
  });
  const auto finished = std::chrono::system_clock::now();
  {
    auto os = open_out(a.out);
    write_csv(os, result.records);
  }
  {
    auto os = open_out(a.out + ".manifest.json");
    os << make_manifest(grid, cfg, result, started, finished).dump(2) << '\n';
  }
  for (const auto& f : result.failures)
    std::cerr << "failed cell L=" << f.cell.L << " p=" << format_double(f.cell.p) << " q=" << format_double(f.cell.q)
              << ": " << f.message << '\n';
  return result.failures.empty() ? kOk : kRuntime;
}

// ---------------------------------------------------------------------------

struct CollapseArgs {
  std::string in, observable = "s_a", vary = "q", box = "0,1,0.3,3", lmin_sweep, out, rescaled_out;
  double fixed = 0;
  double t_over_L2 = 0;
  int bootstrap = 100;
  std::uint64_t seed = 0;
};

std::vector<Curve> load_control_curves(const std::string& in, const std::string& observable, const std::string& vary,
                                       double fixed, double t_over_L2) {
  const auto records = load_csv(in);
  Observable obs;
  try {
    obs = parse_observable(observable);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--observable: ") + e.what());
  }
  if (vary != "q" && vary != "p") throw UsageError("--vary must be 'p' or 'q'");
  std::function<std::int64_t(int)> time_of;
  if (t_over_L2 > 0)
    time_of = [t_over_L2](int L) { return static_cast<std::int64_t>(std::llround(t_over_L2 * L * L)); };
  auto curves = curves_vs_control(records, obs, vary == "q" ? Axis::Q : Axis::P, fixed, time_of);
  if (curves.empty()) throw std::runtime_error("no matching records in '" + in + "'");
  return curves;
}

int cmd_collapse(const CollapseArgs& a) {
  const auto curves = load_control_curves(a.in, a.observable, a.vary, a.fixed, a.t_over_L2);
  const auto b = parse_values(a.box, "--box");
  if (b.size() != 4) throw UsageError("--box expects xc_lo,xc_hi,nu_lo,nu_hi");
  SearchBox box{b[0], b[1], b[2], b[3]};
  CollapseOptions opt;
  opt.bootstrap = a.bootstrap;
  opt.seed = a.seed;
  json j;
  j["input"] = a.in;
  j["observable"] = a.observable;
  j["vary"] = a.vary;
  j["fixed"] = a.fixed;
  j["box"] = b;
  j["bootstrap"] = a.bootstrap;
  const auto fit = collapse_two_param(curves, box, opt);
  j["fit"] = to_json(fit);
  if (!a.lmin_sweep.empty()) {
    std::vector<double> lmins = parse_values(a.lmin_sweep, "--lmin-sweep");
    auto& rows = j["lmin_sweep"] = json::array();
    for (const auto& r : lmin_sweep(curves, lmins, box, opt)) {
      auto row = to_json(r.fit);
      row["stabilized"] = r.stabilized;
      rows.push_back(row);
    }
  }
  if (!a.rescaled_out.empty()) {
    auto os = open_out(a.rescaled_out);
    write_rescaled_csv(os, curves, fit.x_c, fit.nu);
  }
  emit_json(j, a.out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string in, kind, observable, mode = "depth", window, alt, out, range = "0,1.5";
  double p = 0, q = 0;
  std::string vary = "p";
  int bootstrap = 100;
  std::uint64_t seed = 0;
};

int cmd_fit(const FitArgs& a) {
  const auto records = load_csv(a.in);
  CollapseOptions opt;
  opt.bootstrap = a.bootstrap;
  opt.seed = a.seed;
  json j;
  j["input"] = a.in;
  j["kind"] = a.kind;
  auto obs_or = [&](const char* dflt) {
    try {
      return parse_observable(a.observable.empty() ? dflt : a.observable);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--observable: ") + e.what());
    }
  };
  if (a.kind == "z") {
    if (a.mode != "depth" && a.mode != "raw") throw UsageError("--mode must be 'depth' or 'raw'");
    const auto r = parse_values(a.range == "0,1.5" ? "0.2,4" : a.range, "--range");
    const auto curves = curves_vs_time(records, obs_or("s_a"), a.p, a.q);
    j["fit"] = to_json(
        collapse_dynamic(curves, a.mode == "depth" ? TimeRescale::PerDepth : TimeRescale::Raw, r.at(0), r.at(1), opt));
  } else if (a.kind == "alpha_T") {
    const auto curves = curves_vs_time(records, obs_or("s_half"), a.p, a.q);
    if (curves.empty()) throw std::runtime_error("no matching records");
    Curve c = curves.back();
    // T = t / L
    for (auto& x : c.x) x /= c.L;
    const auto w = a.window.empty() ? std::vector<double>{2.0, c.L / 4} : parse_values(a.window, "--window");
    j["fit"] = to_json(fit_log_growth(c, w.at(0), w.at(1), ExponentKind::AlphaT));
  } else if (a.kind == "alpha_L") {
    const auto curves = curves_vs_time(records, obs_or("s_half"), a.p, a.q);
    Curve c;
    for (const auto& cv : curves) {
      c.x.push_back(cv.L);
      c.y.push_back(cv.y.back());
      c.sigma.push_back(cv.sigma.back());
    }
    j["fit"] = to_json(fit_log_growth(c, c.x.empty() ? 1 : c.x.front(), c.x.empty() ? 1 : c.x.back(),
                                      ExponentKind::AlphaL));
  } else if (a.kind == "eta") {
    auto data_at = [&](double q) {
      PowerLawData d;
      for (const auto& cv : curves_vs_time(records, obs_or("corr"), a.p, q)) {
        d.L.push_back(cv.L);
        d.y.push_back(cv.y.back());
        d.sigma.push_back(cv.sigma.back());
      }
      return d;
    };
    std::vector<PowerLawData> alts;
    if (!a.alt.empty())
      for (double q : parse_values(a.alt, "--alt-q")) alts.push_back(data_at(q));
    j["fit"] = to_json(fit_powerlaw(data_at(a.q), alts));
  } else if (a.kind == "beta") {
    const auto r = parse_values(a.range, "--range");
    const auto curves = curves_vs_control(records, obs_or("i2"), a.vary == "q" ? Axis::Q : Axis::P,
                                          a.vary == "q" ? a.p : a.q);
    j["fit"] = to_json(fit_beta(curves, r.at(0), r.at(1), opt));
  } else {
    throw UsageError("--kind must be one of z, alpha_L, alpha_T, eta, beta");
  }
  emit_json(j, a.out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string L = "6,8,12";
  std::int64_t t = 60;
  int trials = 100;
  std::uint64_t seed = 0;
  bool inject_cap_fault = false;
};

int cmd_oracle_check(const OracleArgs& a) {
  if (a.trials < 1) throw UsageError("--trials must be >= 1");
  if (a.t < 1) throw UsageError("--t must be >= 1");
  const auto Ls = parse_ints(a.L, "--L");
  EquivalenceOptions opt;
  if (a.inject_cap_fault) opt.cap_bias = -1;
  Rng pick(derive_stream_seed(a.seed, 0x4F5241434C45ULL));
  long checked = 0;
  for (int L : Ls) {
    for (int trial = 0; trial < a.trials; ++trial) {
      // Parameters cover the whole phase diagram, including the boundaries.
      const double p = std::round(pick.uniform() * 20) / 20;
      const double q = std::round(pick.uniform() * 20) / 20;
      auto cp = CircuitParams::make(L, p, q, a.seed);
      cp.t_max = std::max<std::int64_t>(a.t, 2);
      cp.initial_state = trial % 2 ? InitialState::MaximallyEntangled : InitialState::Product;
      if (auto m = check_realization(cp, static_cast<std::uint64_t>(trial), a.t, opt)) {
        std::cout << "MISMATCH L=" << L << " p=" << format_double(p) << " q=" << format_double(q)
                  << " initial=" << to_string(cp.initial_state) << " " << m->describe() << '\n';
        return kOracleMismatch;
      }
      ++checked;
    }
  }
  std::cout << "oracle-check passed: " << checked << " realizations, " << a.t << " steps each\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct RwArgs {
  std::string L = "16", p = "0.5";
  std::int64_t n = 1000;
  std::uint64_t seed = 0;
  std::int64_t cap = 0;
  std::string out;
};

int cmd_rw(const RwArgs& a) {
  if (a.n < 1) throw UsageError("--n must be >= 1");
  std::ostringstream os;
  os << "L,p,n,mean,stderr\n";
  for (int L : parse_ints(a.L, "--L"))
    for (double p : parse_values(a.p, "--p")) {
      Welford w;
      const std::int64_t cap = a.cap > 0 ? a.cap : std::numeric_limits<std::int64_t>::max();
      for (std::int64_t r = 0; r < a.n; ++r)
        w.add(static_cast<double>(rw_wrap_time(L, p, a.seed, static_cast<std::uint64_t>(r), cap)));
      os << L << ',' << format_double(p) << ',' << w.count() << ',' << format_double(w.mean()) << ','
         << format_double(w.std_error()) << '\n';
    }
  if (a.out.empty())
    std::cout << os.str();
  else
    open_out(a.out) << os.str();
  return kOk;
}

struct ClassicalArgs {
  double a = 0.5;
  int d = 2;
  bool pc = false;
  std::string p = "0:1:0.05";
  std::int64_t steps = 1000, n = 1000;
  double x0 = 0.7;
  std::uint64_t seed = 0;
};

int cmd_classical(const ClassicalArgs& a) {
  if (a.pc) {
    std::cout << format_double(classical_pc(a.a, a.d)) << '\n';
    return kOk;
  }
  std::cout << "a,d,p,steps,n,controlled_fraction,stderr\n";
  for (double p : parse_values(a.p, "--p")) {
    ControlledMapParams mp;
    mp.a = a.a;
    mp.d = a.d;
    mp.p = p;
    mp.steps = a.steps;
    mp.master_seed = a.seed;
    Welford w;
    for (std::int64_t r = 0; r < a.n; ++r)
      w.add(simulate_controlled_map(mp, a.x0, static_cast<std::uint64_t>(r)) ? 1.0 : 0.0);
    std::cout << format_double(a.a) << ',' << a.d << ',' << format_double(p) << ',' << a.steps << ',' << a.n << ','
              << format_double(w.mean()) << ',' << format_double(w.std_error()) << '\n';
  }
  return kOk;
}

struct WettingArgs {
  std::string L = "16", q = "0.5";
  int rounds = 0;
  std::int64_t n = 100;
  std::uint64_t seed = 0;
};

int cmd_wetting(const WettingArgs& a) {
  if (a.n < 1) throw UsageError("--n must be >= 1");
  std::cout << "L,q,rounds,n,s_half,s_half_stderr,s_a,s_a_stderr\n";
  for (int L : parse_ints(a.L, "--L"))
    for (double q : parse_values(a.q, "--q")) {
      const int rounds = a.rounds > 0 ? a.rounds : 2 * L;
      Welford sh, sa;
      for (std::int64_t r = 0; r < a.n; ++r) {
        const auto res = wetting_p0(L, q, rounds, a.seed, static_cast<std::uint64_t>(r));
        sh.add(res.s_half);
        sa.add(res.s_a);
      }
      std::cout << L << ',' << format_double(q) << ',' << rounds << ',' << a.n << ',' << format_double(sh.mean())
                << ',' << format_double(sh.std_error()) << ',' << format_double(sa.mean()) << ','
                << format_double(sa.std_error()) << '\n';
    }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid control/measurement circuit simulator and scaling analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  SimArgs sim;
  auto add_sim = [&](const char* name, const char* desc) {
    auto* c = app.add_subcommand(name, desc);
    c->add_option("--L", sim.L, "system sizes (list or start:stop:step)");
    c->add_option("--p", sim.p, "control probabilities");
    c->add_option("--q", sim.q, "measurement probabilities");
    c->add_option("--tmax", sim.tmax, "circuit depth (default 2 L^2)");
    c->add_option("--n", sim.n, "realizations per cell");
    c->add_option("--seed", sim.seed, "master seed");
    c->add_option("--obs", sim.obs, "observables: s_half,s_a,i2,i3,t_pure,corr");
    c->add_option("--checkpoints", sim.checkpoints, "checkpoint times or 'default'");
    c->add_option("--out", sim.out, "output CSV (manifest written next to it)");
    c->add_option("--threads", sim.threads, "worker threads");
    c->add_option("--initial", sim.initial, "initial state: product or me");
    c->add_option("--anchor", sim.anchor, "quarter partition anchor: decimal or fixed");
    c->add_flag("--resume", sim.resume, "skip cells already present in --out");
    return c;
  };
  auto* c_sim = add_sim("sim", "run one ensemble cell (or a small grid)");
  auto* c_sweep = add_sim("sweep", "run a parameter grid");

  CollapseArgs col;
  auto* c_col = app.add_subcommand("collapse", "two-parameter data collapse of ensemble CSV");
  c_col->add_option("--in", col.in, "ensemble CSV")->required();
  c_col->add_option("--observable", col.observable, "observable name");
  c_col->add_option("--vary", col.vary, "control axis: q or p");
  c_col->add_option("--fixed", col.fixed, "value of the other control parameter");
  c_col->add_option("--t-over-L2", col.t_over_L2, "use checkpoint t = f L^2 instead of the last one");
  c_col->add_option("--box", col.box, "xc_lo,xc_hi,nu_lo,nu_hi");
  c_col->add_option("--lmin-sweep", col.lmin_sweep, "list of L_min cutoffs");
  c_col->add_option("--bootstrap", col.bootstrap, "bootstrap resamples");
  c_col->add_option("--seed", col.seed, "bootstrap seed");
  c_col->add_option("--out", col.out, "fit JSON (stdout if empty)");
  c_col->add_option("--rescaled-out", col.rescaled_out, "plot-ready rescaled CSV");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "exponent fits of ensemble CSV");
  c_fit->add_option("--in", fit.in, "ensemble CSV")->required();
  c_fit->add_option("--kind", fit.kind, "z | alpha_L | alpha_T | eta | beta")->required();
  c_fit->add_option("--observable", fit.observable, "observable name");
  c_fit->add_option("--p", fit.p, "control probability");
  c_fit->add_option("--q", fit.q, "measurement probability");
  c_fit->add_option("--vary", fit.vary, "beta: control axis");
  c_fit->add_option("--mode", fit.mode, "z: depth (t/L) or raw (t)");
  c_fit->add_option("--window", fit.window, "alpha_T: T window lo,hi");
  c_fit->add_option("--range", fit.range, "search range lo,hi");
  c_fit->add_option("--alt-q", fit.alt, "eta: neighboring q values for the error");
  c_fit->add_option("--bootstrap", fit.bootstrap, "bootstrap resamples");
  c_fit->add_option("--seed", fit.seed, "bootstrap seed");
  c_fit->add_option("--out", fit.out, "fit JSON (stdout if empty)");

  OracleArgs orc;
  auto* c_orc = app.add_subcommand("oracle-check", "compare incremental models with the explicit lattice");
  c_orc->add_option("--L", orc.L, "system sizes");
  c_orc->add_option("--t", orc.t, "steps per realization");
  c_orc->add_option("--trials", orc.trials, "realizations per size");
  c_orc->add_option("--seed", orc.seed, "master seed");
  c_orc->add_flag("--inject-cap-fault", orc.inject_cap_fault, "lower the distance cap by one");

  RwArgs rw;
  auto* c_rw = app.add_subcommand("rw", "random-walk purification time model");
  c_rw->add_option("--L", rw.L, "system sizes");
  c_rw->add_option("--p", rw.p, "control probabilities");
  c_rw->add_option("--n", rw.n, "walks per cell");
  c_rw->add_option("--seed", rw.seed, "master seed");
  c_rw->add_option("--cap", rw.cap, "censoring time");
  c_rw->add_option("--out", rw.out, "output CSV (stdout if empty)");

  ClassicalArgs cl;
  auto* c_cl = app.add_subcommand("classical", "controlled d-adic map");
  c_cl->add_option("--a", cl.a, "control contraction parameter");
  c_cl->add_option("--d", cl.d, "map base");
  c_cl->add_flag("--pc", cl.pc, "print the critical control probability");
  c_cl->add_option("--p", cl.p, "control probabilities");
  c_cl->add_option("--steps", cl.steps, "iterations");
  c_cl->add_option("--n", cl.n, "orbits per p");
  c_cl->add_option("--x0", cl.x0, "initial point");
  c_cl->add_option("--seed", cl.seed, "master seed");

  WettingArgs wt;
  auto* c_wt = app.add_subcommand("wetting", "p = 0 brickwork lattice");
  c_wt->add_option("--L", wt.L, "system sizes");
  c_wt->add_option("--q", wt.q, "measurement probabilities");
  c_wt->add_option("--rounds", wt.rounds, "brickwork rounds (default 2L)");
  c_wt->add_option("--n", wt.n, "realizations");
  c_wt->add_option("--seed", wt.seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (c_sim->parsed() || c_sweep->parsed()) return cmd_sim(sim);
    if (c_col->parsed()) return cmd_collapse(col);
    if (c_fit->parsed()) return cmd_fit(fit);
    if (c_orc->parsed()) return cmd_oracle_check(orc);
    if (c_rw->parsed()) return cmd_rw(rw);
    if (c_cl->parsed()) return cmd_classical(cl);
    if (c_wt->parsed()) return cmd_wetting(wt);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}
