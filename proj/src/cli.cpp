#include "xxz/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "xxz/basis.hpp"
#include "xxz/boson.hpp"
#include "xxz/eigensolve.hpp"
#include "xxz/errors.hpp"
#include "xxz/ground_state.hpp"
#include "xxz/hamiltonian.hpp"
#include "xxz/ising_perturb.hpp"
#include "xxz/json_writer.hpp"
#include "xxz/sos_bound.hpp"

namespace xxz::cli {

int parse_spin(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const int j = std::stoi(text, &used);
      if (used == text.size() && j >= 1) return 2 * j;
    } else {
      const std::string num = text.substr(0, slash), den = text.substr(slash + 1);
      const int a = std::stoi(num, &used);
      if (used != num.size()) throw DomainError("");
      const int b = std::stoi(den, &used);
      if (used != den.size()) throw DomainError("");
      if (b == 1 && a >= 1) return 2 * a;
      if (b == 2 && a >= 1) return a;
    }
  } catch (const std::logic_error&) {
  }
  throw DomainError("spin must be a positive integer or half-integer such as 3/2, got '" + text + "'");
}

namespace {

struct Flags {
  std::string spin;
  int two_j = 0;
  int length = 0;
  double delta = 0;
  double delta_inv = 0;
  int two_m = 0;
  int n_down = 0;
  int k = 4;
  double tol = 1e-10;
  int grid = 20;
  int truncation = 50;
  double refine_tol = 1e-6;
  int n = 0;
  double h = 0.02;
  int max_two_j = 6;
  double mu = 0;
  double r = 0;
  std::string which = "all";
  std::string out_dir = ".";
  std::string format = "json";
  std::string output;
  int threads = 0;
  bool all_sectors = false;
  bool table = false;
  bool force = false;
  bool timing = false;
};

// Option handles for one subcommand; null when the flag is not offered there.
struct Given {
  CLI::Option* two_j = nullptr;
  CLI::Option* spin = nullptr;
  CLI::Option* length = nullptr;
  CLI::Option* delta = nullptr;
  CLI::Option* delta_inv = nullptr;
  CLI::Option* two_m = nullptr;
  CLI::Option* n_down = nullptr;
  CLI::Option* all_sectors = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* grid = nullptr;
  CLI::Option* truncation = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* h = nullptr;
  CLI::Option* mu = nullptr;
  CLI::Option* r = nullptr;
  CLI::Option* threads = nullptr;
};

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

void add_spin(CLI::App* sub, Flags& f, Given& g, bool required = true) {
  g.two_j = sub->add_option("--two-j", f.two_j, "twice the spin J");
  g.spin = sub->add_option("--spin", f.spin, "spin J as an integer or half-integer, e.g. 3/2");
  g.two_j->excludes(g.spin);
  g.spin->excludes(g.two_j);
  if (required) {
    auto* group = sub->add_option_group("spin");
    group->add_option(g.two_j);
    group->add_option(g.spin);
    group->require_option(1);
  }
}

void add_delta(CLI::App* sub, Flags& f, Given& g) {
  g.delta = sub->add_option("--delta", f.delta, "anisotropy Delta > 1");
  g.delta_inv = sub->add_option("--delta-inv", f.delta_inv, "inverse anisotropy in [0, 1)");
  g.delta->excludes(g.delta_inv);
  g.delta_inv->excludes(g.delta);
}

void add_sector(CLI::App* sub, Flags& f, Given& g) {
  g.two_m = sub->add_option("--two-m", f.two_m, "twice the total magnetization");
  g.all_sectors = sub->add_flag("--all-sectors", f.all_sectors, "every magnetization sector");
  g.two_m->excludes(g.all_sectors);
  g.all_sectors->excludes(g.two_m);
}

void add_output(CLI::App* sub, Flags& f, Given& g) {
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--output", f.output, "write to this file instead of stdout");
  g.threads = sub->add_option("--threads", f.threads, "worker cap (default: XXZ_GAP_THREADS or 1)")
                  ->check(CLI::PositiveNumber);
  sub->add_flag("--force", f.force, "lift the desk-scale size guardrails");
  sub->add_flag("--timing", f.timing, "record wall time (breaks byte-identical reruns)");
}

struct Context {
  std::string command;
  Flags f;
  Given g;
  Json parameters = Json::object();
  Json diagnostics = Json::object();
  Json columns = Json::array();
  Json rows = Json::array();
};

int resolve_threads(const Flags& f, const Given& g) {
  if (given(g.threads)) return f.threads;
  if (const char* env = std::getenv("XXZ_GAP_THREADS")) {
    try {
      std::size_t used = 0;
      const int t = std::stoi(env, &used);
      if (used == std::string(env).size() && t >= 1) return t;
    } catch (const std::logic_error&) {
    }
    throw DomainError(std::string("XXZ_GAP_THREADS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

int resolve_two_j(const Flags& f, const Given& g) {
  const int two_j = given(g.spin) ? parse_spin(f.spin) : f.two_j;
  if (two_j < 1) throw DomainError("two_j must be a positive integer");
  return two_j;
}

std::string spin_text(int two_j) {
  return two_j % 2 == 0 ? std::to_string(two_j / 2) : std::to_string(two_j) + "/2";
}

bool has_delta(const Given& g) { return given(g.delta) || given(g.delta_inv); }

double resolve_delta_inv(const Flags& f, const Given& g) {
  if (given(g.delta)) {
    if (!(f.delta > 1.0)) throw DomainError("delta must exceed 1");
    return 1.0 / f.delta;
  }
  if (given(g.delta_inv)) {
    if (!(f.delta_inv >= 0.0 && f.delta_inv < 1.0)) throw DomainError("delta_inv must lie in [0, 1)");
    return f.delta_inv;
  }
  throw DomainError("one of --delta or --delta-inv is required");
}

int require_length(const Flags& f, const Given& g) {
  if (!given(g.length)) throw DomainError("--length is required");
  if (f.length < 2) throw DomainError("chain length must be at least 2");
  return f.length;
}

std::vector<int> sectors(int two_j, int length, const Flags& f, const Given& g, bool need_gap) {
  std::vector<int> out;
  if (f.all_sectors) {
    for (int m = -two_j * length; m <= two_j * length; m += 2)
      if (!need_gap || sector_dimension(two_j, length, m) >= 2) out.push_back(m);
    return out;
  }
  if (!given(g.two_m)) throw DomainError("one of --two-m or --all-sectors is required");
  if (!is_valid_sector(two_j, length, f.two_m))
    throw DomainError("invalid sector: two_m=" + std::to_string(f.two_m) + " for two_j=" + std::to_string(two_j) +
                      ", length=" + std::to_string(length));
  out.push_back(f.two_m);
  return out;
}

void guard_sector(std::uint64_t dim, bool force) {
  if (!force && dim > kMaxSectorDim)
    throw DomainError("sector dimension " + std::to_string(dim) + " exceeds the desk-scale cap " +
                      std::to_string(kMaxSectorDim) + "; pass --force to proceed");
}

void guard_dense(std::uint64_t dim, bool force) {
  if (!force && dim > kMaxDenseDim)
    throw DomainError("dense dimension " + std::to_string(dim) + " exceeds the cap " + std::to_string(kMaxDenseDim) +
                      "; pass --force to proceed");
}

// Delta^{-1} = i / grid for i in [first, grid - 1].
std::vector<double> delta_inv_grid(int grid, int first) {
  if (grid < 2) throw DomainError("grid must be at least 2");
  std::vector<double> out;
  for (int i = first; i < grid; ++i) out.push_back(static_cast<double>(i) / grid);
  return out;
}

GapOptions gap_options(const Flags& f, int threads) {
  GapOptions opt;
  opt.tol = f.tol;
  opt.k = f.k;
  opt.threads = threads;
  return opt;
}

Json to_json(const std::vector<double>& v) { return Json(v); }

Json vec_json(const Vector<double>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string rational_text(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// ---- commands ----

void cmd_spectrum(Context& c, int threads) {
  const int two_j = resolve_two_j(c.f, c.g);
  const int L = require_length(c.f, c.g);
  const double d = resolve_delta_inv(c.f, c.g);
  const auto params = SpinParams::make(two_j, L, d);
  const bool full = c.f.k == 0;
  c.parameters = {{"two_j", two_j}, {"spin", spin_text(two_j)}, {"length", L}, {"delta_inv", d},
                  {"mode", full ? "full" : "lowest"}, {"k", c.f.k}, {"tol", c.f.tol}, {"threads", threads}};
  c.columns = {"two_m", "index", "eigenvalue"};
  Json sec = Json::array();
  for (int m : sectors(two_j, L, c.f, c.g, false)) {
    const auto dim = sector_dimension(two_j, L, m);
    guard_sector(dim, c.f.force);
    if (full) guard_dense(dim, c.f.force);
    const auto h = assemble_sector<double>(params, m, threads);
    Json entry = {{"two_m", m}, {"dim", dim}, {"norm1", h.norm1()}, {"zero_threshold", zero_threshold(h.norm1())}};
    std::vector<double> values;
    if (full) {
      values = full_spectrum(h, c.f.force ? std::numeric_limits<std::size_t>::max() : kMaxDenseDim);
      entry["dense"] = true;
    } else {
      const auto res = lowest_k(h, c.f.k, c.f.tol);
      values.assign(res.eigenvalues.data(), res.eigenvalues.data() + res.eigenvalues.size());
      entry["dense"] = res.dense;
      entry["residual_norms"] = vec_json(res.residual_norms);
      entry["iterations"] = res.iterations;
    }
    for (std::size_t i = 0; i < values.size(); ++i) c.rows.push_back({m, i, values[i]});
    sec.push_back(entry);
  }
  c.diagnostics["sectors"] = sec;
}

Json gap_entry(const GapReport& r) {
  return {{"two_m", r.two_m},
          {"dim", r.dim},
          {"norm1", r.norm1},
          {"zero_threshold", r.zero_threshold},
          {"low_eigenvalues", to_json(r.low_eigenvalues)},
          {"residual_norms", to_json(r.residual_norms)},
          {"iterations", r.iterations},
          {"dense", r.dense}};
}

void cmd_gap(Context& c, int threads) {
  const int two_j = resolve_two_j(c.f, c.g);
  const int L = require_length(c.f, c.g);
  const double d = resolve_delta_inv(c.f, c.g);
  const auto params = SpinParams::make(two_j, L, d);
  c.parameters = {{"two_j", two_j}, {"spin", spin_text(two_j)}, {"length", L}, {"delta_inv", d},
                  {"k", c.f.k},     {"tol", c.f.tol},           {"threads", threads}};
  c.columns = {"two_m", "dim", "ground_energy", "gap", "multiplicity", "zero_threshold"};
  Json sec = Json::array();
  for (int m : sectors(two_j, L, c.f, c.g, true)) {
    guard_sector(sector_dimension(two_j, L, m), c.f.force);
    const auto r = spectral_gap(params, m, gap_options(c.f, threads));
    c.rows.push_back({m, r.dim, r.ground_energy, r.gap, r.multiplicity, r.zero_threshold});
    sec.push_back(gap_entry(r));
  }
  c.diagnostics["sectors"] = sec;
}

void cmd_gap_scan(Context& c, int threads) {
  const int two_j = resolve_two_j(c.f, c.g);
  const int L = require_length(c.f, c.g);
  const auto grid = delta_inv_grid(c.f.grid, 0);
  c.parameters = {{"two_j", two_j}, {"spin", spin_text(two_j)}, {"length", L},   {"grid", c.f.grid},
                  {"k", c.f.k},     {"tol", c.f.tol},           {"threads", threads}};
  c.columns = {"delta_inv", "two_m", "gap", "multiplicity", "zero_threshold"};
  const auto ms = sectors(two_j, L, c.f, c.g, true);
  for (int m : ms) guard_sector(sector_dimension(two_j, L, m), c.f.force);
  Json worst = Json::array();
  for (double d : grid) {
    const auto params = SpinParams::make(two_j, L, d);
    double res = 0;
    for (int m : ms) {
      const auto r = spectral_gap(params, m, gap_options(c.f, threads));
      c.rows.push_back({d, m, r.gap, r.multiplicity, r.zero_threshold});
      for (double x : r.residual_norms) res = std::max(res, x);
    }
    worst.push_back(res);
  }
  c.diagnostics["max_residual_per_delta_inv"] = worst;
}

int resolve_n_down(int two_j, int L, const Flags& f, const Given& g) {
  if (given(g.n_down) && given(g.two_m)) throw DomainError("--n-down and --two-m are mutually exclusive");
  if (given(g.n_down)) return f.n_down;
  if (given(g.two_m)) {
    if (!is_valid_sector(two_j, L, f.two_m)) throw DomainError("invalid sector");
    return (two_j * L - f.two_m) / 2;
  }
  throw DomainError("one of --n-down or --two-m is required");
}

void cmd_sos_bound(Context& c, int) {
  const int two_j = resolve_two_j(c.f, c.g);
  const int L = require_length(c.f, c.g);
  const int n_down = resolve_n_down(two_j, L, c.f, c.g);
  const std::size_t size = restricted_partitions(L, two_j, n_down).size();
  guard_dense(size, c.f.force);
  std::vector<double> grid;
  if (has_delta(c.g)) grid.push_back(resolve_delta_inv(c.f, c.g));
  else grid = delta_inv_grid(c.f.grid, 0);
  c.parameters = {{"two_j", two_j}, {"spin", spin_text(two_j)}, {"length", L}, {"n_down", n_down},
                  {"delta_inv", grid.size() == 1 ? Json(grid[0]) : Json(grid)}};
  c.columns = {"delta_inv", "q", "size", "top_eigenvalue", "delta", "one_minus_delta", "bound"};
  for (double d : grid) {
    const auto b = delta_and_bound(L, two_j, n_down, d);
    c.rows.push_back({d, b.q, b.size, b.top_eigenvalue, b.delta, 1.0 - b.delta, b.bound});
  }
  c.diagnostics["top_eigenvalue_tolerance"] = 1e-6;
}

void cmd_curvature(Context& c, int threads) {
  c.columns = {"two_j", "spin", "n", "exact", "value", "degenerate", "infinite"};
  if (c.f.table) {
    if (given(c.g.n) || given(c.g.two_j) || given(c.g.spin)) throw DomainError("--table takes no --n or spin");
    c.parameters = {{"table", true}, {"max_two_j", c.f.max_two_j}};
    for (const auto& e : curvature_table(c.f.max_two_j))
      c.rows.push_back({e.two_j, spin_text(e.two_j), e.n, e.exact ? rational_text(*e.exact) : "inf", e.value,
                        e.degenerate, e.infinite});
    return;
  }
  if (!(given(c.g.two_j) || given(c.g.spin)) || !given(c.g.n))
    throw DomainError("curvature needs --table, or a spin and --n");
  const int two_j = resolve_two_j(c.f, c.g);
  const auto e = curvature(two_j, c.f.n);
  c.parameters = {{"two_j", two_j}, {"spin", spin_text(two_j)}, {"n", c.f.n}};
  Json row = {e.two_j, spin_text(e.two_j), e.n, e.exact ? rational_text(*e.exact) : "inf", e.value,
              e.degenerate, e.infinite};
  if (given(c.g.length)) {
    const int L = require_length(c.f, c.g);
    const int m = given(c.g.two_m) ? c.f.two_m : centered_sector(two_j, L, c.f.n);
    guard_sector(sector_dimension(two_j, L, m), c.f.force);
    const auto opt = gap_options(c.f, threads);
    const auto a = numeric_curvature(two_j, L, m, c.f.h, opt);
    const auto b = numeric_curvature(two_j, L, m, c.f.h / 2, opt);
    const double richardson = b.value + (b.value - a.value) / 3.0;
    c.parameters["length"] = L;
    c.parameters["two_m"] = m;
    c.parameters["h"] = c.f.h;
    c.parameters["tol"] = c.f.tol;
    c.parameters["k"] = c.f.k;
    for (const char* col : {"numeric_h", "numeric_half_h", "richardson"}) c.columns.push_back(col);
    row.push_back(a.value);
    row.push_back(b.value);
    row.push_back(richardson);
    c.diagnostics = {{"gamma0", a.gamma0}, {"gamma_h", a.gamma_h}, {"gamma_half_h", b.gamma_h},
                     {"tail_bound", a.tail_bound}};
  }
  c.rows.push_back(row);
}

void cmd_boson(Context& c, int threads) {
  const int two_j = resolve_two_j(c.f, c.g);
  const int L = require_length(c.f, c.g);
  const double d = resolve_delta_inv(c.f, c.g);
  c.parameters = {{"two_j", two_j}, {"spin", spin_text(two_j)}, {"length", L},  {"delta_inv", d},
                  {"k", c.f.k},     {"tol", c.f.tol},           {"threads", threads}};
  c.columns = {"two_m", "eta", "r", "gap", "gap_over_j", "lambda1", "relative_deviation"};
  Json spectra = Json::array();
  for (int m : sectors(two_j, L, c.f, c.g, true)) {
    guard_sector(sector_dimension(two_j, L, m), c.f.force);
    const auto b = boson_vs_exact(two_j, L, d, m, gap_options(c.f, threads));
    c.rows.push_back({m, b.eta, b.r, b.gap, b.gap_over_j, b.lambda1, b.relative_deviation});
    spectra.push_back({{"two_m", m}, {"boson_spectrum", to_json(b.boson_spectrum)}});
  }
  c.diagnostics["sectors"] = spectra;
}

void cmd_jacobi(Context& c, int) {
  const double d = resolve_delta_inv(c.f, c.g);
  if (given(c.g.mu) == given(c.g.r)) throw DomainError("exactly one of --mu or --r is required");
  const int N = c.f.truncation;
  const double tol = given(c.g.tol) ? c.f.tol : 1e-8;
  c.parameters = {{"delta_inv", d}, {"truncation", N}, {"tol", tol}};
  c.columns = {"mu", "r", "delta_inv", "truncation", "zero_mode", "gap", "doubled_gap", "truncation_change",
               "truncation_converged"};
  if (given(c.g.mu)) {
    c.parameters["mu"] = c.f.mu;
    const auto g = gamma_infinity(c.f.mu, d, N, tol);
    const auto& j = g.jacobi;
    c.rows.push_back({g.mu, j.r, d, N, j.zero_mode, j.gap, j.doubled_gap, j.truncation_change,
                      g.truncation_converged});
    c.diagnostics = {{"phase_window", g.phase.window}, {"phase_tail", g.phase.tail}};
  } else {
    c.parameters["r"] = c.f.r;
    const auto j = jacobi_gap(c.f.r, d, N);
    c.rows.push_back({nullptr, j.r, d, N, j.zero_mode, j.gap, j.doubled_gap, j.truncation_change,
                      j.truncation_change <= tol});
  }
}

void cmd_optimal_delta(Context& c, int) {
  const int N = given(c.g.truncation) ? c.f.truncation : 500;
  const int grid = given(c.g.grid) ? c.f.grid : 64;
  const auto o = optimal_anisotropy_scan(N, grid, c.f.refine_tol);
  c.parameters = {{"truncation", N}, {"grid", grid}, {"refine_tol", c.f.refine_tol}};
  c.columns = {"delta_inv", "gap", "global"};
  for (std::size_t i = 0; i < o.local_maxima.size(); ++i)
    c.rows.push_back({o.local_maxima[i], o.local_values[i], o.local_maxima[i] == o.delta_inv});
  c.diagnostics = {{"delta_inv", o.delta_inv}, {"gap", o.gap}, {"evaluations", o.evaluations}};
}

// ---- figures ----

struct Figure {
  std::string description;
  Json parameters;
  Json columns;
  Json rows = Json::array();
};

Figure figure1(int threads) {
  Figure fig{"full sector spectra versus twice the magnetization", Json::object(),
             {"two_j", "length", "delta", "two_m", "index", "energy"}};
  const std::vector<std::tuple<int, int, double>> sets = {{1, 10, 2.0}, {2, 7, 4.0}, {3, 6, 4.0}, {4, 5, 8.0}};
  Json used = Json::array();
  for (const auto& [two_j, L, delta] : sets) {
    used.push_back({{"two_j", two_j}, {"length", L}, {"delta", delta}});
    const auto params = SpinParams::make(two_j, L, 1.0 / delta);
    for (int m = -two_j * L; m <= two_j * L; m += 2) {
      const auto ev = full_spectrum(assemble_sector<double>(params, m, threads), kMaxDenseDim);
      for (std::size_t i = 0; i < ev.size(); ++i) fig.rows.push_back({two_j, L, delta, m, i, ev[i]});
    }
  }
  fig.parameters = {{"instances", used}, {"solver", "dense"}};
  return fig;
}

Figure figure2(int grid) {
  Figure fig{"SOS reduction: 1 - delta and the gap lower bound versus inverse anisotropy", Json::object(),
             {"two_j", "n", "length", "n_down", "delta_inv", "one_minus_delta", "bound"}};
  const std::vector<std::tuple<int, int, int>> sets = {{7, 1, 4}, {4, 0, 6}, {8, 1, 4}, {5, 0, 5},
                                                       {6, 0, 4}, {7, 0, 4}, {8, 0, 4}, {9, 0, 3}};
  Json used = Json::array();
  const auto ds = delta_inv_grid(grid, 0);
  for (const auto& [two_j, n, L] : sets) {
    const int n_down = two_j * (L / 2) + n;
    used.push_back({{"two_j", two_j}, {"n", n}, {"length", L}, {"n_down", n_down}});
    for (double d : ds) {
      const auto b = delta_and_bound(L, two_j, n_down, d);
      fig.rows.push_back({two_j, n, L, n_down, d, 1.0 - b.delta, b.bound});
    }
  }
  fig.parameters = {{"instances", used}, {"n_down_rule", "2J floor(L/2) + n"}, {"delta_inv_grid", ds}};
  return fig;
}

// Lowest nonzero sums of nonnegative integer multiples of the positive modes.
std::vector<double> multi_boson_levels(const std::vector<double>& modes, std::size_t count) {
  std::vector<double> out;
  std::function<void(std::size_t, int, double)> rec = [&](std::size_t i, int left, double e) {
    if (i == modes.size()) {
      if (e > 0) out.push_back(e);
      return;
    }
    for (int n = 0; n <= left; ++n) rec(i + 1, left - n, e + n * modes[i]);
  };
  rec(0, static_cast<int>(count), 0.0);
  std::sort(out.begin(), out.end());
  if (out.size() > count) out.resize(count);
  return out;
}

Figure figure3(int grid, int threads) {
  Figure fig{"boson gas prediction versus exact low levels divided by J, L = 4, M = 0", Json::object(),
             {"two_j", "delta_inv", "source", "index", "energy_over_j"}};
  const int L = 4, levels = 5;
  const auto ds = delta_inv_grid(grid, 1);
  GapOptions opt;
  opt.k = levels + 1;
  opt.threads = threads;
  for (int two_j : {2, 4, 6, 8}) {
    for (double d : ds) {
      const double J = 0.5 * two_j;
      const auto r = spectral_gap(SpinParams::make(two_j, L, d), 0, opt);
      for (std::size_t i = 1; i < r.low_eigenvalues.size(); ++i)
        fig.rows.push_back({two_j, d, "exact", i, (r.low_eigenvalues[i] - r.ground_energy) / J});
      const double eta = -std::log(q_from_delta_inv(d));
      const auto ev = boson_matrix(L, eta, solve_chain_phase(0.0, eta, L)).eigenvalues();
      std::vector<double> modes(ev.data() + 1, ev.data() + ev.size());
      const auto multi = multi_boson_levels(modes, levels);
      for (std::size_t i = 0; i < multi.size(); ++i) fig.rows.push_back({two_j, d, "boson", i + 1, multi[i]});
    }
  }
  fig.parameters = {{"length", L},        {"two_m", 0}, {"two_j", {2, 4, 6, 8}}, {"levels", levels},
                    {"delta_inv_grid", ds}, {"tol", opt.tol}};
  return fig;
}

Figure figure4(int grid) {
  const int N = 50;
  Figure fig{"gamma_infinity of the truncated Jacobi operator over (r, inverse anisotropy)", Json::object(),
             {"r", "delta_inv", "gamma_infinity", "zero_mode", "truncation_change"}};
  const auto ds = delta_inv_grid(grid, 1);
  std::vector<double> rs;
  for (int i = 0; i <= grid; ++i) rs.push_back(static_cast<double>(i) / grid);
  for (double r : rs)
    for (double d : ds) {
      const auto j = jacobi_gap(r, d, N);
      fig.rows.push_back({r, d, j.gap, j.zero_mode, j.truncation_change});
    }
  fig.parameters = {{"truncation", N}, {"r_grid", rs}, {"delta_inv_grid", ds}};
  return fig;
}

Figure figure56(int grid, bool multiples) {
  const int L = 50, first = -24, max_multiple = 6;
  Figure fig{multiples ? "boson coupling matrix spectrum with multiples of the lowest boson energy"
                       : "boson coupling matrix spectrum versus inverse anisotropy",
             Json::object(), {"delta_inv", "kind", "index", "value"}};
  const auto ds = delta_inv_grid(grid, 1);
  for (double d : ds) {
    const double eta = -std::log(q_from_delta_inv(d));
    const auto ev = boson_matrix(L, eta, 0.0, first).eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) fig.rows.push_back({d, "eigenvalue", i, ev[i]});
    if (multiples)
      for (int m = 2; m <= max_multiple; ++m) fig.rows.push_back({d, "multiple", m, m * ev[1]});
  }
  fig.parameters = {{"sites", L}, {"first_site", first}, {"r", 0.0}, {"delta_inv_grid", ds}};
  if (multiples) fig.parameters["max_multiple"] = max_multiple;
  return fig;
}

void write_csv(std::ostream& os, const Json& columns, const Json& rows);

void cmd_figures(Context& c, int threads) {
  std::vector<int> which;
  if (c.f.which == "all") which = {1, 2, 3, 4, 5, 6};
  else {
    int w = 0;
    try {
      std::size_t used = 0;
      w = std::stoi(c.f.which, &used);
      if (used != c.f.which.size()) w = 0;
    } catch (const std::logic_error&) {
    }
    if (w < 1 || w > 6) throw DomainError("--which must be 1..6 or all");
    which = {w};
  }
  const int grid = c.f.grid;
  c.parameters = {{"which", c.f.which}, {"out_dir", c.f.out_dir}, {"grid", grid}};
  c.columns = {"figure", "csv", "json", "rows"};
  std::filesystem::create_directories(c.f.out_dir);
  for (int w : which) {
    Figure fig;
    switch (w) {
      case 1: fig = figure1(threads); break;
      case 2: fig = figure2(grid); break;
      case 3: fig = figure3(grid, threads); break;
      case 4: fig = figure4(grid); break;
      default: fig = figure56(grid, w == 6); break;
    }
    const std::string stem = "figure" + std::to_string(w);
    const auto csv_path = std::filesystem::path(c.f.out_dir) / (stem + ".csv");
    const auto json_path = std::filesystem::path(c.f.out_dir) / (stem + ".json");
    {
      std::ofstream os(csv_path);
      if (!os) throw DomainError("cannot write " + csv_path.string());
      write_csv(os, fig.columns, fig.rows);
    }
    {
      std::ofstream os(json_path);
      if (!os) throw DomainError("cannot write " + json_path.string());
      Json side = {{"figure", w},
                   {"description", fig.description},
                   {"version", kVersion},
                   {"parameters", fig.parameters},
                   {"columns", fig.columns},
                   {"rows", fig.rows.size()},
                   {"csv", stem + ".csv"}};
      write_json(os, side);
      os << '\n';
    }
    c.rows.push_back({w, csv_path.string(), json_path.string(), fig.rows.size()});
  }
}

// ---- output ----

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

void write_csv(std::ostream& os, const Json& columns, const Json& rows) {
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << csv_cell(columns[i]);
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

Json metadata(const Context& c) {
  return {{"command", c.command}, {"version", kVersion}, {"parameters", c.parameters}};
}

void emit(const Context& c, const Json& record, std::ostream& out) {
  std::ostringstream buf;
  if (c.f.format == "csv" && record.contains("payload")) {
    // Parameters ride along as comment lines so the file stays self-describing.
    buf << "# command=" << c.command << '\n' << "# version=" << kVersion << '\n';
    for (auto it = c.parameters.begin(); it != c.parameters.end(); ++it) {
      std::ostringstream v;
      write_json(v, it.value(), 0);
      std::string s = v.str();
      s.erase(std::remove(s.begin(), s.end(), '\n'), s.end());
      buf << "# " << it.key() << '=' << s << '\n';
    }
    write_csv(buf, record["payload"]["columns"], record["payload"]["rows"]);
  } else {
    write_json(buf, record);
    buf << '\n';
  }
  if (c.f.output.empty()) {
    out << buf.str();
  } else {
    std::ofstream os(c.f.output);
    if (!os) throw DomainError("cannot write " + c.f.output);
    os << buf.str();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral gap of the ferromagnetic spin-J XXZ chain with kink boundary fields", "xxz_gap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Flags f;
  std::map<std::string, Given> given_by;
  std::map<std::string, std::function<void(Context&, int)>> handlers;

  auto make = [&](const std::string& name, const std::string& help, auto handler) {
    auto* sub = app.add_subcommand(name, help);
    handlers[name] = handler;
    Given& g = given_by[name];
    add_output(sub, f, g);
    return std::pair<CLI::App*, Given*>(sub, &g);
  };

  {
    auto [sub, g] = make("spectrum", "eigenvalues per sector (full dense spectrum with --k 0)", cmd_spectrum);
    add_spin(sub, f, *g);
    g->length = sub->add_option("--length", f.length, "chain length L");
    add_delta(sub, f, *g);
    add_sector(sub, f, *g);
    g->k = sub->add_option("--k", f.k, "number of lowest eigenvalues; 0 for all")->check(CLI::NonNegativeNumber);
    g->tol = sub->add_option("--tol", f.tol, "relative residual tolerance");
  }
  {
    auto [sub, g] = make("gap", "spectral gap per sector", cmd_gap);
    add_spin(sub, f, *g);
    g->length = sub->add_option("--length", f.length, "chain length L");
    add_delta(sub, f, *g);
    add_sector(sub, f, *g);
    g->k = sub->add_option("--k", f.k, "Lanczos block size")->check(CLI::Range(2, 64));
    g->tol = sub->add_option("--tol", f.tol, "relative residual tolerance");
  }
  {
    auto [sub, g] = make("gap-scan", "spectral gap over an inverse-anisotropy grid i/grid", cmd_gap_scan);
    add_spin(sub, f, *g);
    g->length = sub->add_option("--length", f.length, "chain length L");
    add_sector(sub, f, *g);
    g->grid = sub->add_option("--grid", f.grid, "grid denominator");
    g->k = sub->add_option("--k", f.k, "Lanczos block size")->check(CLI::Range(2, 64));
    g->tol = sub->add_option("--tol", f.tol, "relative residual tolerance");
  }
  {
    auto [sub, g] = make("sos-bound", "SOS-reduction delta and gap lower bound", cmd_sos_bound);
    add_spin(sub, f, *g);
    g->length = sub->add_option("--length", f.length, "chain length L");
    add_delta(sub, f, *g);
    g->two_m = sub->add_option("--two-m", f.two_m, "twice the total magnetization");
    g->n_down = sub->add_option("--n-down", f.n_down, "number of down steps N");
    g->grid = sub->add_option("--grid", f.grid, "grid denominator when no delta is given");
  }
  {
    auto [sub, g] = make("curvature", "Ising-limit gap curvature", cmd_curvature);
    sub->set_help_flag("--help", "Print this help message and exit");
    add_spin(sub, f, *g, false);
    sub->add_flag("--table", f.table, "all entries up to --max-two-j");
    sub->add_option("--max-two-j", f.max_two_j, "largest two_j in the table")->check(CLI::Range(2, 40));
    g->n = sub->add_option("--n", f.n, "interface offset n");
    g->length = sub->add_option("--length", f.length, "also compute the finite-difference curvature at this L");
    g->two_m = sub->add_option("--two-m", f.two_m, "sector for the numeric check (default: centered)");
    g->h = sub->add_option("--h", f.h, "finite-difference step");
    g->k = sub->add_option("--k", f.k, "Lanczos block size")->check(CLI::Range(2, 64));
    g->tol = sub->add_option("--tol", f.tol, "relative residual tolerance");
  }
  {
    auto [sub, g] = make("boson", "exact gap / J versus the boson coupling matrix", cmd_boson);
    add_spin(sub, f, *g);
    g->length = sub->add_option("--length", f.length, "chain length L");
    add_delta(sub, f, *g);
    add_sector(sub, f, *g);
    g->k = sub->add_option("--k", f.k, "Lanczos block size")->check(CLI::Range(2, 64));
    g->tol = sub->add_option("--tol", f.tol, "relative residual tolerance");
  }
  {
    auto [sub, g] = make("jacobi", "gap of the truncated Jacobi operator", cmd_jacobi);
    add_delta(sub, f, *g);
    g->mu = sub->add_option("--mu", f.mu, "magnetization offset; the phase r is solved for");
    g->r = sub->add_option("--r", f.r, "interface phase");
    g->mu->excludes(g->r);
    g->r->excludes(g->mu);
    g->truncation = sub->add_option("--truncation", f.truncation, "truncation size N")->check(CLI::Range(3, 100000));
    g->tol = sub->add_option("--tol", f.tol, "zero-mode and truncation tolerance (default 1e-8)");
  }
  {
    auto [sub, g] = make("optimal-delta", "inverse anisotropy maximizing gamma_infinity at mu = 0", cmd_optimal_delta);
    g->truncation = sub->add_option("--truncation", f.truncation, "truncation size N (default 500)")
                        ->check(CLI::Range(3, 100000));
    g->grid = sub->add_option("--grid", f.grid, "coarse grid points (default 64)");
    sub->add_option("--refine-tol", f.refine_tol, "golden-section tolerance");
  }
  {
    auto [sub, g] = make("figures", "write figureN.csv and figureN.json datasets", cmd_figures);
    sub->add_option("--which", f.which, "1..6 or all");
    sub->add_option("--out-dir", f.out_dir, "output directory");
    g->grid = sub->add_option("--grid", f.grid, "inverse-anisotropy grid denominator");
  }

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("xxz_gap");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return 2;
  }

  Context c;
  c.command = app.get_subcommands().front()->get_name();
  c.f = f;
  c.g = given_by[c.command];
  try {
    const int threads = resolve_threads(c.f, c.g);
    const auto start = std::chrono::steady_clock::now();
    handlers[c.command](c, threads);
    Json record = {{"metadata", metadata(c)},
                   {"payload", {{"columns", c.columns}, {"rows", c.rows}}},
                   {"diagnostics", c.diagnostics}};
    if (c.f.timing)
      record["metadata"]["wall_time_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(c, record, out);
    return 0;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    Json record = {{"metadata", metadata(c)},
                   {"error", {{"kind", "numerical"}, {"message", e.what()}, {"best_values", e.best_values()}}}};
    c.f.format = "json";
    try {
      emit(c, record, out);
    } catch (const std::exception&) {
      write_json(out, record);
      out << '\n';
    }
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace xxz::cli
