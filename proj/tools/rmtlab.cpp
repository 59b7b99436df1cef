// Command-line front end: one subcommand per experiment operation, CSV/JSON
// artifacts with reproducibility headers, and named exit-1 failures for the
// verification subcommands. Identical invocations (same seed) produce
// bit-identical outputs.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rmtlab/circuit.hpp"
#include "rmtlab/complexity.hpp"
#include "rmtlab/concentration.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/experiments.hpp"
#include "rmtlab/io.hpp"
#include "rmtlab/metrics.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/version.hpp"

namespace {

using namespace rmtlab;

std::string g_invocation;

std::string tool_line() { return std::string("rmtlab ") + kVersion + " | " + g_invocation; }

// "start:stop:step" (start inclusive, guarded by half a step at the top) or a
// comma-separated list, or a single number.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  const auto to_double = [](const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("malformed number in grid: " + s);
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::istringstream in(text);
    std::string a;
    std::string b;
    std::string c;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c))
      throw std::invalid_argument("grid must be start:stop:step, got: " + text);
    const double start = to_double(a);
    const double stop = to_double(b);
    const double step = to_double(c);
    if (step <= 0.0) throw std::invalid_argument("grid step must be positive: " + text);
    for (int i = 0;; ++i) {
      const double v = start + i * step;
      if (v >= stop + step / 2.0) break;
      out.push_back(v);
    }
  } else {
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
      if (!part.empty()) out.push_back(to_double(part));
    }
  }
  if (out.empty()) throw std::invalid_argument("empty grid: " + text);
  return out;
}

void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const nlohmann::json& params, const std::vector<std::string>& outputs) {
  nlohmann::json m;
  m["tool"] = "rmtlab";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["invocation"] = g_invocation;
  m["parameters"] = params;
  m["outputs"] = outputs;
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + out_path);
  f << m.dump(2) << "\n";
}

struct EnsembleOpts {
  std::string kind = "gue";
  Index d = 2;
  double sigma2 = 0.0;

  EnsembleSpec spec() const {
    EnsembleSpec s;
    s.kind = parse_ensemble_kind(kind);
    s.dim = d;
    s.sigma2 = sigma2;
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    return s;
  }
};

void add_ensemble_opts(CLI::App* sub, EnsembleOpts& e) {
  sub->add_option("--ensemble", e.kind,
                  "ensemble kind: gue | diag-gaussian | random-basis-gaussian");
  sub->add_option("--d", e.d, "Hilbert space dimension")->check(CLI::PositiveNumber);
  sub->add_option("--sigma2", e.sigma2, "GUE entry variance (0 = 1/d)");
}

struct CommonOpts {
  std::uint64_t seed = 12345;
  int jobs = 0;
};

void add_common_opts(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--seed", c.seed, "RNG seed (env RMTLAB_SEED)")->envname("RMTLAB_SEED");
  sub->add_option("--jobs", c.jobs, "worker threads, 0 = all cores");
}

UnitaryMatrix make_target(Index d, const std::string& name, const std::string& file) {
  if (!file.empty()) return UnitaryMatrix(read_cmpx_file(file));
  RealVector phases = RealVector::Zero(d);
  if (name == "single-flip") {
    phases(0) = std::numbers::pi;
  } else if (name == "alternating") {
    for (Index i = 0; i < d; ++i) phases(i) = (i % 2 == 0) ? std::numbers::pi : 0.0;
  } else {
    throw std::invalid_argument("unknown target: " + name +
                                " (use single-flip, alternating, or --target-file)");
  }
  return UnitaryMatrix::from_phases(phases);
}

std::vector<double> diagonal_of_cmpx(const std::string& path) {
  const ComplexMatrix m = read_cmpx_file(path);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  std::vector<double> diag(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (i != j && std::abs(m(i, j)) > 1e-12 * scale)
        throw std::invalid_argument("hamiltonian file is not diagonal: " + path);
    }
    if (std::abs(m(i, i).imag()) > 1e-12 * scale)
      throw std::invalid_argument("hamiltonian diagonal is not real: " + path);
    diag[static_cast<std::size_t>(i)] = m(i, i).real();
  }
  return diag;
}

// ---------------------------------------------------------------- sample ---

struct SampleOpts {
  EnsembleOpts ens;
  CommonOpts common;
  std::string object = "hamiltonian";  // hamiltonian | haar-unitary | evolution
  double t = 1.0;
  int count = 1;
  std::string out = "sample";
};

int run_sample(const SampleOpts& o) {
  const EnsembleSpec spec = o.ens.spec();
  const SeedStream s{o.common.seed, 0};
  std::vector<std::string> files;
  for (int k = 0; k < o.count; ++k) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "_%03d.cmpx", k);
    const std::string path = o.out + suffix;
    if (o.object == "hamiltonian") {
      write_cmpx_file(path, sample_hamiltonian(spec, s.at(k)).matrix());
    } else if (o.object == "haar-unitary") {
      write_cmpx_file(path, sample_haar_unitary(spec.dim, s.at(k)).matrix());
    } else if (o.object == "evolution") {
      write_cmpx_file(path, evolve(sample_hamiltonian(spec, s.at(k)), o.t).matrix());
    } else {
      throw std::invalid_argument("unknown object: " + o.object);
    }
    files.push_back(path);
  }
  nlohmann::json params;
  params["ensemble"] = o.ens.kind;
  params["d"] = o.ens.d;
  params["sigma2"] = o.ens.sigma2;
  params["object"] = o.object;
  params["t"] = o.t;
  params["count"] = o.count;
  params["seed"] = o.common.seed;
  write_manifest(o.out + ".manifest.json", "sample", params, files);
  std::cout << "wrote " << files.size() << " file(s) with prefix " << o.out << "\n";
  return 0;
}

// ----------------------------------------------------------- form-factor ---

struct FormFactorOpts {
  EnsembleOpts ens{"gue", 128, 0.0};
  CommonOpts common;
  std::string t_grid = "0:8:0.25";
  int samples = 100;
  std::string out = "form_factor.csv";
};

int run_form_factor(const FormFactorOpts& o) {
  const EnsembleSpec spec = o.ens.spec();
  const auto grid = parse_grid(o.t_grid);
  const auto est = estimate_form_factor(spec, grid, o.samples, {o.common.seed, 0},
                                        o.common.jobs);
  CsvWriter csv(o.out, tool_line());
  csv.header({"t", "mean_re", "mean_im", "theory_mean", "variance", "std_error",
              "n_samples"});
  for (const auto& e : est)
    csv.row({e.t, e.mean.real(), e.mean.imag(), form_factor_theory_mean(spec, e.t),
             e.variance, e.std_error, static_cast<double>(e.n_samples)});
  nlohmann::json params;
  params["ensemble"] = o.ens.kind;
  params["d"] = o.ens.d;
  params["t_grid"] = o.t_grid;
  params["samples"] = o.samples;
  params["seed"] = o.common.seed;
  write_manifest(o.out + ".manifest.json", "form-factor", params, {o.out});
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

// -------------------------------------------------------- variance-check ---

struct VarianceCheckOpts {
  EnsembleOpts ens{"gue", 128, 0.0};
  CommonOpts common;
  std::string t_grid = "0:8:0.25";
  int samples = 500;
  double small_t_max = 0.3;
  std::string out = "variance_check.csv";
};

int run_variance_check(const VarianceCheckOpts& o) {
  const EnsembleSpec spec = o.ens.spec();
  const auto grid = parse_grid(o.t_grid);
  const auto est = estimate_form_factor(spec, grid, o.samples, {o.common.seed, 0},
                                        o.common.jobs);
  const auto report = check_variance_bounds(est, spec, o.small_t_max);
  CsvWriter csv(o.out, tool_line());
  csv.header({"t", "variance", "bound", "slack", "flagged", "label"});
  for (const auto& r : report.rows) {
    const std::vector<std::string> row = {
        format_double(r.t), format_double(r.variance), format_double(r.bound),
        format_double(r.slack), r.flagged ? "1" : "0", r.label};
    csv.raw_row(row);
  }
  nlohmann::json params;
  params["ensemble"] = o.ens.kind;
  params["d"] = o.ens.d;
  params["t_grid"] = o.t_grid;
  params["samples"] = o.samples;
  params["seed"] = o.common.seed;
  write_manifest(o.out + ".manifest.json", "variance-check", params, {o.out});
  std::cout << "wrote " << o.out << "\n";
  if (report.n_flagged > 0) {
    for (const auto& r : report.rows)
      if (r.flagged)
        std::cerr << "variance-check: FAILED bound '" << r.label << "' at t = " << r.t
                  << " (variance " << r.variance << " vs bound " << r.bound << ")\n";
    return 1;
  }
  std::cout << "variance-check: all bounds hold\n";
  return 0;
}

// ----------------------------------------------------------------- escape ---

struct EscapeOpts {
  EnsembleOpts ens{"gue", 64, 0.0};
  CommonOpts common;
  double eps = 0.4;
  std::string metric = "diamond";
  std::string t_grid = "0:2:0.02";
  int samples = 500;
  std::string out = "escape.csv";
};

int run_escape(const EscapeOpts& o) {
  const EnsembleSpec spec = o.ens.spec();
  const auto grid = parse_grid(o.t_grid);
  const EscapeCurve curve = escape_curve(spec, o.eps, parse_channel_metric(o.metric), grid,
                                         o.samples, {o.common.seed, 0}, o.common.jobs);
  write_escape_csv(o.out, curve, tool_line(), o.common.seed, 0);
  nlohmann::json params;
  params["ensemble"] = o.ens.kind;
  params["d"] = o.ens.d;
  params["eps"] = o.eps;
  params["metric"] = o.metric;
  params["t_grid"] = o.t_grid;
  params["samples"] = o.samples;
  params["seed"] = o.common.seed;
  params["t_escape"] = curve.t_escape;
  write_manifest(o.out + ".manifest.json", "escape", params, {o.out});
  std::cout << "wrote " << o.out << " (t_escape = " << curve.t_escape << ")\n";
  return 0;
}

// --------------------------------------------------------- escape-scaling ---

struct EscapeScalingOpts {
  EnsembleOpts ens{"gue", 64, 0.0};
  CommonOpts common;
  std::string eps_grid = "0.1,0.2,0.4,0.8";
  std::string metric = "diamond";
  std::string t_grid = "0:2:0.02";
  std::string d_grid;  // optional: collapse across dimensions
  int samples = 500;
  std::string out = "escape_scaling.csv";
};

int run_escape_scaling(const EscapeScalingOpts& o) {
  const EnsembleSpec spec = o.ens.spec();
  const auto eps = parse_grid(o.eps_grid);
  const auto grid = parse_grid(o.t_grid);
  const ChannelMetric metric = parse_channel_metric(o.metric);
  const auto rep = escape_scaling_fit(spec, eps, metric, grid, o.samples,
                                      {o.common.seed, 0}, o.common.jobs);
  CsvWriter csv(o.out, tool_line());
  csv.comment("slope = " + format_double(rep.slope) + " +- " +
              format_double(rep.slope_stderr) + ", intercept = " +
              format_double(rep.intercept));
  csv.header({"eps", "t_escape"});
  for (std::size_t i = 0; i < rep.eps_grid.size(); ++i)
    csv.row({rep.eps_grid[i], rep.t_escape[i]});

  nlohmann::json params;
  params["ensemble"] = o.ens.kind;
  params["d"] = o.ens.d;
  params["eps_grid"] = o.eps_grid;
  params["metric"] = o.metric;
  params["samples"] = o.samples;
  params["seed"] = o.common.seed;
  params["slope"] = rep.slope;
  params["slope_stderr"] = rep.slope_stderr;
  std::vector<std::string> outputs{o.out};

  if (!o.d_grid.empty()) {
    const auto dg = parse_grid(o.d_grid);
    std::vector<Index> dims;
    for (double v : dg) dims.push_back(static_cast<Index>(v));
    const auto collapse =
        gaussian_collapse(spec.kind, dims, eps.back(), metric, grid, o.samples,
                          {o.common.seed, std::uint64_t{1} << 32}, o.common.jobs);
    const std::string cpath = o.out + ".collapse.csv";
    CsvWriter ccsv(cpath, tool_line());
    ccsv.comment("spread = " + format_double(collapse.spread));
    ccsv.header({"d", "t_escape", "t_escape_sqrt_log_d"});
    for (const auto& row : collapse.rows)
      ccsv.row({static_cast<double>(row.d), row.t_escape, row.collapsed});
    params["collapse_spread"] = collapse.spread;
    outputs.push_back(cpath);
  }
  write_manifest(o.out + ".manifest.json", "escape-scaling", params, outputs);
  std::cout << "wrote " << o.out << " (slope = " << rep.slope << ")\n";
  return 0;
}

// ------------------------------------------------------------ state-escape ---

struct StateEscapeOpts {
  EnsembleOpts ens{"gue", 64, 0.0};
  CommonOpts common;
  double eps = 0.4;
  std::string t_grid = "0:2:0.02";
  int samples = 500;
  std::string out = "state_escape.csv";
};

int run_state_escape(const StateEscapeOpts& o) {
  const EnsembleSpec spec = o.ens.spec();
  const auto grid = parse_grid(o.t_grid);
  const StateEscapeCurve curve = state_escape_curve(spec, o.eps, grid, o.samples,
                                                    {o.common.seed, 0}, o.common.jobs);
  write_state_escape_csv(o.out, curve, tool_line(), o.common.seed, 0);
  nlohmann::json params;
  params["ensemble"] = o.ens.kind;
  params["d"] = o.ens.d;
  params["eps"] = o.eps;
  params["t_grid"] = o.t_grid;
  params["samples"] = o.samples;
  params["seed"] = o.common.seed;
  params["t_escape"] = curve.t_escape;
  write_manifest(o.out + ".manifest.json", "state-escape", params, {o.out});
  std::cout << "wrote " << o.out << " (t_escape = " << curve.t_escape << ")\n";
  return 0;
}

// ---------------------------------------------------------- torus-distance ---

struct TorusDistanceOpts {
  CommonOpts common;
  Index d = 32;
  std::string target = "single-flip";
  std::string target_file;
  int samples = 200;
  bool second_moment = false;
  int sm_samples = 2000;
  std::string out = "torus_distance.csv";
};

int run_torus_distance(const TorusDistanceOpts& o) {
  const UnitaryMatrix g = make_target(o.d, o.target, o.target_file);
  const auto rep = expected_torus_distance(g, o.samples, {o.common.seed, 0}, o.common.jobs);
  CsvWriter csv(o.out, tool_line());
  csv.header({"quantity", "value"});
  const auto put = [&](const std::string& k, double v) {
    const std::vector<std::string> row = {k, format_double(v)};
    csv.raw_row(row);
  };
  put("dhs_identity", rep.dhs_identity);
  put("mc_mean", rep.mc_mean);
  put("mc_std", rep.mc_std);
  put("std_error", rep.std_error);
  put("max_sample", rep.max_sample);
  put("n_samples", rep.n_samples);
  put("lower_ok", rep.lower_ok ? 1 : 0);
  put("upper_ok", rep.upper_ok ? 1 : 0);

  int rc = 0;
  std::string failed;
  if (!rep.lower_ok) failed = "expected torus distance lower bound dhs/3";
  if (!rep.upper_ok) failed = "expected torus distance upper bound dhs";

  if (o.second_moment) {
    const auto sm = haar_second_moment_check(g, o.sm_samples,
                                             {o.common.seed, std::uint64_t{1} << 32},
                                             o.common.jobs);
    put("second_moment_mc", sm.mc);
    put("second_moment_closed", sm.closed_form);
    put("second_moment_rel_error", sm.rel_error);
    if (sm.rel_error > 0.05 && failed.empty()) failed = "Haar second moment within 5%";
  }
  nlohmann::json params;
  params["d"] = o.d;
  params["target"] = o.target_file.empty() ? o.target : o.target_file;
  params["samples"] = o.samples;
  params["seed"] = o.common.seed;
  write_manifest(o.out + ".manifest.json", "torus-distance", params, {o.out});
  std::cout << "wrote " << o.out << "\n";
  if (!failed.empty()) {
    std::cerr << "torus-distance: FAILED bound '" << failed << "'\n";
    rc = 1;
  }
  return rc;
}

// ------------------------------------------------------------ concentration ---

struct ConcentrationOpts {
  CommonOpts common;
  Index d = 64;
  std::string target = "alternating";
  std::string target_file;
  int pairs = 1000;
  Index pairs_d = 16;
  int samples = 2000;
  std::string a_grid = "0.25,0.5,1";
  double avoid_eps = 0.0;  // 0 = skip the ball-avoidance probe
  int avoid_samples = 200;
  std::string out = "concentration.csv";
};

int run_concentration(const ConcentrationOpts& o) {
  const auto a_values = parse_grid(o.a_grid);
  const UnitaryMatrix g_pairs = make_target(o.pairs_d, o.target, o.target_file);
  const auto lip = lipschitz_probe(g_pairs, o.pairs, {o.common.seed, 0}, o.common.jobs);
  const UnitaryMatrix g = make_target(o.d, o.target, o.target_file);
  const auto tails = concentration_tail_probe(g, a_values, o.samples,
                                              {o.common.seed, std::uint64_t{1} << 32},
                                              o.common.jobs);
  CsvWriter csv(o.out, tool_line());
  csv.comment("lipschitz constant = " + format_double(lip.constant) + ", max ratio = " +
              format_double(lip.max_ratio) + ", violations = " +
              std::to_string(lip.violations) + "/" + std::to_string(lip.n_pairs));
  csv.header({"check", "a", "upper_freq", "lower_freq", "bound", "slack", "ok"});
  for (const auto& row : tails.rows) {
    const std::vector<std::string> r = {
        "tail",
        format_double(row.a),
        format_double(row.upper_freq),
        format_double(row.lower_freq),
        format_double(row.bound),
        format_double(row.slack),
        row.ok ? "1" : "0"};
    csv.raw_row(r);
  }

  std::string failed;
  if (lip.violations > 0) failed = "Lipschitz constant 2||G - I||";
  for (const auto& row : tails.rows)
    if (!row.ok && failed.empty())
      failed = "concentration tail at a = " + format_double(row.a);

  if (o.avoid_eps > 0.0) {
    const auto avoid = ball_avoidance_estimate(g, o.avoid_eps, o.avoid_samples,
                                               {o.common.seed, std::uint64_t{2} << 32},
                                               o.common.jobs);
    const std::vector<std::string> r = {
        "avoidance",
        format_double(avoid.eps),
        format_double(avoid.frequency),
        "0",
        format_double(avoid.bound),
        format_double(avoid.slack),
        avoid.ok ? "1" : "0"};
    csv.raw_row(r);
    if (!avoid.ok && failed.empty()) failed = "ball avoidance exp(-eps^2 d^2 / 384)";
  }
  nlohmann::json params;
  params["d"] = o.d;
  params["pairs_d"] = o.pairs_d;
  params["target"] = o.target_file.empty() ? o.target : o.target_file;
  params["pairs"] = o.pairs;
  params["samples"] = o.samples;
  params["a_grid"] = o.a_grid;
  params["seed"] = o.common.seed;
  write_manifest(o.out + ".manifest.json", "concentration", params, {o.out});
  std::cout << "wrote " << o.out << "\n";
  if (!failed.empty()) {
    std::cerr << "concentration: FAILED bound '" << failed << "'\n";
    return 1;
  }
  std::cout << "concentration: all bounds hold\n";
  return 0;
}

// ------------------------------------------------------------ gauss-average ---

struct GaussAverageOpts {
  CommonOpts common;
  std::string beta_grid = "0,0.25,0.5,0.75,1";
  long mc_samples = 200000;
  double tol = 1e-9;
  std::string beta0_grid = "0.3,0.5";
  std::string out = "gauss_average.csv";
};

int run_gauss_average(const GaussAverageOpts& o) {
  const auto betas = parse_grid(o.beta_grid);
  const auto beta0s = parse_grid(o.beta0_grid);
  CsvWriter csv(o.out, tool_line());
  csv.header({"beta", "quadrature", "mc_mean", "mc_stderr", "abs_diff"});
  std::string failed;
  std::vector<double> quads;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double q = gaussian_pair_average(betas[i], o.tol);
    quads.push_back(q);
    const auto mc = gaussian_pair_average_mc(betas[i], o.mc_samples,
                                             {o.common.seed, i * (std::uint64_t{1} << 32)},
                                             o.common.jobs);
    const double diff = std::abs(mc.mean - q);
    csv.row({betas[i], q, mc.mean, mc.std_error, diff});
    if (diff > 3e-3 + 3.0 * mc.std_error && failed.empty())
      failed = "Gaussian pair average MC vs quadrature at beta = " + format_double(betas[i]);
  }
  const auto fit = gaussian_average_lemma_fit(betas, beta0s, o.tol);
  csv.comment("lemma fit: c = " + format_double(fit.c) + " at beta0 = " +
              format_double(fit.beta0));
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (betas[i] == 0.0 && std::abs(quads[i] - 1.0) > 1e-6 && failed.empty())
      failed = "A(0) = 1";
    if (betas[i] == 1.0 && std::abs(quads[i] - std::numbers::pi / 4.0) > 1e-6 &&
        failed.empty())
      failed = "A(1) = pi/4";
  }
  if (fit.c <= 0.0 && failed.empty()) failed = "lemma constant c > 0";
  nlohmann::json params;
  params["beta_grid"] = o.beta_grid;
  params["mc_samples"] = o.mc_samples;
  params["seed"] = o.common.seed;
  params["lemma_c"] = fit.c;
  params["lemma_beta0"] = fit.beta0;
  write_manifest(o.out + ".manifest.json", "gauss-average", params, {o.out});
  std::cout << "wrote " << o.out << "\n";
  if (!failed.empty()) {
    std::cerr << "gauss-average: FAILED bound '" << failed << "'\n";
    return 1;
  }
  std::cout << "gauss-average: all checks hold\n";
  return 0;
}

// --------------------------------------------------------------- complexity ---

struct ComplexityOpts {
  EnsembleOpts ens{"gue", 2, 0.0};
  CommonOpts common;
  std::string gate_set_file;  // empty = built-in two-gate set
  double eps = 0.2;
  std::string t_grid = "0:2.1:0.1";
  int samples = 50;
  int max_len = 10;
  std::string metric = "diamond";
  std::string out = "complexity_jump.csv";
};

int run_complexity(const ComplexityOpts& o) {
  const EnsembleSpec spec = o.ens.spec();
  const GateSet gs =
      o.gate_set_file.empty() ? default_two_gate_set() : read_gate_set_file(o.gate_set_file);
  const auto grid = parse_grid(o.t_grid);
  const auto rep = complexity_jump_curve(spec, gs, o.eps, grid, o.samples, o.max_len,
                                         parse_channel_metric(o.metric), {o.common.seed, 0},
                                         -1.0, 1'000'000, o.common.jobs);
  CsvWriter csv(o.out, tool_line());
  csv.comment("threshold_t = " + format_double(rep.threshold_t) + ", kept_words = " +
              std::to_string(rep.n_words) + ", values > max_len mean exceeds");
  csv.header({"t", "median_complexity", "frac_positive"});
  for (std::size_t i = 0; i < rep.t_grid.size(); ++i)
    csv.row({rep.t_grid[i], static_cast<double>(rep.median[i]), rep.frac_positive[i]});
  nlohmann::json params;
  params["ensemble"] = o.ens.kind;
  params["d"] = o.ens.d;
  params["eps"] = o.eps;
  params["max_len"] = o.max_len;
  params["metric"] = o.metric;
  params["samples"] = o.samples;
  params["seed"] = o.common.seed;
  params["threshold_t"] = rep.threshold_t;
  params["kept_words"] = rep.n_words;
  write_manifest(o.out + ".manifest.json", "complexity", params, {o.out});
  std::cout << "wrote " << o.out << " (threshold_t = " << rep.threshold_t << ")\n";
  return 0;
}

// -------------------------------------------------------------- jump-figure ---

struct JumpFigureOpts {
  EnsembleOpts ens{"gue", 2, 0.0};
  CommonOpts common;
  double eps = 0.2;
  std::string t_grid = "0:2.1:0.1";
  int samples = 100;
  int max_len = 10;
  std::string metric = "diamond";
  std::string avoid_eps = "0.1,0.15,0.2";
  int avoid_samples = 200;
  std::string outdir = "jump_figure";
};

int run_jump_figure(const JumpFigureOpts& o) {
  JumpFigureParams p;
  p.spec = o.ens.spec();
  p.gs = default_two_gate_set();
  p.eps = o.eps;
  p.t_grid = parse_grid(o.t_grid);
  p.n_samples = o.samples;
  p.max_len = o.max_len;
  p.metric = parse_channel_metric(o.metric);
  p.avoid_eps = parse_grid(o.avoid_eps);
  p.n_avoid = o.avoid_samples;
  p.seed = o.common.seed;
  p.jobs = o.common.jobs;
  const auto files = write_jump_figure_bundle(o.outdir, p, tool_line());
  nlohmann::json params;
  params["ensemble"] = o.ens.kind;
  params["d"] = o.ens.d;
  params["eps"] = o.eps;
  params["samples"] = o.samples;
  params["seed"] = o.common.seed;
  write_manifest(o.outdir + "/manifest.json", "jump-figure", params, files);
  std::cout << "wrote bundle in " << o.outdir << "\n";
  return 0;
}

// ------------------------------------------------------------------ compile ---

struct CompileOpts {
  CommonOpts common;
  std::string hamiltonian;  // CMPX diagonal matrix
  int n = 0;                // optional qubit count; checked against the file
  int random_n = 0;         // or: random N(0,1) diagonal on n qubits
  double t = 1.0;
  double eps = 1e-3;
  std::string out = "circuit.txt";
};

int run_compile(const CompileOpts& o) {
  std::vector<double> diag;
  if (!o.hamiltonian.empty()) {
    diag = diagonal_of_cmpx(o.hamiltonian);
    if (o.n > 0 && diag.size() != (std::size_t{1} << o.n))
      throw std::invalid_argument("--n does not match the hamiltonian dimension");
  } else if (o.random_n > 0) {
    GaussianStream gs(SeedStream{o.common.seed, 0});
    diag.resize(std::size_t{1} << o.random_n);
    for (double& v : diag) v = gs.real();
  } else {
    throw std::invalid_argument("compile: need --hamiltonian or --random-n");
  }
  const Circuit c = compile_diagonal(diag, o.t, o.eps);
  write_circuit_file(o.out, c, tool_line());
  const double err = verify_circuit(c, diag, o.t);
  const GateCounts counts = gate_counts(c);
  nlohmann::json params;
  params["n"] = c.n;
  params["t"] = o.t;
  params["eps"] = o.eps;
  params["cnots"] = counts.cnot;
  params["rotations"] = counts.rotation;
  params["error"] = err;
  params["seed"] = o.common.seed;
  write_manifest(o.out + ".manifest.json", "compile", params, {o.out});
  std::cout << "wrote " << o.out << " (" << counts.total << " gates)\n";
  std::cout << "verify_circuit: error = " << err << " (eps = " << o.eps << ")\n";
  if (err > o.eps) {
    std::cerr << "compile: FAILED bound 'verify_circuit error <= eps'\n";
    return 1;
  }
  return 0;
}

// ------------------------------------------------------------ verify-circuit ---

struct VerifyCircuitOpts {
  std::string circuit;
  std::string hamiltonian;
  int random_n = 0;
  std::uint64_t diag_seed = 12345;
  double t = 1.0;
  double eps = 1e-3;
};

int run_verify_circuit(const VerifyCircuitOpts& o) {
  std::vector<double> diag;
  if (!o.hamiltonian.empty()) {
    diag = diagonal_of_cmpx(o.hamiltonian);
  } else if (o.random_n > 0) {
    GaussianStream gs(SeedStream{o.diag_seed, 0});
    diag.resize(std::size_t{1} << o.random_n);
    for (double& v : diag) v = gs.real();
  } else {
    throw std::invalid_argument("verify-circuit: need --hamiltonian or --random-n");
  }
  const Circuit c = read_circuit_file(o.circuit);
  double err = 0.0;
  try {
    err = verify_circuit(c, diag, o.t);
  } catch (const std::runtime_error& e) {
    std::cerr << "verify-circuit: FAILED verify_circuit: " << e.what() << "\n";
    return 1;
  }
  std::cout << "verify_circuit: error = " << err << " (eps = " << o.eps << ")\n";
  if (err > o.eps) {
    std::cerr << "verify-circuit: FAILED bound 'verify_circuit error <= eps'\n";
    return 1;
  }
  return 0;
}

// ----------------------------------------------------------------- equidist ---

struct EquidistOpts {
  CommonOpts common;
  Index d = 3;
  double t = 2.0;
  std::string eps_grid = "0.5,0.7,0.9";
  std::string center;  // comma list; empty = zeros
  long samples = 1000000;
  std::string probe = "torus";  // torus | diamond
  std::string out = "equidist.csv";
};

int run_equidist(const EquidistOpts& o) {
  const auto eps = parse_grid(o.eps_grid);
  std::vector<double> center(static_cast<std::size_t>(o.d), 0.0);
  if (!o.center.empty()) {
    const auto c = parse_grid(o.center);
    if (static_cast<Index>(c.size()) != o.d)
      throw std::invalid_argument("--center must list exactly d phases");
    center = c;
  }
  const BallMeasureEstimate est =
      o.probe == "diamond"
          ? diagonal_ball_diamond_probe(o.d, o.t, center, eps, o.samples,
                                        {o.common.seed, 0}, o.common.jobs)
          : torus_ball_measure(o.d, o.t, center, eps, o.samples, {o.common.seed, 0},
                               o.common.jobs);
  write_ball_measure_csv(o.out, est, tool_line(), o.common.seed, 0);

  nlohmann::json params;
  params["d"] = o.d;
  params["t"] = o.t;
  params["eps_grid"] = o.eps_grid;
  params["samples"] = o.samples;
  params["probe"] = o.probe;
  params["seed"] = o.common.seed;
  if (est.eps_grid.size() >= 2) {
    const SlopeFit fit = loglog_slope(est.eps_grid, est.estimate);
    params["slope"] = fit.slope;
    params["slope_stderr"] = fit.slope_stderr;
    std::cout << "log-log slope = " << fit.slope << " +- " << fit.slope_stderr << "\n";
  }
  if (o.d == 1 && o.probe == "torus") {
    for (std::size_t i = 0; i < est.eps_grid.size(); ++i) {
      const double exact = wrapped_gaussian_ball_measure(center[0], est.eps_grid[i], o.t);
      std::cout << "eps = " << est.eps_grid[i] << ": estimate " << est.estimate[i]
                << " vs wrapped-Gaussian " << exact << "\n";
    }
  }
  write_manifest(o.out + ".manifest.json", "equidist", params, {o.out});
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::ostringstream inv;
  for (int i = 0; i < argc; ++i) {
    if (i) inv << " ";
    inv << argv[i];
  }
  g_invocation = inv.str();

  CLI::App app{"numerical laboratory for random-Hamiltonian evolutions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file (flags override)");

  std::function<int()> runner;

  {
    auto o = std::make_shared<SampleOpts>();
    auto* sub = app.add_subcommand("sample", "draw Hamiltonians or unitaries to CMPX files");
    add_ensemble_opts(sub, o->ens);
    add_common_opts(sub, o->common);
    sub->add_option("--object", o->object, "hamiltonian | haar-unitary | evolution");
    sub->add_option("--t", o->t, "evolution time (object = evolution)");
    sub->add_option("--count", o->count, "number of draws")->check(CLI::PositiveNumber);
    sub->add_option("--out", o->out, "output file prefix");
    sub->callback([o, &runner] { runner = [o] { return run_sample(*o); }; });
  }
  {
    auto o = std::make_shared<FormFactorOpts>();
    auto* sub = app.add_subcommand("form-factor", "Monte Carlo spectral form factor");
    add_ensemble_opts(sub, o->ens);
    add_common_opts(sub, o->common);
    sub->add_option("--t", o->t_grid, "time grid start:stop:step or list");
    sub->add_option("--samples", o->samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
    sub->add_option("--out", o->out, "output CSV");
    sub->callback([o, &runner] { runner = [o] { return run_form_factor(*o); }; });
  }
  {
    auto o = std::make_shared<VarianceCheckOpts>();
    auto* sub = app.add_subcommand("variance-check", "check Var tr U_t bounds (exit 1 on failure)");
    add_ensemble_opts(sub, o->ens);
    add_common_opts(sub, o->common);
    sub->add_option("--t", o->t_grid, "time grid");
    sub->add_option("--samples", o->samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
    sub->add_option("--small-t-max", o->small_t_max, "apply the small-t bound up to here");
    sub->add_option("--out", o->out, "output CSV");
    sub->callback([o, &runner] { runner = [o] { return run_variance_check(*o); }; });
  }
  {
    auto o = std::make_shared<EscapeOpts>();
    auto* sub = app.add_subcommand("escape", "stay probability of the identity ball");
    add_ensemble_opts(sub, o->ens);
    add_common_opts(sub, o->common);
    sub->add_option("--eps", o->eps, "ball radius")->check(CLI::PositiveNumber);
    sub->add_option("--metric", o->metric, "diamond | opnorm | hs");
    sub->add_option("--t", o->t_grid, "time grid");
    sub->add_option("--samples", o->samples, "trials")->check(CLI::PositiveNumber);
    sub->add_option("--out", o->out, "output CSV");
    sub->callback([o, &runner] { runner = [o] { return run_escape(*o); }; });
  }
  {
    auto o = std::make_shared<EscapeScalingOpts>();
    auto* sub = app.add_subcommand("escape-scaling", "t_escape scaling in eps (and d collapse)");
    add_ensemble_opts(sub, o->ens);
    add_common_opts(sub, o->common);
    sub->add_option("--eps", o->eps_grid, "epsilon grid");
    sub->add_option("--metric", o->metric, "diamond | opnorm | hs");
    sub->add_option("--t", o->t_grid, "time grid");
    sub->add_option("--d-grid", o->d_grid, "dimension grid for the sqrt(log d) collapse");
    sub->add_option("--samples", o->samples, "trials per eps")->check(CLI::PositiveNumber);
    sub->add_option("--out", o->out, "output CSV");
    sub->callback([o, &runner] { runner = [o] { return run_escape_scaling(*o); }; });
  }
  {
    auto o = std::make_shared<StateEscapeOpts>();
    auto* sub = app.add_subcommand("state-escape", "trace-distance escape of U_t|0>");
    add_ensemble_opts(sub, o->ens);
    add_common_opts(sub, o->common);
    sub->add_option("--eps", o->eps, "ball radius")->check(CLI::PositiveNumber);
    sub->add_option("--t", o->t_grid, "time grid");
    sub->add_option("--samples", o->samples, "trials")->check(CLI::PositiveNumber);
    sub->add_option("--out", o->out, "output CSV");
    sub->callback([o, &runner] { runner = [o] { return run_state_escape(*o); }; });
  }
  {
    auto o = std::make_shared<TorusDistanceOpts>();
    auto* sub = app.add_subcommand("torus-distance",
                                   "expected distance to the diagonal torus (exit 1 on failure)");
    add_common_opts(sub, o->common);
    sub->add_option("--d", o->d, "dimension")->check(CLI::PositiveNumber);
    sub->add_option("--target", o->target, "single-flip | alternating");
    sub->add_option("--target-file", o->target_file, "CMPX unitary target");
    sub->add_option("--samples", o->samples, "Haar samples")->check(CLI::PositiveNumber);
    sub->add_flag("--second-moment", o->second_moment, "also check the Haar second moment");
    sub->add_option("--sm-samples", o->sm_samples, "second-moment samples");
    sub->add_option("--out", o->out, "output CSV");
    sub->callback([o, &runner] { runner = [o] { return run_torus_distance(*o); }; });
  }
  {
    auto o = std::make_shared<ConcentrationOpts>();
    auto* sub = app.add_subcommand("concentration",
                                   "Lipschitz / tail / avoidance probes (exit 1 on failure)");
    add_common_opts(sub, o->common);
    sub->add_option("--d", o->d, "dimension for tails")->check(CLI::PositiveNumber);
    sub->add_option("--pairs-d", o->pairs_d, "dimension for Lipschitz pairs");
    sub->add_option("--target", o->target, "single-flip | alternating");
    sub->add_option("--target-file", o->target_file, "CMPX unitary target");
    sub->add_option("--pairs", o->pairs, "Lipschitz pairs")->check(CLI::PositiveNumber);
    sub->add_option("--samples", o->samples, "tail samples")->check(CLI::PositiveNumber);
    sub->add_option("--a", o->a_grid, "tail offsets");
    sub->add_option("--avoid-eps", o->avoid_eps, "ball-avoidance eps (0 = skip)");
    sub->add_option("--avoid-samples", o->avoid_samples, "ball-avoidance samples");
    sub->add_option("--out", o->out, "output CSV");
    sub->callback([o, &runner] { runner = [o] { return run_concentration(*o); }; });
  }
  {
    auto o = std::make_shared<GaussAverageOpts>();
    auto* sub = app.add_subcommand("gauss-average",
                                   "A(beta) quadrature vs Monte Carlo (exit 1 on failure)");
    add_common_opts(sub, o->common);
    sub->add_option("--beta", o->beta_grid, "beta grid");
    sub->add_option("--mc-samples", o->mc_samples, "Monte Carlo samples");
    sub->add_option("--tol", o->tol, "quadrature tolerance");
    sub->add_option("--beta0", o->beta0_grid, "beta0 candidates for the lemma fit");
    sub->add_option("--out", o->out, "output CSV");
    sub->callback([o, &runner] { runner = [o] { return run_gauss_average(*o); }; });
  }
  {
    auto o = std::make_shared<ComplexityOpts>();
    auto* sub = app.add_subcommand("complexity", "exact complexity jump curve at small d");
    add_ensemble_opts(sub, o->ens);
    add_common_opts(sub, o->common);
    sub->add_option("--gate-set", o->gate_set_file, "gate set file (default: built-in pair)");
    sub->add_option("--eps", o->eps, "target accuracy")->check(CLI::PositiveNumber);
    sub->add_option("--t", o->t_grid, "time grid");
    sub->add_option("--samples", o->samples, "Hamiltonian samples")->check(CLI::PositiveNumber);
    sub->add_option("--max-len", o->max_len, "maximum word length");
    sub->add_option("--metric", o->metric, "diamond | opnorm | hs");
    sub->add_option("--out", o->out, "output CSV");
    sub->callback([o, &runner] { runner = [o] { return run_complexity(*o); }; });
  }
  {
    auto o = std::make_shared<JumpFigureOpts>();
    auto* sub = app.add_subcommand("jump-figure", "three-panel figure bundle (CSV + manifest)");
    add_ensemble_opts(sub, o->ens);
    add_common_opts(sub, o->common);
    sub->add_option("--eps", o->eps, "ball radius / accuracy")->check(CLI::PositiveNumber);
    sub->add_option("--t", o->t_grid, "shared time grid");
    sub->add_option("--samples", o->samples, "samples per panel")->check(CLI::PositiveNumber);
    sub->add_option("--max-len", o->max_len, "maximum word length");
    sub->add_option("--metric", o->metric, "diamond | opnorm | hs");
    sub->add_option("--avoid-eps", o->avoid_eps, "ball-avoidance eps grid");
    sub->add_option("--avoid-samples", o->avoid_samples, "ball-avoidance samples");
    sub->add_option("--outdir", o->outdir, "bundle directory");
    sub->callback([o, &runner] { runner = [o] { return run_jump_figure(*o); }; });
  }
  {
    auto o = std::make_shared<CompileOpts>();
    auto* sub = app.add_subcommand("compile", "compile exp(-iHt) for a diagonal H");
    add_common_opts(sub, o->common);
    sub->add_option("--hamiltonian", o->hamiltonian, "CMPX diagonal matrix");
    sub->add_option("--n", o->n, "qubit count (checked against --hamiltonian)");
    sub->add_option("--random-n", o->random_n, "compile a random N(0,1) diagonal on n qubits");
    sub->add_option("--t", o->t, "evolution time");
    sub->add_option("--eps", o->eps, "target accuracy")->check(CLI::PositiveNumber);
    sub->add_option("--out", o->out, "output circuit file");
    sub->callback([o, &runner] { runner = [o] { return run_compile(*o); }; });
  }
  {
    auto o = std::make_shared<VerifyCircuitOpts>();
    auto* sub = app.add_subcommand("verify-circuit",
                                   "verify a circuit against exp(-iHt) (exit 1 on failure)");
    sub->add_option("--circuit", o->circuit, "circuit file")->required();
    sub->add_option("--hamiltonian", o->hamiltonian, "CMPX diagonal matrix");
    sub->add_option("--random-n", o->random_n, "random diagonal on n qubits");
    sub->add_option("--diag-seed", o->diag_seed, "seed for --random-n");
    sub->add_option("--t", o->t, "evolution time");
    sub->add_option("--eps", o->eps, "error budget")->check(CLI::PositiveNumber);
    sub->callback([o, &runner] { runner = [o] { return run_verify_circuit(*o); }; });
  }
  {
    auto o = std::make_shared<EquidistOpts>();
    auto* sub = app.add_subcommand("equidist", "torus ball measure under Gaussian phases");
    add_common_opts(sub, o->common);
    sub->add_option("--d", o->d, "number of phases")->check(CLI::PositiveNumber);
    sub->add_option("--t", o->t, "time");
    sub->add_option("--eps", o->eps_grid, "ball radii");
    sub->add_option("--center", o->center, "center phases (comma list, default zeros)");
    sub->add_option("--samples", o->samples, "phase draws")->check(CLI::PositiveNumber);
    sub->add_option("--probe", o->probe, "torus | diamond");
    sub->add_option("--out", o->out, "output CSV");
    sub->callback([o, &runner] { runner = [o] { return run_equidist(*o); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    return runner ? runner() : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
