#include "rmtlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rmtlab/concentration.hpp"
#include "rmtlab/io.hpp"
#include "rmtlab/parallel.hpp"

namespace rmtlab {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Distance from the identity channel given a sorted eigenvalue vector; the
// phases lambda_i t keep their order, so when they span at most pi the
// covering arc is just the spread and the metrics have closed forms.
double identity_distance_sorted(ChannelMetric metric, const RealVector& lam, double t) {
  const Index d = lam.size();
  if (metric == ChannelMetric::HsProj) {
    Complex sum(0.0, 0.0);
    for (Index i = 0; i < d; ++i) sum += std::polar(1.0, -lam(i) * t);
    return std::sqrt(std::max(0.0, 2.0 * static_cast<double>(d) - 2.0 * std::abs(sum)));
  }
  const double spread = (lam(d - 1) - lam(0)) * std::abs(t);
  if (spread <= std::numbers::pi) {
    return metric == ChannelMetric::OpNormProj ? 2.0 * std::sin(spread / 4.0)
                                               : 2.0 * std::sin(spread / 2.0);
  }
  std::vector<double> phases(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) phases[static_cast<std::size_t>(i)] = -lam(i) * t;
  return channel_distance_from_phases(metric, phases);
}

double interpolate_escape(std::span<const double> t_grid, std::span<const double> stay) {
  for (std::size_t i = 0; i < stay.size(); ++i) {
    if (stay[i] < 0.5) {
      if (i == 0) return t_grid[0];
      const double p0 = stay[i - 1];
      const double p1 = stay[i];
      return t_grid[i - 1] + (p0 - 0.5) * (t_grid[i] - t_grid[i - 1]) / (p0 - p1);
    }
  }
  return kNan;
}

SlopeFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  SlopeFit fit;
  fit.n_used = static_cast<int>(x.size());
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) {
    fit.slope = kNan;
    fit.intercept = kNan;
    fit.slope_stderr = kNan;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  } else {
    fit.slope_stderr = kNan;
  }
  return fit;
}

std::string metric_field(ChannelMetric m) { return channel_metric_name(m); }

}  // namespace

EscapeCurve escape_curve(const EnsembleSpec& spec, double eps, ChannelMetric metric,
                         std::span<const double> t_grid, int n_samples, SeedStream s,
                         int jobs) {
  if (n_samples < 100) throw std::invalid_argument("escape_curve: need n_samples >= 100");
  if (t_grid.empty()) throw std::invalid_argument("escape_curve: empty t grid");
  if (eps <= 0.0) throw std::invalid_argument("escape_curve: eps must be positive");

  const auto stays = parallel_map<std::vector<std::uint8_t>>(
      n_samples,
      [&](std::int64_t i) {
        const RealVector lam = sample_eigenvalues(spec, s.at(i));
        std::vector<std::uint8_t> row(t_grid.size());
        for (std::size_t ti = 0; ti < t_grid.size(); ++ti)
          row[ti] = identity_distance_sorted(metric, lam, t_grid[ti]) < eps ? 1 : 0;
        return row;
      },
      jobs);

  EscapeCurve curve;
  curve.spec = spec;
  curve.eps = eps;
  curve.metric = metric;
  curve.t_grid.assign(t_grid.begin(), t_grid.end());
  curve.n_samples = n_samples;
  const double nf = static_cast<double>(n_samples);
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    long count = 0;
    for (const auto& row : stays) count += row[ti];
    const double p = static_cast<double>(count) / nf;
    curve.stay_prob.push_back(p);
    curve.std_error.push_back(std::sqrt(p * (1.0 - p) / nf));
  }
  curve.t_escape = interpolate_escape(curve.t_grid, curve.stay_prob);
  return curve;
}

EscapeScalingReport escape_scaling_fit(const EnsembleSpec& spec, std::span<const double> eps_grid,
                                       ChannelMetric metric, std::span<const double> t_grid,
                                       int n_samples, SeedStream s, int jobs) {
  if (eps_grid.size() < 3) throw std::invalid_argument("escape_scaling_fit: need >= 3 eps values");
  EscapeScalingReport rep;
  rep.eps_grid.assign(eps_grid.begin(), eps_grid.end());
  std::vector<double> lx;
  std::vector<double> ly;
  for (double eps : eps_grid) {
    // Same seed for every eps: the trials share spectra, so the escape events
    // are nested across eps exactly as the ball inclusions are.
    const EscapeCurve curve = escape_curve(spec, eps, metric, t_grid, n_samples, s, jobs);
    rep.t_escape.push_back(curve.t_escape);
    if (std::isfinite(curve.t_escape) && curve.t_escape > 0.0 && eps > 0.0) {
      lx.push_back(std::log(eps));
      ly.push_back(std::log(curve.t_escape));
    }
  }
  const SlopeFit fit = ols_fit(lx, ly);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.slope_stderr = fit.slope_stderr;
  rep.n_used = fit.n_used;
  return rep;
}

CollapseReport gaussian_collapse(EnsembleKind kind, std::span<const Index> d_grid, double eps,
                                 ChannelMetric metric, std::span<const double> t_grid,
                                 int n_samples, SeedStream s, int jobs) {
  if (d_grid.size() < 2) throw std::invalid_argument("gaussian_collapse: need >= 2 dims");
  CollapseReport rep;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double sum = 0.0;
  int finite = 0;
  for (Index d : d_grid) {
    EnsembleSpec spec;
    spec.kind = kind;
    spec.dim = d;
    const EscapeCurve curve = escape_curve(spec, eps, metric, t_grid, n_samples, s, jobs);
    CollapseRow row;
    row.d = d;
    row.t_escape = curve.t_escape;
    row.collapsed = curve.t_escape * std::sqrt(std::log(static_cast<double>(d)));
    rep.rows.push_back(row);
    if (std::isfinite(row.collapsed)) {
      lo = std::min(lo, row.collapsed);
      hi = std::max(hi, row.collapsed);
      sum += row.collapsed;
      ++finite;
    }
  }
  rep.spread = (finite == static_cast<int>(d_grid.size()) && sum > 0.0)
                   ? (hi - lo) / (sum / finite)
                   : kNan;
  return rep;
}

StateEscapeCurve state_escape_curve(const EnsembleSpec& spec, double eps,
                                    std::span<const double> t_grid, int n_samples,
                                    SeedStream s, int jobs) {
  if (n_samples < 100) throw std::invalid_argument("state_escape_curve: need n_samples >= 100");
  if (t_grid.empty()) throw std::invalid_argument("state_escape_curve: empty t grid");
  if (eps <= 0.0) throw std::invalid_argument("state_escape_curve: eps must be positive");

  const auto stays = parallel_map<std::vector<std::uint8_t>>(
      n_samples,
      [&](std::int64_t i) {
        const SpectralSample sp = sample_spectrum_with_weights(spec, s.at(i));
        const Index d = sp.eigenvalues.size();
        std::vector<std::uint8_t> row(t_grid.size());
        for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
          Complex ov(0.0, 0.0);
          for (Index k = 0; k < d; ++k)
            ov += sp.weights(k) * std::polar(1.0, -sp.eigenvalues(k) * t_grid[ti]);
          const double dist = std::sqrt(std::max(0.0, 1.0 - std::norm(ov)));
          row[ti] = dist < eps ? 1 : 0;
        }
        return row;
      },
      jobs);

  StateEscapeCurve curve;
  curve.spec = spec;
  curve.eps = eps;
  curve.t_grid.assign(t_grid.begin(), t_grid.end());
  curve.n_samples = n_samples;
  const double nf = static_cast<double>(n_samples);
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    long count = 0;
    for (const auto& row : stays) count += row[ti];
    const double p = static_cast<double>(count) / nf;
    curve.stay_prob.push_back(p);
    curve.std_error.push_back(std::sqrt(p * (1.0 - p) / nf));
  }
  curve.t_escape = interpolate_escape(curve.t_grid, curve.stay_prob);
  return curve;
}

namespace {

// Shared block-parallel phase sampler for the two ball-measure probes.
template <typename HitValue>
BallMeasureEstimate ball_measure_impl(Index d, double t, std::span<const double> center,
                                      std::span<const double> eps_grid, long n_samples,
                                      SeedStream s, int jobs, HitValue&& hit_value) {
  if (d < 1 || d > 6) throw std::invalid_argument("ball measure: need 1 <= d <= 6");
  if (static_cast<Index>(center.size()) != d)
    throw std::invalid_argument("ball measure: center size != d");
  if (eps_grid.empty()) throw std::invalid_argument("ball measure: empty eps grid");
  if (n_samples < 1) throw std::invalid_argument("ball measure: need n >= 1");

  constexpr long kBlock = 8192;
  const long n_blocks = (n_samples + kBlock - 1) / kBlock;
  const auto counts = parallel_map<std::vector<long>>(
      n_blocks,
      [&](std::int64_t b) {
        GaussianStream gs(s.at(b));
        const long in_block = std::min(kBlock, n_samples - b * kBlock);
        std::vector<long> hits(eps_grid.size(), 0);
        std::vector<double> lam(static_cast<std::size_t>(d));
        for (long i = 0; i < in_block; ++i) {
          for (auto& v : lam) v = gs.real();
          const double value = hit_value(lam);  // distance-style: hit iff < eps
          for (std::size_t e = 0; e < eps_grid.size(); ++e)
            if (value < eps_grid[e]) ++hits[e];
        }
        return hits;
      },
      jobs);

  BallMeasureEstimate est;
  est.d = d;
  est.t = t;
  est.center.assign(center.begin(), center.end());
  est.eps_grid.assign(eps_grid.begin(), eps_grid.end());
  est.n_samples = n_samples;
  const double nf = static_cast<double>(n_samples);
  for (std::size_t e = 0; e < eps_grid.size(); ++e) {
    long total = 0;
    for (const auto& c : counts) total += c[e];
    const double p = static_cast<double>(total) / nf;
    est.estimate.push_back(p);
    est.std_error.push_back(std::sqrt(p * (1.0 - p) / nf));
  }
  return est;
}

}  // namespace

BallMeasureEstimate torus_ball_measure(Index d, double t, std::span<const double> center,
                                       std::span<const double> eps_grid, long n_samples,
                                       SeedStream s, int jobs) {
  return ball_measure_impl(d, t, center, eps_grid, n_samples, s, jobs,
                           [&](const std::vector<double>& lam) {
                             double worst = 0.0;
                             for (Index i = 0; i < d; ++i) {
                               const double delta = lam[static_cast<std::size_t>(i)] * t -
                                                    center[static_cast<std::size_t>(i)];
                               worst = std::max(worst, 2.0 * std::abs(std::sin(delta / 2.0)));
                             }
                             return worst;
                           });
}

BallMeasureEstimate diagonal_ball_diamond_probe(Index d, double t,
                                                std::span<const double> center,
                                                std::span<const double> eps_grid,
                                                long n_samples, SeedStream s, int jobs) {
  return ball_measure_impl(d, t, center, eps_grid, n_samples, s, jobs,
                           [&](const std::vector<double>& lam) {
                             std::vector<double> rel(lam.size());
                             for (std::size_t i = 0; i < lam.size(); ++i)
                               rel[i] = lam[i] * t - center[i];
                             return diamond_from_phases(rel);
                           });
}

double wrapped_gaussian_ball_measure(double center, double eps, double t) {
  if (eps <= 0.0) return 0.0;
  if (eps >= 2.0) return 1.0;
  const double half_width = 2.0 * std::asin(eps / 2.0);
  const double tau = std::abs(t);
  const double two_pi = 2.0 * std::numbers::pi;
  if (tau == 0.0) {
    // Deterministic phase 0: in the ball iff the center is within the arc.
    const double wrapped = std::remainder(center, two_pi);
    return std::abs(wrapped) < half_width ? 1.0 : 0.0;
  }
  auto phi = [](double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); };
  const int kmax =
      static_cast<int>(std::ceil((8.0 * tau + std::abs(center) + half_width) / two_pi)) + 1;
  double p = 0.0;
  for (int k = -kmax; k <= kmax; ++k) {
    const double a = (center - half_width + two_pi * k) / tau;
    const double b = (center + half_width + two_pi * k) / tau;
    p += phi(b) - phi(a);
  }
  return std::clamp(p, 0.0, 1.0);
}

SlopeFit loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("loglog_slope: size mismatch");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 positive points");
  return ols_fit(lx, ly);
}

void write_escape_csv(const std::string& path, const EscapeCurve& curve,
                      const std::string& tool_line, std::uint64_t seed,
                      std::uint64_t stream_base) {
  CsvWriter csv(path, tool_line);
  csv.comment("t_escape = " + format_double(curve.t_escape));
  const std::vector<std::string> cols = {"t",        "stay_prob", "stderr", "n_samples",
                                         "ensemble", "d",         "epsilon", "metric",
                                         "seed",     "stream_base"};
  csv.header(cols);
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    const std::vector<std::string> row = {
        format_double(curve.t_grid[i]),
        format_double(curve.stay_prob[i]),
        format_double(curve.std_error[i]),
        std::to_string(curve.n_samples),
        ensemble_kind_name(curve.spec.kind),
        std::to_string(curve.spec.dim),
        format_double(curve.eps),
        metric_field(curve.metric),
        std::to_string(seed),
        std::to_string(stream_base)};
    csv.raw_row(row);
  }
}

void write_state_escape_csv(const std::string& path, const StateEscapeCurve& curve,
                            const std::string& tool_line, std::uint64_t seed,
                            std::uint64_t stream_base) {
  CsvWriter csv(path, tool_line);
  csv.comment("t_escape = " + format_double(curve.t_escape));
  const std::vector<std::string> cols = {"t",        "stay_prob", "stderr", "n_samples",
                                         "ensemble", "d",         "epsilon", "metric",
                                         "seed",     "stream_base"};
  csv.header(cols);
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    const std::vector<std::string> row = {
        format_double(curve.t_grid[i]),
        format_double(curve.stay_prob[i]),
        format_double(curve.std_error[i]),
        std::to_string(curve.n_samples),
        ensemble_kind_name(curve.spec.kind),
        std::to_string(curve.spec.dim),
        format_double(curve.eps),
        "trace-state",
        std::to_string(seed),
        std::to_string(stream_base)};
    csv.raw_row(row);
  }
}

void write_ball_measure_csv(const std::string& path, const BallMeasureEstimate& est,
                            const std::string& tool_line, std::uint64_t seed,
                            std::uint64_t stream_base) {
  CsvWriter csv(path, tool_line);
  std::string center = "[";
  for (std::size_t i = 0; i < est.center.size(); ++i) {
    if (i) center += " ";
    center += format_double(est.center[i]);
  }
  center += "]";
  csv.comment("center = " + center);
  const std::vector<std::string> cols = {"eps",  "estimate", "stderr",
                                         "d",    "t",        "n_samples",
                                         "seed", "stream_base"};
  csv.header(cols);
  for (std::size_t i = 0; i < est.eps_grid.size(); ++i) {
    const std::vector<std::string> row = {
        format_double(est.eps_grid[i]), format_double(est.estimate[i]),
        format_double(est.std_error[i]), std::to_string(est.d),
        format_double(est.t),            std::to_string(est.n_samples),
        std::to_string(seed),            std::to_string(stream_base)};
    csv.raw_row(row);
  }
}

std::vector<std::string> write_jump_figure_bundle(const std::string& dir,
                                                  const JumpFigureParams& params,
                                                  const std::string& tool_line) {
  if (params.spec.dim != params.gs.dim)
    throw std::invalid_argument("jump figure: ensemble and gate set dimensions differ");
  if (params.spec.dim > 4)
    throw std::invalid_argument("jump figure: exact-complexity overlay needs d <= 4");
  if (params.t_grid.empty()) throw std::invalid_argument("jump figure: empty t grid");

  std::filesystem::create_directories(dir);
  const std::string escape_path = dir + "/escape.csv";
  const std::string jump_path = dir + "/complexity_jump.csv";
  const std::string avoid_path = dir + "/ball_avoidance.csv";
  const std::string manifest_path = dir + "/manifest.txt";

  // Disjoint stream namespaces per panel; trials use offsets within each.
  const SeedStream escape_s{params.seed, 0};
  const SeedStream jump_s{params.seed, std::uint64_t{1} << 32};
  const SeedStream avoid_s{params.seed, std::uint64_t{2} << 32};

  const EscapeCurve esc =
      escape_curve(params.spec, params.eps, params.metric, params.t_grid,
                   std::max(params.n_samples, 100), escape_s, params.jobs);
  write_escape_csv(escape_path, esc, tool_line, params.seed, escape_s.stream);

  const JumpCurveReport jump = complexity_jump_curve(
      params.spec, params.gs, params.eps, params.t_grid, params.n_samples, params.max_len,
      params.metric, jump_s, -1.0, 1'000'000, params.jobs);
  {
    CsvWriter csv(jump_path, tool_line);
    csv.comment("threshold_t = " + format_double(jump.threshold_t) +
                ", kept_words = " + std::to_string(jump.n_words) +
                ", values > max_len mean exceeds");
    csv.header({"t", "median_complexity", "frac_positive", "n_samples", "eps", "max_len",
                "metric", "seed", "stream_base"});
    for (std::size_t i = 0; i < jump.t_grid.size(); ++i) {
      const std::vector<std::string> row = {
          format_double(jump.t_grid[i]),
          std::to_string(jump.median[i]),
          format_double(jump.frac_positive[i]),
          std::to_string(params.n_samples),
          format_double(params.eps),
          std::to_string(params.max_len),
          metric_field(params.metric),
          std::to_string(params.seed),
          std::to_string(jump_s.stream)};
      csv.raw_row(row);
    }
  }

  // Ball-avoidance panel at the same dimension, around the traceless
  // alternating-sign diagonal (the farthest diagonal from the identity).
  RealVector phases(params.spec.dim);
  for (Index i = 0; i < params.spec.dim; ++i)
    phases(i) = (i % 2 == 0) ? std::numbers::pi : 0.0;
  const UnitaryMatrix g = UnitaryMatrix::from_phases(phases);
  const double dhs = hs_proj_distance(g, UnitaryMatrix::identity(params.spec.dim));
  const double sqrt_d = std::sqrt(static_cast<double>(params.spec.dim));
  {
    CsvWriter csv(avoid_path, tool_line);
    csv.comment("target = alternating-sign diagonal, dist to identity = " + format_double(dhs));
    csv.header({"eps", "threshold", "frequency", "bound", "slack", "hits", "n_samples",
                "seed", "stream_base"});
    for (double eps : params.avoid_eps) {
      if (dhs <= 6.0 * eps * sqrt_d) {
        csv.comment("eps = " + format_double(eps) +
                    " skipped: needs dist(G, I) > 6 eps sqrt(d)");
        continue;
      }
      const BallAvoidanceReport rep =
          ball_avoidance_estimate(g, eps, params.n_avoid, avoid_s, params.jobs);
      const std::vector<std::string> row = {
          format_double(rep.eps),      format_double(rep.threshold),
          format_double(rep.frequency), format_double(rep.bound),
          format_double(rep.slack),     std::to_string(rep.hits),
          std::to_string(rep.n_samples), std::to_string(params.seed),
          std::to_string(avoid_s.stream)};
      csv.raw_row(row);
    }
  }

  {
    KeyValueWriter manifest(manifest_path);
    manifest.put("tool", tool_line);
    manifest.put("seed", static_cast<long long>(params.seed));
    manifest.put("ensemble", ensemble_kind_name(params.spec.kind));
    manifest.put("dim", static_cast<long long>(params.spec.dim));
    manifest.put("epsilon", params.eps);
    manifest.put("metric", metric_field(params.metric));
    manifest.put("n_samples", static_cast<long long>(params.n_samples));
    manifest.put("max_len", static_cast<long long>(params.max_len));
    manifest.put("n_avoid", static_cast<long long>(params.n_avoid));
    manifest.put("escape_csv", std::string("escape.csv"));
    manifest.put("escape_stream_base", static_cast<long long>(escape_s.stream));
    manifest.put("complexity_csv", std::string("complexity_jump.csv"));
    manifest.put("complexity_stream_base", static_cast<long long>(jump_s.stream));
    manifest.put("ball_avoidance_csv", std::string("ball_avoidance.csv"));
    manifest.put("ball_avoidance_stream_base", static_cast<long long>(avoid_s.stream));
  }
  return {escape_path, jump_path, avoid_path, manifest_path};
}

}  // namespace rmtlab
