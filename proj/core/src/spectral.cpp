#include "rmtlab/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "rmtlab/parallel.hpp"
#include "rmtlab/special.hpp"

namespace rmtlab {

std::vector<FormFactorEstimate> estimate_form_factor(const EnsembleSpec& spec,
                                                     std::span<const double> t_grid,
                                                     int n_samples, SeedStream s,
                                                     int jobs) {
  if (n_samples < 2) throw std::invalid_argument("estimate_form_factor: need n_samples >= 2");
  if (t_grid.empty()) throw std::invalid_argument("estimate_form_factor: empty t grid");
  const Index d = spec.dim;
  const std::size_t nt = t_grid.size();

  // traces[trial] holds tr U_t for every t of that draw.
  const auto traces = parallel_map<std::vector<Complex>>(
      n_samples,
      [&](std::int64_t trial) {
        const RealVector lam = sample_eigenvalues(spec, s.at(static_cast<std::uint64_t>(trial)));
        std::vector<Complex> row(nt);
        for (std::size_t k = 0; k < nt; ++k) {
          Complex tr(0.0, 0.0);
          for (Index i = 0; i < d; ++i) tr += std::polar(1.0, -lam[i] * t_grid[k]);
          row[k] = tr;
        }
        return row;
      },
      jobs);

  std::vector<FormFactorEstimate> out(nt);
  const double n = static_cast<double>(n_samples);
  const double dd = static_cast<double>(d);
  for (std::size_t k = 0; k < nt; ++k) {
    Complex mean_tr(0.0, 0.0);
    double mean_sq = 0.0;
    for (int trial = 0; trial < n_samples; ++trial) {
      const Complex tr = traces[static_cast<std::size_t>(trial)][k];
      mean_tr += tr;
      mean_sq += std::norm(tr);
    }
    mean_tr /= n;
    mean_sq /= n;
    // Unbiased complex variance of tr U_t.
    const double var = std::max(0.0, (n / (n - 1.0)) * (mean_sq - std::norm(mean_tr)));
    FormFactorEstimate e;
    e.t = t_grid[k];
    e.mean = mean_tr / dd;
    e.variance = var;
    e.std_error = std::sqrt(var) / (dd * std::sqrt(n));
    e.n_samples = n_samples;
    out[k] = e;
  }
  return out;
}

double form_factor_theory_mean(const EnsembleSpec& spec, double t) {
  switch (spec.kind) {
    case EnsembleKind::Gue: return semicircle_charfn(t);
    case EnsembleKind::DiagGaussian:
    case EnsembleKind::RandomBasisGaussian: return gaussian_charfn(t);
  }
  throw std::logic_error("form_factor_theory_mean: bad kind");
}

VarianceCheckReport check_variance_bounds(const std::vector<FormFactorEstimate>& est,
                                          const EnsembleSpec& spec, double small_t_max) {
  VarianceCheckReport report;
  if (est.empty()) return report;
  const double d = static_cast<double>(spec.dim);
  // Relative Monte Carlo slack for a variance estimate from n samples.
  const double n = static_cast<double>(est.front().n_samples);
  const double rel = 5.0 * std::sqrt(2.0 / std::max(1.0, n - 1.0));

  for (const auto& e : est) {
    if (spec.kind == EnsembleKind::Gue) {
      {
        VarianceCheckRow row{e.t, e.variance, d, rel, false, "Var tr U_t <= d"};
        row.flagged = e.variance > d * (1.0 + rel);
        report.rows.push_back(row);
      }
      if (e.t <= small_t_max) {
        const double bound = 4.0 * e.t * e.t / d;
        VarianceCheckRow row{e.t, e.variance, bound, rel, false,
                             "small-t Var tr U_t <= 4t^2/d"};
        row.flagged = e.variance > bound * (1.0 + rel);
        report.rows.push_back(row);
      }
    } else {
      const double closed = gaussian_trace_variance(spec.dim, e.t);
      VarianceCheckRow row{e.t, e.variance, closed, rel, false,
                           "Var tr U_t = d(1 - exp(-t^2))"};
      row.flagged = std::abs(e.variance - closed) > rel * std::max(closed, 1e-12);
      report.rows.push_back(row);
    }
  }
  for (const auto& r : report.rows) report.n_flagged += r.flagged ? 1 : 0;
  return report;
}

std::vector<TraceTailRow> trace_concentration_tail(const EnsembleSpec& spec, double t,
                                                   std::span<const double> deltas,
                                                   int n_samples, SeedStream s, int jobs) {
  if (spec.kind != EnsembleKind::Gue)
    throw std::invalid_argument("trace_concentration_tail: GUE only");
  if (n_samples < 2)
    throw std::invalid_argument("trace_concentration_tail: need n_samples >= 2");
  if (!(t > 0.0)) throw std::invalid_argument("trace_concentration_tail: t must be positive");

  const auto values = parallel_map<double>(
      n_samples,
      [&](std::int64_t trial) {
        const RealVector lam = sample_eigenvalues(spec, s.at(static_cast<std::uint64_t>(trial)));
        double x = 0.0;
        for (Index i = 0; i < lam.size(); ++i) x += std::cos(lam[i] * t);
        return x;
      },
      jobs);

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n_samples);

  const double d = static_cast<double>(spec.dim);
  std::vector<TraceTailRow> rows;
  rows.reserve(deltas.size());
  for (double delta : deltas) {
    int hits = 0;
    for (double v : values)
      if (std::abs(v - mean) >= delta * d) ++hits;
    TraceTailRow row;
    row.delta = delta;
    row.frequency = static_cast<double>(hits) / static_cast<double>(n_samples);
    row.bound = std::min(1.0, 2.0 * std::exp(-d * d * delta * delta / (4.0 * t * t)));
    row.slack = 3.0 * std::sqrt(row.bound * (1.0 - row.bound) / static_cast<double>(n_samples));
    row.flagged = row.frequency > row.bound + row.slack;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rmtlab
