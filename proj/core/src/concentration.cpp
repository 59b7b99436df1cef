#include "rmtlab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "rmtlab/parallel.hpp"
#include "rmtlab/quadrature.hpp"

namespace rmtlab {
namespace {

struct Moments {
  double mean = 0.0;
  double sample_std = 0.0;
  double std_error = 0.0;
  double max_value = 0.0;
};

Moments moments_of(const std::vector<double>& v) {
  Moments m;
  const auto n = static_cast<double>(v.size());
  if (v.empty()) return m;
  double sum = 0.0;
  double maxv = v.front();
  for (double x : v) {
    sum += x;
    maxv = std::max(maxv, x);
  }
  m.mean = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  if (v.size() > 1) m.sample_std = std::sqrt(ss / (n - 1.0));
  m.std_error = m.sample_std / std::sqrt(n);
  m.max_value = maxv;
  return m;
}

double binomial_slack(double p, double n) {
  const double q = std::clamp(p, 0.0, 1.0);
  return 3.0 * std::sqrt(q * (1.0 - q) / n);
}

// f(V) = dist(V G V^dag, torus), the quantity all Haar probes sample.
double conjugated_torus_distance(const UnitaryMatrix& g, const UnitaryMatrix& v) {
  const ComplexMatrix x = v.matrix() * g.matrix() * v.matrix().adjoint();
  return dist_to_diagonal_torus(x).distance;
}

}  // namespace

double opnorm_minus_identity(const UnitaryMatrix& g) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(g.matrix(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("opnorm_minus_identity: eigensolver failed");
  double best = 0.0;
  for (Index i = 0; i < g.dim(); ++i) {
    Complex z = solver.eigenvalues()(i);
    const double r = std::abs(z);
    if (r > 0.0) z /= r;  // G - I is normal, so the norm is spectral
    best = std::max(best, std::abs(z - Complex(1.0, 0.0)));
  }
  return best;
}

TorusDistanceReport expected_torus_distance(const UnitaryMatrix& g, int n_samples,
                                            SeedStream s, int jobs) {
  if (n_samples < 2) throw std::invalid_argument("expected_torus_distance: need n >= 2");
  const Index d = g.dim();
  const auto vals = parallel_map<double>(
      n_samples,
      [&](std::int64_t i) {
        return conjugated_torus_distance(g, sample_haar_unitary(d, s.at(i)));
      },
      jobs);
  const Moments m = moments_of(vals);

  TorusDistanceReport rep;
  rep.dhs_identity = hs_proj_distance(g, UnitaryMatrix::identity(d));
  rep.mc_mean = m.mean;
  rep.mc_std = m.sample_std;
  rep.std_error = m.std_error;
  rep.max_sample = m.max_value;
  rep.n_samples = n_samples;
  rep.lower_ok = m.mean + 3.0 * m.std_error >= rep.dhs_identity / 3.0;
  rep.upper_ok = m.max_value <= rep.dhs_identity + 1e-9;
  return rep;
}

SecondMomentReport haar_second_moment_check(const UnitaryMatrix& g, int n_samples,
                                            SeedStream s, int jobs) {
  if (n_samples < 2) throw std::invalid_argument("haar_second_moment_check: need n >= 2");
  const Index d = g.dim();
  // |<i| V G V^dag |i>|^2 with V Haar: the row V^dag|i> is a Haar state psi,
  // so sample |<psi|G|psi>|^2 directly.
  const auto vals = parallel_map<double>(
      n_samples,
      [&](std::int64_t i) {
        const PureState psi = sample_haar_state(d, s.at(i));
        const Complex v = psi.amplitudes().dot(g.matrix() * psi.amplitudes());
        return std::norm(v);
      },
      jobs);
  const Moments m = moments_of(vals);

  SecondMomentReport rep;
  rep.mc = m.mean;
  rep.std_error = m.std_error;
  rep.n_samples = n_samples;
  const double tr = std::abs(g.matrix().trace());
  rep.closed_form = (1.0 + tr * tr / static_cast<double>(d)) / static_cast<double>(d + 1);
  rep.rel_error = std::abs(rep.mc - rep.closed_form) / rep.closed_form;
  return rep;
}

LipschitzReport lipschitz_probe(const UnitaryMatrix& g, int n_pairs, SeedStream s, int jobs) {
  if (n_pairs < 1) throw std::invalid_argument("lipschitz_probe: need n_pairs >= 1");
  const Index d = g.dim();
  const double constant = 2.0 * opnorm_minus_identity(g);

  const auto ratios = parallel_map<double>(
      n_pairs,
      [&](std::int64_t k) {
        const UnitaryMatrix u = sample_haar_unitary(d, s.at(2 * k));
        const UnitaryMatrix v = sample_haar_unitary(d, s.at(2 * k + 1));
        const double df = std::abs(conjugated_torus_distance(g, u) -
                                   conjugated_torus_distance(g, v));
        const double denom = constant * (u.matrix() - v.matrix()).norm();
        return denom > 0.0 ? df / denom : 0.0;
      },
      jobs);

  LipschitzReport rep;
  rep.constant = constant;
  rep.n_pairs = n_pairs;
  for (double r : ratios) {
    rep.max_ratio = std::max(rep.max_ratio, r);
    if (r > 1.0 + 1e-9) ++rep.violations;
  }
  return rep;
}

ConcentrationTailReport concentration_tail_probe(const UnitaryMatrix& g,
                                                 std::span<const double> a_grid,
                                                 int n_samples, SeedStream s, int jobs) {
  if (n_samples < 2) throw std::invalid_argument("concentration_tail_probe: need n >= 2");
  const Index d = g.dim();
  if (d < 3) throw std::invalid_argument("concentration_tail_probe: need dim >= 3");
  const auto vals = parallel_map<double>(
      n_samples,
      [&](std::int64_t i) {
        return conjugated_torus_distance(g, sample_haar_unitary(d, s.at(i)));
      },
      jobs);
  const Moments m = moments_of(vals);
  const double lip = 2.0 * opnorm_minus_identity(g);

  ConcentrationTailReport rep;
  rep.mc_mean = m.mean;
  rep.lipschitz = lip;
  rep.n_samples = n_samples;
  const double nf = static_cast<double>(n_samples);
  for (double a : a_grid) {
    TailRow row;
    row.a = a;
    long upper = 0;
    long lower = 0;
    for (double v : vals) {
      if (v >= m.mean + a) ++upper;
      if (v <= m.mean - a) ++lower;
    }
    row.upper_freq = static_cast<double>(upper) / nf;
    row.lower_freq = static_cast<double>(lower) / nf;
    row.bound = std::min(
        1.0, std::exp(-static_cast<double>(d - 2) * a * a / (12.0 * lip * lip)));
    row.slack = binomial_slack(row.bound, nf);
    row.ok = row.upper_freq <= row.bound + row.slack &&
             row.lower_freq <= row.bound + row.slack;
    rep.rows.push_back(row);
  }
  return rep;
}

BallAvoidanceReport ball_avoidance_estimate(const UnitaryMatrix& g, double eps,
                                            int n_samples, SeedStream s, int jobs) {
  if (n_samples < 2) throw std::invalid_argument("ball_avoidance_estimate: need n >= 2");
  if (eps <= 0.0) throw std::invalid_argument("ball_avoidance_estimate: eps must be positive");
  const Index d = g.dim();
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  const double dhs = hs_proj_distance(g, UnitaryMatrix::identity(d));
  if (dhs <= 6.0 * eps * sqrt_d)
    throw std::invalid_argument(
        "ball_avoidance_estimate: need dist(G, I) > 6 eps sqrt(d); got dist = " +
        std::to_string(dhs) + " vs " + std::to_string(6.0 * eps * sqrt_d));

  const double threshold = eps * sqrt_d;
  const auto hits = parallel_map<std::uint8_t>(
      n_samples,
      [&](std::int64_t i) {
        const double f = conjugated_torus_distance(g, sample_haar_unitary(d, s.at(i)));
        return static_cast<std::uint8_t>(f <= threshold ? 1 : 0);
      },
      jobs);

  BallAvoidanceReport rep;
  rep.eps = eps;
  rep.threshold = threshold;
  rep.n_samples = n_samples;
  for (auto h : hits) rep.hits += h;
  const double nf = static_cast<double>(n_samples);
  rep.frequency = static_cast<double>(rep.hits) / nf;
  rep.bound = std::exp(-eps * eps * static_cast<double>(d) * static_cast<double>(d) / 384.0);
  rep.slack = binomial_slack(rep.bound, nf);
  rep.ok = rep.frequency <= rep.bound + rep.slack;
  return rep;
}

double gaussian_pair_average(double beta, double tol) {
  beta = std::abs(beta);
  if (beta > 1.0 + 1e-12)
    throw std::invalid_argument("gaussian_pair_average: need |beta| <= 1");
  beta = std::min(beta, 1.0);
  const double alpha = std::sqrt(std::max(0.0, 1.0 - beta * beta));
  const double pi = std::numbers::pi;

  // Polar form: Z = R e^{i xi}, W = S e^{i eta} with (R, S) on the quarter
  // sphere via R = r cos phi, S = r sin phi, so
  //   A = (2/pi) int_0^{pi/2} dphi cos^2(phi) sin(phi)
  //             int_0^{2pi} dtheta sqrt(a^2 + b^2 + 2 a b cos theta)
  // with a = alpha cos(phi), b = beta sin(phi) and theta the relative phase.
  const double inner_tol = tol / 50.0;
  auto inner = [&](double phi) {
    const double a = alpha * std::cos(phi);
    const double b = beta * std::sin(phi);
    auto f = [&](double theta) {
      return std::sqrt(std::max(0.0, a * a + b * b + 2.0 * a * b * std::cos(theta)));
    };
    return 2.0 * adaptive_simpson(f, 0.0, pi, inner_tol);
  };
  auto outer = [&](double phi) {
    const double c = std::cos(phi);
    return c * c * std::sin(phi) * inner(phi);
  };
  return (2.0 / pi) * adaptive_simpson(outer, 0.0, pi / 2.0, tol / 4.0);
}

McEstimate gaussian_pair_average_mc(double beta, long n, SeedStream s, int jobs) {
  if (n < 2) throw std::invalid_argument("gaussian_pair_average_mc: need n >= 2");
  beta = std::abs(beta);
  const double alpha = std::sqrt(std::max(0.0, 1.0 - beta * beta));

  constexpr long kBlock = 1 << 14;
  const long n_blocks = (n + kBlock - 1) / kBlock;
  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  const auto parts = parallel_map<Partial>(
      n_blocks,
      [&](std::int64_t b) {
        GaussianStream gs(s.at(b));
        const long count = std::min(kBlock, n - b * kBlock);
        Partial p;
        for (long i = 0; i < count; ++i) {
          const Complex z = gs.complex_unit();
          const Complex w = gs.complex_unit();
          const double v = std::abs(z) * std::abs(alpha * z + beta * w);
          p.sum += v;
          p.sum_sq += v * v;
        }
        return p;
      },
      jobs);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& p : parts) {  // fixed block order keeps the reduction deterministic
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  McEstimate est;
  est.n = n;
  const double nf = static_cast<double>(n);
  est.mean = sum / nf;
  const double var = std::max(0.0, (sum_sq - nf * est.mean * est.mean) / (nf - 1.0));
  est.std_error = std::sqrt(var / nf);
  return est;
}

LemmaFit gaussian_average_lemma_fit(std::span<const double> beta_grid,
                                    std::span<const double> beta0_candidates,
                                    double tol) {
  if (beta_grid.empty() || beta0_candidates.empty())
    throw std::invalid_argument("gaussian_average_lemma_fit: empty grid");
  LemmaFit fit;
  fit.beta_grid.assign(beta_grid.begin(), beta_grid.end());
  fit.a_values.reserve(beta_grid.size());
  for (double b : beta_grid) fit.a_values.push_back(gaussian_pair_average(b, tol));

  fit.c = -1.0;
  for (double beta0 : beta0_candidates) {
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fit.beta_grid.size(); ++i) {
      const double b = fit.beta_grid[i];
      const double floor_sq = std::min(b * b, beta0 * beta0);
      if (floor_sq < 1e-18) continue;  // ratio degenerates at beta = 0
      const double a = fit.a_values[i];
      c = std::min(c, (1.0 - a * a) / floor_sq);
    }
    if (std::isfinite(c) && c > fit.c) {
      fit.c = c;
      fit.beta0 = beta0;
    }
  }
  if (fit.c < 0.0) throw std::invalid_argument("gaussian_average_lemma_fit: no usable grid point");
  return fit;
}

GaussApproxReport gaussian_approximation_check(double beta, Index k, Index d,
                                               int n_samples, SeedStream s, int jobs) {
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("gaussian_approximation_check: need beta in [0, 1]");
  if (k < 0 || k >= d) throw std::invalid_argument("gaussian_approximation_check: bad index");
  if (n_samples < 2) throw std::invalid_argument("gaussian_approximation_check: need n >= 2");
  const double alpha = std::sqrt(std::max(0.0, 1.0 - beta * beta));

  // (V|0>, V|phi>) has the law (u, alpha u + beta w) for a Haar two-frame
  // (u, w), so only the two columns are sampled.
  const auto vals = parallel_map<double>(
      n_samples,
      [&](std::int64_t i) {
        const ComplexMatrix f = sample_haar_columns(d, 2, s.at(i));
        const Complex uk = f(k, 0);
        const Complex vk = alpha * uk + beta * f(k, 1);
        return static_cast<double>(d) * std::abs(uk) * std::abs(vk);
      },
      jobs);
  const Moments m = moments_of(vals);

  GaussApproxReport rep;
  rep.beta = beta;
  rep.d = d;
  rep.k = k;
  rep.mc = m.mean;
  rep.std_error = m.std_error;
  rep.n_samples = n_samples;
  rep.quadrature = gaussian_pair_average(beta);
  rep.bias_allowance = 5.0 / std::sqrt(static_cast<double>(d));
  rep.ok = std::abs(rep.mc - rep.quadrature) <= rep.bias_allowance + 3.0 * m.std_error;
  return rep;
}

StateTorusReport state_torus_expected_distance(const PureState& phi, int n_samples,
                                               int n_pairs, std::span<const double> eps_grid,
                                               SeedStream s, int jobs) {
  if (n_samples < 2) throw std::invalid_argument("state_torus_expected_distance: need n >= 2");
  const Index d = phi.dim();
  // phi = alpha |0> + beta |perp>; a global phase on the Haar frame absorbs
  // arg(alpha), so only magnitudes enter.
  const double a = std::min(1.0, std::abs(phi.amplitudes()(0)));
  const double beta = std::sqrt(std::max(0.0, 1.0 - a * a));

  const auto vals = parallel_map<double>(
      n_samples,
      [&](std::int64_t i) {
        const ComplexMatrix f = sample_haar_columns(d, 2, s.at(i));
        double z = 0.0;
        for (Index k = 0; k < d; ++k)
          z += std::abs(f(k, 0)) * std::abs(a * f(k, 0) + beta * f(k, 1));
        return z;
      },
      jobs);
  const Moments m = moments_of(vals);

  StateTorusReport rep;
  rep.beta = beta;
  rep.mc_mean = m.mean;
  rep.mc_std = m.sample_std;
  rep.std_error = m.std_error;
  rep.n_samples = n_samples;

  const double nf = static_cast<double>(n_samples);
  for (double eps : eps_grid) {
    TailRow row;
    row.a = eps;
    const double cut = std::sqrt(std::max(0.0, 1.0 - eps * eps));
    long hits = 0;
    for (double z : vals)
      if (z >= cut) ++hits;
    row.upper_freq = static_cast<double>(hits) / nf;
    row.lower_freq = 0.0;
    row.bound = std::exp(-eps * eps * static_cast<double>(d) / 6.0);
    row.slack = binomial_slack(row.bound, nf);
    row.ok = row.upper_freq <= row.bound + row.slack;
    rep.tails.push_back(row);
  }

  if (n_pairs > 0) {
    // Z_d as a function of the full unitary is 1-Lipschitz in HS norm.
    const ComplexVector target = phi.amplitudes();
    auto z_of = [&](const UnitaryMatrix& v) {
      const ComplexVector img = v.matrix() * target;
      double z = 0.0;
      for (Index k = 0; k < d; ++k) z += std::abs(v.matrix()(k, 0)) * std::abs(img(k));
      return z;
    };
    const std::uint64_t base = static_cast<std::uint64_t>(n_samples);
    const auto ratios = parallel_map<double>(
        n_pairs,
        [&](std::int64_t k) {
          const UnitaryMatrix u = sample_haar_unitary(d, s.at(base + 2 * k));
          const UnitaryMatrix v = sample_haar_unitary(d, s.at(base + 2 * k + 1));
          const double df = std::abs(z_of(u) - z_of(v));
          const double denom = (u.matrix() - v.matrix()).norm();
          return denom > 0.0 ? df / denom : 0.0;
        },
        jobs);
    rep.n_pairs = n_pairs;
    for (double r : ratios) {
      rep.lipschitz_max_ratio = std::max(rep.lipschitz_max_ratio, r);
      if (r > 1.0 + 1e-9) ++rep.lipschitz_violations;
    }
  }
  return rep;
}

}  // namespace rmtlab
