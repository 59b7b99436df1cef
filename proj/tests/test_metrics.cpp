#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/metrics.hpp"

using namespace rmtlab;

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pi(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

// Oracle: minimize g(phi) = ||U - e^{i phi} V|| over the global phase by
// nested grid search (three refinement passes).
double phase_min_distance(const ComplexMatrix& u, const ComplexMatrix& v,
                          const std::function<double(const ComplexMatrix&)>& norm_fn) {
  double center = 0.0;
  double halfwidth = kPi;
  double best = norm_fn(u - v);
  for (int pass = 0; pass < 3; ++pass) {
    const int n = 729;
    double best_phi = center;
    for (int i = 0; i <= n; ++i) {
      const double phi = center - halfwidth + 2.0 * halfwidth * i / n;
      const double val = norm_fn(u - std::polar(1.0, phi) * v);
      if (val < best) {
        best = val;
        best_phi = phi;
      }
    }
    center = best_phi;
    halfwidth *= 4.0 / n;
  }
  return best;
}

double frobenius(const ComplexMatrix& m) { return m.norm(); }

double opnorm(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

// Oracle for the hull distance nu = min_{p in simplex} |sum p_k z_k|:
// Frank-Wolfe with exact line search, returning a rigorous bracket
// [f - gap, f] for nu^2 from the duality gap.
struct HullBracket {
  double upper = 0.0;  // achieved |c|^2
  double lower = 0.0;  // duality-gap certificate
};

HullBracket hull_distance_sq_bracket(const std::vector<Complex>& z) {
  const std::size_t n = z.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  Complex c(0.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) c += p[k] * z[k];
  double gap = 1.0;
  for (int it = 0; it < 200000 && gap > 1e-10; ++it) {
    // Linear minimization step: most-negative gradient coordinate.
    std::size_t j = 0;
    double g_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      const double g = 2.0 * (std::conj(z[k]) * c).real();
      if (g < g_min) {
        g_min = g;
        j = k;
      }
    }
    gap = 2.0 * std::norm(c) - g_min;
    const Complex dir = z[j] - c;
    const double denom = std::norm(dir);
    if (denom < 1e-30) break;
    double gamma = -(std::conj(dir) * c).real() / denom;
    gamma = std::clamp(gamma, 0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) p[k] *= 1.0 - gamma;
    p[j] += gamma;
    c = (1.0 - gamma) * c + gamma * z[j];
  }
  HullBracket b;
  b.upper = std::norm(c);
  b.lower = std::max(0.0, std::norm(c) - gap);
  return b;
}

std::vector<Complex> relative_eigenvalues(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  const ComplexMatrix w = v.matrix().adjoint() * u.matrix();
  Eigen::ComplexEigenSolver<ComplexMatrix> es(w, false);
  std::vector<Complex> z;
  for (Index k = 0; k < w.rows(); ++k) z.push_back(es.eigenvalues()(k) / std::abs(es.eigenvalues()(k)));
  return z;
}

// Brute-force covering arc: scan candidate midpoints.
double covering_arc_oracle(const std::vector<double>& phases) {
  double best = 2.0 * kPi;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double c = -kPi + 2.0 * kPi * i / n;
    double w = 0.0;
    for (double p : phases) w = std::max(w, 2.0 * std::abs(wrap_pi(p - c)));
    best = std::min(best, w);
  }
  return best;
}

UnitaryMatrix diag_unitary(std::initializer_list<double> phases) {
  RealVector v(static_cast<Index>(phases.size()));
  Index i = 0;
  for (double p : phases) v(i++) = p;
  return UnitaryMatrix::from_phases(v);
}

}  // namespace

TEST_CASE("relative eigenphases of diagonal unitaries are the phase gaps") {
  const UnitaryMatrix u = diag_unitary({0.3, -1.2, 2.0});
  const UnitaryMatrix v = diag_unitary({0.1, 0.1, 0.1});
  std::vector<double> ph = relative_eigenphases(u, v);
  std::sort(ph.begin(), ph.end());
  CHECK(ph[0] == doctest::Approx(-1.3).epsilon(1e-12));
  CHECK(ph[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(ph[2] == doctest::Approx(1.9).epsilon(1e-12));
  for (double p : relative_eigenphases(u, u)) CHECK(std::abs(p) < 1e-12);
}

TEST_CASE("smallest covering arc: hand cases") {
  {
    const CoveringArc arc = smallest_covering_arc({0.5});
    CHECK(arc.length == doctest::Approx(0.0).epsilon(1e-12));
  }
  {
    const CoveringArc arc = smallest_covering_arc({-0.3, 0.7});
    CHECK(arc.length == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wrap_pi(arc.midpoint - 0.2) == doctest::Approx(0.0).epsilon(1e-12));
  }
  {
    // Wraps through pi: the short way around covers 2pi - 6.
    const CoveringArc arc = smallest_covering_arc({3.0, -3.0});
    CHECK(arc.length == doctest::Approx(2.0 * kPi - 6.0).epsilon(1e-12));
    CHECK(std::abs(wrap_pi(arc.midpoint - kPi)) < 1e-9);
  }
}

TEST_CASE("smallest covering arc against the brute-force oracle") {
  GaussianStream g(SeedStream{31, 0});
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> phases;
    const int n = 2 + rep % 5;
    for (int i = 0; i < n; ++i) phases.push_back(wrap_pi(2.0 * g.real()));
    const CoveringArc arc = smallest_covering_arc(phases);
    const double oracle = covering_arc_oracle(phases);
    CHECK(arc.length <= oracle + 1e-9);           // never worse than the scan
    CHECK(arc.length >= oracle - 4.0 * kPi / 40000.0 - 1e-9);
    // The reported midpoint actually achieves the reported length.
    double w = 0.0;
    for (double p : phases) w = std::max(w, 2.0 * std::abs(wrap_pi(p - arc.midpoint)));
    CHECK(w == doctest::Approx(arc.length).epsilon(1e-9));
  }
}

TEST_CASE("hs_proj_distance equals the phase-minimized Frobenius norm") {
  for (int rep = 0; rep < 6; ++rep) {
    const Index d = 2 + rep % 3;
    const UnitaryMatrix u = sample_haar_unitary(d, {37, static_cast<std::uint64_t>(rep)});
    const UnitaryMatrix v =
        sample_haar_unitary(d, {37, 100 + static_cast<std::uint64_t>(rep)});
    const double oracle = phase_min_distance(u.matrix(), v.matrix(), frobenius);
    CHECK(hs_proj_distance(u, v) == doctest::Approx(oracle).epsilon(1e-7));
  }
  // Hand value: V^dag U = diag(1, i) gives sqrt(4 - 2 sqrt(2)).
  const UnitaryMatrix u = diag_unitary({0.0, kPi / 2.0});
  const UnitaryMatrix v = diag_unitary({0.0, 0.0});
  CHECK(hs_proj_distance(u, v) ==
        doctest::Approx(1.0823922002923940).epsilon(1e-12));
}

TEST_CASE("opnorm_proj_distance equals the phase-minimized operator norm") {
  for (int rep = 0; rep < 6; ++rep) {
    const Index d = 2 + rep % 3;
    const UnitaryMatrix u = sample_haar_unitary(d, {41, static_cast<std::uint64_t>(rep)});
    const UnitaryMatrix v =
        sample_haar_unitary(d, {41, 100 + static_cast<std::uint64_t>(rep)});
    const double oracle = phase_min_distance(u.matrix(), v.matrix(), opnorm);
    CHECK(opnorm_proj_distance(u, v) == doctest::Approx(oracle).epsilon(1e-6));
  }
  // Phases {0, pi/2}: 2 sin(pi/8).
  const UnitaryMatrix u = diag_unitary({0.0, kPi / 2.0});
  const UnitaryMatrix v = diag_unitary({0.0, 0.0});
  CHECK(opnorm_proj_distance(u, v) ==
        doctest::Approx(2.0 * std::sin(kPi / 8.0)).epsilon(1e-12));
}

TEST_CASE("diamond distance: hand cases") {
  const UnitaryMatrix i2 = UnitaryMatrix::identity(2);
  // Relative phases {0, pi/2}: nu = cos(pi/4), distance sqrt(2).
  CHECK(diamond_distance_unitary(diag_unitary({0.0, kPi / 2.0}), i2) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // Antipodal phases: the hull contains the origin.
  CHECK(diamond_distance_unitary(diag_unitary({0.0, kPi}), i2) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // Three equally spread phases also surround the origin.
  const UnitaryMatrix i3 = UnitaryMatrix::identity(3);
  CHECK(diamond_distance_unitary(diag_unitary({0.0, 2.0 * kPi / 3.0, -2.0 * kPi / 3.0}),
                                 i3) == doctest::Approx(2.0).epsilon(1e-12));
  // Narrow spread w: 2 sin(w/2).
  CHECK(diamond_distance_unitary(diag_unitary({-0.35, 0.35}), i2) ==
        doctest::Approx(2.0 * std::sin(0.35)).epsilon(1e-12));
}

TEST_CASE("diamond distance against the Frank-Wolfe hull oracle") {
  for (int rep = 0; rep < 10; ++rep) {
    const Index d = 2 + rep % 5;
    const UnitaryMatrix u = sample_haar_unitary(d, {43, static_cast<std::uint64_t>(rep)});
    const UnitaryMatrix v =
        sample_haar_unitary(d, {43, 100 + static_cast<std::uint64_t>(rep)});
    const HullBracket nu2 = hull_distance_sq_bracket(relative_eigenvalues(u, v));
    const double dd = diamond_distance_unitary(u, v);
    const double nu_impl_sq = 1.0 - dd * dd / 4.0;
    CHECK(nu_impl_sq <= nu2.upper + 1e-7);
    CHECK(nu_impl_sq >= nu2.lower - 1e-7);
  }
}

TEST_CASE("state distances") {
  const PureState e0 = PureState::basis_state(2, 0);
  const PureState e1 = PureState::basis_state(2, 1);
  CHECK(trace_distance_states(e0, e1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(trace_distance_states(e0, e0) == doctest::Approx(0.0).epsilon(1e-14));
  ComplexVector a(2);
  a << Complex(0.6, 0.0), Complex(0.8, 0.0);
  CHECK(trace_distance_states(e0, PureState(a)) ==
        doctest::Approx(0.8).epsilon(1e-14));

  // Torus distance of states: sqrt(1 - (sum |psi_k||phi_k|)^2).
  ComplexVector b(3);
  b << Complex(std::sqrt(0.8), 0.0), Complex(0.0, std::sqrt(0.2)), Complex(0.0, 0.0);
  CHECK(dist_to_state_torus(PureState::basis_state(3, 0), PureState(b)) ==
        doctest::Approx(0.4472135954999579).epsilon(1e-12));
  // Phases never matter.
  ComplexVector c = b;
  c(0) *= std::polar(1.0, 1.3);
  c(1) *= std::polar(1.0, -0.4);
  CHECK(dist_to_state_torus(PureState::basis_state(3, 0), PureState(c)) ==
        doctest::Approx(0.4472135954999579).epsilon(1e-12));
}

TEST_CASE("dist_to_diagonal_torus: hand value and achievability oracle") {
  // Balanced involution: |X_00| + |X_11| = sqrt(2).
  ComplexMatrix had(2, 2);
  had << 1, 1, 1, -1;
  had /= std::sqrt(2.0);
  const TorusProjection proj = dist_to_diagonal_torus(had);
  CHECK(proj.distance == doctest::Approx(1.0823922002923940).epsilon(1e-12));

  for (int rep = 0; rep < 5; ++rep) {
    const Index d = 2 + rep;
    const UnitaryMatrix u = sample_haar_unitary(d, {47, static_cast<std::uint64_t>(rep)});
    const TorusProjection p = dist_to_diagonal_torus(u.matrix());
    // The reported phases achieve the reported distance...
    ComplexMatrix diff = u.matrix();
    for (Index k = 0; k < d; ++k) diff(k, k) -= std::polar(1.0, p.phases(k));
    CHECK(diff.norm() == doctest::Approx(p.distance).epsilon(1e-10));
    // ...and no random perturbation of the phases does better.
    GaussianStream g(SeedStream{47, 1000 + static_cast<std::uint64_t>(rep)});
    for (int probe = 0; probe < 200; ++probe) {
      ComplexMatrix alt = u.matrix();
      for (Index k = 0; k < d; ++k)
        alt(k, k) -= std::polar(1.0, p.phases(k) + 0.3 * g.real());
      CHECK(alt.norm() >= p.distance - 1e-12);
    }
  }
}

TEST_CASE("metrics are projective and symmetric") {
  const UnitaryMatrix u = sample_haar_unitary(4, {53, 0});
  const UnitaryMatrix v = sample_haar_unitary(4, {53, 1});
  const UnitaryMatrix u_phased(std::polar(1.0, 0.77) * u.matrix());
  CHECK(hs_proj_distance(u, u_phased) < 1e-7);
  CHECK(opnorm_proj_distance(u, u_phased) < 1e-7);
  CHECK(diamond_distance_unitary(u, u_phased) < 1e-7);
  CHECK(hs_proj_distance(u, v) == doctest::Approx(hs_proj_distance(v, u)).epsilon(1e-12));
  CHECK(opnorm_proj_distance(u, v) ==
        doctest::Approx(opnorm_proj_distance(v, u)).epsilon(1e-9));
  CHECK(diamond_distance_unitary(u, v) ==
        doctest::Approx(diamond_distance_unitary(v, u)).epsilon(1e-12));
}

TEST_CASE("metric sandwich on random pairs") {
  for (int rep = 0; rep < 40; ++rep) {
    const Index d = (rep % 2 == 0) ? 2 : 8;
    const UnitaryMatrix u = sample_haar_unitary(d, {59, static_cast<std::uint64_t>(rep)});
    const UnitaryMatrix v =
        sample_haar_unitary(d, {59, 500 + static_cast<std::uint64_t>(rep)});
    const double dinf = opnorm_proj_distance(u, v);
    const double dd = diamond_distance_unitary(u, v);
    const double dhs = hs_proj_distance(u, v);
    CHECK(dinf <= dd + 1e-9);
    CHECK(dd <= 2.0 * dinf + 1e-9);
    CHECK(dhs <= std::sqrt(static_cast<double>(d)) * dd + 1e-9);
    CHECK(dinf <= dhs + 1e-9);  // operator norm below Frobenius
  }
}

TEST_CASE("phase-array fast paths agree with the dense metrics") {
  GaussianStream g(SeedStream{61, 0});
  for (int rep = 0; rep < 10; ++rep) {
    const Index d = 2 + rep % 4;
    std::vector<double> phases;
    RealVector pv(d);
    for (Index k = 0; k < d; ++k) {
      pv(k) = wrap_pi(1.5 * g.real());
      phases.push_back(pv(k));
    }
    const UnitaryMatrix u = UnitaryMatrix::from_phases(pv);
    const UnitaryMatrix id = UnitaryMatrix::identity(d);
    CHECK(hs_proj_from_phases(phases) ==
          doctest::Approx(hs_proj_distance(u, id)).epsilon(1e-10));
    CHECK(opnorm_proj_from_phases(phases) ==
          doctest::Approx(opnorm_proj_distance(u, id)).epsilon(1e-10));
    CHECK(diamond_from_phases(phases) ==
          doctest::Approx(diamond_distance_unitary(u, id)).epsilon(1e-10));
    for (ChannelMetric m :
         {ChannelMetric::Diamond, ChannelMetric::OpNormProj, ChannelMetric::HsProj}) {
      CHECK(channel_distance_from_phases(m, phases) ==
            doctest::Approx(channel_distance(m, u, id)).epsilon(1e-10));
    }
  }
}

TEST_CASE("channel metric names parse and dispatch") {
  CHECK(parse_channel_metric("diamond") == ChannelMetric::Diamond);
  CHECK(parse_channel_metric("opnorm") == ChannelMetric::OpNormProj);
  CHECK(parse_channel_metric("hs") == ChannelMetric::HsProj);
  CHECK_THROWS(parse_channel_metric("taxicab"));
  for (ChannelMetric m :
       {ChannelMetric::Diamond, ChannelMetric::OpNormProj, ChannelMetric::HsProj}) {
    CHECK(parse_channel_metric(channel_metric_name(m)) == m);
  }
  const UnitaryMatrix u = sample_haar_unitary(3, {67, 0});
  const UnitaryMatrix v = sample_haar_unitary(3, {67, 1});
  CHECK(channel_distance(ChannelMetric::Diamond, u, v) == diamond_distance_unitary(u, v));
  CHECK(channel_distance(ChannelMetric::OpNormProj, u, v) == opnorm_proj_distance(u, v));
  CHECK(channel_distance(ChannelMetric::HsProj, u, v) == hs_proj_distance(u, v));
}
