#include "rmtlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rmtlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_dim(const UnitaryMatrix& u, const UnitaryMatrix& v, const char* what) {
  if (u.dim() != v.dim())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

std::vector<Complex> relative_eigenvalues(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  const ComplexMatrix w = v.matrix().adjoint() * u.matrix();
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(w, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("relative_eigenvalues: eigensolver failed");
  std::vector<Complex> out(static_cast<std::size_t>(w.rows()));
  for (Index i = 0; i < w.rows(); ++i) {
    // Eigenvalues of a unitary matrix; renormalize onto the circle to strip
    // solver noise before any phase geometry.
    Complex z = solver.eigenvalues()[i];
    const double mag = std::abs(z);
    out[static_cast<std::size_t>(i)] = mag > 0.0 ? z / mag : Complex(1.0, 0.0);
  }
  return out;
}

// Distance from the origin to the convex hull of points on (or near) the unit
// circle. Returns 0 when the origin lies inside the hull.
double origin_to_hull_distance(std::vector<Complex> pts) {
  std::sort(pts.begin(), pts.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Complex& a, const Complex& b) {
                          return a.real() == b.real() && a.imag() == b.imag();
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n == 1) return std::abs(pts[0]);

  auto cross = [](const Complex& o, const Complex& a, const Complex& b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) -
           (a.imag() - o.imag()) * (b.real() - o.real());
  };
  auto seg_dist = [](const Complex& a, const Complex& b) {
    // Distance from origin to segment [a, b].
    const Complex ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(a);
    double s = -(a.real() * ab.real() + a.imag() * ab.imag()) / len2;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(a + s * ab);
  };

  // Andrew monotone chain.
  std::vector<Complex> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point repeats the first

  if (hull.size() == 1) return std::abs(hull[0]);
  if (hull.size() == 2) return seg_dist(hull[0], hull[1]);

  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Complex& a = hull[i];
    const Complex& b = hull[(i + 1) % hull.size()];
    // Hull is counterclockwise; the origin is inside iff it is to the left of
    // every edge.
    if (cross(a, b, Complex(0.0, 0.0)) < 0.0) inside = false;
    best = std::min(best, seg_dist(a, b));
  }
  return inside ? 0.0 : best;
}

}  // namespace

std::vector<double> relative_eigenphases(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  require_same_dim(u, v, "relative_eigenphases");
  const auto eigs = relative_eigenvalues(u, v);
  std::vector<double> phases(eigs.size());
  std::transform(eigs.begin(), eigs.end(), phases.begin(),
                 [](const Complex& z) { return std::arg(z); });
  return phases;
}

CoveringArc smallest_covering_arc(std::vector<double> phases) {
  if (phases.empty()) throw std::invalid_argument("smallest_covering_arc: no phases");
  for (double& p : phases) {
    p = std::fmod(p, kTwoPi);
    if (p < 0.0) p += kTwoPi;
  }
  std::sort(phases.begin(), phases.end());
  const std::size_t n = phases.size();
  // Largest gap between consecutive phases (cyclically); the covering arc is
  // the complement.
  double max_gap = kTwoPi - (phases[n - 1] - phases[0]);
  double gap_end = phases[0];  // arc start sits at the end of the largest gap
  for (std::size_t i = 1; i < n; ++i) {
    const double gap = phases[i] - phases[i - 1];
    if (gap > max_gap) {
      max_gap = gap;
      gap_end = phases[i];
    }
  }
  CoveringArc arc;
  arc.length = kTwoPi - max_gap;
  double mid = gap_end + 0.5 * arc.length;
  if (mid >= kTwoPi) mid -= kTwoPi;
  arc.midpoint = mid;
  return arc;
}

double hs_proj_distance(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  require_same_dim(u, v, "hs_proj_distance");
  const double d = static_cast<double>(u.dim());
  const Complex tr = (v.matrix().adjoint() * u.matrix()).trace();
  return std::sqrt(std::max(0.0, 2.0 * d - 2.0 * std::abs(tr)));
}

double opnorm_proj_distance(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  return opnorm_proj_from_phases(relative_eigenphases(u, v));
}

double diamond_distance_unitary(const UnitaryMatrix& u, const UnitaryMatrix& v) {
  require_same_dim(u, v, "diamond_distance_unitary");
  const double nu = std::min(1.0, origin_to_hull_distance(relative_eigenvalues(u, v)));
  return 2.0 * std::sqrt(std::max(0.0, 1.0 - nu * nu));
}

double trace_distance_states(const PureState& psi, const PureState& phi) {
  if (psi.dim() != phi.dim())
    throw std::invalid_argument("trace_distance_states: dimension mismatch");
  const Complex ov = psi.amplitudes().dot(phi.amplitudes());
  return std::sqrt(std::max(0.0, 1.0 - std::norm(ov)));
}

TorusProjection dist_to_diagonal_torus(const ComplexMatrix& x) {
  if (x.rows() != x.cols() || x.rows() == 0)
    throw std::invalid_argument("dist_to_diagonal_torus: matrix must be square");
  const Index d = x.rows();
  TorusProjection out;
  out.phases = RealVector::Zero(d);
  double abs_diag_sum = 0.0;
  for (Index i = 0; i < d; ++i) {
    const Complex xi = x(i, i);
    const double mag = std::abs(xi);
    abs_diag_sum += mag;
    out.phases[i] = mag > 0.0 ? std::arg(xi) : 0.0;
  }
  out.distance = std::sqrt(std::max(0.0, 2.0 * static_cast<double>(d) - 2.0 * abs_diag_sum));
  return out;
}

double dist_to_state_torus(const PureState& psi, const PureState& phi) {
  if (psi.dim() != phi.dim())
    throw std::invalid_argument("dist_to_state_torus: dimension mismatch");
  double s = 0.0;
  for (Index k = 0; k < psi.dim(); ++k)
    s += std::abs(psi.amplitudes()[k]) * std::abs(phi.amplitudes()[k]);
  return std::sqrt(std::max(0.0, 1.0 - s * s));
}

double hs_proj_from_phases(const std::vector<double>& phases) {
  Complex tr(0.0, 0.0);
  for (double p : phases) tr += std::polar(1.0, p);
  const double d = static_cast<double>(phases.size());
  return std::sqrt(std::max(0.0, 2.0 * d - 2.0 * std::abs(tr)));
}

double opnorm_proj_from_phases(std::vector<double> phases) {
  const CoveringArc arc = smallest_covering_arc(std::move(phases));
  return 2.0 * std::sin(0.25 * std::min(arc.length, kTwoPi));
}

double diamond_from_phases(const std::vector<double>& phases) {
  std::vector<Complex> pts(phases.size());
  std::transform(phases.begin(), phases.end(), pts.begin(),
                 [](double p) { return std::polar(1.0, p); });
  const double nu = std::min(1.0, origin_to_hull_distance(std::move(pts)));
  return 2.0 * std::sqrt(std::max(0.0, 1.0 - nu * nu));
}

std::string channel_metric_name(ChannelMetric m) {
  switch (m) {
    case ChannelMetric::Diamond: return "diamond";
    case ChannelMetric::OpNormProj: return "opnorm";
    case ChannelMetric::HsProj: return "hs";
  }
  throw std::logic_error("channel_metric_name: bad metric");
}

ChannelMetric parse_channel_metric(const std::string& name) {
  if (name == "diamond") return ChannelMetric::Diamond;
  if (name == "opnorm") return ChannelMetric::OpNormProj;
  if (name == "hs") return ChannelMetric::HsProj;
  throw std::invalid_argument("unknown channel metric: " + name);
}

double channel_distance(ChannelMetric m, const UnitaryMatrix& u, const UnitaryMatrix& v) {
  switch (m) {
    case ChannelMetric::Diamond: return diamond_distance_unitary(u, v);
    case ChannelMetric::OpNormProj: return opnorm_proj_distance(u, v);
    case ChannelMetric::HsProj: return hs_proj_distance(u, v);
  }
  throw std::logic_error("channel_distance: bad metric");
}

double channel_distance_from_phases(ChannelMetric m, const std::vector<double>& phases) {
  switch (m) {
    case ChannelMetric::Diamond: return diamond_from_phases(phases);
    case ChannelMetric::OpNormProj: return opnorm_proj_from_phases(phases);
    case ChannelMetric::HsProj: return hs_proj_from_phases(phases);
  }
  throw std::logic_error("channel_distance_from_phases: bad metric");
}

}  // namespace rmtlab
