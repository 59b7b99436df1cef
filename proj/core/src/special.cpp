#include "rmtlab/special.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace rmtlab {

namespace {

// Ascending series J1(x) = sum_m (-1)^m / (m! (m+1)!) (x/2)^{2m+1}, truncated
// once terms drop below 1e-18 relative to the running magnitude. Adequate to
// better than 1e-11 absolute up to x = 12.
double j1_series(double x) {
  const double half = 0.5 * x;
  double term = half;  // m = 0
  double sum = term;
  const double h2 = half * half;
  for (int m = 1; m <= 60; ++m) {
    term *= -h2 / (static_cast<double>(m) * static_cast<double>(m + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
  }
  return sum;
}

// Miller's algorithm: run the three-term recurrence downward from an index
// comfortably above x, then normalize with J0(x) + 2 sum_k J_{2k}(x) = 1.
double j1_miller(double x) {
  const int start = static_cast<int>(x) + 26 + static_cast<int>(0.5 * x);
  double jp = 0.0;   // J_{n+1}
  double jc = 1e-30; // J_n, arbitrary seed scale
  double norm = 0.0; // accumulates J0 + 2 sum J_{2k}
  double j1v = 0.0;
  for (int n = start; n >= 1; --n) {
    const double jm = (2.0 * n / x) * jc - jp;  // J_{n-1}
    jp = jc;
    jc = jm;
    if (n - 1 == 1) j1v = jc;  // careful: after the update jc = J_{n-1}
    if ((n - 1) % 2 == 0) norm += ((n - 1) == 0 ? 1.0 : 2.0) * jc;
    // Rescale to dodge overflow on long recurrences.
    if (std::abs(jc) > 1e100) {
      jc *= 1e-100;
      jp *= 1e-100;
      norm *= 1e-100;
      j1v *= 1e-100;
    }
  }
  return j1v / norm;
}

}  // namespace

double bessel_j1(double x) {
  if (std::isnan(x)) return x;
  const double ax = std::abs(x);
  double v;
  if (ax <= 12.0)
    v = j1_series(ax);
  else
    v = j1_miller(ax);
  return x < 0.0 ? -v : v;  // J1 is odd
}

double semicircle_density(double x) {
  const double s = 4.0 - x * x;
  if (s <= 0.0) return 0.0;
  return std::sqrt(s) / (2.0 * std::numbers::pi);
}

double semicircle_charfn(double t) {
  const double at = std::abs(t);
  if (at < 1e-8) {
    // J1(2t)/t = 1 - t^2/2 + t^4/12 - ...
    const double t2 = t * t;
    return 1.0 - 0.5 * t2 + t2 * t2 / 12.0;
  }
  return bessel_j1(2.0 * t) / t;
}

double gaussian_charfn(double t) { return std::exp(-0.5 * t * t); }

double gaussian_trace_variance(Index d, double t) {
  return static_cast<double>(d) * (1.0 - std::exp(-t * t));
}

}  // namespace rmtlab
