// Closed-form spectral references: Wigner semicircle density and its
// characteristic function, Bessel J1, and the diagonal Gaussian model's exact
// moments.
#pragma once

#include "rmtlab/linalg.hpp"

namespace rmtlab {

// J1 via the ascending power series for |x| <= 12 and Miller's downward
// recurrence (normalized by J0 + 2 sum J_{2k} = 1) beyond.
double bessel_j1(double x);

// Semicircle density (1/2pi) sqrt(4 - x^2) on [-2, 2], zero outside.
double semicircle_density(double x);

// Characteristic function of the semicircle law: J1(2t)/t, limit 1 at t = 0.
double semicircle_charfn(double t);

// iid N(0,1) eigenvalue model: (1/d) E tr U_t = exp(-t^2/2).
double gaussian_charfn(double t);

// iid N(0,1) eigenvalue model: Var tr U_t = d (1 - exp(-t^2)).
double gaussian_trace_variance(Index d, double t);

}  // namespace rmtlab
