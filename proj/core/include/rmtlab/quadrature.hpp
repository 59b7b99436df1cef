// Adaptive Simpson quadrature, used for the closed-form cross checks and the
// two-dimensional Gaussian pair average.
#pragma once

#include <functional>

namespace rmtlab {

// Classic recursive adaptive Simpson with Richardson correction. tol is an
// absolute target for the whole interval; max_depth caps the recursion.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 52);

}  // namespace rmtlab
