#pragma once

#include <functional>
#include <vector>

#include "boxgas/common.hpp"

namespace boxgas {

// Adaptive Gauss-Kronrod on a finite interval.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-9);

// Same, with the interval split at interior breakpoints where the integrand
// kinks (envelope knees, table nodes). Breakpoints outside (lo, hi) are
// ignored.
double integrate_split(const std::function<double(double)>& f, double lo, double hi,
                       std::vector<double> breaks, double rel_tol = 1e-9);

// Integral of f over the axis-aligned box [lo, hi] in R^d by tensor
// Gauss-Legendre after 2^levels dyadic subdivisions per axis. Exact enough for
// the piecewise-smooth radial integrands used here (d <= 3, small boxes).
double integrate_box(const std::function<double(const Vec&)>& f, const Vec& lo, const Vec& hi,
                     int d, int levels = 2);

}  // namespace boxgas
