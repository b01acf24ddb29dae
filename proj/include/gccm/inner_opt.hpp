#pragma once

#include "gccm/loss_models.hpp"

#include <stdexcept>

namespace gccm {

// Single-sample variational problem at the core of the saddle-point
// equations. For one gaussian node z and one class (effective noise scale
// sigma, weight s, signed bias yb), maximize over v
//
//     G(v) = -v^2/2 - s * ell(h),    h = omega + a*v,
//     omega = sigma*z + m + yb,      a = sigma*sqrt(chi).
//
// The stationarity condition is v = s*a*g(h) with g = -ell'; in h-space that
// is phi(h) = h - omega - c*g(h) = 0 with c = s*sigma^2*chi.
struct InnerSolution {
    double v = 0.0;        // optimal response
    double h = 0.0;        // effective field at the optimum, h = omega + a*v
    double g_value = 0.0;  // attained maximum G(v)
};

// Raised if a root-finding bracket fails to collapse within the iteration
// cap; carries the bracket endpoints for diagnosis.
struct InnerConvergenceError : std::runtime_error {
    double lo, hi;
    InnerConvergenceError(const std::string& what, double lo_, double hi_)
        : std::runtime_error(what + " [bracket " + std::to_string(lo_) + ", " +
                             std::to_string(hi_) + "]"),
          lo(lo_),
          hi(hi_) {}
};

// General solver. Convex losses use a safeguarded Newton iteration on the
// monotone phi; smoothed_zero_one enumerates stationary points (up to three
// for omega < 0) and compares attained G; zero_one dispatches to the closed
// form below. Preconditions: sigma > 0, chi > 0, 0 <= s <= 1, all finite.
InnerSolution solve_inner(const LossSpec& loss, double s, double sigma,
                          double chi, double m, double yb, double z);

// Closed form for the step loss. With h0 = sigma*z + m + yb: if h0 > 0 the
// sample is already correct (v = 0, G = 0); if h0 < 0 it either jumps exactly
// to the decision boundary (v = -h0/a, cost -h0^2/(2*sigma^2*chi)) or stays
// misclassified (v = 0, cost -s), whichever costs less; ties stay put.
InnerSolution solve_inner_zero_one(double s, double sigma, double chi,
                                   double m, double yb, double z);

}  // namespace gccm
