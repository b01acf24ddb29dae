#pragma once

#include "gccm/inner_opt.hpp"
#include "gccm/loss_models.hpp"
#include "gccm/quadrature.hpp"

#include <limits>
#include <utility>

namespace gccm {

// Model + training-protocol parameters for the two-class gaussian mixture
// with class-wise loss reweighting. Class +1 carries fraction r_plus of the
// data, noise scale sigma_plus, loss weight s_plus; class -1 gets the
// complements (weights are normalized: s_plus + s_minus = 1).
struct ProblemParams {
    double alpha = 20.0;       // samples per dimension, M/N
    double r_plus = 0.5;       // fraction of +1 samples
    double sigma_plus = 0.6;   // class-conditional noise scales
    double sigma_minus = 0.6;
    double s_plus = 0.5;       // loss weight on the +1 class
    double b = 0.0;            // classifier bias
    LossSpec loss{};

    double r_minus() const { return 1.0 - r_plus; }
    double s_minus() const { return 1.0 - s_plus; }
    double r_of(int y) const { return y > 0 ? r_plus : r_minus(); }
    double s_of(int y) const { return y > 0 ? s_plus : s_minus(); }
    double sigma_of(int y) const { return y > 0 ? sigma_plus : sigma_minus; }
};

// Throws std::invalid_argument on out-of-range parameters.
void validate(const ProblemParams& params);

// Order parameters of the fixed point: m is the teacher overlap w.w0/N,
// chi the zero-temperature susceptibility, (m_tilde, chi_tilde, q_tilde)
// their conjugates.
struct OrderParams {
    double m = 0.5;
    double chi = 1.0;
    double m_tilde = 0.0;
    double chi_tilde = 0.0;
    double q_tilde = 0.0;
};

struct EOSSolution {
    OrderParams order;
    double energy = 0.0;  // training energy per dimension at the fixed point
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

struct EOSOptions {
    double damping = 0.5;  // nominal under-relaxation factor
    double tol = 1e-9;     // sup-norm tolerance on the raw fixed-point residual
    int max_iter = 5000;
};

// One evaluation of the right-hand side: given (m, chi), integrate the inner
// solutions over both classes and return (m_tilde, chi_tilde).
std::pair<double, double> eos_rhs(const ProblemParams& params, double m,
                                  double chi, const GaussianQuadrature& quad);

// Damped fixed-point iteration on (m, chi):
//   q_tilde = sqrt(m_tilde^2 + chi_tilde),  m <- m_tilde/q_tilde,
//   chi <- 1/q_tilde,
// with adaptive halving of the damping factor when the residual grows.
// Non-convergence is reported through the flags, never as an exception.
EOSSolution solve_eos(const ProblemParams& params, const OrderParams& init,
                      const EOSOptions& opts, const GaussianQuadrature& quad);

// Convenience overload with the default initial point (m = 0.5, chi = 1).
EOSSolution solve_eos(const ProblemParams& params, const GaussianQuadrature& quad,
                      const EOSOptions& opts = {});

// Training energy per dimension for arbitrary (not necessarily stationary)
// order parameters, from the full extremization functional.
double energy(const ProblemParams& params, const OrderParams& order,
              const GaussianQuadrature& quad);

}  // namespace gccm
