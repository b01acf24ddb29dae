#include "gccm/eos_solver.hpp"

#include "gccm/class_nodes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gccm {

void validate(const ProblemParams& params) {
    if (!(params.alpha > 0.0) || !std::isfinite(params.alpha))
        throw std::invalid_argument("alpha must be positive");
    if (!(params.r_plus >= 0.0 && params.r_plus <= 1.0))
        throw std::invalid_argument("r_plus must lie in [0, 1]");
    if (!(params.sigma_plus > 0.0) || !(params.sigma_minus > 0.0))
        throw std::invalid_argument("sigma_plus and sigma_minus must be positive");
    if (!(params.s_plus >= 0.0 && params.s_plus <= 1.0))
        throw std::invalid_argument("s_plus must lie in [0, 1]");
    if (!std::isfinite(params.b))
        throw std::invalid_argument("b must be finite");
    if (params.loss.family == LossFamily::smoothed_zero_one &&
        !(params.loss.gamma > 0.0))
        throw std::invalid_argument("smoothed_zero_one requires gamma > 0");
}

namespace {

// Per-class integrals of the inner solution: I1 = E_z[v], I2 = E_z[v^2],
// IG = E_z[G]. Everything downstream (rhs, energy) is built from these.
struct ClassIntegrals {
    double i_v = 0.0, i_v2 = 0.0, i_g = 0.0;
};

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) * 0.39894228040143267794;  // 1/sqrt(2 pi)
}
double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Zero-one loss: v(z) jumps between 0 and -omega/(sigma sqrt(chi)) at the
// edges of omega in (-sigma sqrt(2 s chi), 0), so node-based quadrature makes
// the class expectations discontinuous in (m, chi) with steps the size of a
// quadrature weight, and the fixed-point iteration stalls at that noise
// floor. Over the jump window the expectations are truncated Gaussian
// moments, so evaluate them exactly instead.
ClassIntegrals zero_one_integrals(const ProblemParams& params, int y, double m,
                                  double chi) {
    const double s = params.s_of(y);
    const double sigma = params.sigma_of(y);
    const double kappa = m + (y > 0 ? params.b : -params.b);
    ClassIntegrals acc;
    if (s == 0.0) return acc;

    const double theta = sigma * std::sqrt(2.0 * s * chi);
    const double a = (-theta - kappa) / sigma;  // omega = -theta
    const double b = -kappa / sigma;            // omega = 0
    const double pa = norm_pdf(a), pb = norm_pdf(b);
    const double cum_a = norm_cdf(a);
    const double mass = norm_cdf(b) - cum_a;

    // Moments of omega = sigma z + kappa over z in (a, b).
    const double m1 = sigma * (pa - pb) + kappa * mass;
    const double zz = mass - (b * pb - a * pa);  // int z^2 phi
    const double m2 =
        sigma * sigma * zz + 2.0 * sigma * kappa * (pa - pb) + kappa * kappa * mass;

    acc.i_v = -m1 / (sigma * std::sqrt(chi));
    acc.i_v2 = m2 / (sigma * sigma * chi);
    // G = -v^2/2 inside the window, -s on the untouched misclassified side.
    acc.i_g = -0.5 * acc.i_v2 - s * cum_a;
    return acc;
}

ClassIntegrals integrate_class(const ProblemParams& params, int y, double m,
                               double chi, const GaussianQuadrature& quad) {
    if (params.loss.family == LossFamily::zero_one)
        return zero_one_integrals(params, y, m, chi);
    const double s = params.s_of(y);
    const double sigma = params.sigma_of(y);
    const double yb = y > 0 ? params.b : -params.b;
    // The smoothed step loss needs branch-aware nodes (see class_nodes.hpp);
    // for the other families this returns the Hermite rule unchanged.
    const ClassNodes cn = class_nodes(params.loss, s, sigma, chi, m + yb, quad);
    ClassIntegrals acc;
    for (std::size_t i = 0; i < cn.z.size(); ++i) {
        const InnerSolution sol =
            solve_inner(params.loss, s, sigma, chi, m, yb, cn.z[i]);
        const double w = cn.w[i];
        acc.i_v += w * sol.v;
        acc.i_v2 += w * sol.v * sol.v;
        acc.i_g += w * sol.g_value;
    }
    return acc;
}

}  // namespace

std::pair<double, double> eos_rhs(const ProblemParams& params, double m,
                                  double chi, const GaussianQuadrature& quad) {
    validate(params);
    if (!(chi > 0.0))
        throw std::invalid_argument("eos_rhs: chi must be positive");

    const ClassIntegrals plus = integrate_class(params, +1, m, chi, quad);
    const ClassIntegrals minus = integrate_class(params, -1, m, chi, quad);

    const double sqrt_chi = std::sqrt(chi);
    const double m_tilde =
        params.alpha / sqrt_chi *
        (params.r_plus / params.sigma_plus * plus.i_v +
         params.r_minus() / params.sigma_minus * minus.i_v);
    const double chi_tilde =
        params.alpha / chi *
        (params.r_plus * plus.i_v2 + params.r_minus() * minus.i_v2);
    return {m_tilde, chi_tilde};
}

EOSSolution solve_eos(const ProblemParams& params, const OrderParams& init,
                      const EOSOptions& opts, const GaussianQuadrature& quad) {
    validate(params);
    EOSSolution sol;
    double m = init.m;
    double chi = std::max(init.chi, 1e-12);
    double m_tilde = 0.0, chi_tilde = 0.0, q_tilde = 0.0;

    double step = opts.damping;
    double prev_residual = std::numeric_limits<double>::infinity();

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        const auto [mt, ct] = eos_rhs(params, m, chi, quad);
        q_tilde = std::sqrt(mt * mt + ct);
        if (!(q_tilde > 1e-14) || !std::isfinite(q_tilde)) {
            // Degenerate conjugates (e.g. the loss floor was reached and no
            // sample exerts force); report as non-converged data.
            m_tilde = mt;
            chi_tilde = ct;
            break;
        }
        const double m_new = mt / q_tilde;
        const double chi_new = 1.0 / q_tilde;
        const double residual =
            std::max(std::fabs(m_new - m), std::fabs(chi_new - chi));

        m_tilde = mt;
        chi_tilde = ct;
        sol.residual = residual;
        if (residual <= opts.tol) {
            sol.converged = true;
            ++it;
            break;
        }

        // Under-relaxation with adaptive halving: shrink the step while the
        // raw residual grows, relax back toward the nominal damping once it
        // shrinks again.
        if (residual > prev_residual)
            step = std::max(step * 0.5, opts.damping / 64.0);
        else
            step = std::min(opts.damping, step * 1.5);
        prev_residual = residual;

        m += step * (m_new - m);
        chi += step * (chi_new - chi);
        chi = std::max(chi, 1e-12);
    }

    sol.iterations = it;
    sol.order.m = m;
    sol.order.chi = chi;
    sol.order.m_tilde = m_tilde;
    sol.order.chi_tilde = chi_tilde;
    sol.order.q_tilde = q_tilde;
    sol.energy = energy(params, sol.order, quad);
    return sol;
}

EOSSolution solve_eos(const ProblemParams& params, const GaussianQuadrature& quad,
                      const EOSOptions& opts) {
    return solve_eos(params, OrderParams{}, opts, quad);
}

double energy(const ProblemParams& params, const OrderParams& order,
              const GaussianQuadrature& quad) {
    validate(params);
    const double m = order.m, chi = order.chi;
    const double mt = order.m_tilde, ct = order.chi_tilde, qt = order.q_tilde;

    const ClassIntegrals plus = integrate_class(params, +1, m, chi, quad);
    const ClassIntegrals minus = integrate_class(params, -1, m, chi, quad);
    const double g_term =
        params.alpha * (params.r_plus * plus.i_g + params.r_minus() * minus.i_g);

    // Extremization functional at general order parameters; at a fixed point
    // the first four terms collapse to -chi*chi_tilde/2.
    return -0.5 * qt + 0.5 * ct * chi + mt * m -
           (mt * mt + ct) / (2.0 * qt) - g_term;
}

}  // namespace gccm
