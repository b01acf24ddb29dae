#include "gccm/sensitivity.hpp"

#include "gccm/class_nodes.hpp"

#include <cmath>
#include <sstream>

namespace gccm {

namespace {

// Per-class integrals against 1/D, D = 1 - sigma^2*chi*s*g'(h). For convex
// losses g' <= 0 so D >= 1; the smoothed family can push D toward 0.
struct ResponseIntegrals {
    double g_over_d = 0.0;     // E[g / D]
    double g2_over_d = 0.0;    // E[g^2 / D]
    double gp_over_d = 0.0;    // E[g' / D]
    double ggp_over_d = 0.0;   // E[g g' / D]
    double g2gp_over_d = 0.0;  // E[g^2 g' / D]
    bool d_near_zero = false;
};

ResponseIntegrals integrate_response(const ProblemParams& params, int y,
                                     const OrderParams& order,
                                     const ClassNodes& cn) {
    const double s = params.s_of(y);
    const double sigma = params.sigma_of(y);
    const double yb = y > 0 ? params.b : -params.b;
    const double cfac = sigma * sigma * order.chi * s;

    ResponseIntegrals acc;
    for (std::size_t i = 0; i < cn.z.size(); ++i) {
        const InnerSolution sol = solve_inner(params.loss, s, sigma, order.chi,
                                              order.m, yb, cn.z[i]);
        const double g = loss_grad(params.loss, sol.h);
        const double gp = loss_grad2(params.loss, sol.h);
        const double d = 1.0 - cfac * gp;
        if (std::fabs(d) < 1e-8) acc.d_near_zero = true;
        const double w = cn.w[i];
        acc.g_over_d += w * g / d;
        acc.g2_over_d += w * g * g / d;
        acc.gp_over_d += w * gp / d;
        acc.ggp_over_d += w * g * gp / d;
        acc.g2gp_over_d += w * g * g * gp / d;
    }
    return acc;
}

double norm_pdf(double z) {
    return std::exp(-0.5 * z * z) * 0.39894228040143267794;  // 1/sqrt(2 pi)
}

}  // namespace

SensitivityBundle compute_sensitivity(const ProblemParams& params,
                                      const EOSSolution& sol,
                                      const GaussianQuadrature& quad) {
    validate(params);
    if (!sol.converged)
        throw std::invalid_argument(
            "compute_sensitivity requires a converged EOS solution");
    // The response integrals need g' as a function: a kink in g (hinge) puts
    // a point mass into g' that node-based quadrature cannot see, and the
    // 0-1 loss has no g at all. Only C^2 families are supported.
    switch (params.loss.family) {
        case LossFamily::ce_logistic:
        case LossFamily::exponential:
        case LossFamily::smoothed_zero_one: break;
        default:
            throw UnsupportedLossOperation(
                "sensitivity analysis needs a twice-differentiable loss "
                "(ce_logistic, exponential or smoothed_zero_one)");
    }

    const OrderParams& op = sol.order;
    const double alpha = params.alpha;

    SensitivityBundle out;
    out.t_mat.setZero();
    out.c_vec.setZero();
    for (int y : {+1, -1}) {
        const double r = params.r_of(y);
        const double s = params.s_of(y);
        const double sigma = params.sigma_of(y);
        const double s2 = sigma * sigma;
        const double kappa = op.m + (y > 0 ? params.b : -params.b);
        const ClassNodes cn =
            class_nodes(params.loss, s, sigma, op.chi, kappa, quad);
        const ResponseIntegrals ri = integrate_response(params, y, op, cn);
        out.d_near_zero = out.d_near_zero || ri.d_near_zero;

        out.c_vec(0) += alpha * y * r * ri.g_over_d;
        out.c_vec(1) += 2.0 * alpha * y * r * s2 * s * ri.g2_over_d;
        out.t_mat(0, 0) += alpha * r * s * ri.gp_over_d;
        out.t_mat(0, 1) += alpha * r * s2 * s * s * ri.ggp_over_d;
        out.t_mat(1, 1) += 2.0 * alpha * r * s2 * s2 * s * s * s * ri.g2gp_over_d;

        // Where the selected inner branch switches (smoothed step loss), the
        // class integrands jump at z_c, so the true parameter derivatives of
        // m_tilde = alpha*sum r*s*E[g] and chi_tilde = alpha*sum r*s^2*
        // sigma^2*E[g^2] carry moving-boundary terms
        //     [integrand]_stay-minus-jump * pdf(z_c) * dz_c/dparam
        // on top of the per-branch response integrals above. dz_c/dparam
        // follows from the tie condition via the envelope theorem (see
        // class_nodes.hpp). In the merged regime the branch values coincide
        // and every correction vanishes smoothly.
        if (cn.tie) {
            const double g_stay = loss_grad(params.loss, cn.stay.h);
            const double g_jump = loss_grad(params.loss, cn.jump.h);
            const double dg = g_stay - g_jump;
            const double sum_g = g_stay + g_jump;
            const double j = norm_pdf(cn.z_c);
            const double zm = tie_shift_m(sigma);
            const double zchi = tie_shift_chi(cn, params.loss, s, sigma);
            const double zs = tie_shift_s_scaled(cn, params.loss, sigma);

            out.c_vec(0) += alpha * y * r * j * zs;
            out.c_vec(1) += alpha * y * r * s2 * s * sum_g * j * zs;
            out.t_mat(0, 0) += alpha * r * s * dg * j * zm;
            out.t_mat(0, 1) += alpha * r * s * dg * j * zchi;
            out.t_mat(1, 1) += alpha * r * s2 * s * s * sum_g * dg * j * zchi;
        }
    }
    out.t_mat(1, 0) = 2.0 * out.t_mat(0, 1);

    const double qt = op.q_tilde;
    const double qt3 = qt * qt * qt;
    out.t_tilde << op.chi_tilde / qt3, -0.5 * op.m_tilde / qt3,
                   -op.m_tilde / qt3, -0.5 / qt3;

    out.a_mat = out.t_tilde * out.t_mat;
    out.b_vec = out.t_tilde * out.c_vec;

    const Eigen::Matrix2d lhs = Eigen::Matrix2d::Identity() - out.a_mat;
    const double det = lhs.determinant();
    const double scale = lhs.cwiseAbs().maxCoeff();
    if (std::fabs(det) <= 1e-14 * std::max(scale * scale, 1e-300)) {
        std::ostringstream msg;
        msg << "sensitivity linear solve is singular: det(I - A) = " << det
            << ", condition estimate >= " << scale * scale / std::fabs(det);
        throw std::runtime_error(msg.str());
    }
    const Eigen::Vector2d omega_dot = lhs.inverse() * out.b_vec;
    out.dm_ds = omega_dot(0);
    out.dchi_ds = omega_dot(1);
    return out;
}

IdentityCheck check_extremum_identity(const ProblemParams& params,
                                      const EOSSolution& sol,
                                      const GaussianQuadrature& quad) {
    if (std::fabs(params.s_plus - 0.5) > 1e-12)
        throw std::invalid_argument(
            "extremum identity requires the symmetric weight s_plus = 1/2");
    if (std::fabs(params.b) > 1e-12)
        throw std::invalid_argument("extremum identity requires b = 0");
    if (std::fabs(params.sigma_plus - params.sigma_minus) >
        1e-12 * std::max(params.sigma_plus, params.sigma_minus))
        throw std::invalid_argument(
            "extremum identity requires equal class variances");

    const SensitivityBundle bundle = compute_sensitivity(params, sol, quad);
    const double a12 = bundle.a_mat(0, 1);
    const double one_minus_a22 = 1.0 - bundle.a_mat(1, 1);
    if (a12 == 0.0 || one_minus_a22 == 0.0) {
        std::ostringstream msg;
        msg << "extremum identity denominators degenerate: A12 = " << a12
            << ", 1 - A22 = " << one_minus_a22 << ", b = ["
            << bundle.b_vec(0) << ", " << bundle.b_vec(1) << "]";
        throw std::runtime_error(msg.str());
    }

    IdentityCheck chk;
    chk.lhs = bundle.b_vec(0) / a12;
    chk.rhs = -bundle.b_vec(1) / one_minus_a22;
    chk.target = (2.0 * params.r_plus - 1.0) / (sol.order.q_tilde * 0.5);
    return chk;
}

double fd_dm_ds(const ProblemParams& params, const EOSSolution& sol,
                double delta, const GaussianQuadrature& quad,
                const EOSOptions& opts) {
    if (!(delta > 0.0))
        throw std::invalid_argument("fd_dm_ds requires delta > 0");
    ProblemParams up = params, down = params;
    up.s_plus = params.s_plus + delta;
    down.s_plus = params.s_plus - delta;
    if (up.s_plus > 1.0 || down.s_plus < 0.0)
        throw std::invalid_argument("fd_dm_ds: s_plus +/- delta leaves [0, 1]");

    const EOSSolution sol_up = solve_eos(up, sol.order, opts, quad);
    const EOSSolution sol_down = solve_eos(down, sol.order, opts, quad);
    if (!sol_up.converged || !sol_down.converged)
        throw std::runtime_error("fd_dm_ds: perturbed EOS solve did not converge");
    return (sol_up.order.m - sol_down.order.m) / (2.0 * delta);
}

}  // namespace gccm
