#pragma once

#include "gccm/eos_solver.hpp"

#include <Eigen/Dense>

namespace gccm {

// Linear response of the fixed point to the class weight s_plus, obtained by
// implicit differentiation of the self-consistency maps. With F the map
// (m, chi) -> (m_tilde, chi_tilde) and f the outer map (m_tilde, chi_tilde)
// -> (m, chi), the total derivative solves
//
//   (I - t_tilde * t_mat) * [dm_ds, dchi_ds]^T = t_tilde * c_vec,
//
// where t_tilde = Jacobian of f, t_mat = Jacobian of F in (m, chi), and
// c_vec = explicit partial of F in s_plus (the class weights move as
// ds_y/ds_plus = y).
struct SensitivityBundle {
    Eigen::Matrix2d t_tilde;  // Jacobian of the conjugate -> order-parameter map
    Eigen::Matrix2d t_mat;    // Jacobian of the rhs in (m, chi)
    Eigen::Vector2d c_vec;    // explicit s_plus-derivative of the rhs
    Eigen::Matrix2d a_mat;    // t_tilde * t_mat
    Eigen::Vector2d b_vec;    // t_tilde * c_vec
    double dm_ds = 0.0;
    double dchi_ds = 0.0;
    // Set when 1 - sigma^2*chi*s*g'(h) came within 1e-8 of zero at some node
    // (possible for the non-convex smoothed loss near its branch transition);
    // the integrals are then formally defined but numerically delicate.
    bool d_near_zero = false;
};

// Preconditions: sol.converged and a differentiable loss; violations throw
// std::invalid_argument / UnsupportedLossOperation. A numerically singular
// (I - a_mat) throws std::runtime_error carrying a condition estimate.
SensitivityBundle compute_sensitivity(const ProblemParams& params,
                                      const EOSSolution& sol,
                                      const GaussianQuadrature& quad);

// At the symmetric point (s_plus = 1/2, b = 0, sigma_plus = sigma_minus) the
// response collapses: lhs = b1/A12 and rhs = -b2/(1 - A22) both reduce to
// target = (2*r_plus - 1)/(q_tilde * s). Their agreement certifies that
// dm/ds_plus = 0 there independently of loss and imbalance.
struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double target = 0.0;
};

IdentityCheck check_extremum_identity(const ProblemParams& params,
                                      const EOSSolution& sol,
                                      const GaussianQuadrature& quad);

// Central finite difference of m with respect to s_plus, re-solving the EOS
// at s_plus +/- delta (warm-started from `sol`). The independent cross-check
// for compute_sensitivity.
double fd_dm_ds(const ProblemParams& params, const EOSSolution& sol,
                double delta, const GaussianQuadrature& quad,
                const EOSOptions& opts = {.damping = 0.5, .tol = 1e-12,
                                          .max_iter = 20000});

}  // namespace gccm
