#pragma once

#include "gccm/inner_opt.hpp"
#include "gccm/loss_models.hpp"
#include "gccm/quadrature.hpp"

#include <vector>

namespace gccm {

// Nodes and weights for one class expectation E_z[f(...)] over z ~ N(0,1),
// where f is evaluated on the inner solution at field omega = sigma*z + kappa.
// Weights absorb the gaussian density, so the expectation is sum_i w_i f(z_i).
//
// For losses whose inner solution is a smooth function of z the shared
// Gauss-Hermite rule is returned unchanged. Two losses need more care.
//
// The hinge inner solution is continuous but has derivative kinks where the
// optimum crosses the loss corner (omega = 1 - s*sigma^2*chi and omega = 1);
// Gauss-Legendre panels split at those points restore spectral accuracy.
//
// The smoothed step loss is
// different: for omega < 0 its inner problem can have two competing local
// maxima ("stay" near h = omega versus "jump" into the smoothing core near
// h = 0), and the attained maximum switches branches at a tie point z_c where
// v jumps by O(1). A fixed node rule straddling that jump makes every class
// integral discontinuous in (m, chi) with steps the size of a quadrature
// weight whenever z_c crosses a node, which stalls the fixed-point iteration
// and corrupts response integrals. Here the tie is located by bisection and
// the analytic pieces are integrated separately with Gauss-Legendre panels
// against the gaussian density. Panels also split at the core center
// omega = 0 and at the outer edge of the width-1/gamma force layer beyond
// it, so both sit in panel-edge node clusters and the layer is resolved
// instead of aliased.
struct ClassNodes {
    std::vector<double> z;
    std::vector<double> w;  // include the N(0,1) density; sum <= 1

    // Branch-tie data, filled when the selected branch switches inside the
    // integration window. `stay` and `jump` are the two competing inner
    // solutions evaluated at the tie. Derivatives of class integrals with
    // respect to (m, chi, s) pick up moving-boundary terms from z_c; see
    // tie_shift_* below.
    bool tie = false;
    double z_c = 0.0;
    InnerSolution stay;  // branch selected for z < z_c
    InnerSolution jump;  // branch selected for z > z_c
};

// sigma > 0, chi > 0, 0 <= s <= 1, kappa = m + y*b finite. `base` sets the
// node budget (each Legendre panel reuses base.order points).
ClassNodes class_nodes(const LossSpec& loss, double s, double sigma,
                       double chi, double kappa,
                       const GaussianQuadrature& base);

// Derivatives of the tie location implied by the tie condition
// G_jump(z_c) = G_stay(z_c), obtained from the envelope theorem (each branch
// value is stationary in v, so only the explicit parameter dependence
// survives). With g_pm = g(h) on the jump/stay branch at the tie:
//   dz_c/dm   = -1/sigma                        (the tie is a condition on omega)
//   dz_c/dchi = -(s*sigma/2) * (g_jump + g_stay)
//   dz_c/ds * s*(g_stay - g_jump)
//             = (ell(h_stay) - ell(h_jump)) / sigma
// The s-derivative is returned pre-multiplied by s*(g_stay - g_jump) because
// that product is what enters every boundary correction, and the raw
// quotient would divide by a difference that vanishes in the merged regime.
double tie_shift_m(double sigma);
double tie_shift_chi(const ClassNodes& cn, const LossSpec& loss, double s,
                     double sigma);
double tie_shift_s_scaled(const ClassNodes& cn, const LossSpec& loss,
                          double sigma);

}  // namespace gccm
