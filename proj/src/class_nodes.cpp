#include "gccm/class_nodes.hpp"

#include <algorithm>
#include <cmath>

namespace gccm {

namespace {

// Beyond |z| = 12 the gaussian mass is ~2e-33 per tail, far below every
// tolerance in the project; Legendre panels integrate on the clipped window.
constexpr double kZMax = 12.0;

double norm_pdf(double z) {
    return std::exp(-0.5 * z * z) * 0.39894228040143267794;  // 1/sqrt(2 pi)
}

// Selected-branch indicator. The stay branch keeps h glued to omega (the
// force is exponentially small there) while the jump branch pulls h next to
// the smoothing core at 0, so for omega < 0 the midpoint omega/2 separates
// them cleanly. For omega >= 0 there is a single smooth branch that
// continues the jump side.
bool jumped(const LossSpec& loss, double s, double sigma, double chi,
            double kappa, double z) {
    const double omega = sigma * z + kappa;
    if (omega >= 0.0) return true;
    const InnerSolution sol = solve_inner(loss, s, sigma, chi, kappa, 0.0, z);
    return sol.h > 0.5 * omega;
}

void append_panel(ClassNodes& out, const LegendreRule& rule, double lo,
                  double hi) {
    const double half = 0.5 * (hi - lo);
    if (!(half > 0.0)) return;
    const double mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double zi = mid + half * rule.nodes[i];
        out.z.push_back(zi);
        out.w.push_back(rule.weights[i] * half * norm_pdf(zi));
    }
}

}  // namespace

ClassNodes class_nodes(const LossSpec& loss, double s, double sigma,
                       double chi, double kappa,
                       const GaussianQuadrature& base) {
    ClassNodes out;

    if (loss.family == LossFamily::hinge && s > 0.0) {
        // The hinge inner solution is piecewise linear in omega: a constant
        // force plateau v = s*a below omega = 1 - s*sigma^2*chi, the optimum
        // pinned at the loss corner h = 1 in between, and v = 0 above
        // omega = 1. v is continuous (no tie data), but the two derivative
        // kinks reduce a straddling Hermite rule to algebraic convergence,
        // so split Legendre panels exactly at them.
        const double z_plateau =
            (1.0 - s * sigma * sigma * chi - kappa) / sigma;
        const double z_wall = (1.0 - kappa) / sigma;  // z_plateau < z_wall
        double cuts[4];
        int n_cuts = 0;
        cuts[n_cuts++] = -kZMax;
        if (z_plateau > -kZMax && z_plateau < kZMax) cuts[n_cuts++] = z_plateau;
        if (z_wall > -kZMax && z_wall < kZMax) cuts[n_cuts++] = z_wall;
        cuts[n_cuts++] = kZMax;
        if (n_cuts > 2) {
            const LegendreRule& rule = shared_legendre(base.order);
            out.z.reserve(std::size_t(n_cuts - 1) * rule.nodes.size());
            out.w.reserve(std::size_t(n_cuts - 1) * rule.nodes.size());
            for (int k = 0; k + 1 < n_cuts; ++k)
                append_panel(out, rule, cuts[k], cuts[k + 1]);
            return out;
        }
        // Both kinks outside the window: one smooth piece, Hermite is best.
        out.z = base.nodes;
        out.w = base.weights;
        return out;
    }

    const double z0 = -kappa / sigma;  // omega crosses 0 here
    if (loss.family != LossFamily::smoothed_zero_one || s == 0.0 ||
        z0 <= -kZMax) {
        // Single smooth branch over the whole window (or no force at all):
        // the Hermite rule is already the right tool.
        out.z = base.nodes;
        out.w = base.weights;
        return out;
    }

    // Look for a branch switch on the omega < 0 part of the window. The jump
    // region, when present, is an interval of omega abutting 0 from below, so
    // comparing the indicator at the window ends is enough.
    const double z_hi = std::min(z0, kZMax);
    const bool j_hi =
        z0 <= kZMax ? true : jumped(loss, s, sigma, chi, kappa, kZMax);
    const bool j_lo = jumped(loss, s, sigma, chi, kappa, -kZMax);

    if (!j_lo && j_hi) {
        double lo = -kZMax, hi = z_hi;  // indicator false at lo, true at hi
        for (int it = 0; it < 90 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (jumped(loss, s, sigma, chi, kappa, mid))
                hi = mid;
            else
                lo = mid;
        }
        out.tie = true;
        out.z_c = 0.5 * (lo + hi);
        const double delta = 1e-9 * std::max(1.0, std::fabs(out.z_c));
        out.stay = solve_inner(loss, s, sigma, chi, kappa, 0.0, out.z_c - delta);
        out.jump = solve_inner(loss, s, sigma, chi, kappa, 0.0, out.z_c + delta);
    }

    // Outer edge of the force layer. Past omega = 0 the force keeps a
    // 1/gamma-wide plateau structure (response ratios like g'/D sit at -1/c
    // while c*g' dominates) that ends near gamma*h = log(4*c*gamma^2)/2; a
    // cut there keeps the transition inside a panel-edge cluster instead of
    // the sparse interior of a long panel.
    const double c = s * sigma * sigma * chi;
    const double u_core =
        0.5 * std::log(4.0 * std::max(c, 1.0) * loss.gamma * loss.gamma) + 4.0;
    const double z_layer = z0 + u_core / (loss.gamma * sigma);

    double cuts[5];
    int n_cuts = 0;
    cuts[n_cuts++] = -kZMax;
    if (out.tie) cuts[n_cuts++] = out.z_c;
    if (z0 < kZMax) {
        const double prev = cuts[n_cuts - 1];
        cuts[n_cuts++] = std::max(z0, prev);
        if (z_layer < kZMax) {
            const double prev2 = cuts[n_cuts - 1];
            cuts[n_cuts++] = std::max(z_layer, prev2);
        }
    }
    cuts[n_cuts++] = kZMax;

    const LegendreRule& rule = shared_legendre(base.order);
    out.z.reserve(std::size_t(n_cuts - 1) * rule.nodes.size());
    out.w.reserve(std::size_t(n_cuts - 1) * rule.nodes.size());
    for (int k = 0; k + 1 < n_cuts; ++k) append_panel(out, rule, cuts[k], cuts[k + 1]);
    return out;
}

double tie_shift_m(double sigma) { return -1.0 / sigma; }

double tie_shift_chi(const ClassNodes& cn, const LossSpec& loss, double s,
                     double sigma) {
    const double g_stay = loss_grad(loss, cn.stay.h);
    const double g_jump = loss_grad(loss, cn.jump.h);
    return -0.5 * s * sigma * (g_stay + g_jump);
}

double tie_shift_s_scaled(const ClassNodes& cn, const LossSpec& loss,
                          double sigma) {
    const double l_stay = loss_value(loss, cn.stay.h);
    const double l_jump = loss_value(loss, cn.jump.h);
    return (l_stay - l_jump) / sigma;
}

}  // namespace gccm
