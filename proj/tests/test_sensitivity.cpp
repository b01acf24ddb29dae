// ============================================================================
// test_sensitivity.cpp
// Linear response of the saddle point to the class weight
// ============================================================================
//
// PURPOSE: The analytic derivative dm/ds_plus is the centerpiece of the
// reweighting analysis, so it is validated against re-solving the saddle
// point at perturbed weights (a fully independent finite-difference oracle)
// before the extremum statement is trusted. Then the closed-form identity
// behind "no reweighting is optimal" is checked at the symmetric point:
// across imbalance ratios, across the smoothing parameter, and across loss
// families; and the symmetric balanced point is pinned to zero response.
// ============================================================================

#include "gccm/eos_solver.hpp"
#include "gccm/quadrature.hpp"
#include "gccm/sensitivity.hpp"

#include "test_common.hpp"

#include <cmath>
#include <stdexcept>

namespace {

gccm::ProblemParams make_params(const char* loss, double r_plus, double s_plus,
                                double b, double sp = 0.6, double sm = 0.6,
                                double gamma = 200.0) {
    gccm::ProblemParams p;
    p.loss = gccm::make_loss(loss, gamma);
    p.alpha = 20.0;
    p.r_plus = r_plus;
    p.s_plus = s_plus;
    p.b = b;
    p.sigma_plus = sp;
    p.sigma_minus = sm;
    return p;
}

gccm::EOSSolution tight_solve(const gccm::ProblemParams& p,
                              const gccm::GaussianQuadrature& quad) {
    const auto sol = gccm::solve_eos(p, quad, {0.5, 3e-12, 50000});
    REQUIRE(sol.converged);
    return sol;
}

// --------------------------------------------------------------------------
// Fully symmetric problem: zero response by symmetry
void test_balanced_point_has_zero_response() {
    const auto& quad = gccm::shared_quadrature(100);
    const auto p = make_params("ce_logistic", 0.5, 0.5, 0.0);
    const auto sol = tight_solve(p, quad);
    const auto bundle = gccm::compute_sensitivity(p, sol, quad);
    REQUIRE_MSG(std::fabs(bundle.b_vec(0)) <= 1e-10, "b1 = %.3e",
                bundle.b_vec(0));
    REQUIRE_MSG(std::fabs(bundle.b_vec(1)) <= 1e-10, "b2 = %.3e",
                bundle.b_vec(1));
    REQUIRE(std::fabs(bundle.dm_ds) <= 1e-10);
    REQUIRE(std::fabs(bundle.dchi_ds) <= 1e-10);
    REQUIRE(!bundle.d_near_zero);
}

// --------------------------------------------------------------------------
// Finite-difference oracle for the analytic derivative, away from symmetry
void test_fd_oracle() {
    const auto& quad = gccm::shared_quadrature(100);
    struct Case {
        const char* loss;
        double r, s, b, sp, sm;
    };
    const Case cases[] = {
        {"ce_logistic", 0.2, 0.3, 0.0, 0.6, 0.6},
        {"ce_logistic", 0.2, 0.7, -0.4, 0.6, 0.6},
        {"ce_logistic", 0.35, 0.5, 0.2, 1.0, 0.5},
        {"exponential", 0.2, 0.4, 0.0, 0.6, 0.6},
        {"smoothed_zero_one", 0.2, 0.35, 0.0, 0.6, 0.6},
    };
    for (const Case& c : cases) {
        const auto p = make_params(c.loss, c.r, c.s, c.b, c.sp, c.sm);
        const auto sol = tight_solve(p, quad);
        const auto bundle = gccm::compute_sensitivity(p, sol, quad);
        const double fd =
            gccm::fd_dm_ds(p, sol, 1e-3, quad, {0.5, 3e-12, 50000});
        const double rel = rel_err(bundle.dm_ds, fd);
        REQUIRE_MSG(rel <= 1e-3,
                    "%s r=%.2f s=%.2f b=%.2f: analytic %.10g fd %.10g rel %.2e",
                    c.loss, c.r, c.s, c.b, bundle.dm_ds, fd, rel);
    }
}

// dchi/ds against finite differences as well (re-solve and track chi).
void test_fd_oracle_chi() {
    const auto& quad = gccm::shared_quadrature(100);
    const auto p = make_params("ce_logistic", 0.2, 0.35, 0.1);
    const auto sol = tight_solve(p, quad);
    const auto bundle = gccm::compute_sensitivity(p, sol, quad);
    const double delta = 1e-3;
    auto chi_at = [&](double s) {
        auto q = p;
        q.s_plus = s;
        return tight_solve(q, quad).order.chi;
    };
    const double fd =
        (chi_at(p.s_plus + delta) - chi_at(p.s_plus - delta)) / (2 * delta);
    REQUIRE_MSG(rel_err(bundle.dchi_ds, fd) <= 1e-3,
                "dchi/ds analytic %.10g fd %.10g", bundle.dchi_ds, fd);
}

// --------------------------------------------------------------------------
// Extremum identity at the symmetric point s = 1/2, b = 0
void test_extremum_identity_across_imbalance() {
    const auto& quad = gccm::shared_quadrature(100);
    for (double r : {0.5, 0.35, 0.2, 0.1}) {
        const auto p = make_params("ce_logistic", r, 0.5, 0.0);
        const auto sol = tight_solve(p, quad);
        const auto chk = gccm::check_extremum_identity(p, sol, quad);
        REQUIRE_MSG(rel_err(chk.lhs, chk.rhs) <= 1e-8,
                    "r=%.2f lhs %.12g rhs %.12g", r, chk.lhs, chk.rhs);
        REQUIRE_MSG(rel_err(chk.rhs, chk.target) <= 1e-8,
                    "r=%.2f rhs %.12g target %.12g", r, chk.rhs, chk.target);
        // Both routes say dm/ds = 0 at the symmetric point.
        const auto bundle = gccm::compute_sensitivity(p, sol, quad);
        REQUIRE_MSG(std::fabs(bundle.dm_ds) <= 1e-8, "r=%.2f dm_ds %.3e", r,
                    bundle.dm_ds);
    }
}

// The identity is a structural statement: it must not care about the
// smoothing scale or the loss family.
void test_identity_gamma_and_loss_independence() {
    const auto& quad = gccm::shared_quadrature(100);
    for (double gamma : {50.0, 158.0, 500.0}) {
        const auto p = make_params("smoothed_zero_one", 0.2, 0.5, 0.0, 0.6, 0.6,
                                   gamma);
        const auto sol = tight_solve(p, quad);
        const auto chk = gccm::check_extremum_identity(p, sol, quad);
        REQUIRE_MSG(rel_err(chk.lhs, chk.target) <= 1e-6,
                    "gamma=%g lhs %.12g target %.12g", gamma, chk.lhs,
                    chk.target);
        REQUIRE_MSG(rel_err(chk.rhs, chk.target) <= 1e-6,
                    "gamma=%g rhs %.12g target %.12g", gamma, chk.rhs,
                    chk.target);
    }
    const auto p = make_params("exponential", 0.3, 0.5, 0.0);
    const auto sol = tight_solve(p, quad);
    const auto chk = gccm::check_extremum_identity(p, sol, quad);
    REQUIRE(rel_err(chk.lhs, chk.target) <= 1e-8);
    REQUIRE(rel_err(chk.rhs, chk.target) <= 1e-8);
}

// --------------------------------------------------------------------------
// Preconditions and error paths
void test_error_paths() {
    const auto& quad = gccm::shared_quadrature(64);
    const auto p = make_params("ce_logistic", 0.2, 0.3, 0.0);

    gccm::EOSSolution not_conv;  // default: converged = false
    bool threw = false;
    try {
        (void)gccm::compute_sensitivity(p, not_conv, quad);
    } catch (const std::invalid_argument&) {
        threw = true;
    }
    REQUIRE(threw);

    const auto sol = tight_solve(p, quad);
    threw = false;
    try {
        auto hp = p;
        hp.loss = gccm::make_loss("hinge");
        const auto hsol = tight_solve(hp, quad);
        (void)gccm::compute_sensitivity(hp, hsol, quad);
    } catch (const gccm::UnsupportedLossOperation&) {
        threw = true;
    }
    REQUIRE(threw);

    threw = false;
    try {
        (void)gccm::check_extremum_identity(p, sol, quad);  // s != 1/2
    } catch (const std::invalid_argument&) {
        threw = true;
    }
    REQUIRE(threw);

    threw = false;
    try {
        (void)gccm::fd_dm_ds(p, sol, 0.5, quad);  // s - delta < 0
    } catch (const std::invalid_argument&) {
        threw = true;
    }
    REQUIRE(threw);
}

}  // namespace

int main() {
    RUN(test_balanced_point_has_zero_response);
    RUN(test_fd_oracle);
    RUN(test_fd_oracle_chi);
    RUN(test_extremum_identity_across_imbalance);
    RUN(test_identity_gamma_and_loss_independence);
    RUN(test_error_paths);
    return 0;
}
