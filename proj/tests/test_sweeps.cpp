// ============================================================================
// test_sweeps.cpp
// Parameter scans and the inner bias optimization
// ============================================================================
//
// PURPOSE: Check the scan drivers on the properties that matter for the
// reweighting study: warm-starting must not change results (it is a speed
// trick, not a model change), the balanced symmetric problem must put its
// best class weight exactly at 1/2 on a grid that contains it, the bias
// optimizer must agree with a dense scan, boundary hits must be flagged,
// and non-converged rows must be excluded from argmax decisions.
// ============================================================================

#include "gccm/quadrature.hpp"
#include "gccm/sweeps.hpp"

#include "test_common.hpp"

#include <cmath>
#include <vector>

namespace {

gccm::ProblemParams make_params(const char* loss, double r_plus, double s_plus,
                                double b) {
    gccm::ProblemParams p;
    p.loss = gccm::make_loss(loss, 200.0);
    p.alpha = 20.0;
    p.r_plus = r_plus;
    p.s_plus = s_plus;
    p.b = b;
    p.sigma_plus = 0.6;
    p.sigma_minus = 0.6;
    return p;
}

// --------------------------------------------------------------------------
void test_default_grids() {
    const auto bg = gccm::default_b_grid();
    REQUIRE(bg.size() == 121);
    REQUIRE(approx_eq(bg.front(), -6.0, 1e-15));
    REQUIRE(approx_eq(bg.back(), 6.0, 1e-15));

    const auto sg = gccm::default_s_grid();
    REQUIRE(sg.size() == 51);
    REQUIRE(sg[25] == 0.5);  // the symmetric point is on the grid exactly
    REQUIRE(sg.front() > 0.0 && sg.back() < 1.0);
}

// --------------------------------------------------------------------------
// Warm-starting across the grid is only an accelerator
void test_warm_start_matches_cold() {
    const auto& quad = gccm::shared_quadrature(100);
    const auto p = make_params("ce_logistic", 0.2, 0.3, 0.0);
    const std::vector<double> grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
    const auto rows = gccm::sweep_b(p, grid, quad);  // warm-started internally
    REQUIRE(rows.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        REQUIRE(rows[i].converged);
        auto pc = p;
        pc.b = grid[i];
        const auto cold = gccm::solve_eos(pc, quad);  // default cold init
        REQUIRE_MSG(std::fabs(rows[i].m - cold.order.m) <= 1e-7,
                    "b=%.1f warm %.12f cold %.12f", grid[i], rows[i].m,
                    cold.order.m);
        REQUIRE(std::fabs(rows[i].u - cold.energy) <= 1e-6);
    }
}

// --------------------------------------------------------------------------
// Bias optimizer vs a dense scan
void test_bias_optimizer_against_dense_scan() {
    const auto& quad = gccm::shared_quadrature(100);
    const auto p = make_params("ce_logistic", 0.2, 0.3, 0.0);

    gccm::SweepOptions opts;
    opts.coarse_points = 61;
    const auto best = gccm::maximize_m_over_b(p, quad, opts);
    REQUIRE(best.sol.converged);
    REQUIRE(!best.boundary);

    // Dense reference scan.
    double dense_best = -1.0, dense_b = 0.0;
    for (int i = 0; i <= 1200; ++i) {
        const double b = -6.0 + 12.0 * i / 1200.0;
        auto pb = p;
        pb.b = b;
        const auto sol = gccm::solve_eos(pb, quad);
        if (sol.converged && sol.order.m > dense_best) {
            dense_best = sol.order.m;
            dense_b = b;
        }
    }
    REQUIRE_MSG(best.sol.order.m >= dense_best - 1e-9,
                "optimizer m %.12f dense scan m %.12f", best.sol.order.m,
                dense_best);
    REQUIRE_MSG(std::fabs(best.b - dense_b) <= 0.02,
                "optimizer b %.6f dense argmax %.6f", best.b, dense_b);

    const auto umin = gccm::minimize_u_over_b(p, quad, opts);
    REQUIRE(umin.sol.converged);
    // The u-minimizing bias and m-maximizing bias differ for r != 1/2.
    REQUIRE(std::fabs(umin.b - best.b) > 1e-3);
}

// --------------------------------------------------------------------------
// Balanced symmetric problem: best weight is exactly 1/2 on the default grid
void test_symmetric_argmax_at_half() {
    const auto& quad = gccm::shared_quadrature(100);
    for (double alpha : {5.0, 20.0}) {
        auto p = make_params("ce_logistic", 0.5, 0.5, 0.0);
        p.alpha = alpha;
        const auto rows =
            gccm::sweep_s(p, gccm::default_s_grid(),
                          gccm::SweepMode::fixed_b_zero, quad);
        const int best = gccm::argmax_m_row(rows);
        REQUIRE(best >= 0);
        REQUIRE_MSG(rows[best].params.s_plus == 0.5,
                    "alpha=%g argmax at s=%.4f m=%.10f (m at 0.5: %.10f)",
                    alpha, rows[best].params.s_plus, rows[best].m, rows[25].m);
    }
}

// --------------------------------------------------------------------------
// Mode wiring: b0 keeps b = 0; mmax rows carry the per-s optimal bias
void test_sweep_s_modes() {
    const auto& quad = gccm::shared_quadrature(100);
    const auto p = make_params("ce_logistic", 0.2, 0.5, 0.0);
    const std::vector<double> s_grid = {0.25, 0.5, 0.75};

    const auto b0 = gccm::sweep_s(p, s_grid, gccm::SweepMode::fixed_b_zero, quad);
    REQUIRE(b0.size() == 3);
    for (const auto& row : b0) {
        REQUIRE(row.params.b == 0.0);
        REQUIRE(row.mode == gccm::SweepMode::fixed_b_zero);
        REQUIRE(row.converged);
    }

    gccm::SweepOptions fast;
    fast.coarse_points = 41;
    const auto mm = gccm::sweep_s(p, s_grid, gccm::SweepMode::maximize_m, quad,
                                  fast);
    for (std::size_t i = 0; i < mm.size(); ++i) {
        REQUIRE(mm[i].converged);
        // The optimized-bias m dominates the fixed-b = 0 m.
        REQUIRE_MSG(mm[i].m >= b0[i].m - 1e-9, "s=%.2f mmax %.10f b0 %.10f",
                    s_grid[i], mm[i].m, b0[i].m);
    }

    // For an imbalanced problem the optimal bias is materially nonzero.
    REQUIRE(std::fabs(mm[1].params.b) > 1e-3);
}

// --------------------------------------------------------------------------
// Boundary flagging: a search window that pins the optimum to an edge
void test_boundary_flag() {
    const auto& quad = gccm::shared_quadrature(100);
    const auto p = make_params("ce_logistic", 0.2, 0.3, 0.0);
    gccm::SweepOptions narrow;
    narrow.b_lo = 2.0;  // the true u-minimizer sits well below b = 2
    narrow.b_hi = 4.0;
    narrow.coarse_points = 21;
    const auto res = gccm::minimize_u_over_b(p, quad, narrow);
    REQUIRE(res.boundary);
    REQUIRE(approx_eq(res.b, 2.0, 1e-12));

    const auto rows = gccm::sweep_s(p, {0.3}, gccm::SweepMode::minimize_u, quad,
                                    narrow);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].b_boundary);
}

// --------------------------------------------------------------------------
// Non-converged rows are excluded from argmax
void test_argmax_excludes_nonconverged() {
    std::vector<gccm::SweepRow> rows(3);
    rows[0].params.s_plus = 0.3;
    rows[0].m = 0.8;
    rows[0].converged = true;
    rows[1].params.s_plus = 0.5;
    rows[1].m = 0.99;  // best m but unconverged: must be skipped
    rows[1].converged = false;
    rows[2].params.s_plus = 0.7;
    rows[2].m = 0.85;
    rows[2].converged = true;
    REQUIRE(gccm::argmax_m_row(rows) == 2);

    rows[0].converged = rows[2].converged = false;
    REQUIRE(gccm::argmax_m_row(rows) == -1);
}

}  // namespace

int main() {
    RUN(test_default_grids);
    RUN(test_warm_start_matches_cold);
    RUN(test_bias_optimizer_against_dense_scan);
    RUN(test_symmetric_argmax_at_half);
    RUN(test_sweep_s_modes);
    RUN(test_boundary_flag);
    RUN(test_argmax_excludes_nonconverged);
    return 0;
}
