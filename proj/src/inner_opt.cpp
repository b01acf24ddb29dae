#include "gccm/inner_opt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gccm {

namespace {

struct Problem {
    const LossSpec* loss;
    double s, omega, a, c;  // a = sigma*sqrt(chi), c = s*sigma^2*chi = s*a^2

    double phi(double h) const { return h - omega - c * loss_grad(*loss, h); }
    double phi_prime(double h) const { return 1.0 - c * loss_grad2(*loss, h); }
    double objective(double h) const {
        const double v = (h - omega) / a;
        return -0.5 * v * v - s * loss_value(*loss, h);
    }
};

void validate_inputs(double s, double sigma, double chi, double m, double yb,
                     double z) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("solve_inner: sigma must be positive");
    if (!(chi > 0.0) || !std::isfinite(chi))
        throw std::invalid_argument("solve_inner: chi must be positive");
    if (!(s >= 0.0 && s <= 1.0))
        throw std::invalid_argument("solve_inner: s must lie in [0, 1]");
    if (!std::isfinite(m) || !std::isfinite(yb) || !std::isfinite(z))
        throw std::invalid_argument("solve_inner: non-finite field input");
}

// Safeguarded Newton on phi within a sign-changing bracket. Assumes
// phi(lo) <= 0 <= phi(hi); keeps the bracket valid, falls back to bisection
// whenever the Newton step leaves it or the slope degenerates.
double refine_root(const Problem& p, double lo, double hi) {
    double h = 0.5 * (lo + hi);
    double last_width = hi - lo;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = p.phi(h);
        const double scale = std::max({1.0, std::fabs(h), std::fabs(p.omega)});
        if (std::fabs(f) <= 1e-15 * scale) return h;
        if (f > 0.0) hi = h; else lo = h;
        // A bracket of a couple of ulps is converged even when phi itself
        // never gets small, which happens where phi jumps across zero at a
        // kink of the loss (the stationary point then sits exactly on the
        // kink, with v read off from h - omega).
        if (hi - lo <= 4e-16 * scale) return 0.5 * (lo + hi);

        const double fp = p.phi_prime(h);
        double next = (fp > 1e-12) ? h - f / fp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        // Newton can two-cycle between the flat tail and the steep wall of
        // the smoothed-loss force bump without ever leaving the bracket.
        // Demand geometric progress: if two iterations have not halved the
        // bracket, bisect instead.
        if (iter % 2 == 1) {
            if (hi - lo > 0.5 * last_width) next = 0.5 * (lo + hi);
            last_width = hi - lo;
        }
        h = next;
    }
    throw InnerConvergenceError("inner root refinement exceeded iteration cap",
                                lo, hi);
}

// Convex losses: phi is nondecreasing (phi' = 1 - c*g' >= 1 wherever g' <= 0,
// which holds everywhere for these families), so the stationary point is the
// unique sign change of phi in [omega, omega + c*g_bound].
InnerSolution solve_monotone(const Problem& p, double g_bound) {
    const double lo = p.omega;
    double hi = p.omega + p.c * g_bound;
    if (!std::isfinite(hi))
        throw InnerConvergenceError("inner bracket overflowed (field too deep "
                                    "in the loss tail)", lo, hi);
    // phi(lo) = -c*g(omega) <= 0 and phi(hi) = c*(g_bound - g(hi)) >= 0
    // because g is bounded by g_bound and nonincreasing toward large h.
    const double h = refine_root(p, lo, hi);
    InnerSolution sol;
    sol.h = h;
    sol.v = (h - p.omega) / p.a;
    sol.g_value = p.objective(h);
    return sol;
}

// smoothed_zero_one: the force g(h) = (gamma/2) sech^2(gamma*h) is a bump at
// h = 0, so phi can have up to three roots when omega < 0 (stay near omega,
// unstable middle, jump past 0). Enumerate sign changes of phi on a candidate
// grid that resolves both the overall bracket and the O(1/gamma) core, refine
// each, and keep the best attained G.
InnerSolution solve_smoothed(const Problem& p) {
    const double gamma = p.loss->gamma;
    const double lo = p.omega;
    const double hi = p.omega + 0.5 * p.c * gamma;  // sup g = gamma/2

    if (p.omega >= 0.0) {
        // g' <= 0 on h >= 0, so phi is monotone on the whole bracket.
        const double h = refine_root(p, lo, hi);
        InnerSolution sol;
        sol.h = h;
        sol.v = (h - p.omega) / p.a;
        sol.g_value = p.objective(h);
        return sol;
    }

    std::vector<double> grid;
    grid.reserve(220);
    for (int k = 0; k <= 64; ++k)
        grid.push_back(lo + (hi - lo) * double(k) / 64.0);
    // Fine coverage of the sech^2 core where all the structure lives.
    const double core = 10.0 / gamma;
    for (int k = 0; k <= 128; ++k)
        grid.push_back(-core + 2.0 * core * double(k) / 128.0);
    for (double t : {1.0, 2.0, 3.0, 5.0, 20.0, 50.0}) {
        grid.push_back(t / gamma);
        grid.push_back(-t / gamma);
    }
    grid.push_back(0.0);

    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    grid.erase(std::remove_if(grid.begin(), grid.end(),
                              [&](double h) { return h < lo || h > hi; }),
               grid.end());

    // phi = -a * dG/dv, so ascending sign changes of phi are the local maxima
    // of G; descending ones are the unstable middle root and are skipped.
    InnerSolution best;
    best.h = p.omega;
    best.v = 0.0;
    best.g_value = p.objective(p.omega);
    bool found = false;

    double prev_h = grid.front();
    double prev_phi = p.phi(prev_h);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur_h = grid[i];
        const double cur_phi = p.phi(cur_h);
        if (prev_phi <= 0.0 && cur_phi >= 0.0) {
            const double root = refine_root(p, prev_h, cur_h);
            InnerSolution cand;
            cand.h = root;
            cand.v = (root - p.omega) / p.a;
            cand.g_value = p.objective(root);
            if (!found || cand.g_value > best.g_value) best = cand;
            found = true;
        }
        prev_h = cur_h;
        prev_phi = cur_phi;
    }
    if (!found) {
        // phi(lo) <= 0 and phi(hi) >= 0 guarantee at least one sign change;
        // if the grid somehow missed it, scan the full bracket directly.
        const double root = refine_root(p, lo, hi);
        best.h = root;
        best.v = (root - p.omega) / p.a;
        best.g_value = p.objective(root);
    }
    return best;
}

}  // namespace

InnerSolution solve_inner_zero_one(double s, double sigma, double chi,
                                   double m, double yb, double z) {
    validate_inputs(s, sigma, chi, m, yb, z);
    const double h0 = sigma * z + m + yb;
    InnerSolution sol;
    sol.h = h0;
    if (s == 0.0 || h0 > 0.0) return sol;  // v = 0, G = 0 (or nothing at stake)
    if (h0 == 0.0) {
        sol.g_value = -0.5 * s;  // on the boundary: ell(0) = 1/2, v = 0
        return sol;
    }
    const double jump_cost = h0 * h0 / (2.0 * sigma * sigma * chi);
    if (jump_cost < s) {
        sol.v = -h0 / (sigma * std::sqrt(chi));
        sol.h = 0.0;
        sol.g_value = -jump_cost;
    } else {
        sol.v = 0.0;
        sol.g_value = -s;  // stay misclassified (ties stay put as well)
    }
    return sol;
}

InnerSolution solve_inner(const LossSpec& loss, double s, double sigma,
                          double chi, double m, double yb, double z) {
    validate_inputs(s, sigma, chi, m, yb, z);
    const double omega = sigma * z + m + yb;
    if (s == 0.0) return InnerSolution{0.0, omega, 0.0};

    if (loss.family == LossFamily::zero_one)
        return solve_inner_zero_one(s, sigma, chi, m, yb, z);

    const double a = sigma * std::sqrt(chi);
    Problem p{&loss, s, omega, a, s * sigma * sigma * chi};

    switch (loss.family) {
        case LossFamily::ce_logistic:
            return solve_monotone(p, 2.0);  // g = 1 - tanh(h) < 2
        case LossFamily::hinge:
            return solve_monotone(p, 1.0);  // g is the unit step below h = 1
        case LossFamily::exponential:
            return solve_monotone(p, std::exp(-omega));  // g decreasing
        case LossFamily::smoothed_zero_one:
            return solve_smoothed(p);
        default:
            throw std::logic_error("solve_inner: unhandled loss family");
    }
}

}  // namespace gccm
