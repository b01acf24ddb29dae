#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gccm {

// Gauss-Hermite rule in "probabilists'" normalization: sum_i w_i f(z_i)
// approximates E[f(Z)] for Z ~ N(0,1) directly (weights already absorb the
// 1/sqrt(2*pi) gaussian measure and sum to 1).
struct GaussianQuadrature {
    int order = 0;
    std::vector<double> nodes;    // ascending, symmetric about 0
    std::vector<double> weights;  // positive, symmetric, sum = 1
};

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
// Throws std::invalid_argument for order < 2. Results are cached internally,
// so repeated calls with the same order are cheap.
GaussianQuadrature build_quadrature(int order);

// Same rule as build_quadrature but returns a reference into the cache;
// convenient for hot paths that do not want to copy node tables.
const GaussianQuadrature& shared_quadrature(int order);

// Gauss-Legendre rule on [-1, 1]: sum_i w_i f(x_i) approximates the plain
// integral of f, with sum(w) = 2. Used to integrate over sub-intervals when
// an integrand is only piecewise smooth and the pieces are known.
struct LegendreRule {
    int order = 0;
    std::vector<double> nodes;    // ascending, symmetric about 0, in (-1, 1)
    std::vector<double> weights;  // positive, symmetric, sum = 2
};

// Newton iteration on the Legendre recurrence; cached like shared_quadrature.
// Throws std::invalid_argument for order < 2.
const LegendreRule& shared_legendre(int order);

// Raised when an integrand evaluates to a non-finite value at some node.
struct QuadratureEvalError : std::runtime_error {
    double node;
    explicit QuadratureEvalError(double z)
        : std::runtime_error("integrand is not finite at quadrature node z = " +
                             std::to_string(z)),
          node(z) {}
};

// E[f(Z)] under the standard gaussian. f is any callable double -> double.
template <class F>
double gaussian_expect(const GaussianQuadrature& quad, F&& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
        const double fi = f(quad.nodes[i]);
        if (!std::isfinite(fi)) throw QuadratureEvalError(quad.nodes[i]);
        acc += quad.weights[i] * fi;
    }
    return acc;
}

}  // namespace gccm
