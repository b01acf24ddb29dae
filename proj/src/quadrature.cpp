#include "gccm/quadrature.hpp"

#include <Eigen/Dense>

#include <map>
#include <mutex>
#include <numbers>

namespace gccm {

namespace {

// Probabilists' Hermite polynomials He_k obey the three-term recurrence
// He_{k+1}(z) = z He_k(z) - k He_{k-1}(z), so the (symmetric) Jacobi matrix
// has zero diagonal and off-diagonal entries sqrt(k). Its eigenvalues are the
// nodes; the squared first components of the normalized eigenvectors times
// mu_0 = integral of the weight = 1 are the weights (Golub & Welsch 1969).
GaussianQuadrature compute(int order) {
    if (order < 2)
        throw std::invalid_argument("quadrature order must be >= 2, got " +
                                    std::to_string(order));

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(order - 1);
    for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(double(k));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("quadrature eigensolve failed at order " +
                                 std::to_string(order));

    GaussianQuadrature q;
    q.order = order;
    q.nodes.resize(order);
    q.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        q.nodes[i] = es.eigenvalues()[i];  // ascending
        const double v0 = es.eigenvectors()(0, i);
        q.weights[i] = v0 * v0;
    }

    // The rule is symmetric by construction; enforce it exactly so that odd
    // moments vanish identically and downstream +/- class symmetries hold to
    // machine precision rather than to eigensolver precision.
    for (int i = 0; i < order / 2; ++i) {
        const int j = order - 1 - i;
        const double x = 0.5 * (q.nodes[i] - q.nodes[j]);
        q.nodes[i] = x;
        q.nodes[j] = -x;
        const double w = 0.5 * (q.weights[i] + q.weights[j]);
        q.weights[i] = w;
        q.weights[j] = w;
    }
    if (order % 2 == 1) q.nodes[order / 2] = 0.0;

    double wsum = 0.0;
    for (double w : q.weights) wsum += w;
    for (double& w : q.weights) w /= wsum;  // pin sum(w) = 1 exactly (mu_0 = 1)
    return q;
}

// Gauss-Legendre nodes are the roots of the Legendre polynomial P_n. Each
// root is isolated well enough by the classical cosine estimate that plain
// Newton converges in a handful of steps; the recurrence gives P_n and P_n'
// together.
LegendreRule compute_legendre(int order) {
    if (order < 2)
        throw std::invalid_argument("quadrature order must be >= 2, got " +
                                    std::to_string(order));

    LegendreRule r;
    r.order = order;
    r.nodes.resize(order);
    r.weights.resize(order);

    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) <= 1e-15 * std::fmax(1.0, std::fabs(x))) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // cosine estimate enumerates roots in descending order
        r.nodes[order - 1 - i] = x;
        r.nodes[i] = -x;
        r.weights[order - 1 - i] = w;
        r.weights[i] = w;
    }
    if (order % 2 == 1) r.nodes[order / 2] = 0.0;
    return r;
}

std::map<int, GaussianQuadrature>& cache() {
    static std::map<int, GaussianQuadrature> c;
    return c;
}

std::map<int, LegendreRule>& legendre_cache() {
    static std::map<int, LegendreRule> c;
    return c;
}

std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

const GaussianQuadrature& shared_quadrature(int order) {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto it = cache().find(order);
    if (it == cache().end()) it = cache().emplace(order, compute(order)).first;
    return it->second;
}

GaussianQuadrature build_quadrature(int order) { return shared_quadrature(order); }

const LegendreRule& shared_legendre(int order) {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto it = legendre_cache().find(order);
    if (it == legendre_cache().end())
        it = legendre_cache().emplace(order, compute_legendre(order)).first;
    return it->second;
}

}  // namespace gccm
