#include "gccm/multiclass_toy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace gccm {

ToyParams make_toy_params(int n_dim, int n_samples, int n_classes, double sigma,
                          std::uint64_t seed) {
    ToyParams p;
    p.n_dim = n_dim;
    p.n_samples = n_samples;
    p.n_classes = n_classes;
    p.sigma = sigma;
    p.seed = seed;
    p.label_values.resize(n_classes);
    for (int k = 0; k < n_classes; ++k)
        p.label_values[k] =
            n_classes == 1 ? 1.0 : -1.0 + 2.0 * double(k) / (n_classes - 1);
    p.label_probs = Eigen::VectorXd::Constant(n_classes, 1.0 / n_classes);
    p.weights = Eigen::VectorXd::Constant(n_samples, 1.0 / n_samples);
    validate(p);
    return p;
}

void validate(const ToyParams& params) {
    if (params.n_dim < 1 || params.n_samples < 1 || params.n_classes < 1)
        throw std::invalid_argument("toy dimensions must be positive");
    if (!(params.sigma > 0.0))
        throw std::invalid_argument("toy sigma must be positive");
    if (params.label_values.size() != params.n_classes ||
        params.label_probs.size() != params.n_classes)
        throw std::invalid_argument("label arrays must have n_classes entries");
    if (std::fabs(params.label_probs.sum() - 1.0) > 1e-8 ||
        params.label_probs.minCoeff() < 0.0)
        throw std::invalid_argument("label_probs must be a distribution");
    if (params.weights.size() != 0) {
        if (params.weights.size() != params.n_samples)
            throw std::invalid_argument("weights must have n_samples entries");
        if (std::fabs(params.weights.sum() - 1.0) > 1e-8 ||
            params.weights.minCoeff() < 0.0)
            throw std::invalid_argument("weights must be on the simplex");
    }
}

ToySample generate_toy(const ToyParams& params) {
    validate(params);
    RngStream rng(params.seed);
    ToySample sample;

    sample.w0.resize(params.n_dim);
    for (int i = 0; i < params.n_dim; ++i) sample.w0[i] = rng.gaussian();
    sample.w0 *= std::sqrt(double(params.n_dim)) / sample.w0.norm();

    sample.inputs.resize(params.n_samples, params.n_dim);
    sample.labels.resize(params.n_samples);
    const double inv_sqrt_n = 1.0 / std::sqrt(double(params.n_dim));
    for (int mu = 0; mu < params.n_samples; ++mu) {
        const double r = rng.uniform();
        double acc = 0.0;
        double tau = params.label_values[params.n_classes - 1];
        for (int k = 0; k < params.n_classes; ++k) {
            acc += params.label_probs[k];
            if (r <= acc) {
                tau = params.label_values[k];
                break;
            }
        }
        sample.labels[mu] = tau;
        for (int i = 0; i < params.n_dim; ++i)
            sample.inputs(mu, i) =
                tau * sample.w0[i] * inv_sqrt_n + params.sigma * rng.gaussian();
    }
    return sample;
}

Eigen::MatrixXd weighted_scatter(const ToySample& sample,
                                 const Eigen::VectorXd& weights) {
    const int m = int(sample.inputs.rows());
    if (weights.size() != m)
        throw std::invalid_argument("weights must have one entry per sample");
    if (std::fabs(weights.sum() - 1.0) > 1e-8 || weights.minCoeff() < 0.0)
        throw std::invalid_argument("weights must be on the simplex");

    const Eigen::RowVectorXd xbar = weights.transpose() * sample.inputs;
    Eigen::MatrixXd centered = sample.inputs.rowwise() - xbar;
    // A = C^T diag(s) C, assembled as (sqrt(s) C)^T (sqrt(s) C) for symmetry.
    centered.array().colwise() *= weights.array().sqrt();
    return centered.transpose() * centered;
}

EigResult leading_direction(const Eigen::MatrixXd& a, double tol, int max_iter) {
    if (a.rows() != a.cols() || a.rows() < 1)
        throw std::invalid_argument("leading_direction needs a square matrix");
    const int n = int(a.rows());

    // Deterministic start: a fixed pseudo-random direction, so results do not
    // depend on call order or threading.
    RngStream rng(0x9e3779b97f4a7c15ull);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
    v.normalize();

    EigResult res;
    double lambda = 0.0;
    Eigen::VectorXd av(n);
    int it = 0;
    for (; it < max_iter; ++it) {
        av.noalias() = a * v;
        lambda = v.dot(av);
        const double resid = (av - lambda * v).norm();
        if (resid <= tol * std::max(1.0, std::fabs(lambda))) break;
        const double norm = av.norm();
        if (norm == 0.0) break;  // v is in the kernel; accept it
        v = av / norm;
    }
    res.slow_convergence = (it == max_iter);
    res.iterations = it;
    res.eigenvalue = lambda;
    res.w_hat = v * std::sqrt(double(n));
    const Eigen::VectorXd w_hat = res.w_hat;
    res.overlap_fn = [w_hat, n](const Eigen::VectorXd& w0) {
        if (w0.size() != n)
            throw std::invalid_argument("overlap: dimension mismatch");
        return std::fabs(w_hat.dot(w0)) / double(n);
    };
    return res;
}

double sigma_mse(const Eigen::VectorXd& weights, double sigma) {
    if (weights.size() < 1)
        throw std::invalid_argument("sigma_mse needs at least one weight");
    if (std::fabs(weights.sum() - 1.0) > 1e-8 || weights.minCoeff() < 0.0)
        throw std::invalid_argument("weights must be on the simplex");
    const double s2 = weights.squaredNorm();
    const double s3 = weights.array().cube().sum();
    const double sigma4 = sigma * sigma * sigma * sigma;
    return sigma4 * (3.0 * s2 * s2 - 4.0 * s3 + 2.0 * s2);
}

std::pair<double, double> mc_sigma_mse(const Eigen::VectorXd& weights,
                                       double sigma, int draws,
                                       std::uint64_t seed) {
    if (draws < 2) throw std::invalid_argument("mc_sigma_mse needs draws >= 2");
    const int m = int(weights.size());
    RngStream rng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (int d = 0; d < draws; ++d) {
        // One scalar coordinate suffices: Sigma_hat_ii only involves the
        // i-th noise components.
        double sw = 0.0, sww = 0.0;
        for (int mu = 0; mu < m; ++mu) {
            const double xi = sigma * rng.gaussian();
            sw += weights[mu] * xi;
            sww += weights[mu] * xi * xi;
        }
        const double entry = sww - sw * sw;  // weighted centered second moment
        const double err = entry - sigma * sigma;
        sum += err * err;
        sum2 += err * err * err * err;
    }
    const double mean = sum / draws;
    const double var = std::max(sum2 / draws - mean * mean, 0.0);
    return {mean, std::sqrt(var / draws)};
}

// Marsaglia-Tsang Gamma(alpha, 1) sampler; the alpha < 1 case uses the
// standard boost Gamma(alpha) = Gamma(alpha + 1) * U^{1/alpha}.
double gamma_draw(RngStream& rng, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("gamma_draw needs alpha > 0");
    if (alpha < 1.0) {
        const double u = rng.uniform();
        return gamma_draw(rng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.gaussian();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

Eigen::VectorXd dirichlet_weights(RngStream& rng, int size, double alpha) {
    if (size < 1) throw std::invalid_argument("dirichlet_weights needs size >= 1");
    Eigen::VectorXd w(size);
    for (int i = 0; i < size; ++i) w[i] = gamma_draw(rng, alpha);
    const double total = w.sum();
    if (!(total > 0.0)) return Eigen::VectorXd::Constant(size, 1.0 / size);
    return w / total;
}

UniformOptimalityReport verify_uniform_optimal(int n_samples, int trials,
                                               std::uint64_t seed, int n_dim,
                                               double sigma, int overlap_seeds,
                                               double overlap_alpha) {
    if (n_samples < 1 || trials < 1)
        throw std::invalid_argument("verify_uniform_optimal needs positive sizes");

    UniformOptimalityReport rep;
    rep.n_samples = n_samples;
    rep.trials = trials;
    const Eigen::VectorXd uniform =
        Eigen::VectorXd::Constant(n_samples, 1.0 / n_samples);
    rep.uniform_mse = sigma_mse(uniform, sigma);
    rep.uniform_sum_s2 = uniform.squaredNorm();

    RngStream rng(seed);
    Eigen::VectorXd w(n_samples);
    rep.min_random_mse = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        // Dirichlet(1) = normalized exponentials: uniform on the simplex.
        double total = 0.0;
        for (int mu = 0; mu < n_samples; ++mu) {
            w[mu] = -std::log(rng.uniform());
            total += w[mu];
        }
        w /= total;
        rep.min_random_mse = std::min(rep.min_random_mse, sigma_mse(w, sigma));
    }
    rep.margin = rep.min_random_mse - rep.uniform_mse;

    rep.overlap_seeds = overlap_seeds;
    if (overlap_seeds > 0) {
        double acc_u = 0.0, acc_r = 0.0;
        for (int t = 0; t < overlap_seeds; ++t) {
            ToyParams params =
                make_toy_params(n_dim, n_samples, 3, sigma, seed + 1000 + t);
            const ToySample sample = generate_toy(params);

            const Eigen::MatrixXd a_uni = weighted_scatter(sample, uniform);
            acc_u += leading_direction(a_uni).overlap_fn(sample.w0);

            // Dirichlet(alpha) = normalized Gamma(alpha) draws.
            RngStream wrng(seed + 5000 + t);
            Eigen::VectorXd wr(n_samples);
            double total = 0.0;
            for (int mu = 0; mu < n_samples; ++mu) {
                wr[mu] = gamma_draw(wrng, overlap_alpha);
                total += wr[mu];
            }
            wr /= total;
            const Eigen::MatrixXd a_rnd = weighted_scatter(sample, wr);
            acc_r += leading_direction(a_rnd).overlap_fn(sample.w0);
        }
        rep.overlap_uniform_mean = acc_u / overlap_seeds;
        rep.overlap_random_mean = acc_r / overlap_seeds;
    }
    return rep;
}

}  // namespace gccm
