#pragma once

#include "gccm/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace gccm {

// Spectral toy model for many classes: samples x = tau * w0/sqrt(N) + xi with
// a real-valued class label tau, isotropic gaussian noise, and a per-sample
// reweighting s_mu (normalized to sum 1). The estimator is the leading
// eigenvector of the weighted, centered scatter matrix; the question is how
// the weights affect its overlap with w0.
struct ToyParams {
    int n_dim = 200;
    int n_samples = 2000;
    int n_classes = 3;
    Eigen::VectorXd label_values;  // K values; default equispaced on [-1, 1]
    Eigen::VectorXd label_probs;   // K probabilities; default uniform
    double sigma = 1.0;
    Eigen::VectorXd weights;       // M entries, sum 1; empty = uniform
    std::uint64_t seed = 0;
};

// Fill defaults (equispaced labels, uniform probs/weights) and validate.
ToyParams make_toy_params(int n_dim, int n_samples, int n_classes, double sigma,
                          std::uint64_t seed);
void validate(const ToyParams& params);

struct ToySample {
    Eigen::MatrixXd inputs;   // M x N
    Eigen::VectorXd labels;   // tau values
    Eigen::VectorXd w0;       // ||w0||^2 = N
};

ToySample generate_toy(const ToyParams& params);

// A = sum_mu s_mu (x_mu - xbar)(x_mu - xbar)^T with xbar = sum_nu s_nu x_nu.
Eigen::MatrixXd weighted_scatter(const ToySample& sample,
                                 const Eigen::VectorXd& weights);

struct EigResult {
    Eigen::VectorXd w_hat;  // ||w_hat||^2 = N
    double eigenvalue = 0.0;
    int iterations = 0;
    bool slow_convergence = false;  // hit max_iter (near-degenerate gap)
    // Overlap |w_hat . w0| / N in the convention w_hat . w0 >= 0.
    std::function<double(const Eigen::VectorXd&)> overlap_fn;
};

// Power iteration with a deterministic start vector.
EigResult leading_direction(const Eigen::MatrixXd& a, double tol = 1e-10,
                            int max_iter = 100000);

// Closed form for the per-entry noise-estimation error
// E[(Sigma_hat_ii - sigma^2)^2] = sigma^4 (3 (sum s^2)^2 - 4 sum s^3 + 2 sum s^2),
// minimized over the simplex by uniform weights.
double sigma_mse(const Eigen::VectorXd& weights, double sigma);

// One Gamma(alpha, 1) variate (Marsaglia-Tsang; alpha < 1 boosted through
// Gamma(alpha + 1) * U^{1/alpha}).
double gamma_draw(RngStream& rng, double alpha);

// Symmetric Dirichlet(alpha) weight vector: normalized Gamma(alpha) draws.
Eigen::VectorXd dirichlet_weights(RngStream& rng, int size, double alpha);

// Monte Carlo estimate of the same quantity (N = 1 realizations of the
// weighted centered scatter); returns (mean, stderr).
std::pair<double, double> mc_sigma_mse(const Eigen::VectorXd& weights,
                                       double sigma, int draws,
                                       std::uint64_t seed);

struct UniformOptimalityReport {
    int n_samples = 0;
    int trials = 0;
    double uniform_mse = 0.0;
    double min_random_mse = 0.0;
    double margin = 0.0;          // min_random_mse - uniform_mse (>= 0 expected)
    double uniform_sum_s2 = 0.0;  // concentration diagnostic sum s^2
    // Optional finite-N overlap comparison (skipped when overlap_seeds == 0):
    double overlap_uniform_mean = 0.0;
    double overlap_random_mean = 0.0;
    int overlap_seeds = 0;
};

// Random-search check that the uniform weighting minimizes sigma_mse over the
// simplex: `trials` Dirichlet(1) samples of the weights at M = n_samples.
// When overlap_seeds > 0, also compares mean finite-N overlaps under uniform
// vs Dirichlet(overlap_alpha) weights on generated toy data.
UniformOptimalityReport verify_uniform_optimal(int n_samples, int trials,
                                               std::uint64_t seed,
                                               int n_dim = 200,
                                               double sigma = 1.0,
                                               int overlap_seeds = 0,
                                               double overlap_alpha = 0.3);

}  // namespace gccm
