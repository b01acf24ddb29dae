#pragma once

#include "gccm/eos_solver.hpp"
#include "gccm/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace gccm {

// Finite-size counterpart of the theory: draw a dataset from the two-class
// gaussian model and minimize the reweighted empirical loss over the sphere
// ||w||^2 = N, tracking the teacher overlap m = w.w0/N and the training
// energy u = H/N.
struct Dataset {
    int n_dim = 0;
    int n_samples = 0;
    Eigen::MatrixXd inputs;  // n_samples x n_dim, x = y*w0/sqrt(N) + sigma_y*xi
    Eigen::VectorXi labels;  // +1 / -1
    Eigen::VectorXd w0;      // teacher, ||w0||^2 = n_dim
    std::uint64_t seed = 0;
};

// One realization: teacher direction uniform on the sphere, labels iid with
// P(+1) = r_plus, inputs gaussian around +/- w0/sqrt(N). The sample count is
// round(alpha * n_dim).
Dataset generate_dataset(const ProblemParams& params, int n_dim,
                         std::uint64_t seed);

struct OptimizerSettings {
    double grad_tol = 1e-6;   // tangent-gradient norm of H/N at which to stop
    int max_iter = 5000;
    double armijo_c = 1e-4;
    int max_backtracks = 50;
    bool optimize_bias = false;  // jointly minimize over b as well
    bool random_init = false;    // random direction instead of the data-driven one
    std::uint64_t init_seed = 0;
};

struct MinimizeResult {
    Eigen::VectorXd w_hat;   // ||w_hat||^2 = n_dim
    double u = 0.0;          // H/N at the optimum
    double b = 0.0;          // bias used (or found, if optimize_bias)
    double grad_norm = 0.0;  // final projected-gradient norm
    int iterations = 0;
    bool converged = false;
};

// Projected gradient descent on the sphere: Barzilai-Borwein step lengths,
// Armijo backtracking, retraction by rescaling to radius sqrt(N). With
// optimize_bias the bias is descended jointly as an unconstrained coordinate.
MinimizeResult minimize_weighted_loss(const Dataset& data, const LossSpec& loss,
                                      double b, double s_plus,
                                      const OptimizerSettings& opts = {});

// Aggregates at one bias value. Failed optimizations (no convergence within
// max_iter) are excluded from the statistics and counted in n_failed.
struct ERMPoint {
    double b = 0.0;
    std::vector<double> m_values, u_values;  // converged replicates, rep order
    double m_mean = 0.0, m_stderr = 0.0;
    double u_mean = 0.0, u_stderr = 0.0;
    double b_mean = 0.0;  // mean optimized bias (joint mode; else = b)
    int n_failed = 0;
    double max_grad_norm = 0.0;
    double mean_iterations = 0.0;
};

struct ERMExperiment {
    std::vector<ERMPoint> points;  // one per b in grid order
    int n_dim = 0;
    int reps = 0;
    std::uint64_t base_seed = 0;
    OptimizerSettings optimizer;
};

// reps independent datasets (seed = base_seed + rep), each minimized along the
// b grid with warm starts. Replicates can run on `parallelism` threads; the
// reduction is done in replicate order, so aggregates are bit-identical for
// any thread count. stderr is the sample standard deviation / sqrt(#reps).
ERMExperiment run_experiment(const ProblemParams& params, int n_dim, int reps,
                             const std::vector<double>& b_grid,
                             std::uint64_t base_seed,
                             const OptimizerSettings& opts = {},
                             int parallelism = 1);

}  // namespace gccm
