// ============================================================================
// test_multiclass_toy.cpp
// Spectral toy model: weighted scatter, leading direction, noise-error law
// ============================================================================
//
// PURPOSE: Pin the closed-form pieces of the toy model (two-sample scatter,
// the sigma_mse polynomial and its special cases), check matrix assembly
// against the defining sum, validate the power iteration on matrices with
// known spectra, confirm the Monte Carlo estimator reproduces the closed
// form, and exercise the uniform-weights optimality search end to end.
// ============================================================================

#include "gccm/multiclass_toy.hpp"
#include "gccm/rng.hpp"

#include "test_common.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace {

// --------------------------------------------------------------------------
void test_params_and_validation() {
    const auto p = gccm::make_toy_params(50, 200, 3, 1.0, 7);
    REQUIRE(p.label_values.size() == 3);
    REQUIRE(p.label_values[0] == -1.0 && p.label_values[1] == 0.0 &&
            p.label_values[2] == 1.0);
    REQUIRE(approx_eq(p.label_probs.sum(), 1.0, 1e-12));
    REQUIRE(p.weights.size() == 200);
    REQUIRE(approx_eq(p.weights.sum(), 1.0, 1e-12));

    REQUIRE_THROWS_AS(gccm::make_toy_params(50, 200, 0, 1.0, 7),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(gccm::make_toy_params(50, 200, 3, 0.0, 7),
                      std::invalid_argument);

    auto bad = p;
    bad.weights = Eigen::VectorXd::Constant(3, 1.0 / 3.0);  // wrong length
    REQUIRE_THROWS_AS(gccm::validate(bad), std::invalid_argument);
    bad = p;
    bad.label_probs[0] = 0.9;  // no longer sums to one
    REQUIRE_THROWS_AS(gccm::validate(bad), std::invalid_argument);
    bad = p;
    bad.weights[0] = -p.weights[0];
    bad.weights[1] += 2.0 * p.weights[0];
    REQUIRE_THROWS_AS(gccm::validate(bad), std::invalid_argument);
}

// --------------------------------------------------------------------------
void test_generate_determinism_and_structure() {
    const auto p = gccm::make_toy_params(100, 2000, 3, 1.0, 11);
    const auto s1 = gccm::generate_toy(p);
    const auto s2 = gccm::generate_toy(p);
    REQUIRE((s1.inputs - s2.inputs).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((s1.labels - s2.labels).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(approx_eq(s1.w0.squaredNorm(), 100.0, 1e-9));

    for (int mu = 0; mu < p.n_samples; ++mu) {
        const double tau = s1.labels[mu];
        REQUIRE(tau == -1.0 || tau == 0.0 || tau == 1.0);
    }

    // Regress inputs on labels: beta = sum tau x / sum tau^2 -> w0 / sqrt(N).
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p.n_dim);
    double tau2 = 0.0;
    for (int mu = 0; mu < p.n_samples; ++mu) {
        beta += s1.labels[mu] * s1.inputs.row(mu).transpose();
        tau2 += s1.labels[mu] * s1.labels[mu];
    }
    beta /= tau2;
    const double cosine = beta.dot(s1.w0) / (beta.norm() * s1.w0.norm());
    REQUIRE_MSG(cosine > 0.9, "teacher recovery cosine %.4f", cosine);
}

// --------------------------------------------------------------------------
// Two samples: A = s(1-s) d d^T with d = x1 - x2
void test_two_sample_closed_form() {
    const int n = 12;
    gccm::ToySample sample;
    gccm::RngStream rng(5);
    sample.inputs.resize(2, n);
    for (int mu = 0; mu < 2; ++mu)
        for (int i = 0; i < n; ++i) sample.inputs(mu, i) = rng.gaussian();
    sample.labels = Eigen::VectorXd::Zero(2);
    sample.w0 = Eigen::VectorXd::Zero(n);

    const double s = 0.3;
    Eigen::VectorXd w(2);
    w << s, 1.0 - s;
    const Eigen::MatrixXd a = gccm::weighted_scatter(sample, w);

    const Eigen::VectorXd d =
        (sample.inputs.row(0) - sample.inputs.row(1)).transpose();
    const Eigen::MatrixXd expect = s * (1.0 - s) * d * d.transpose();
    REQUIRE((a - expect).cwiseAbs().maxCoeff() <= 1e-12 * d.squaredNorm());

    const auto eig = gccm::leading_direction(a, 1e-12);
    REQUIRE(!eig.slow_convergence);
    REQUIRE(approx_eq(eig.eigenvalue, s * (1.0 - s) * d.squaredNorm(), 1e-9));
    const double cosine = std::fabs(eig.w_hat.dot(d)) / (eig.w_hat.norm() * d.norm());
    REQUIRE(cosine >= 1.0 - 1e-10);
}

// --------------------------------------------------------------------------
// Assembly identity against the defining sum, symmetry, positive semidefinite
void test_scatter_assembly() {
    const auto p = gccm::make_toy_params(30, 80, 4, 0.8, 3);
    const auto sample = gccm::generate_toy(p);
    gccm::RngStream rng(14);
    const Eigen::VectorXd w = gccm::dirichlet_weights(rng, 80, 0.5);

    const Eigen::MatrixXd a = gccm::weighted_scatter(sample, w);

    const Eigen::RowVectorXd xbar = w.transpose() * sample.inputs;
    Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(30, 30);
    for (int mu = 0; mu < 80; ++mu) {
        const Eigen::VectorXd c = (sample.inputs.row(mu) - xbar).transpose();
        direct += w[mu] * c * c.transpose();
    }
    REQUIRE_MSG((a - direct).cwiseAbs().maxCoeff() <= 1e-10,
                "assembly mismatch %.3e", (a - direct).cwiseAbs().maxCoeff());
    REQUIRE((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    REQUIRE(es.eigenvalues().minCoeff() >= -1e-10);

    REQUIRE_THROWS_AS(
        gccm::weighted_scatter(sample, Eigen::VectorXd::Constant(5, 0.2)),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        gccm::weighted_scatter(sample, Eigen::VectorXd::Constant(80, 1.0)),
        std::invalid_argument);
}

// --------------------------------------------------------------------------
void test_leading_direction_known_spectrum() {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    a.diagonal() << 0.4, 3.0, 1.1, 0.0, 2.2, 0.7;
    const auto eig = gccm::leading_direction(a, 1e-12);
    REQUIRE(!eig.slow_convergence);
    REQUIRE(approx_eq(eig.eigenvalue, 3.0, 1e-10));
    REQUIRE(approx_eq(eig.w_hat.squaredNorm(), 6.0, 1e-10));
    REQUIRE(std::fabs(std::fabs(eig.w_hat[1]) - std::sqrt(6.0)) <= 1e-5);

    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(6);
    e1[1] = std::sqrt(6.0);  // ||e1||^2 = 6, the w0 normalization
    REQUIRE(eig.overlap_fn(e1) >= 1.0 - 1e-9);
    REQUIRE(eig.overlap_fn(-e1) >= 1.0 - 1e-9);  // sign-invariant
    REQUIRE_THROWS_AS(eig.overlap_fn(Eigen::VectorXd::Zero(5)),
                      std::invalid_argument);

    // Near-degenerate gap with a tiny budget: flagged, not silently wrong.
    Eigen::MatrixXd tight = Eigen::MatrixXd::Zero(3, 3);
    tight.diagonal() << 1.0, 1.0 - 1e-6, 0.2;
    const auto strained = gccm::leading_direction(tight, 1e-12, 10);
    REQUIRE(strained.slow_convergence);
    REQUIRE(strained.iterations == 10);

    REQUIRE_THROWS_AS(gccm::leading_direction(Eigen::MatrixXd::Zero(2, 3)),
                      std::invalid_argument);
}

// --------------------------------------------------------------------------
// sigma_mse special cases, pinned by hand
void test_sigma_mse_closed_forms() {
    const double sigma = 0.7;
    const double sigma4 = sigma * sigma * sigma * sigma;

    // Uniform, M entries: sum s^2 = 1/M, sum s^3 = 1/M^2
    //   -> sigma^4 (3/M^2 - 4/M^2 + 2/M) = sigma^4 (2/M - 1/M^2).
    for (int m : {1, 2, 20, 2000}) {
        const Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / m);
        const double expect = sigma4 * (2.0 / m - 1.0 / (double(m) * m));
        REQUIRE_MSG(rel_err(gccm::sigma_mse(w, sigma), expect) <= 1e-14,
                    "uniform M=%d", m);
    }

    // All mass on one sample: 3 - 4 + 2 = 1 -> sigma^4 exactly.
    Eigen::VectorXd atom = Eigen::VectorXd::Zero(5);
    atom[2] = 1.0;
    REQUIRE(rel_err(gccm::sigma_mse(atom, sigma), sigma4) <= 1e-15);

    // Equal pair: s2 = 1/2, s3 = 1/4 -> sigma^4 (3/4 - 1 + 1) = 3/4 sigma^4.
    Eigen::VectorXd pair = Eigen::VectorXd::Constant(2, 0.5);
    REQUIRE(rel_err(gccm::sigma_mse(pair, sigma), 0.75 * sigma4) <= 1e-15);

    // Quartic scaling in sigma.
    gccm::RngStream rng(2);
    const Eigen::VectorXd w = gccm::dirichlet_weights(rng, 9, 1.0);
    REQUIRE(rel_err(gccm::sigma_mse(w, 2.0 * sigma),
                    16.0 * gccm::sigma_mse(w, sigma)) <= 1e-13);

    REQUIRE_THROWS_AS(gccm::sigma_mse(Eigen::VectorXd::Constant(4, 1.0), 1.0),
                      std::invalid_argument);
}

// --------------------------------------------------------------------------
void test_mc_matches_closed_form() {
    Eigen::VectorXd w(8);
    for (int i = 0; i < 8; ++i) w[i] = i + 1.0;
    w /= w.sum();
    const double sigma = 0.8;
    const double expect = gccm::sigma_mse(w, sigma);
    const auto [mean, se] = gccm::mc_sigma_mse(w, sigma, 400000, 21);
    REQUIRE(se > 0.0);
    REQUIRE_MSG(std::fabs(mean - expect) <= 4.0 * se + 1e-12,
                "mc %.6e vs closed %.6e (se %.2e)", mean, expect, se);
}

// --------------------------------------------------------------------------
void test_gamma_and_dirichlet() {
    gccm::RngStream rng(31);
    for (double alpha : {0.4, 3.5}) {
        const int n = 150000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double g = gccm::gamma_draw(rng, alpha);
            REQUIRE(g >= 0.0);
            sum += g;
            sum2 += g * g;
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        REQUIRE_MSG(std::fabs(mean - alpha) <= 5.0 * std::sqrt(alpha / n),
                    "gamma mean %.4f for alpha %.1f", mean, alpha);
        REQUIRE_MSG(std::fabs(var - alpha) <= 0.05 * alpha + 0.01,
                    "gamma var %.4f for alpha %.1f", var, alpha);
    }

    const Eigen::VectorXd w = gccm::dirichlet_weights(rng, 10, 0.3);
    REQUIRE(w.size() == 10);
    REQUIRE(approx_eq(w.sum(), 1.0, 1e-12));
    REQUIRE(w.minCoeff() >= 0.0);

    // Large concentration parameter: weights pile up near uniform.
    const Eigen::VectorXd tight = gccm::dirichlet_weights(rng, 10, 400.0);
    REQUIRE((tight.array() - 0.1).abs().maxCoeff() <= 0.05);

    REQUIRE_THROWS_AS(gccm::gamma_draw(rng, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(gccm::dirichlet_weights(rng, 0, 1.0),
                      std::invalid_argument);
}

// --------------------------------------------------------------------------
void test_uniform_optimality_search() {
    const auto rep = gccm::verify_uniform_optimal(40, 400, 4);
    REQUIRE(rep.n_samples == 40 && rep.trials == 400);
    const double expect = 2.0 / 40.0 - 1.0 / 1600.0;  // sigma = 1
    REQUIRE(rel_err(rep.uniform_mse, expect) <= 1e-14);
    REQUIRE(approx_eq(rep.uniform_sum_s2, 1.0 / 40.0, 1e-14));
    REQUIRE_MSG(rep.margin > 0.0, "margin %.3e", rep.margin);
    REQUIRE(rep.min_random_mse >= rep.uniform_mse);

    // Finite-N overlap comparison: uniform weighting beats heavy-tailed
    // Dirichlet(0.3) on the same datasets.
    const auto ov = gccm::verify_uniform_optimal(1000, 50, 7, 100, 1.0, 4, 0.3);
    REQUIRE(ov.overlap_seeds == 4);
    REQUIRE_MSG(ov.overlap_uniform_mean > 0.75, "uniform overlap %.3f",
                ov.overlap_uniform_mean);
    REQUIRE_MSG(ov.overlap_uniform_mean > ov.overlap_random_mean,
                "uniform %.4f vs random %.4f", ov.overlap_uniform_mean,
                ov.overlap_random_mean);
}

// --------------------------------------------------------------------------
// Overlap improves with sample count at fixed dimension
void test_overlap_grows_with_samples() {
    double prev = 0.0;
    for (int m : {500, 5000}) {
        const auto p = gccm::make_toy_params(100, m, 3, 1.0, 31);
        const auto sample = gccm::generate_toy(p);
        const auto eig = gccm::leading_direction(gccm::weighted_scatter(
            sample, Eigen::VectorXd::Constant(m, 1.0 / m)));
        const double ov = eig.overlap_fn(sample.w0);
        REQUIRE_MSG(ov > prev + 0.03, "overlap M=%d: %.4f (prev %.4f)", m, ov,
                    prev);
        prev = ov;
    }
    REQUIRE(prev > 0.9);  // M = 50 N is deep in the recovery regime
}

}  // namespace

int main() {
    RUN(test_params_and_validation);
    RUN(test_generate_determinism_and_structure);
    RUN(test_two_sample_closed_form);
    RUN(test_scatter_assembly);
    RUN(test_leading_direction_known_spectrum);
    RUN(test_sigma_mse_closed_forms);
    RUN(test_mc_matches_closed_form);
    RUN(test_gamma_and_dirichlet);
    RUN(test_uniform_optimality_search);
    RUN(test_overlap_grows_with_samples);
    return 0;
}
