#include "gccm/erm_sim.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace gccm {

Dataset generate_dataset(const ProblemParams& params, int n_dim,
                         std::uint64_t seed) {
    validate(params);
    if (n_dim < 1) throw std::invalid_argument("n_dim must be >= 1");
    const int n_samples = int(std::lround(params.alpha * n_dim));
    if (n_samples < 1)
        throw std::invalid_argument("alpha * n_dim rounds to zero samples");

    Dataset data;
    data.n_dim = n_dim;
    data.n_samples = n_samples;
    data.seed = seed;
    RngStream rng(seed);

    // Teacher direction first, then per sample: label, then the noise vector.
    data.w0.resize(n_dim);
    for (int i = 0; i < n_dim; ++i) data.w0[i] = rng.gaussian();
    data.w0 *= std::sqrt(double(n_dim)) / data.w0.norm();

    data.inputs.resize(n_samples, n_dim);
    data.labels.resize(n_samples);
    const double inv_sqrt_n = 1.0 / std::sqrt(double(n_dim));
    for (int mu = 0; mu < n_samples; ++mu) {
        const int y = rng.uniform() <= params.r_plus ? +1 : -1;
        data.labels[mu] = y;
        const double sigma = params.sigma_of(y);
        for (int i = 0; i < n_dim; ++i)
            data.inputs(mu, i) = y * data.w0[i] * inv_sqrt_n + sigma * rng.gaussian();
    }
    return data;
}

namespace {

struct Objective {
    const Dataset* data;
    const LossSpec* loss;
    Eigen::VectorXd sw;  // per-sample class weight s_{y_mu}
    Eigen::VectorXd yv;  // labels as doubles
    double sqrt_n;

    // H/N; fills the margins (w.x/sqrt(N)) for reuse by the gradient.
    double value(const Eigen::VectorXd& w, double b,
                 Eigen::VectorXd& marg) const {
        marg.noalias() = data->inputs * w;
        marg /= sqrt_n;
        double f = 0.0;
        for (int mu = 0; mu < data->n_samples; ++mu)
            f += sw[mu] * loss_value(*loss, yv[mu] * (marg[mu] + b));
        return f / data->n_dim;
    }

    // grad_w(H/N) into gw; returns d(H/N)/db. marg must come from value().
    double gradient(const Eigen::VectorXd& marg, double b,
                    Eigen::VectorXd& coef, Eigen::VectorXd& gw) const {
        double gb = 0.0;
        for (int mu = 0; mu < data->n_samples; ++mu) {
            const double g = loss_grad(*loss, yv[mu] * (marg[mu] + b));
            coef[mu] = -sw[mu] * yv[mu] * g;
            gb += coef[mu];
        }
        gw.noalias() = data->inputs.transpose() * coef;
        gw /= (sqrt_n * data->n_dim);
        return gb / data->n_dim;
    }
};

MinimizeResult minimize_impl(const Dataset& data, const LossSpec& loss, double b,
                             double s_plus, const OptimizerSettings& opts,
                             const Eigen::VectorXd* w_init) {
    if (!(s_plus >= 0.0 && s_plus <= 1.0))
        throw std::invalid_argument("s_plus must lie in [0, 1]");
    if (!loss_differentiable(loss))
        throw UnsupportedLossOperation(
            "gradient-based ERM needs a differentiable loss; use "
            "smoothed_zero_one instead of zero_one");

    const int n = data.n_dim;
    const int m = data.n_samples;
    const double sqrt_n = std::sqrt(double(n));

    Objective obj;
    obj.data = &data;
    obj.loss = &loss;
    obj.sqrt_n = sqrt_n;
    obj.sw.resize(m);
    obj.yv.resize(m);
    for (int mu = 0; mu < m; ++mu) {
        obj.yv[mu] = double(data.labels[mu]);
        obj.sw[mu] = data.labels[mu] > 0 ? s_plus : 1.0 - s_plus;
    }

    // Init: caller-provided warm start, a random direction (restart
    // experiments), or the weighted class-mean direction -- the first
    // gradient direction from w = 0.
    Eigen::VectorXd w(n);
    if (w_init != nullptr) {
        w = *w_init;
    } else if (opts.random_init) {
        RngStream rng(opts.init_seed);
        for (int i = 0; i < n; ++i) w[i] = rng.gaussian();
    } else {
        w.setZero();
        for (int mu = 0; mu < m; ++mu)
            w.noalias() += obj.sw[mu] * obj.yv[mu] * data.inputs.row(mu).transpose();
        if (w.norm() < 1e-12) w.setOnes();
    }
    w *= sqrt_n / w.norm();
    double bias = b;

    Eigen::VectorXd marg(m), coef(m), gw(n), gt(n), w_trial(n), marg_trial(m);
    double f = obj.value(w, bias, marg);
    double gb = obj.gradient(marg, bias, coef, gw);

    auto project = [&](const Eigen::VectorXd& at_w, const Eigen::VectorXd& grad,
                       Eigen::VectorXd& out) {
        out = grad - (grad.dot(at_w) / double(n)) * at_w;  // at_w.at_w = n
    };
    project(w, gw, gt);
    double gtb = opts.optimize_bias ? gb : 0.0;
    auto grad_norm = [&]() { return std::sqrt(gt.squaredNorm() + gtb * gtb); };

    MinimizeResult res;
    double step = 1.0 / std::max(grad_norm(), 1e-12);
    Eigen::VectorXd s_vec(n), gt_prev(n);

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (grad_norm() <= opts.grad_tol) {
            res.converged = true;
            break;
        }

        const double deriv = -(gt.squaredNorm() + gtb * gtb);
        double eta = step;
        double f_trial = 0.0;
        double b_trial = bias;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            w_trial = w - eta * gt;
            w_trial *= sqrt_n / w_trial.norm();
            b_trial = opts.optimize_bias ? bias - eta * gtb : bias;
            f_trial = obj.value(w_trial, b_trial, marg_trial);
            if (f_trial <= f + opts.armijo_c * eta * deriv) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;  // line search stalled: report non-converged

        gt_prev = gt;
        const double gtb_prev = gtb;
        s_vec = w_trial - w;
        const double sb = b_trial - bias;
        w.swap(w_trial);
        bias = b_trial;
        marg.swap(marg_trial);
        f = f_trial;

        gb = obj.gradient(marg, bias, coef, gw);
        project(w, gw, gt);
        gtb = opts.optimize_bias ? gb : 0.0;

        // Barzilai-Borwein step for the next iteration (ambient differences;
        // accurate for the small steps taken near convergence).
        const double sy = s_vec.dot(gt - gt_prev) + sb * (gtb - gtb_prev);
        const double ss = s_vec.squaredNorm() + sb * sb;
        if (sy > 1e-18 && std::isfinite(sy))
            step = std::min(std::max(ss / sy, 1e-10), 1e10);
        else
            step = eta * 2.0;
    }

    res.w_hat = w;
    res.u = f;
    res.b = bias;
    res.grad_norm = grad_norm();
    res.iterations = it;
    return res;
}

}  // namespace

MinimizeResult minimize_weighted_loss(const Dataset& data, const LossSpec& loss,
                                      double b, double s_plus,
                                      const OptimizerSettings& opts) {
    return minimize_impl(data, loss, b, s_plus, opts, nullptr);
}

ERMExperiment run_experiment(const ProblemParams& params, int n_dim, int reps,
                             const std::vector<double>& b_grid,
                             std::uint64_t base_seed,
                             const OptimizerSettings& opts, int parallelism) {
    validate(params);
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (b_grid.empty()) throw std::invalid_argument("b grid is empty");

    const int nb = int(b_grid.size());
    struct Cell {
        double m = 0.0, u = 0.0, b = 0.0, grad_norm = 0.0;
        int iterations = 0;
        bool ok = false;
    };
    std::vector<Cell> cells(std::size_t(reps) * nb);

    auto run_rep = [&](int rep) {
        const Dataset data = generate_dataset(params, n_dim, base_seed + rep);
        Eigen::VectorXd warm;
        for (int j = 0; j < nb; ++j) {
            const MinimizeResult r =
                minimize_impl(data, params.loss, b_grid[j], params.s_plus, opts,
                              warm.size() > 0 ? &warm : nullptr);
            Cell& c = cells[std::size_t(rep) * nb + j];
            c.ok = r.converged;
            c.m = r.w_hat.dot(data.w0) / n_dim;
            c.u = r.u;
            c.b = r.b;
            c.grad_norm = r.grad_norm;
            c.iterations = r.iterations;
            if (r.converged) warm = r.w_hat;  // follow the solution along b
        }
    };

    const int n_threads = std::max(1, std::min(parallelism, reps));
    if (n_threads == 1) {
        for (int rep = 0; rep < reps; ++rep) run_rep(rep);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (int rep = next.fetch_add(1); rep < reps;
                     rep = next.fetch_add(1))
                    run_rep(rep);
            });
        for (auto& th : pool) th.join();
    }

    ERMExperiment exp;
    exp.n_dim = n_dim;
    exp.reps = reps;
    exp.base_seed = base_seed;
    exp.optimizer = opts;
    exp.points.resize(nb);
    for (int j = 0; j < nb; ++j) {
        ERMPoint& pt = exp.points[j];
        pt.b = b_grid[j];
        double b_sum = 0.0;
        long iter_sum = 0;
        for (int rep = 0; rep < reps; ++rep) {  // fixed order: deterministic
            const Cell& c = cells[std::size_t(rep) * nb + j];
            iter_sum += c.iterations;
            pt.max_grad_norm = std::max(pt.max_grad_norm, c.grad_norm);
            if (!c.ok) {
                ++pt.n_failed;
                continue;
            }
            pt.m_values.push_back(c.m);
            pt.u_values.push_back(c.u);
            b_sum += c.b;
        }
        pt.mean_iterations = double(iter_sum) / reps;
        const int n_ok = int(pt.m_values.size());
        if (n_ok > 0) {
            double ms = 0.0, us = 0.0;
            for (double v : pt.m_values) ms += v;
            for (double v : pt.u_values) us += v;
            pt.m_mean = ms / n_ok;
            pt.u_mean = us / n_ok;
            pt.b_mean = b_sum / n_ok;
            if (n_ok > 1) {
                double mv = 0.0, uv = 0.0;
                for (double v : pt.m_values) mv += (v - pt.m_mean) * (v - pt.m_mean);
                for (double v : pt.u_values) uv += (v - pt.u_mean) * (v - pt.u_mean);
                pt.m_stderr = std::sqrt(mv / (n_ok - 1) / n_ok);
                pt.u_stderr = std::sqrt(uv / (n_ok - 1) / n_ok);
            }
        }
    }
    return exp;
}

}  // namespace gccm
