// gccm: command-line front end for the reweighted-classification saddle-point
// solver, its sensitivity analysis, and the finite-N simulators.

#include "gccm/eos_solver.hpp"
#include "gccm/erm_sim.hpp"
#include "gccm/io_util.hpp"
#include "gccm/multiclass_toy.hpp"
#include "gccm/quadrature.hpp"
#include "gccm/sensitivity.hpp"
#include "gccm/sweeps.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// shared option plumbing

struct CommonConfig {
    std::string loss = "ce_logistic";
    double gamma = 200.0;
    double alpha = 20.0;
    double r_plus = 0.5;
    double sigma_plus = 0.6;
    double sigma_minus = 0.6;
    double s_plus = 0.5;
    double b = 0.0;
    double damping = 0.5;
    double tol = 1e-9;
    int max_iter = 5000;
    int quadrature_order = 100;
    std::string output;  // empty = stdout

    gccm::ProblemParams params() const {
        gccm::ProblemParams p;
        p.loss = gccm::make_loss(loss, gamma);
        p.alpha = alpha;
        p.r_plus = r_plus;
        p.sigma_plus = sigma_plus;
        p.sigma_minus = sigma_minus;
        p.s_plus = s_plus;
        p.b = b;
        gccm::validate(p);
        return p;
    }
    gccm::EOSOptions eos() const { return {damping, tol, max_iter}; }
};

void add_model_options(CLI::App* sub, CommonConfig& c) {
    sub->add_option("--loss", c.loss,
                    "loss family: zero_one, smoothed_zero_one, ce_logistic, "
                    "hinge, exponential")
        ->capture_default_str();
    sub->add_option("--gamma", c.gamma, "smoothed_zero_one sharpness")
        ->capture_default_str();
    sub->add_option("--alpha", c.alpha, "samples per dimension M/N")
        ->capture_default_str();
    sub->add_option("--r_plus", c.r_plus, "fraction of +1 samples")
        ->capture_default_str();
    sub->add_option("--sigma_plus", c.sigma_plus, "+1 class noise scale")
        ->capture_default_str();
    sub->add_option("--sigma_minus", c.sigma_minus, "-1 class noise scale")
        ->capture_default_str();
    sub->add_option("--s_plus", c.s_plus, "loss weight on the +1 class")
        ->capture_default_str();
    sub->add_option("--b", c.b, "classifier bias")->capture_default_str();
}

void add_solver_options(CLI::App* sub, CommonConfig& c) {
    sub->add_option("--damping", c.damping, "fixed-point under-relaxation")
        ->capture_default_str();
    sub->add_option("--tol", c.tol, "fixed-point residual tolerance")
        ->capture_default_str();
    sub->add_option("--max_iter", c.max_iter, "fixed-point iteration cap")
        ->capture_default_str();
    sub->add_option("--quadrature_order", c.quadrature_order,
                    "Gauss-Hermite order")
        ->capture_default_str();
}

void add_output_option(CLI::App* sub, CommonConfig& c) {
    sub->add_option("--output", c.output, "output file (default: stdout)");
}

// Flat key=value config files.  The vendored CLI11 processes a config
// option only on the root app (subcommand set_config is silently skipped
// during parsing), so files are applied by hand after the parse: explicit
// command-line flags keep priority over the file, unknown keys are
// rejected, and values run through each option's normal callback so type
// conversion and validation behave exactly as for a flag.
void enable_config_file(CLI::App* sub) {
    sub->add_option("--config",
                    "config file (flat key=value lines; flags win over file)");
}

void apply_config_file(CLI::App& sub) {
    CLI::Option* copt = sub.get_option_no_throw("--config");
    if (copt == nullptr || copt->count() == 0) return;
    const std::string path = copt->as<std::string>();
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);

    std::map<CLI::Option*, std::string> assignments;  // last mention wins
    std::string line;
    while (std::getline(in, line)) {
        const std::string text = CLI::detail::trim_copy(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: \"" +
                                        text + "\" in " + path);
        const std::string key = CLI::detail::trim_copy(text.substr(0, eq));
        const std::string value = CLI::detail::trim_copy(text.substr(eq + 1));
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (opt == nullptr) opt = sub.get_option_no_throw(key);  // positionals
        if (opt == nullptr || opt == copt)
            throw std::invalid_argument("unknown config key \"" + key +
                                        "\" in " + path);
        assignments[opt] = value;
    }
    for (const auto& [opt, value] : assignments) {
        if (opt->count() > 0) continue;  // given on the command line
        opt->add_result(value);
        opt->run_callback();
    }
}

// "lo:hi:count" -> equispaced grid (count >= 2), or a single number.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        grid.push_back(std::stod(text));
        return grid;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw std::invalid_argument("grid must be \"lo:hi:count\", got \"" +
                                    text + "\"");
    const double lo = std::stod(text.substr(0, c1));
    const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const int count = std::stoi(text.substr(c2 + 1));
    if (count < 2 || hi <= lo)
        throw std::invalid_argument("grid needs hi > lo and count >= 2");
    grid.resize(count);
    for (int i = 0; i < count; ++i)
        grid[i] = lo + (hi - lo) * double(i) / (count - 1);
    return grid;
}

// Stream sink: file if path nonempty (exit code 3 on failure), else stdout.
struct OutputSink {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit OutputSink(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file)
                throw std::ios_base::failure("cannot open output file: " + path);
            os = &file;
        }
    }
    std::ostream& stream() { return *os; }
};

int parallelism_from(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("GCCM_PARALLELISM")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

json params_json(const gccm::ProblemParams& p) {
    json j;
    j["loss"] = gccm::loss_name(p.loss);
    if (p.loss.family == gccm::LossFamily::smoothed_zero_one)
        j["gamma"] = p.loss.gamma;
    j["alpha"] = p.alpha;
    j["r_plus"] = p.r_plus;
    j["sigma_plus"] = p.sigma_plus;
    j["sigma_minus"] = p.sigma_minus;
    j["s_plus"] = p.s_plus;
    j["b"] = p.b;
    return j;
}

json solution_json(const gccm::EOSSolution& sol) {
    json j;
    j["order"] = {{"m", sol.order.m},
                  {"chi", sol.order.chi},
                  {"m_tilde", sol.order.m_tilde},
                  {"chi_tilde", sol.order.chi_tilde},
                  {"q_tilde", sol.order.q_tilde}};
    j["energy"] = sol.energy;
    j["iterations"] = sol.iterations;
    j["residual"] = sol.residual;
    j["converged"] = sol.converged;
    return j;
}

gccm::Metadata make_metadata(const CommonConfig& c, const gccm::ProblemParams& p) {
    gccm::Metadata meta;
    meta.config = gccm::config_echo(p);
    meta.config.emplace_back("damping", gccm::format_g17(c.damping));
    meta.config.emplace_back("tol", gccm::format_g17(c.tol));
    meta.config.emplace_back("max_iter", std::to_string(c.max_iter));
    meta.config.emplace_back("quadrature_order",
                             std::to_string(c.quadrature_order));
    return meta;
}

// ---------------------------------------------------------------------------
// subcommand runners

int run_eos_solve(const CommonConfig& c) {
    const gccm::ProblemParams p = c.params();
    const auto& quad = gccm::shared_quadrature(c.quadrature_order);
    const gccm::EOSSolution sol = gccm::solve_eos(p, quad, c.eos());

    json j = solution_json(sol);
    j["params"] = params_json(p);
    j["quadrature_order"] = c.quadrature_order;
    OutputSink sink(c.output);
    sink.stream() << j.dump(2) << "\n";
    return 0;
}

int run_sweep_b(const CommonConfig& c, const std::string& grid_text) {
    const gccm::ProblemParams p = c.params();
    const auto& quad = gccm::shared_quadrature(c.quadrature_order);
    const std::vector<double> grid =
        grid_text.empty() ? gccm::default_b_grid() : parse_grid(grid_text);
    const auto rows = gccm::sweep_b(p, grid, quad, c.eos());

    gccm::Metadata meta = make_metadata(c, p);
    meta.config.emplace_back("command", "sweep-b");
    OutputSink sink(c.output);
    gccm::write_sweep_csv(sink.stream(), rows, meta);
    return 0;
}

int run_sweep_s(const CommonConfig& c, const std::string& mode_name,
                const std::string& grid_text, double b_lo, double b_hi) {
    const gccm::ProblemParams p = c.params();
    const auto& quad = gccm::shared_quadrature(c.quadrature_order);
    const gccm::SweepMode mode = gccm::sweep_mode_from_name(mode_name);
    const std::vector<double> grid =
        grid_text.empty() ? gccm::default_s_grid() : parse_grid(grid_text);

    gccm::SweepOptions opts;
    opts.b_lo = b_lo;
    opts.b_hi = b_hi;
    opts.eos = c.eos();
    const auto rows = gccm::sweep_s(p, grid, mode, quad, opts);

    gccm::Metadata meta = make_metadata(c, p);
    meta.config.emplace_back("command", "sweep-s");
    meta.config.emplace_back("mode", mode_name);
    OutputSink sink(c.output);
    gccm::write_sweep_csv(sink.stream(), rows, meta);
    return 0;
}

int run_derivative_check(const CommonConfig& c, double fd_delta) {
    const gccm::ProblemParams p = c.params();
    const auto& quad = gccm::shared_quadrature(c.quadrature_order);
    const gccm::EOSSolution sol = gccm::solve_eos(p, quad, c.eos());
    if (!sol.converged)
        throw std::runtime_error("EOS did not converge; cannot differentiate");

    const gccm::SensitivityBundle bundle =
        gccm::compute_sensitivity(p, sol, quad);

    json j;
    j["params"] = params_json(p);
    j["dm_ds"] = bundle.dm_ds;
    j["dchi_ds"] = bundle.dchi_ds;
    j["d_near_zero"] = bundle.d_near_zero;
    j["fd_delta"] = fd_delta;
    j["fd_dm_ds"] = gccm::fd_dm_ds(p, sol, fd_delta, quad);

    // The closed-form extremum identity only exists at the symmetric point.
    const bool symmetric = std::fabs(p.s_plus - 0.5) <= 1e-12 &&
                           std::fabs(p.b) <= 1e-12 &&
                           std::fabs(p.sigma_plus - p.sigma_minus) <=
                               1e-12 * std::max(p.sigma_plus, p.sigma_minus);
    if (symmetric) {
        const gccm::IdentityCheck chk =
            gccm::check_extremum_identity(p, sol, quad);
        j["identity_lhs"] = chk.lhs;
        j["identity_rhs"] = chk.rhs;
        j["identity_target"] = chk.target;
    } else {
        j["identity_lhs"] = nullptr;
        j["identity_rhs"] = nullptr;
        j["identity_target"] = nullptr;
    }
    OutputSink sink(c.output);
    sink.stream() << j.dump(2) << "\n";
    return 0;
}

int run_erm_sim(const CommonConfig& c, int n_dim, int reps,
                const std::string& grid_text, std::uint64_t seed,
                int parallelism_flag, bool optimize_bias, double grad_tol,
                int opt_max_iter) {
    const gccm::ProblemParams p = c.params();
    const std::vector<double> grid =
        grid_text.empty() ? parse_grid("-2:2:9") : parse_grid(grid_text);

    gccm::OptimizerSettings opts;
    opts.grad_tol = grad_tol;
    opts.max_iter = opt_max_iter;
    opts.optimize_bias = optimize_bias;
    const int par = parallelism_from(parallelism_flag);
    const gccm::ERMExperiment exp =
        gccm::run_experiment(p, n_dim, reps, grid, seed, opts, par);

    gccm::Metadata meta;
    meta.config = gccm::config_echo(p);
    meta.config.emplace_back("n_dim", std::to_string(n_dim));
    meta.config.emplace_back("reps", std::to_string(reps));
    meta.config.emplace_back("seed", std::to_string(seed));
    meta.rng_id = gccm::RngStream::algorithm_id;
    json opt_json = {{"grad_tol", opts.grad_tol},
                     {"max_iter", opts.max_iter},
                     {"armijo_c", opts.armijo_c},
                     {"optimize_bias", opts.optimize_bias}};
    meta.extra = "optimizer: " + opt_json.dump();

    OutputSink sink(c.output);
    gccm::write_erm_csv(sink.stream(), exp, meta);
    return 0;
}

int run_multiclass_toy(int n_dim, int n_samples, int n_classes, double sigma,
                       std::uint64_t seed, const std::string& weights_scheme,
                       int verify_trials, int overlap_seeds,
                       const std::string& output) {
    gccm::ToyParams params =
        gccm::make_toy_params(n_dim, n_samples, n_classes, sigma, seed);

    // Weight schemes: uniform | dirichlet:alpha | file:path
    if (weights_scheme.rfind("dirichlet:", 0) == 0) {
        const double alpha = std::stod(weights_scheme.substr(10));
        if (!(alpha > 0.0))
            throw std::invalid_argument("dirichlet alpha must be positive");
        gccm::RngStream rng(seed + 91);
        params.weights = gccm::dirichlet_weights(rng, n_samples, alpha);
    } else if (weights_scheme.rfind("file:", 0) == 0) {
        const std::string path = weights_scheme.substr(5);
        std::ifstream in(path);
        if (!in) throw std::ios_base::failure("cannot open weights file: " + path);
        for (int mu = 0; mu < n_samples; ++mu)
            if (!(in >> params.weights[mu]))
                throw std::invalid_argument("weights file must contain " +
                                            std::to_string(n_samples) +
                                            " numbers");
        const double total = params.weights.sum();
        if (!(total > 0.0))
            throw std::invalid_argument("weights must have a positive sum");
        params.weights /= total;
    } else if (weights_scheme != "uniform") {
        throw std::invalid_argument(
            "unknown weights scheme \"" + weights_scheme +
            "\"; expected uniform, dirichlet:ALPHA or file:PATH");
    }
    gccm::validate(params);

    const gccm::ToySample sample = gccm::generate_toy(params);
    const Eigen::MatrixXd a = gccm::weighted_scatter(sample, params.weights);
    const gccm::EigResult eig = gccm::leading_direction(a);

    json j;
    j["n_dim"] = n_dim;
    j["n_samples"] = n_samples;
    j["n_classes"] = n_classes;
    j["sigma"] = sigma;
    j["seed"] = seed;
    j["weights_scheme"] = weights_scheme;
    j["sum_s2"] = params.weights.squaredNorm();
    j["eigenvalue"] = eig.eigenvalue;
    j["power_iterations"] = eig.iterations;
    j["slow_convergence"] = eig.slow_convergence;
    j["overlap"] = eig.overlap_fn(sample.w0);
    j["sigma_mse"] = gccm::sigma_mse(params.weights, sigma);
    j["rng"] = gccm::RngStream::algorithm_id;

    if (verify_trials > 0) {
        const gccm::UniformOptimalityReport rep = gccm::verify_uniform_optimal(
            n_samples, verify_trials, seed + 17, n_dim, sigma, overlap_seeds);
        json v;
        v["trials"] = rep.trials;
        v["uniform_mse"] = rep.uniform_mse;
        v["min_random_mse"] = rep.min_random_mse;
        v["margin"] = rep.margin;
        if (overlap_seeds > 0) {
            v["overlap_uniform_mean"] = rep.overlap_uniform_mean;
            v["overlap_random_mean"] = rep.overlap_random_mean;
        }
        j["verify"] = v;
    }

    OutputSink sink(output);
    sink.stream() << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// figure reproduction

void write_rows_csv(const std::string& path, const std::vector<gccm::SweepRow>& rows,
                    gccm::Metadata meta, const std::string& figure) {
    meta.config.emplace_back("figure", figure);
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open output file: " + path);
    gccm::write_sweep_csv(out, rows, meta);
    std::cout << path << "\n";
}

std::string rtag(double r) { return r == 0.5 ? "r05" : "r02"; }

int run_figure(const std::string& figure, const std::string& outdir, int reps,
               int n_dim, std::uint64_t seed, int parallelism_flag,
               int quadrature_order) {
    const auto& quad = gccm::shared_quadrature(quadrature_order);
    const int par = parallelism_from(parallelism_flag);
    const std::string prefix = outdir.empty() ? "" : outdir + "/";
    const std::vector<std::string> losses = {"zero_one", "ce_logistic"};

    auto base_params = [&](const std::string& loss, double r, double sp,
                           double sm) {
        gccm::ProblemParams p;
        p.loss = gccm::make_loss(loss, 200.0);
        p.alpha = 20.0;
        p.r_plus = r;
        p.sigma_plus = sp;
        p.sigma_minus = sm;
        return p;
    };
    auto meta_for = [&](const gccm::ProblemParams& p) {
        gccm::Metadata meta;
        meta.config = gccm::config_echo(p);
        meta.config.emplace_back("quadrature_order",
                                 std::to_string(quadrature_order));
        return meta;
    };

    // Theory bias scans at fixed class weights (one file per loss; the rows
    // carry s_plus so the three curves live in one CSV).
    auto bias_scan_figure = [&](const std::string& fig, double r) {
        for (const std::string& loss : losses) {
            std::vector<gccm::SweepRow> rows;
            for (double sp : {0.1, 0.5, 0.9}) {
                gccm::ProblemParams p = base_params(loss, r, 0.6, 0.6);
                p.s_plus = sp;
                auto part = gccm::sweep_b(p, gccm::default_b_grid(), quad);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            write_rows_csv(prefix + fig + "_" + loss + ".csv", rows,
                           meta_for(base_params(loss, r, 0.6, 0.6)), fig);
        }
        return 0;
    };

    // Theory class-weight scans in one of the three protocols.
    auto s_scan_figure = [&](const std::string& fig, gccm::SweepMode mode,
                             double sp, double sm) {
        for (const std::string& loss : losses) {
            for (double r : {0.5, 0.2}) {
                gccm::ProblemParams p = base_params(loss, r, sp, sm);
                auto rows =
                    gccm::sweep_s(p, gccm::default_s_grid(), mode, quad);
                write_rows_csv(prefix + fig + "_" + loss + "_" + rtag(r) + ".csv",
                               rows, meta_for(p), fig);
            }
        }
        return 0;
    };

    auto erm_meta = [&](const gccm::ProblemParams& p, int n, int nreps) {
        gccm::Metadata meta;
        meta.config = gccm::config_echo(p);
        meta.config.emplace_back("n_dim", std::to_string(n));
        meta.config.emplace_back("reps", std::to_string(nreps));
        meta.config.emplace_back("seed", std::to_string(seed));
        meta.rng_id = gccm::RngStream::algorithm_id;
        return meta;
    };

    // Theory curve + finite-N points vs b (one pair of files per (r, s)).
    auto erm_bias_figure = [&](const std::string& fig, double sp, double sm) {
        for (double r : {0.5, 0.2}) {
            for (double s : {0.1, 0.5}) {
                gccm::ProblemParams p = base_params("ce_logistic", r, sp, sm);
                p.s_plus = s;
                const std::string stag = s == 0.1 ? "s01" : "s05";
                auto rows = gccm::sweep_b(p, parse_grid("-2:2:81"), quad);
                write_rows_csv(prefix + fig + "_theory_" + rtag(r) + "_" + stag +
                                   ".csv",
                               rows, meta_for(p), fig);

                const auto exp = gccm::run_experiment(
                    p, n_dim, reps, parse_grid("-2:2:9"), seed, {}, par);
                const std::string path =
                    prefix + fig + "_erm_" + rtag(r) + "_" + stag + ".csv";
                std::ofstream out(path);
                if (!out)
                    throw std::ios_base::failure("cannot open output file: " + path);
                gccm::Metadata meta = erm_meta(p, n_dim, reps);
                meta.config.emplace_back("figure", fig);
                gccm::write_erm_csv(out, exp, meta);
                std::cout << path << "\n";
            }
        }
        return 0;
    };

    // Finite-N class-weight scans: per s, either fixed b = 0 or the bias
    // minimized jointly with w.
    auto erm_s_figure = [&](const std::string& fig, bool joint_bias) {
        for (double r : {0.5, 0.2}) {
            gccm::ProblemParams p = base_params("ce_logistic", r, 0.6, 0.6);
            auto theory_rows = gccm::sweep_s(
                p, gccm::default_s_grid(),
                joint_bias ? gccm::SweepMode::minimize_u
                           : gccm::SweepMode::fixed_b_zero,
                quad);
            write_rows_csv(prefix + fig + "_theory_" + rtag(r) + ".csv",
                           theory_rows, meta_for(p), fig);

            const std::string path = prefix + fig + "_erm_" + rtag(r) + ".csv";
            std::ofstream out(path);
            if (!out)
                throw std::ios_base::failure("cannot open output file: " + path);
            gccm::Metadata meta = erm_meta(p, n_dim, reps);
            meta.config.emplace_back("figure", fig);
            gccm::write_metadata(out, meta);
            out << "s_plus,b,m_mean,m_stderr,u_mean,u_stderr,n_failed\n";
            gccm::OptimizerSettings opts;
            opts.optimize_bias = joint_bias;
            for (const double s : parse_grid("0.05:0.95:13")) {
                gccm::ProblemParams ps = p;
                ps.s_plus = s;
                const auto exp = gccm::run_experiment(ps, n_dim, reps, {0.0},
                                                      seed, opts, par);
                const gccm::ERMPoint& pt = exp.points.front();
                out << gccm::format_g17(s) << ','
                    << gccm::format_g17(joint_bias ? pt.b_mean : 0.0) << ','
                    << gccm::format_g17(pt.m_mean) << ','
                    << gccm::format_g17(pt.m_stderr) << ','
                    << gccm::format_g17(pt.u_mean) << ','
                    << gccm::format_g17(pt.u_stderr) << ',' << pt.n_failed
                    << "\n";
            }
            std::cout << path << "\n";
        }
        return 0;
    };

    if (figure == "fig2") return bias_scan_figure("fig2", 0.5);
    if (figure == "fig3") return bias_scan_figure("fig3", 0.2);
    if (figure == "fig4")
        return s_scan_figure("fig4", gccm::SweepMode::maximize_m, 0.6, 0.6);
    if (figure == "fig5")
        return s_scan_figure("fig5", gccm::SweepMode::minimize_u, 0.6, 0.6);
    if (figure == "fig6")
        return s_scan_figure("fig6", gccm::SweepMode::fixed_b_zero, 0.6, 0.6);
    if (figure == "fig8")
        return s_scan_figure("fig8", gccm::SweepMode::maximize_m, 1.0, 0.5);
    if (figure == "fig9")
        return s_scan_figure("fig9", gccm::SweepMode::minimize_u, 1.0, 0.5);
    if (figure == "fig10")
        return s_scan_figure("fig10", gccm::SweepMode::fixed_b_zero, 1.0, 0.5);
    if (figure == "fig11") return erm_bias_figure("fig11", 0.6, 0.6);
    if (figure == "fig12") return erm_s_figure("fig12", true);
    if (figure == "fig13") return erm_s_figure("fig13", false);
    if (figure == "fig14") return erm_bias_figure("fig14", 1.0, 0.5);

    throw std::invalid_argument(
        "unknown figure \"" + figure +
        "\"; expected fig2-fig6 or fig8-fig14 (fig1/fig7 are schematic)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gccm: reweighted binary classification at the saddle point"};
    app.set_version_flag("--version", std::string("gccm ") + gccm::kToolVersion);
    app.require_subcommand(1);

    // eos-solve ------------------------------------------------------------
    CommonConfig eos_cfg;
    auto* eos_cmd = app.add_subcommand(
        "eos-solve", "solve the saddle-point equations at one parameter set");
    add_model_options(eos_cmd, eos_cfg);
    add_solver_options(eos_cmd, eos_cfg);
    add_output_option(eos_cmd, eos_cfg);
    enable_config_file(eos_cmd);

    // sweep-b ---------------------------------------------------------------
    CommonConfig swb_cfg;
    std::string swb_grid;
    auto* swb_cmd =
        app.add_subcommand("sweep-b", "scan the bias at fixed class weights");
    add_model_options(swb_cmd, swb_cfg);
    add_solver_options(swb_cmd, swb_cfg);
    add_output_option(swb_cmd, swb_cfg);
    swb_cmd->add_option("--b_grid,--b-grid", swb_grid,
                        "bias grid \"lo:hi:count\" (default -6:6:121)");
    enable_config_file(swb_cmd);

    // sweep-s ---------------------------------------------------------------
    CommonConfig sws_cfg;
    std::string sws_grid, sws_mode = "b0";
    double sws_blo = -6.0, sws_bhi = 6.0;
    auto* sws_cmd = app.add_subcommand(
        "sweep-s", "scan the class weight in one of the bias protocols");
    add_model_options(sws_cmd, sws_cfg);
    add_solver_options(sws_cmd, sws_cfg);
    add_output_option(sws_cmd, sws_cfg);
    sws_cmd->add_option("--mode", sws_mode, "b0 | mmax | umin")
        ->capture_default_str();
    sws_cmd->add_option("--s_grid,--s-grid", sws_grid,
                        "weight grid \"lo:hi:count\" (default 51 points)");
    sws_cmd->add_option("--b_lo", sws_blo, "bias search lower end")
        ->capture_default_str();
    sws_cmd->add_option("--b_hi", sws_bhi, "bias search upper end")
        ->capture_default_str();
    enable_config_file(sws_cmd);

    // derivative-check -------------------------------------------------------
    CommonConfig der_cfg;
    double der_delta = 1e-3;
    auto* der_cmd = app.add_subcommand(
        "derivative-check",
        "analytic dm/ds_plus, finite-difference cross-check, extremum identity");
    add_model_options(der_cmd, der_cfg);
    add_solver_options(der_cmd, der_cfg);
    add_output_option(der_cmd, der_cfg);
    der_cmd->add_option("--fd_delta", der_delta, "finite-difference step")
        ->capture_default_str();
    enable_config_file(der_cmd);

    // erm-sim ----------------------------------------------------------------
    CommonConfig erm_cfg;
    std::string erm_grid;
    int erm_n = 400, erm_reps = 100, erm_par = 0, erm_max_iter = 5000;
    std::uint64_t erm_seed = 1;
    bool erm_bias = false;
    double erm_grad_tol = 1e-6;
    auto* erm_cmd = app.add_subcommand(
        "erm-sim", "finite-N gradient-descent experiments on the sphere");
    add_model_options(erm_cmd, erm_cfg);
    add_output_option(erm_cmd, erm_cfg);
    erm_cmd->add_option("--n", erm_n, "dimension N")->capture_default_str();
    erm_cmd->add_option("--reps", erm_reps, "independent datasets")
        ->capture_default_str();
    erm_cmd->add_option("--b_grid,--b-grid", erm_grid,
                        "bias grid \"lo:hi:count\" (default -2:2:9)");
    erm_cmd->add_option("--seed", erm_seed, "base seed (dataset r uses seed+r)")
        ->capture_default_str();
    erm_cmd->add_option("--parallelism", erm_par,
                        "worker threads (default: GCCM_PARALLELISM or 1)");
    erm_cmd->add_flag("--optimize_bias", erm_bias,
                      "minimize jointly over the bias");
    erm_cmd->add_option("--grad_tol", erm_grad_tol,
                        "tangent-gradient stopping tolerance")
        ->capture_default_str();
    erm_cmd->add_option("--max_iter", erm_max_iter, "optimizer iteration cap")
        ->capture_default_str();
    enable_config_file(erm_cmd);

    // multiclass-toy -----------------------------------------------------------
    int toy_n = 200, toy_m = 2000, toy_k = 3, toy_trials = 0, toy_overlap = 0;
    double toy_sigma = 1.0;
    std::uint64_t toy_seed = 1;
    std::string toy_weights = "uniform", toy_output;
    auto* toy_cmd = app.add_subcommand(
        "multiclass-toy", "spectral estimator with reweighted scatter");
    toy_cmd->add_option("--n_dim", toy_n, "dimension N")->capture_default_str();
    toy_cmd->add_option("--n_samples", toy_m, "sample count M")
        ->capture_default_str();
    toy_cmd->add_option("--n_classes", toy_k, "number of label values")
        ->capture_default_str();
    toy_cmd->add_option("--sigma", toy_sigma, "noise scale")
        ->capture_default_str();
    toy_cmd->add_option("--seed", toy_seed, "rng seed")->capture_default_str();
    toy_cmd->add_option("--weights", toy_weights,
                        "uniform | dirichlet:ALPHA | file:PATH")
        ->capture_default_str();
    toy_cmd->add_option("--verify_trials", toy_trials,
                        "random-search trials for uniform optimality (0 = skip)")
        ->capture_default_str();
    toy_cmd->add_option("--overlap_seeds", toy_overlap,
                        "finite-N overlap comparison seeds (0 = skip)")
        ->capture_default_str();
    toy_cmd->add_option("--output", toy_output, "output file (default: stdout)");
    enable_config_file(toy_cmd);

    // reproduce-figure ----------------------------------------------------------
    std::string fig_name, fig_dir;
    int fig_reps = 100, fig_n = 400, fig_par = 0, fig_quad = 100;
    std::uint64_t fig_seed = 1;
    auto* fig_cmd = app.add_subcommand(
        "reproduce-figure", "write the data files behind one figure");
    fig_cmd->add_option("figure", fig_name, "fig2..fig6, fig8..fig14")
        ->required();
    fig_cmd->add_option("--output_dir,--output-dir", fig_dir,
                        "directory for the CSV files (default: .)");
    fig_cmd->add_option("--reps", fig_reps, "finite-N replicates")
        ->capture_default_str();
    fig_cmd->add_option("--n", fig_n, "finite-N dimension")
        ->capture_default_str();
    fig_cmd->add_option("--seed", fig_seed, "base seed")->capture_default_str();
    fig_cmd->add_option("--parallelism", fig_par,
                        "worker threads (default: GCCM_PARALLELISM or 1)");
    fig_cmd->add_option("--quadrature_order", fig_quad, "Gauss-Hermite order")
        ->capture_default_str();
    enable_config_file(fig_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // schema/usage problems exit 2
    }

    try {
        for (CLI::App* sub : app.get_subcommands()) apply_config_file(*sub);
        if (eos_cmd->parsed()) return run_eos_solve(eos_cfg);
        if (swb_cmd->parsed()) return run_sweep_b(swb_cfg, swb_grid);
        if (sws_cmd->parsed())
            return run_sweep_s(sws_cfg, sws_mode, sws_grid, sws_blo, sws_bhi);
        if (der_cmd->parsed()) return run_derivative_check(der_cfg, der_delta);
        if (erm_cmd->parsed())
            return run_erm_sim(erm_cfg, erm_n, erm_reps, erm_grid, erm_seed,
                               erm_par, erm_bias, erm_grad_tol, erm_max_iter);
        if (toy_cmd->parsed())
            return run_multiclass_toy(toy_n, toy_m, toy_k, toy_sigma, toy_seed,
                                      toy_weights, toy_trials, toy_overlap,
                                      toy_output);
        if (fig_cmd->parsed())
            return run_figure(fig_name, fig_dir, fig_reps, fig_n, fig_seed,
                              fig_par, fig_quad);
    } catch (const CLI::ParseError& e) {
        // config-file values that fail option conversion or validation
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const gccm::UnsupportedLossOperation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
