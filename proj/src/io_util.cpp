#include "gccm/io_util.hpp"

#include <cstdio>
#include <ctime>

namespace gccm {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string iso8601_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_metadata(std::ostream& os, const Metadata& meta) {
    os << "# gccm " << kToolVersion << "\n";
    if (meta.timestamp) os << "# timestamp: " << iso8601_now() << "\n";
    if (!meta.config.empty()) {
        os << "# config:";
        for (const auto& [k, v] : meta.config) os << ' ' << k << '=' << v;
        os << "\n";
    }
    if (!meta.rng_id.empty()) os << "# rng: " << meta.rng_id << "\n";
    if (!meta.extra.empty()) os << "# " << meta.extra << "\n";
}

std::vector<std::pair<std::string, std::string>> config_echo(
    const ProblemParams& params) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("loss", loss_name(params.loss));
    if (params.loss.family == LossFamily::smoothed_zero_one)
        kv.emplace_back("gamma", format_g17(params.loss.gamma));
    kv.emplace_back("alpha", format_g17(params.alpha));
    kv.emplace_back("r_plus", format_g17(params.r_plus));
    kv.emplace_back("sigma_plus", format_g17(params.sigma_plus));
    kv.emplace_back("sigma_minus", format_g17(params.sigma_minus));
    kv.emplace_back("s_plus", format_g17(params.s_plus));
    kv.emplace_back("b", format_g17(params.b));
    return kv;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const Metadata& meta) {
    write_metadata(os, meta);
    os << "loss,alpha,r_plus,sigma_plus,sigma_minus,s_plus,b,m,u,chi,"
          "converged,iterations,mode\n";
    for (const SweepRow& row : rows) {
        const ProblemParams& p = row.params;
        os << loss_name(p.loss) << ',' << format_g17(p.alpha) << ','
           << format_g17(p.r_plus) << ',' << format_g17(p.sigma_plus) << ','
           << format_g17(p.sigma_minus) << ',' << format_g17(p.s_plus) << ','
           << format_g17(p.b) << ',' << format_g17(row.m) << ','
           << format_g17(row.u) << ',' << format_g17(row.chi) << ','
           << (row.converged ? 1 : 0) << ',' << row.iterations << ','
           << sweep_mode_name(row.mode) << "\n";
    }
}

void write_erm_csv(std::ostream& os, const ERMExperiment& exp,
                   const Metadata& meta) {
    write_metadata(os, meta);
    os << "b,m_mean,m_stderr,u_mean,u_stderr,n_failed\n";
    for (const ERMPoint& pt : exp.points) {
        os << format_g17(pt.b) << ',' << format_g17(pt.m_mean) << ','
           << format_g17(pt.m_stderr) << ',' << format_g17(pt.u_mean) << ','
           << format_g17(pt.u_stderr) << ',' << pt.n_failed << "\n";
    }
}

}  // namespace gccm
