#pragma once

#include "gccm/eos_solver.hpp"

#include <string>
#include <vector>

namespace gccm {

// Scan protocols over the bias b and the class weight s_plus, mirroring the
// three training protocols of interest: fixed b = 0, bias tuned to maximize
// the overlap m, and bias tuned to minimize the training energy u.
enum class SweepMode { fixed_b_zero, maximize_m, minimize_u };

std::string sweep_mode_name(SweepMode mode);          // "b0", "mmax", "umin"
SweepMode sweep_mode_from_name(const std::string& s);  // inverse, throws

struct SweepRow {
    ProblemParams params;  // full snapshot; s_plus and b are the row's values
    double m = 0.0;
    double u = 0.0;
    double chi = 0.0;
    bool converged = false;
    int iterations = 0;
    SweepMode mode = SweepMode::fixed_b_zero;
    // True when a b-optimization for this row ended on the search boundary
    // (the reported optimum is then only a boundary value). Not a CSV column;
    // carried in memory for callers that need to flag such rows.
    bool b_boundary = false;
};

struct SweepOptions {
    double b_lo = -6.0;       // coarse search range for the b-optimizers
    double b_hi = 6.0;
    int coarse_points = 121;  // 0.1 spacing over the default range
    double golden_tol = 1e-4; // final bracket width of the golden refinement
    EOSOptions eos{};
};

// Solve the EOS at each b in grid order, warm-starting from the previous
// point. Non-converged points are emitted with converged = false.
std::vector<SweepRow> sweep_b(const ProblemParams& params,
                              const std::vector<double>& b_grid,
                              const GaussianQuadrature& quad,
                              const EOSOptions& opts = {});

// Coarse grid + golden-section refinement of b. `boundary` is set when the
// coarse argmax sits on the first/last grid point, i.e. the true optimum may
// lie outside the search range.
struct BOptResult {
    EOSSolution sol;
    double b = 0.0;
    bool boundary = false;
    bool any_nonconverged = false;  // some evaluations failed and were skipped
    int evals = 0;
};

BOptResult maximize_m_over_b(const ProblemParams& params,
                             const GaussianQuadrature& quad,
                             const SweepOptions& opts = {});
BOptResult minimize_u_over_b(const ProblemParams& params,
                             const GaussianQuadrature& quad,
                             const SweepOptions& opts = {});

// One row per s in grid order; the row's b is 0 / argmax_b m / argmin_b u
// according to the mode.
std::vector<SweepRow> sweep_s(const ProblemParams& params,
                              const std::vector<double>& s_grid, SweepMode mode,
                              const GaussianQuadrature& quad,
                              const SweepOptions& opts = {});

// Default grids: b on [-6, 6] with 121 points; s_plus on [0.02, 0.98] with 51
// points plus the exact midpoint 0.5.
std::vector<double> default_b_grid();
std::vector<double> default_s_grid();

// Index of the converged row with maximal m; near-ties (within 1e-12) break
// toward s_plus closest to 0.5, then smallest |b|. Returns -1 if no row
// converged.
int argmax_m_row(const std::vector<SweepRow>& rows);

}  // namespace gccm
