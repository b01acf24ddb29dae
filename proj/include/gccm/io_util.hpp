#pragma once

#include "gccm/erm_sim.hpp"
#include "gccm/sweeps.hpp"

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace gccm {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest exact decimal for CSV: %.17g round-trips every double.
std::string format_g17(double x);

std::string iso8601_now();

// Output preamble written as '#' comment lines. The timestamp is isolated on
// its own line so that reruns with identical config differ in exactly one
// line of bytes.
struct Metadata {
    std::vector<std::pair<std::string, std::string>> config;  // ordered k=v
    std::string rng_id;      // empty = omit the rng line
    std::string extra;       // optional one-line free-form entry (e.g. optimizer)
    bool timestamp = true;
};

void write_metadata(std::ostream& os, const Metadata& meta);

// Pinned column set for every theory scan (sweep-b and sweep-s alike).
// converged is written as 1/0.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const Metadata& meta);

// Pinned column set for the finite-N experiments.
void write_erm_csv(std::ostream& os, const ERMExperiment& exp,
                   const Metadata& meta);

/// Config echo helper: the flat key=value pairs for a ProblemParams.
std::vector<std::pair<std::string, std::string>> config_echo(
    const ProblemParams& params);

}  // namespace gccm
