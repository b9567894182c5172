#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polsq/config.hpp"
#include "polsq/output.hpp"
#include "polsq/stochastic.hpp"

namespace polsq {

inline constexpr const char* kVersion = "0.1.0";

/// Steady state at the configured operating point and branch. Throws
/// ValidationError if the branch does not exist at that detuning.
SteadyState operating_point(const RunConfig& config);

/// Cavity detuning scan: branch intensities, circular components, stability.
std::vector<OutputTable> cmd_scan(const RunConfig& config);

/// Quadrature noise of one mode over the configured (omega, theta) grid, plus
/// a per-omega S_min / S_max / theta_min summary. Throws NumericalError when
/// the selected branch is unstable for that mode.
std::vector<OutputTable> cmd_spectrum(const RunConfig& config, Mode mode);

/// Homodyne phase scans (noise vs cos theta_hd) and the S2/S3 summary.
std::vector<OutputTable> cmd_stokes(const RunConfig& config);

struct OracleOutcome {
    std::vector<OutputTable> tables;
    ComparisonReport report;
};

/// Stochastic simulation vs analytic spectrum at the operating point.
OracleOutcome cmd_oracle(const RunConfig& config);

/// Human-readable parameter summary with notes and validity warnings.
std::string cmd_validate(const RunConfig& config);

/// Full command-line entry point. Returns the process exit code:
/// 0 success, 1 validation error, 2 numerical failure, 3 oracle mismatch.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polsq
