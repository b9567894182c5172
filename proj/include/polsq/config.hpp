#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "polsq/fluctuations.hpp"
#include "polsq/params.hpp"
#include "polsq/stochastic.hpp"

namespace polsq {

/**
 * Run configuration in user units.
 *
 * Rates and detunings are in MHz and mean rate / 2 pi (kappa_mhz = 5 is
 * kappa = 2 pi x 5e6 rad/s). Angles are in degrees. Conversion to SI happens
 * only in the accessors below, so rendering a parsed config reproduces the
 * numbers the user wrote.
 */
struct RunConfig {
    double kappa_mhz = 5.0;
    double gamma_perp_mhz = 1.3;
    double gamma_par_mhz = 1.3;
    double gamma_mhz = 2.6;
    double delta_mhz = -50.0;
    double transmission = 0.10;
    double n_atoms = 1e7;
    double g_mhz = 0.0348;
    double eta_det = 0.718;

    double drive_power_uw = 10.0;
    double flux_per_uw = 1.8665e14;  ///< effective photons/s per uW in the cavity mode

    double detuning_mhz = -230.0;  ///< operating point for spectrum / stokes / oracle
    int branch = 0;                ///< steady-state branch (ascending intensity)

    double scan_start_mhz = -300.0;
    double scan_stop_mhz = 100.0;
    double scan_step_mhz = 0.5;

    std::vector<double> frequencies_mhz{3.0, 6.0};
    double theta_start_deg = -180.0;
    double theta_stop_deg = 180.0;
    int theta_points = 73;
    Mode spectrum_mode = Mode::y;

    double oracle_dt_ns = 0.01;
    double oracle_duration_us = 2000.0;
    std::uint64_t oracle_seed = 1;
    double oracle_burn_in = 0.05;
    std::size_t oracle_segment = 4096;
    double oracle_overlap = 0.5;
    std::size_t oracle_decimation = 10;
    std::vector<double> oracle_frequencies_mhz{3.0, 6.0};
    std::vector<double> oracle_thetas_deg{0.0, 90.0};
    double oracle_perturb = 0.0;  ///< fractional s_x shift of the simulated model

    std::string output_dir;
    std::string format = "csv";

    /// Line each key was read from (absent keys keep their defaults).
    std::map<std::string, int> key_lines;

    PhysicalParams physical_params() const;
    DriveField drive() const;
    double detuning() const;                  ///< rad/s
    std::vector<double> scan_grid() const;    ///< rad/s
    std::vector<double> omegas() const;       ///< rad/s
    std::vector<double> thetas() const;       ///< rad
    std::vector<double> oracle_omegas() const;
    TrajectoryConfig trajectory() const;
};

/// Parses flat `key = value` text; `#` starts a comment line. Unknown or
/// repeated keys, malformed values and failed physical invariants throw
/// ValidationError carrying the key and line.
RunConfig parse_config(std::string_view text);

/// Canonical `key = value` rendering in a fixed key order.
std::string render_config(const RunConfig& config);

/// 64-bit FNV-1a of the canonical rendering without output_dir and format,
/// as 16 hex digits.
std::string config_hash(const RunConfig& config);

double mhz_to_rad(double mhz);
double rad_to_mhz(double rad_per_s);
double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Shortest round-trip decimal form.
std::string format_number(double value);

}  // namespace polsq
