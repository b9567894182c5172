#pragma once

#include <complex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polsq/params.hpp"

namespace polsq {

/**
 * One intracavity mean-field solution.
 *
 * arg(alpha_x) follows from the drive phase through the complex steady-state
 * relation. Quadrature angles everywhere else are measured from arg(alpha_x),
 * so a real drive and a drive rotated to make alpha_x real give identical
 * spectra.
 */
struct SteadyState {
    std::complex<double> alpha_x{0.0, 0.0};
    double s_x = 0.0;
    double delta_c = 0.0;
    double delta_0 = 0.0;
    double drive_flux = 0.0;   ///< |alpha_in|^2
    double drive_phase = 0.0;  ///< arg(alpha_in)
    int branch_index = 0;
    bool mean_field_stable = true;
    double x_mode_margin = 0.0;  ///< most unstable Re(lambda) of the x-mode drift
    double y_mode_margin = 0.0;  ///< most unstable Re(lambda) of the y-mode drift

    double intensity() const { return std::norm(alpha_x); }
    double phase() const { return std::arg(alpha_x); }
    std::complex<double> alpha_in() const { return std::polar(std::sqrt(drive_flux), drive_phase); }
};

/// Builds a SteadyState from an explicit intracavity field, filling the
/// saturation, the drive that sustains it and both stability margins.
SteadyState make_steady_state(const PhysicalParams& params, double delta_c,
                              std::complex<double> alpha_x, int branch_index = 0);

/// |alpha_in|^2 required to hold intracavity intensity I at detuning delta_c:
/// I [kappa^2 + (delta_c - delta_0 (1 - s(I)))^2] / (2 kappa).
double drive_for_intensity(const PhysicalParams& params, double delta_c, double intensity);

/// |[kappa + i(delta_c - delta_0 (1 - s_x))] alpha_x - sqrt(2 kappa) alpha_in|.
double steady_state_residual(const SteadyState& steady, const PhysicalParams& params);

/// All intracavity solutions for one drive and cavity detuning, sorted by
/// intensity. Coincident roots (1e-7 relative) are merged.
std::vector<SteadyState> steady_state(const PhysicalParams& params, const DriveField& drive,
                                      double delta_c);

/// Positive roots I of the steady-state intensity cubic, ascending.
std::vector<double> solve_intensity_cubic(const PhysicalParams& params, double drive_flux,
                                          double delta_c);

struct TurningPoint {
    double intensity = 0.0;
    double drive_flux = 0.0;
};

/// Folds of the drive-vs-intensity curve, ascending in intensity. Empty when
/// monostable. When `drive_range` is given only folds with drive flux inside
/// it are returned.
std::vector<TurningPoint> turning_points(const PhysicalParams& params, double delta_c,
                                         std::optional<std::pair<double, double>> drive_range = {});

/// Closed-form y-mode stability margin, -kappa + sqrt(max(0, chi^2 - dy^2)).
double y_mode_stability(const SteadyState& steady, const PhysicalParams& params);

/// Same for the x-mode (mean-field) linearization.
double x_mode_stability(const SteadyState& steady, const PhysicalParams& params);

struct ScanRecord {
    double delta_c = 0.0;
    std::vector<SteadyState> branches;
    int followed_branch = 0;  ///< index into `branches` of the hysteresis path
    bool jumped = false;      ///< the followed branch vanished at this step
    double transmitted_plus = 0.0;
    double transmitted_minus = 0.0;
    bool linear_polarization_stable = true;
};

struct ScanResult {
    std::vector<ScanRecord> records;
};

/// Sweeps the cavity detuning over a monotone grid. The followed branch starts
/// on the lowest-intensity solution and stays on its stable branch until that
/// branch disappears. Throws std::invalid_argument for a non-monotone grid.
ScanResult cavity_scan(const PhysicalParams& params, const DriveField& drive,
                       std::span<const double> delta_c_grid);

}  // namespace polsq
