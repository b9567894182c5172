#pragma once

#include <complex>
#include <string>
#include <vector>

namespace polsq {

/**
 * Physical parameters of the atom-cavity system.
 *
 * All rates and detunings are angular frequencies (rad/s). `delta` is the
 * atomic detuning; red detuning is negative.
 */
struct PhysicalParams {
    double kappa = 0.0;        ///< cavity amplitude decay rate
    double gamma_perp = 0.0;   ///< dipole decay channel
    double gamma_par = 0.0;    ///< dipole decay channel (drives optical pumping)
    double gamma = 0.0;        ///< total dipole decay, gamma_perp + gamma_par
    double delta = 0.0;        ///< atomic detuning
    double transmission = 0.0; ///< coupling-mirror power transmission T
    double n_atoms = 0.0;      ///< effective atom number N
    double g_coupling = 0.0;   ///< single-atom coupling g (photon-number normalization)
    double eta_det = 1.0;      ///< lumped detection efficiency

    /// Throws ValidationError naming the first field that breaks an invariant.
    void validate() const;

    /// |delta| >= 10 gamma. Outside it the large-detuning expansion is doubtful.
    bool large_detuning_valid() const;

    /// Non-fatal notes: large-detuning validity and the bad-cavity regime.
    std::vector<std::string> notes() const;
};

/// Input drive amplitude, in square-root photon-flux units.
struct DriveField {
    std::complex<double> alpha_in{0.0, 0.0};

    double flux() const { return std::norm(alpha_in); }
};

/// Linear atomic dephasing 2 N g'^2 kappa / (delta T), where g' is the
/// coupling expressed for a field normalized to circulating photon flux.
/// With g in rad/s (intracavity photon-number normalization) g'^2 =
/// g^2 T / (2 kappa), so the value is N g^2 / delta. Throws
/// std::domain_error for zero detuning.
double linear_dephasing(const PhysicalParams& params);

/// Saturation per intracavity photon, 2 g^2 / delta^2.
double saturation_per_photon(const PhysicalParams& params);

/// Saturation parameter s_x = 2 g^2 |alpha_x|^2 / delta^2.
double saturation(std::complex<double> alpha_x, const PhysicalParams& params);

}  // namespace polsq
