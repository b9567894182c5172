#pragma once

#include <complex>
#include <span>
#include <vector>

#include "polsq/fluctuations.hpp"

namespace polsq {

// Quantum Stokes parameters for light polarized along x with a vacuum y mode:
//   dS2 = alpha_x (dA_y^dag + dA_y),  dS3 = i alpha_x (dA_y^dag - dA_y),
// so S2/S3 noise is the y-mode quadrature noise at theta = 0 / pi/2 scaled by
// |alpha_x|^2. Homodyne detection at LO phase theta_hd sees
// cos(theta_hd) dS2 + sin(theta_hd) dS3.

struct StokesMeans {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
};

/// Mean Stokes vector of x-polarized light: (|alpha_x|^2, |alpha_x|^2, 0, 0).
StokesMeans stokes_means(std::complex<double> alpha_x);

struct StokesRecord {
    StokesMeans means;
    double omega = 0.0;
    double v_s2 = 0.0;  ///< photon-flux^2 units
    double v_s3 = 0.0;
    double v_s2_norm = 1.0;  ///< coherent state = 1
    double v_s3_norm = 1.0;

    double uncertainty_product() const { return v_s2_norm * v_s3_norm; }
};

/// One record per omega of `spectrum_y`, which must contain theta = 0 and
/// theta = pi/2 (mod pi). Throws std::invalid_argument otherwise.
std::vector<StokesRecord> stokes_noise(const NoiseSpectrum& spectrum_y, std::complex<double> alpha_x);

/// Normalized noise of S_theta = cos(theta_hd) S2 + sin(theta_hd) S3, which
/// equals the y-mode quadrature noise at theta = theta_hd.
double stokes_theta(const FluctuationModel& model_y, double omega, double theta_hd);

/// Normalized S0 (= S1) noise: the x-mode amplitude quadrature noise.
double stokes_intensity_noise(const FluctuationModel& model_x, double omega);

/// eta S + (1 - eta). Throws std::invalid_argument for eta outside (0, 1] or S < 0.
double apply_detection_loss(double noise, double eta);

/// Inverse of apply_detection_loss. Throws std::domain_error if the result
/// would be negative, i.e. the claimed efficiency is inconsistent.
double recover_lossless(double detected, double eta);

/// Efficiency implied by a measured and a loss-corrected noise reduction:
/// (1 - S_det) = eta (1 - S)  =>  eta = reduction_measured / reduction_corrected.
double implied_efficiency(double reduction_measured, double reduction_corrected);

struct PhaseScanSample {
    double theta_hd = 0.0;
    double cos_theta = 1.0;
    double v_theta = 1.0;
};

struct PhaseScanDataset {
    double omega = 0.0;
    double eta = 1.0;
    bool eta_applied = false;
    std::vector<PhaseScanSample> samples;
};

/// Noise vs LO phase, as drawn on an XY oscilloscope against cos(theta_hd).
/// Loss is applied when eta < 1.
PhaseScanDataset phase_scan_dataset(const FluctuationModel& model_y, double omega,
                                    std::span<const double> theta_grid, double eta);

}  // namespace polsq
