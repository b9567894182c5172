#include "polsq/stokes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polsq {

namespace {

std::size_t find_theta(const NoiseSpectrum& spectrum, double target) {
    for (std::size_t j = 0; j < spectrum.thetas.size(); ++j)
        if (std::abs(std::remainder(spectrum.thetas[j] - target, std::numbers::pi)) <= 1e-12) return j;
    throw std::invalid_argument("stokes_noise: spectrum lacks a required quadrature angle");
}

}  // namespace

StokesMeans stokes_means(std::complex<double> alpha_x) {
    const double flux = std::norm(alpha_x);
    return {flux, flux, 0.0, 0.0};
}

std::vector<StokesRecord> stokes_noise(const NoiseSpectrum& spectrum_y, std::complex<double> alpha_x) {
    if (spectrum_y.mode != Mode::y) throw std::invalid_argument("stokes_noise: needs a y-mode spectrum");
    const std::size_t i_s2 = find_theta(spectrum_y, 0.0);
    const std::size_t i_s3 = find_theta(spectrum_y, std::numbers::pi / 2.0);
    const double flux = std::norm(alpha_x);

    std::vector<StokesRecord> out;
    out.reserve(spectrum_y.omegas.size());
    for (std::size_t i = 0; i < spectrum_y.omegas.size(); ++i) {
        StokesRecord rec;
        rec.means = stokes_means(alpha_x);
        rec.omega = spectrum_y.omegas[i];
        rec.v_s2_norm = spectrum_y.at(i, i_s2);
        rec.v_s3_norm = spectrum_y.at(i, i_s3);
        rec.v_s2 = flux * rec.v_s2_norm;
        rec.v_s3 = flux * rec.v_s3_norm;
        out.push_back(rec);
    }
    return out;
}

double stokes_theta(const FluctuationModel& model_y, double omega, double theta_hd) {
    if (model_y.mode() != Mode::y) throw std::invalid_argument("stokes_theta: needs a y-mode model");
    return quadrature_spectrum(model_y, omega, theta_hd);
}

double stokes_intensity_noise(const FluctuationModel& model_x, double omega) {
    if (model_x.mode() != Mode::x) throw std::invalid_argument("stokes_intensity_noise: needs an x-mode model");
    return quadrature_spectrum(model_x, omega, 0.0);
}

double apply_detection_loss(double noise, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("apply_detection_loss: eta must lie in (0, 1]");
    if (!(noise >= 0.0)) throw std::invalid_argument("apply_detection_loss: noise must be >= 0");
    return eta * noise + (1.0 - eta);
}

double recover_lossless(double detected, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("recover_lossless: eta must lie in (0, 1]");
    const double noise = (detected - (1.0 - eta)) / eta;
    if (noise < 0.0) throw std::domain_error("recover_lossless: detected noise below the 1 - eta floor");
    return noise;
}

double implied_efficiency(double reduction_measured, double reduction_corrected) {
    if (!(reduction_corrected > 0.0)) throw std::invalid_argument("implied_efficiency: corrected reduction must be > 0");
    return reduction_measured / reduction_corrected;
}

PhaseScanDataset phase_scan_dataset(const FluctuationModel& model_y, double omega, std::span<const double> theta_grid,
                                    double eta) {
    PhaseScanDataset out;
    out.omega = omega;
    out.eta = eta;
    out.eta_applied = eta < 1.0;
    out.samples.reserve(theta_grid.size());
    for (double theta : theta_grid) {
        const double lossless = stokes_theta(model_y, omega, theta);
        out.samples.push_back({theta, std::cos(theta), apply_detection_loss(lossless, eta)});
    }
    return out;
}

}  // namespace polsq
