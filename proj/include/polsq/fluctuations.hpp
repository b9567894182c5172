#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "polsq/matrix2.hpp"
#include "polsq/params.hpp"
#include "polsq/steady_state.hpp"

namespace polsq {

enum class Mode { x, y };

const char* to_string(Mode mode);

/**
 * Linearized drift of one cavity mode acting on (da, da^dagger):
 *
 *     M = [[m11, m12], [conj(m12), conj(m11)]]
 *
 * Only m11 and m12 are stored, so the conjugate-pair structure cannot be
 * broken. The port is single-ended with amplitude coupling sqrt(2 kappa) and
 * the atoms are purely reactive, hence Re(m11) = -kappa.
 */
class FluctuationModel {
public:
    /// Throws std::invalid_argument when Re(m11) != -kappa.
    FluctuationModel(Mode mode, std::complex<double> m11, std::complex<double> m12, double kappa,
                     SteadyState steady);

    Mode mode() const { return mode_; }
    std::complex<double> m11() const { return m11_; }
    std::complex<double> m12() const { return m12_; }
    std::complex<double> m21() const { return std::conj(m12_); }
    std::complex<double> m22() const { return std::conj(m11_); }
    double kappa() const { return kappa_; }
    const SteadyState& steady() const { return steady_; }

    Matrix2c drift() const { return {m11(), m12(), m21(), m22()}; }

    /// Largest real part of the drift eigenvalues.
    double stability_margin() const;
    bool stable() const { return stability_margin() < 0.0; }

    /// Same model with m12 scaled; used to inject a deliberately wrong model.
    FluctuationModel with_coupling_scale(double scale) const;

private:
    Mode mode_;
    std::complex<double> m11_;
    std::complex<double> m12_;
    double kappa_;
    SteadyState steady_;
};

/// Vacuum (orthogonal) mode: cross-Kerr dephasing plus the conjugate coupling
///   m11 = -kappa - i(delta_c - delta_0 + delta_0 s_x),
///   m12 = i delta_0 (s_x / 2) e^{2i arg alpha_x}.
FluctuationModel build_drift_y(const SteadyState& steady, const PhysicalParams& params);

/// Mean-field mode, from linearizing delta_0 A / (1 + s) to first order in s:
///   m11 = -kappa - i(delta_c - delta_0 + 2 delta_0 s_x),
///   m12 = -i delta_0 s_x e^{2i arg alpha_x}.
/// |m12| is twice the y-mode value: d/dA^* of -i delta_0 c A |A|^2 is
/// -i delta_0 c A^2, while the cross-Kerr conjugate term carries c/2.
FluctuationModel build_drift_x(const SteadyState& steady, const PhysicalParams& params);

/// Nonlinear x-mode drift dA_x/dt evaluated at an arbitrary field; the
/// linearization above is its Jacobian at the steady state.
std::complex<double> nonlinear_drift_x(const PhysicalParams& params, double delta_c,
                                       std::complex<double> alpha_in, std::complex<double> a_x);

/// Nonlinear y-mode drift dA_y/dt for a given mean field a_x. Linear in a_y
/// and conj(a_y); the input term is dropped because the y drive is vacuum.
std::complex<double> nonlinear_drift_y(const PhysicalParams& params, double delta_c,
                                       std::complex<double> a_x, std::complex<double> a_y);

/// Output-from-input sideband map 2 kappa (-i omega I - M)^{-1} - I.
/// Throws NumericalError when the resolvent is singular.
Matrix2c transfer(const FluctuationModel& model, double omega);

/// Symmetrized output quadrature noise at sideband frequency omega and
/// quadrature angle theta (relative to arg alpha_x). Shot noise is 1.
/// Throws NumericalError for an unstable model.
double quadrature_spectrum(const FluctuationModel& model, double omega, double theta);

/// The theta-dependence is a + b cos(2 theta - 2 theta_max). Extrema are
/// exact; theta_min lies in (-pi/2, pi/2] and is 0 when b vanishes.
struct SpectrumExtrema {
    double s_min = 1.0;
    double s_max = 1.0;
    double theta_min = 0.0;
};

SpectrumExtrema min_max_spectrum(const FluctuationModel& model, double omega);

/// Noise on an (omega, theta) grid, values row-major by omega.
struct NoiseSpectrum {
    Mode mode = Mode::y;
    std::vector<double> omegas;
    std::vector<double> thetas;
    std::vector<double> values;
    SteadyState steady;
    bool eta_applied = false;

    double at(std::size_t i_omega, std::size_t i_theta) const {
        return values[i_omega * thetas.size() + i_theta];
    }
};

NoiseSpectrum evaluate_spectrum(const FluctuationModel& model, std::span<const double> omegas,
                                std::span<const double> thetas);

/// Warnings about where the fluctuation equations should not be trusted:
/// analysis frequencies below the optical pumping rate (gamma_par / 2) s_x,
/// and detunings outside the large-detuning regime.
std::vector<std::string> model_validity(const FluctuationModel& model, const PhysicalParams& params,
                                        double omega);

/// (gamma_par / 2) s_x.
double optical_pumping_rate(const SteadyState& steady, const PhysicalParams& params);

}  // namespace polsq
