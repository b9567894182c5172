#include "polsq/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polsq/errors.hpp"

namespace polsq {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

// Symmetrized vacuum input covariance for (a_in, a_in^dagger).
const Matrix2c kVacuum{0.0, 0.5, 0.5, 0.0};

Matrix2c quadratic_kernel(const FluctuationModel& model, double omega) {
    return transfer(model, omega) * kVacuum * transfer(model, -omega).transpose();
}

double wrap_half_pi(double angle) {
    // Into (-pi/2, pi/2].
    constexpr double pi = std::numbers::pi;
    angle = std::remainder(angle, pi);
    if (angle <= -pi / 2.0) angle += pi;
    return angle;
}

}  // namespace

const char* to_string(Mode mode) { return mode == Mode::x ? "x" : "y"; }

FluctuationModel::FluctuationModel(Mode mode, std::complex<double> m11, std::complex<double> m12,
                                   double kappa, SteadyState steady)
    : mode_(mode), m11_(m11), m12_(m12), kappa_(kappa), steady_(std::move(steady)) {
    if (!(kappa > 0.0)) throw std::invalid_argument("FluctuationModel: kappa must be > 0");
    if (std::abs(m11.real() + kappa) > 1e-12 * kappa)
        throw std::invalid_argument("FluctuationModel: Re(m11) must equal -kappa");
}

double FluctuationModel::stability_margin() const {
    const Matrix2c m = drift();
    const cd tr = m.trace();
    const cd root = std::sqrt(tr * tr - 4.0 * m.det());
    return std::max(((tr + root) / 2.0).real(), ((tr - root) / 2.0).real());
}

FluctuationModel FluctuationModel::with_coupling_scale(double scale) const {
    return FluctuationModel(mode_, m11_, scale * m12_, kappa_, steady_);
}

FluctuationModel build_drift_y(const SteadyState& st, const PhysicalParams& p) {
    const cd rotation = std::polar(1.0, 2.0 * st.phase());
    const cd m11 = -p.kappa - kI * (st.delta_c - st.delta_0 + st.delta_0 * st.s_x);
    const cd m12 = kI * st.delta_0 * (st.s_x / 2.0) * rotation;
    return FluctuationModel(Mode::y, m11, m12, p.kappa, st);
}

FluctuationModel build_drift_x(const SteadyState& st, const PhysicalParams& p) {
    const cd rotation = std::polar(1.0, 2.0 * st.phase());
    const cd m11 = -p.kappa - kI * (st.delta_c - st.delta_0 + 2.0 * st.delta_0 * st.s_x);
    const cd m12 = -kI * st.delta_0 * st.s_x * rotation;
    return FluctuationModel(Mode::x, m11, m12, p.kappa, st);
}

std::complex<double> nonlinear_drift_x(const PhysicalParams& p, double delta_c, std::complex<double> alpha_in,
                                       std::complex<double> a_x) {
    const double delta_0 = linear_dephasing(p);
    const double s = saturation(a_x, p);
    return -(p.kappa + kI * delta_c) * a_x + kI * delta_0 * (1.0 - s) * a_x +
           std::sqrt(2.0 * p.kappa) * alpha_in;
}

std::complex<double> nonlinear_drift_y(const PhysicalParams& p, double delta_c, std::complex<double> a_x,
                                       std::complex<double> a_y) {
    const double delta_0 = linear_dephasing(p);
    const double c = saturation_per_photon(p);
    const cd cross = 2.0 * std::norm(a_x) * a_y - a_x * a_x * std::conj(a_y);
    return -(p.kappa + kI * (delta_c - delta_0)) * a_y - kI * delta_0 * (c / 2.0) * cross;
}

Matrix2c transfer(const FluctuationModel& model, double omega) {
    const Matrix2c resolvent = (-kI * omega) * Matrix2c::identity() - model.drift();
    const double scale = std::max({std::abs(resolvent.a11), std::abs(resolvent.a12), std::abs(resolvent.a21),
                                   std::abs(resolvent.a22)});
    if (std::abs(resolvent.det()) <= 1e-13 * scale * scale)
        throw NumericalError("transfer: singular resolvent (model at marginal stability)");
    return cd(2.0 * model.kappa()) * resolvent.inverse() - Matrix2c::identity();
}

double quadrature_spectrum(const FluctuationModel& model, double omega, double theta) {
    if (!model.stable())
        throw NumericalError(std::string("quadrature_spectrum: unstable ") + to_string(model.mode()) + "-mode model");
    const Matrix2c k = quadratic_kernel(model, omega);
    const double angle = theta + model.steady().phase();
    const cd u1 = std::polar(1.0, -angle);
    const cd u2 = std::polar(1.0, angle);
    const cd value = u1 * (k.a11 * u1 + k.a12 * u2) + u2 * (k.a21 * u1 + k.a22 * u2);
    if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real())))
        throw NumericalError("quadrature_spectrum: quadratic form is not real");
    return value.real();
}

SpectrumExtrema min_max_spectrum(const FluctuationModel& model, double omega) {
    if (!model.stable())
        throw NumericalError(std::string("min_max_spectrum: unstable ") + to_string(model.mode()) + "-mode model");
    const Matrix2c k = quadratic_kernel(model, omega);
    // S(theta) = mean + Re(swing e^{-2i(theta + phase)})
    const double mean = (k.a12 + k.a21).real();
    const cd swing = k.a11 + std::conj(k.a22);
    const double amplitude = std::abs(swing);

    SpectrumExtrema out;
    out.s_min = mean - amplitude;
    out.s_max = mean + amplitude;
    if (amplitude <= 1e-14 * std::max(1.0, mean)) {
        out.theta_min = 0.0;
    } else {
        const double theta_max = std::arg(swing) / 2.0 - model.steady().phase();
        out.theta_min = wrap_half_pi(theta_max + std::numbers::pi / 2.0);
    }
    return out;
}

NoiseSpectrum evaluate_spectrum(const FluctuationModel& model, std::span<const double> omegas,
                                std::span<const double> thetas) {
    NoiseSpectrum out;
    out.mode = model.mode();
    out.omegas.assign(omegas.begin(), omegas.end());
    out.thetas.assign(thetas.begin(), thetas.end());
    out.steady = model.steady();
    out.values.reserve(omegas.size() * thetas.size());
    for (double omega : omegas)
        for (double theta : thetas) {
            const double v = quadrature_spectrum(model, omega, theta);
            if (v < 0.0) throw NumericalError("evaluate_spectrum: negative noise density");
            out.values.push_back(v);
        }
    return out;
}

double optical_pumping_rate(const SteadyState& st, const PhysicalParams& p) {
    return 0.5 * p.gamma_par * st.s_x;
}

std::vector<std::string> model_validity(const FluctuationModel& model, const PhysicalParams& p, double omega) {
    std::vector<std::string> out;
    const double pumping = optical_pumping_rate(model.steady(), p);
    if (std::abs(omega) < pumping)
        out.emplace_back("optical-pumping: analysis frequency below the optical pumping rate; excess noise not modeled");
    if (!p.large_detuning_valid())
        out.emplace_back("model-validity: |delta| < 10 gamma, large-detuning expansion is not reliable");
    return out;
}

}  // namespace polsq
