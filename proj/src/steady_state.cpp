#include "polsq/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polsq {

namespace {

constexpr double kMergeTolerance = 1e-7;

// The steady-state cubic in the scaled intensity x = |beta| I / kappa, where
// beta = delta_0 * (2 g^2 / delta^2) is the intensity-dependent shift:
//   x^3 + b x^2 + c x + d = 0,
//   b = 2 sign(beta) D / kappa,  c = 1 + (D / kappa)^2,  d = -2 |beta| P / kappa^2,
// with D = delta_c - delta_0.
struct ScaledCubic {
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double to_intensity = 0.0;  // I = to_intensity * x

    double value(double x) const { return ((x + b) * x + c) * x + d; }
    double slope(double x) const { return (3.0 * x + 2.0 * b) * x + c; }
};

ScaledCubic scaled_cubic(const PhysicalParams& p, double drive_flux, double delta_c) {
    const double delta_0 = linear_dephasing(p);
    const double beta = delta_0 * saturation_per_photon(p);
    const double detuning = (delta_c - delta_0) / p.kappa;
    const double sign = beta < 0.0 ? -1.0 : 1.0;
    ScaledCubic cubic;
    cubic.b = 2.0 * sign * detuning;
    cubic.c = 1.0 + detuning * detuning;
    cubic.d = -2.0 * std::abs(beta) * drive_flux / (p.kappa * p.kappa);
    cubic.to_intensity = p.kappa / std::abs(beta);
    return cubic;
}

// Real roots of x^3 + b x^2 + c x + d by the trigonometric / Cardano split.
std::vector<double> real_cubic_roots(double b, double c, double d) {
    const double shift = b / 3.0;
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double disc = q * q / 4.0 + p * p * p / 27.0;

    std::vector<double> roots;
    if (disc > 0.0) {
        const double a = -std::copysign(std::cbrt(std::abs(q) / 2.0 + std::sqrt(disc)), q);
        const double t = a == 0.0 ? 0.0 : a - p / (3.0 * a);
        roots.push_back(t - shift);
    } else if (p == 0.0) {
        roots.push_back(-shift);
    } else {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            roots.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double polish(const ScaledCubic& cubic, double x) {
    const double slope = cubic.slope(x);
    if (slope == 0.0) return x;
    const double next = x - cubic.value(x) / slope;
    // Near a double root Newton can overshoot; keep the better of the two.
    return std::abs(cubic.value(next)) <= std::abs(cubic.value(x)) ? next : x;
}

}  // namespace

double drive_for_intensity(const PhysicalParams& p, double delta_c, double intensity) {
    const double delta_0 = linear_dephasing(p);
    const double s = saturation_per_photon(p) * intensity;
    const double detuning = delta_c - delta_0 * (1.0 - s);
    return intensity * (p.kappa * p.kappa + detuning * detuning) / (2.0 * p.kappa);
}

double x_mode_stability(const SteadyState& st, const PhysicalParams& p) {
    const double coupling = st.delta_0 * st.s_x;
    const double detuning = st.delta_c - st.delta_0 + 2.0 * st.delta_0 * st.s_x;
    return -p.kappa + std::sqrt(std::max(0.0, coupling * coupling - detuning * detuning));
}

double y_mode_stability(const SteadyState& st, const PhysicalParams& p) {
    const double chi = st.delta_0 * st.s_x / 2.0;
    const double detuning = st.delta_c - st.delta_0 + st.delta_0 * st.s_x;
    return -p.kappa + std::sqrt(std::max(0.0, chi * chi - detuning * detuning));
}

SteadyState make_steady_state(const PhysicalParams& p, double delta_c, std::complex<double> alpha_x,
                              int branch_index) {
    SteadyState st;
    st.alpha_x = alpha_x;
    st.s_x = saturation(alpha_x, p);
    st.delta_c = delta_c;
    st.delta_0 = linear_dephasing(p);
    st.branch_index = branch_index;

    const std::complex<double> response(p.kappa, delta_c - st.delta_0 * (1.0 - st.s_x));
    const std::complex<double> alpha_in = response * alpha_x / std::sqrt(2.0 * p.kappa);
    st.drive_flux = std::norm(alpha_in);
    st.drive_phase = std::arg(alpha_in);

    st.x_mode_margin = x_mode_stability(st, p);
    st.y_mode_margin = y_mode_stability(st, p);
    st.mean_field_stable = st.x_mode_margin < 0.0;
    return st;
}

double steady_state_residual(const SteadyState& st, const PhysicalParams& p) {
    const std::complex<double> response(p.kappa, st.delta_c - st.delta_0 * (1.0 - st.s_x));
    return std::abs(response * st.alpha_x - std::sqrt(2.0 * p.kappa) * st.alpha_in());
}

std::vector<double> solve_intensity_cubic(const PhysicalParams& p, double drive_flux, double delta_c) {
    if (drive_flux == 0.0) return {0.0};

    const double delta_0 = linear_dephasing(p);
    const double beta = delta_0 * saturation_per_photon(p);
    if (beta == 0.0) {
        const double detuning = delta_c - delta_0;
        return {2.0 * p.kappa * drive_flux / (p.kappa * p.kappa + detuning * detuning)};
    }

    const ScaledCubic cubic = scaled_cubic(p, drive_flux, delta_c);
    std::vector<double> scaled;
    for (double x : real_cubic_roots(cubic.b, cubic.c, cubic.d)) {
        x = polish(cubic, x);
        if (x <= 0.0) continue;
        if (!scaled.empty() && std::abs(x - scaled.back()) <= kMergeTolerance * std::max(x, scaled.back())) {
            // Fold degeneracy: report the pair once, at its midpoint.
            scaled.back() = 0.5 * (scaled.back() + x);
            continue;
        }
        scaled.push_back(x);
    }

    std::vector<double> intensities;
    intensities.reserve(scaled.size());
    for (double x : scaled) intensities.push_back(x * cubic.to_intensity);
    return intensities;
}

std::vector<SteadyState> steady_state(const PhysicalParams& p, const DriveField& drive, double delta_c) {
    p.validate();
    const double flux = drive.flux();
    if (!std::isfinite(flux)) throw std::invalid_argument("steady_state: drive must be finite");

    const double delta_0 = linear_dephasing(p);
    const double per_photon = saturation_per_photon(p);
    const double in_phase = std::arg(drive.alpha_in);

    std::vector<SteadyState> out;
    int index = 0;
    for (double intensity : solve_intensity_cubic(p, flux, delta_c)) {
        const double s = per_photon * intensity;
        const double response_phase = std::atan2(delta_c - delta_0 * (1.0 - s), p.kappa);
        auto st = make_steady_state(p, delta_c, std::polar(std::sqrt(intensity), in_phase - response_phase),
                                    index++);
        // Keep the drive exactly as given; the residual then measures the root.
        st.drive_flux = flux;
        st.drive_phase = in_phase;
        out.push_back(st);
    }
    return out;
}

std::vector<TurningPoint> turning_points(const PhysicalParams& p, double delta_c,
                                         std::optional<std::pair<double, double>> drive_range) {
    const double delta_0 = linear_dephasing(p);
    const double beta = delta_0 * saturation_per_photon(p);
    if (beta == 0.0) return {};

    // d|alpha_in|^2/dI = 0  <=>  3 x^2 + 2 b x + c = 0 in the scaled cubic.
    const ScaledCubic cubic = scaled_cubic(p, 0.0, delta_c);
    const double disc = cubic.b * cubic.b - 3.0 * cubic.c;
    if (disc <= 0.0) return {};

    std::vector<TurningPoint> out;
    const double root = std::sqrt(disc);
    for (double x : {(-cubic.b - root) / 3.0, (-cubic.b + root) / 3.0}) {
        if (x <= 0.0) continue;
        const double intensity = x * cubic.to_intensity;
        const double flux = drive_for_intensity(p, delta_c, intensity);
        if (drive_range && (flux < drive_range->first || flux > drive_range->second)) continue;
        out.push_back({intensity, flux});
    }
    return out;
}

ScanResult cavity_scan(const PhysicalParams& p, const DriveField& drive, std::span<const double> grid) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("cavity_scan: detuning grid must be strictly increasing");

    ScanResult result;
    result.records.reserve(grid.size());
    for (double delta_c : grid) {
        ScanRecord rec;
        rec.delta_c = delta_c;
        rec.branches = steady_state(p, drive, delta_c);

        if (!result.records.empty()) {
            const ScanRecord& prev = result.records.back();
            const double prev_intensity = prev.branches[prev.followed_branch].intensity();
            const auto nearest = [](const std::vector<SteadyState>& set, double intensity, bool stable_only) {
                int best = -1;
                for (const auto& st : set) {
                    if (stable_only && !st.mean_field_stable) continue;
                    if (best < 0 || std::abs(st.intensity() - intensity) <
                                        std::abs(set[best].intensity() - intensity))
                        best = st.branch_index;
                }
                return best;
            };

            if (rec.branches.size() == prev.branches.size()) {
                rec.followed_branch = prev.followed_branch;
            } else if (rec.branches.size() == 1) {
                rec.followed_branch = 0;
                // The surviving solution continues whichever old branch it is nearest to.
                const int origin = nearest(prev.branches, rec.branches[0].intensity(), false);
                rec.jumped = origin != prev.followed_branch;
            } else {
                int pick = nearest(rec.branches, prev_intensity, true);
                if (pick < 0) pick = nearest(rec.branches, prev_intensity, false);
                rec.followed_branch = pick;
            }
        }

        const SteadyState& on = rec.branches[rec.followed_branch];
        // Leakage flux 2 kappa |alpha_x|^2, split evenly over the circular components.
        rec.transmitted_plus = p.kappa * on.intensity();
        rec.transmitted_minus = rec.transmitted_plus;
        rec.linear_polarization_stable = on.y_mode_margin < 0.0;
        result.records.push_back(std::move(rec));
    }
    return result;
}

}  // namespace polsq
