#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "polsq/fluctuations.hpp"
#include "polsq/params.hpp"
#include "polsq/steady_state.hpp"

namespace testing {

inline double mhz(double value) { return 2.0 * std::numbers::pi * 1e6 * value; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Cold-atom operating point: kappa = 5, gamma = 2.6, delta = -50 (all MHz),
// T = 0.1, tuned so that delta_0 = -242.2 MHz.
inline polsq::PhysicalParams paper_params() {
    polsq::PhysicalParams p;
    p.kappa = mhz(5.0);
    p.gamma_perp = mhz(1.3);
    p.gamma_par = mhz(1.3);
    p.gamma = p.gamma_perp + p.gamma_par;
    p.delta = mhz(-50.0);
    p.transmission = 0.1;
    p.n_atoms = 1e7;
    p.g_coupling = mhz(0.0348);
    p.eta_det = 0.718;
    return p;
}

inline polsq::PhysicalParams random_params(std::mt19937_64& rng) {
    polsq::PhysicalParams p;
    p.kappa = mhz(uniform(rng, 1.0, 10.0));
    p.gamma_perp = mhz(uniform(rng, 0.5, 2.0));
    p.gamma_par = mhz(uniform(rng, 0.5, 2.0));
    p.gamma = p.gamma_perp + p.gamma_par;
    p.delta = mhz(uniform(rng, 40.0, 120.0)) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    p.transmission = uniform(rng, 0.02, 0.3);
    p.n_atoms = uniform(rng, 1e6, 1e7);
    p.g_coupling = mhz(uniform(rng, 0.01, 0.05));
    return p;
}

// Steady state at saturation s with real positive alpha_x.
inline polsq::SteadyState state_at(const polsq::PhysicalParams& p, double delta_c, double s,
                                   double phase = 0.0) {
    const double intensity = s / polsq::saturation_per_photon(p);
    return polsq::make_steady_state(p, delta_c, std::polar(std::sqrt(intensity), phase));
}

// Random operating point with a stable y-mode drift.
struct Draw {
    polsq::PhysicalParams params;
    polsq::SteadyState steady;
};

inline Draw random_stable_y(std::mt19937_64& rng) {
    for (;;) {
        const auto p = random_params(rng);
        const double delta_0 = polsq::linear_dephasing(p);
        const double delta_c = delta_0 + p.kappa * uniform(rng, -12.0, 12.0);
        const auto st = state_at(p, delta_c, uniform(rng, 0.0, 0.8), uniform(rng, -3.0, 3.0));
        if (st.y_mode_margin < -1e-3 * p.kappa) return {p, st};
    }
}

inline Draw random_stable_x(std::mt19937_64& rng) {
    for (;;) {
        const auto p = random_params(rng);
        const double delta_0 = polsq::linear_dephasing(p);
        const double delta_c = delta_0 + p.kappa * uniform(rng, -12.0, 12.0);
        const auto st = state_at(p, delta_c, uniform(rng, 0.0, 0.8), uniform(rng, -3.0, 3.0));
        if (st.x_mode_margin < -1e-3 * p.kappa) return {p, st};
    }
}

// Drive-flux curve P(I) = I [kappa^2 + (delta_c - delta_0 + delta_0 s(I))^2] / (2 kappa),
// written out independently of the library.
inline double drive_curve(const polsq::PhysicalParams& p, double delta_c, double intensity) {
    const double delta_0 = p.n_atoms * p.g_coupling * p.g_coupling / p.delta;
    const double s = 2.0 * p.g_coupling * p.g_coupling * intensity / (p.delta * p.delta);
    const double detuning = delta_c - delta_0 + delta_0 * s;
    return intensity * (p.kappa * p.kappa + detuning * detuning) / (2.0 * p.kappa);
}

// Roots of drive_curve(I) = flux located by sign changes on a dense grid and
// refined by bisection. Every root lies below 2 flux / kappa.
inline std::vector<double> bracket_roots(const polsq::PhysicalParams& p, double flux, double delta_c,
                                         int grid = 200000) {
    const double hi = 2.0 * flux / p.kappa * (1.0 + 1e-9);
    const auto f = [&](double i) { return drive_curve(p, delta_c, i) - flux; };
    std::vector<double> roots;
    double a = 0.0;
    double fa = f(a);
    for (int k = 1; k <= grid; ++k) {
        const double b = hi * k / grid;
        const double fb = f(b);
        if (fb == 0.0) {
            roots.push_back(b);
        } else if ((fa < 0.0) != (fb < 0.0) && fa != 0.0) {
            double lo = a, up = b, flo = fa;
            for (int it = 0; it < 200 && up - lo > 1e-15 * up; ++it) {
                const double mid = 0.5 * (lo + up);
                const double fm = f(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    up = mid;
                }
            }
            roots.push_back(0.5 * (lo + up));
        }
        a = b;
        fa = fb;
    }
    return roots;
}

// Local extrema of drive_curve in I, by dense grid plus golden-section refinement.
inline std::vector<double> brute_extrema(const polsq::PhysicalParams& p, double delta_c, double hi,
                                         int grid = 200000) {
    const auto f = [&](double i) { return drive_curve(p, delta_c, i); };
    std::vector<double> out;
    const double h = hi / grid;
    for (int k = 1; k < grid; ++k) {
        const double l = f(h * (k - 1)), c = f(h * k), r = f(h * (k + 1));
        const bool is_max = c > l && c >= r;
        const bool is_min = c < l && c <= r;
        if (!is_max && !is_min) continue;
        const double sign = is_max ? -1.0 : 1.0;
        double lo = h * (k - 1), up = h * (k + 1);
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 200; ++it) {
            const double x1 = up - g * (up - lo), x2 = lo + g * (up - lo);
            if (sign * f(x1) < sign * f(x2)) up = x2;
            else lo = x1;
        }
        out.push_back(0.5 * (lo + up));
    }
    return out;
}

// Moderate squeezing point with |m11| of order kappa, cheap to simulate:
// delta_0 close to kappa, s_x = 0.5, y-mode detuning kappa / 2.
inline Draw oracle_point(double s = 0.5) {
    auto p = paper_params();
    p.n_atoms = 2e5;
    const double delta_0 = polsq::linear_dephasing(p);
    const double delta_c = delta_0 - delta_0 * 0.5 + 0.5 * p.kappa;
    return {p, state_at(p, delta_c, s)};
}

}  // namespace testing
