#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "polsq/errors.hpp"
#include "polsq/params.hpp"
#include "polsq/steady_state.hpp"
#include "support.hpp"

using namespace polsq;
using testing::mhz;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Largest real part of the eigenvalues of the y-mode drift written out explicitly.
double eigen_margin_y(const SteadyState& st, const PhysicalParams& p) {
    const std::complex<double> i(0.0, 1.0);
    const auto phase = std::exp(2.0 * i * std::arg(st.alpha_x));
    Eigen::Matrix2cd m;
    m(0, 0) = -p.kappa - i * (st.delta_c - st.delta_0 + st.delta_0 * st.s_x);
    m(0, 1) = i * st.delta_0 * (st.s_x / 2.0) * phase;
    m(1, 0) = std::conj(m(0, 1));
    m(1, 1) = std::conj(m(0, 0));
    const Eigen::Vector2cd ev = m.eigenvalues();
    return std::max(ev(0).real(), ev(1).real());
}

}  // namespace

TEST_CASE("linear dephasing by independent arithmetic") {
    PhysicalParams p = testing::paper_params();
    p.n_atoms = 1e6;
    p.g_coupling = mhz(0.030);
    // In rate/2pi MHz units the shift is N g^2 / delta.
    const double expected_mhz = 1e6 * 0.030 * 0.030 / -50.0;
    CHECK(rel(linear_dephasing(p), mhz(expected_mhz)) < 1e-12);

    PhysicalParams doubled = p;
    doubled.n_atoms *= 2.0;
    CHECK(rel(linear_dephasing(doubled), 2.0 * linear_dephasing(p)) < 1e-14);

    PhysicalParams flipped = p;
    flipped.delta = -p.delta;
    CHECK(linear_dephasing(flipped) == doctest::Approx(-linear_dephasing(p)).epsilon(1e-14));

    PhysicalParams empty = p;
    empty.n_atoms = 0.0;
    CHECK(linear_dephasing(empty) == 0.0);

    PhysicalParams resonant = p;
    resonant.delta = 0.0;
    CHECK_THROWS_AS(linear_dephasing(resonant), std::domain_error);
}

TEST_CASE("saturation parameter") {
    const auto p = testing::paper_params();
    CHECK(saturation({0.0, 0.0}, p) == 0.0);
    const std::complex<double> a(300.0, -120.0);
    const std::complex<double> c(0.3, 1.7);
    CHECK(rel(saturation(c * a, p), std::norm(c) * saturation(a, p)) < 1e-14);
    CHECK(rel(saturation(a, p), 2.0 * p.g_coupling * p.g_coupling * std::norm(a) / (p.delta * p.delta)) < 1e-14);

    PhysicalParams resonant = p;
    resonant.delta = 0.0;
    CHECK_THROWS_AS(saturation(a, resonant), std::domain_error);
}

TEST_CASE("saturation stays moderate over the 5-15 uW drive range") {
    const auto p = testing::paper_params();
    const double flux_per_uw = 1.8665e14;
    const double delta_c = mhz(-230.0);
    for (double uw : {5.0, 10.0, 15.0}) {
        DriveField drive{std::complex<double>(std::sqrt(uw * flux_per_uw), 0.0)};
        const auto states = steady_state(p, drive, delta_c);
        REQUIRE(!states.empty());
        CAPTURE(uw);
        CHECK(states.front().s_x > 0.01);
        CHECK(states.front().s_x < 0.5);
    }
}

TEST_CASE("parameter validation names the failing field") {
    PhysicalParams p = testing::paper_params();
    CHECK_NOTHROW(p.validate());
    p.gamma = mhz(3.0);
    try {
        p.validate();
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.key() == "gamma");
    }
    p = testing::paper_params();
    p.kappa = -1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = testing::paper_params();
    p.transmission = 1.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("paper parameters are flagged as bad cavity and large detuning") {
    const auto p = testing::paper_params();
    CHECK(p.large_detuning_valid());
    const auto notes = p.notes();
    REQUIRE(notes.size() == 1);
    CHECK(notes[0].find("bad-cavity") != std::string::npos);
}

TEST_CASE("zero drive gives the single empty-cavity root") {
    const auto p = testing::paper_params();
    const auto states = steady_state(p, DriveField{}, mhz(-230.0));
    REQUIRE(states.size() == 1);
    CHECK(states[0].alpha_x == std::complex<double>(0.0, 0.0));
    CHECK(states[0].s_x == 0.0);
}

TEST_CASE("weak drive follows the linear Lorentzian") {
    const auto p = testing::paper_params();
    const double delta_0 = linear_dephasing(p);
    for (double offset : {-20.0, -3.0, 0.0, 4.0, 15.0}) {
        const double delta_c = delta_0 + mhz(offset);
        const double flux = 1e7;
        const auto states = steady_state(p, DriveField{{std::sqrt(flux), 0.0}}, delta_c);
        REQUIRE(states.size() == 1);
        CHECK(std::abs(delta_0) * states[0].s_x < 1e-3 * p.kappa);
        const double d = delta_c - delta_0;
        const double linear = 2.0 * p.kappa * flux / (p.kappa * p.kappa + d * d);
        CHECK(rel(states[0].intensity(), linear) < 0.01);
    }
}

TEST_CASE("root sets match dense-grid bracketing") {
    std::mt19937_64 rng(11);
    int bistable = 0;
    for (int draw = 0; draw < 30; ++draw) {
        const auto p = testing::random_params(rng);
        const double delta_0 = linear_dephasing(p);
        const double beta = delta_0 * saturation_per_photon(p);
        // Place the cavity on the side where the fold opens in half the draws.
        const double side = draw % 2 == 0 ? -1.0 : testing::uniform(rng, -1.0, 1.0);
        const double delta_c = delta_0 + side * std::copysign(1.0, beta) * p.kappa * testing::uniform(rng, 0.0, 6.0);
        const double s_target = testing::uniform(rng, 0.02, 1.0);
        const double flux = testing::drive_curve(p, delta_c, s_target / saturation_per_photon(p));

        const auto roots = solve_intensity_cubic(p, flux, delta_c);
        const auto oracle = testing::bracket_roots(p, flux, delta_c);
        CAPTURE(draw);
        REQUIRE(roots.size() == oracle.size());
        for (std::size_t k = 0; k < roots.size(); ++k) CHECK(rel(roots[k], oracle[k]) < 1e-7);
        if (roots.size() == 3) ++bistable;

        const auto states = steady_state(p, DriveField{std::polar(std::sqrt(flux), 0.7)}, delta_c);
        REQUIRE(states.size() == roots.size());
        for (const auto& st : states)
            CHECK(steady_state_residual(st, p) <= 1e-9 * std::sqrt(2.0 * p.kappa * flux));
    }
    CHECK(bistable > 0);
}

TEST_CASE("bistable regime returns exactly three ordered branches") {
    const auto p = testing::paper_params();
    const double delta_c = mhz(-230.0);
    const auto folds = turning_points(p, delta_c);
    REQUIRE(folds.size() == 2);
    const double flux = std::sqrt(folds[0].drive_flux * folds[1].drive_flux);
    const auto states = steady_state(p, DriveField{{std::sqrt(flux), 0.0}}, delta_c);
    REQUIRE(states.size() == 3);
    CHECK(states[0].intensity() < states[1].intensity());
    CHECK(states[1].intensity() < states[2].intensity());
    for (int k = 0; k < 3; ++k) CHECK(states[k].branch_index == k);
    // The middle (negative-slope) branch is mean-field unstable.
    CHECK(states[0].mean_field_stable);
    CHECK(!states[1].mean_field_stable);
    CHECK(states[2].mean_field_stable);
}

TEST_CASE("steady-state phase follows the drive phase") {
    const auto p = testing::paper_params();
    const double delta_c = mhz(-230.0);
    const double flux = 1e15;
    const auto real = steady_state(p, DriveField{{std::sqrt(flux), 0.0}}, delta_c);
    const auto rotated = steady_state(p, DriveField{std::polar(std::sqrt(flux), 1.1)}, delta_c);
    REQUIRE(real.size() == rotated.size());
    for (std::size_t k = 0; k < real.size(); ++k) {
        CHECK(rel(real[k].intensity(), rotated[k].intensity()) < 1e-14);
        CHECK(std::remainder(rotated[k].phase() - real[k].phase() - 1.1, 2.0 * std::numbers::pi) ==
              doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(rel(rotated[k].drive_flux, flux) < 1e-15);
    }
}

TEST_CASE("turning points match brute-force extrema of the drive curve") {
    std::mt19937_64 rng(5);
    for (int draw = 0; draw < 20; ++draw) {
        const auto p = testing::random_params(rng);
        const double delta_0 = linear_dephasing(p);
        const double beta = delta_0 * saturation_per_photon(p);
        const double d = -std::copysign(1.0, beta) * p.kappa * testing::uniform(rng, 2.0, 8.0);
        const double delta_c = delta_0 + d;
        const auto folds = turning_points(p, delta_c);
        const auto oracle = testing::brute_extrema(p, delta_c, 4.0 * std::abs(d) / std::abs(beta));
        CAPTURE(draw);
        REQUIRE(folds.size() == 2);
        REQUIRE(oracle.size() == 2);
        for (int k = 0; k < 2; ++k) {
            CHECK(rel(folds[k].intensity, oracle[k]) < 1e-6);
            CHECK(rel(folds[k].drive_flux, testing::drive_curve(p, delta_c, oracle[k])) < 1e-10);
        }
    }
}

TEST_CASE("turning points: monostable side and onset") {
    const auto p = testing::paper_params();
    const double delta_0 = linear_dephasing(p);
    const double beta = delta_0 * saturation_per_photon(p);
    const double sign = -std::copysign(1.0, beta);

    // The fold only opens on one side of the bare resonance.
    CHECK(turning_points(p, delta_0 - sign * 5.0 * p.kappa).empty());
    CHECK(turning_points(p, delta_0).empty());

    // d P / d I = 0 is the quadratic 3 beta^2 I^2 + 4 D beta I + kappa^2 + D^2,
    // with discriminant 4 beta^2 (D^2 - 3 kappa^2).
    const double critical = std::sqrt(3.0) * p.kappa;
    double previous_gap = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const auto folds = turning_points(p, delta_0 + sign * critical * (1.0 + eps));
        REQUIRE(folds.size() == 2);
        const double gap = folds[1].intensity - folds[0].intensity;
        CHECK(gap < previous_gap);
        previous_gap = gap;
        CHECK(folds[1].drive_flux < folds[0].drive_flux);
    }
    CHECK(previous_gap / (p.kappa / std::abs(beta)) < 0.05);
    CHECK(turning_points(p, delta_0 + sign * critical * (1.0 - 1e-4)).empty());

    const auto folds = turning_points(p, mhz(-230.0));
    REQUIRE(folds.size() == 2);
    const auto only_upper = turning_points(p, mhz(-230.0), std::pair{0.0, 0.5 * (folds[0].drive_flux + folds[1].drive_flux)});
    REQUIRE(only_upper.size() == 1);
    CHECK(only_upper[0].intensity == folds[1].intensity);
}

TEST_CASE("y-mode stability margin") {
    const auto p = testing::paper_params();
    const double delta_c = mhz(-230.0);
    CHECK(y_mode_stability(testing::state_at(p, delta_c, 0.0), p) == doctest::Approx(-p.kappa).epsilon(1e-15));

    // chi^2 - dy^2 = kappa^2 puts the margin exactly at zero.
    const double delta_0 = linear_dephasing(p);
    const double s = 0.6;
    const double chi = delta_0 * s / 2.0;
    const double dy = std::sqrt(chi * chi - p.kappa * p.kappa);
    const double boundary_dc = dy + delta_0 - delta_0 * s;
    const auto st = testing::state_at(p, boundary_dc, s);
    CHECK(std::abs(y_mode_stability(st, p)) < 1e-9 * p.kappa);
    CHECK(std::abs(eigen_margin_y(st, p)) < 1e-9 * p.kappa);
}

TEST_CASE("closed-form y margin equals generic eigenvalues") {
    std::mt19937_64 rng(99);
    for (int draw = 0; draw < 100; ++draw) {
        const auto p = testing::random_params(rng);
        const double delta_0 = linear_dephasing(p);
        const auto st = testing::state_at(p, delta_0 + p.kappa * testing::uniform(rng, -10.0, 10.0),
                                          testing::uniform(rng, 0.0, 1.0), testing::uniform(rng, -3.0, 3.0));
        CAPTURE(draw);
        const double closed = y_mode_stability(st, p);
        const double numeric = eigen_margin_y(st, p);
        CHECK(std::abs(closed - numeric) <= 1e-9 * std::max(std::abs(numeric), p.kappa));
    }
}

TEST_CASE("scan with saturation switched off is the empty-cavity Lorentzian") {
    PhysicalParams p = testing::paper_params();
    p.g_coupling = 0.0;
    const double flux = 1e14;
    std::vector<double> grid;
    for (int k = 0; k <= 400; ++k) grid.push_back(mhz(-50.0 + 0.25 * k));
    const auto scan = cavity_scan(p, DriveField{{std::sqrt(flux), 0.0}}, grid);
    REQUIRE(scan.records.size() == grid.size());
    for (const auto& rec : scan.records) {
        REQUIRE(rec.branches.size() == 1);
        const double lorentzian = 2.0 * p.kappa * flux / (p.kappa * p.kappa + rec.delta_c * rec.delta_c);
        CHECK(rel(rec.branches[0].intensity(), lorentzian) < 1e-12);
        CHECK(rel(rec.transmitted_plus + rec.transmitted_minus, 2.0 * p.kappa * lorentzian) < 1e-12);
        CHECK(rec.linear_polarization_stable);
        CHECK(!rec.jumped);
    }
}

TEST_CASE("weak-drive scan is symmetric about the shifted resonance") {
    const auto p = testing::paper_params();
    const double delta_0 = linear_dephasing(p);
    std::vector<double> grid;
    for (int k = -100; k <= 100; ++k) grid.push_back(delta_0 + mhz(0.2 * k));
    const auto scan = cavity_scan(p, DriveField{{std::sqrt(1e7), 0.0}}, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& a = scan.records[k];
        const auto& b = scan.records[grid.size() - 1 - k];
        CHECK(rel(a.transmitted_plus, b.transmitted_plus) < 1e-3);
        CHECK(a.branches.size() == 1);
        CHECK(a.linear_polarization_stable);
        CHECK(a.branches[0].mean_field_stable);
    }
}

TEST_CASE("strong-drive scan jumps at the lower-branch turning point") {
    // Blue atomic detuning bends the resonance against the scan direction, so
    // the up-scan rides the lower branch into its fold.
    PhysicalParams p = testing::paper_params();
    p.delta = -p.delta;
    const double delta_0 = linear_dephasing(p);
    const double flux = 1e15;
    const DriveField drive{{std::sqrt(flux), 0.0}};
    std::vector<double> grid;
    for (int k = 0; k <= 800; ++k) grid.push_back(delta_0 + mhz(-300.0 + 0.5 * k));
    const auto scan = cavity_scan(p, drive, grid);

    std::size_t jump = 0;
    bool folded = false;
    for (std::size_t k = 0; k < scan.records.size(); ++k) {
        if (scan.records[k].branches.size() == 3) folded = true;
        if (scan.records[k].jumped) {
            CHECK(jump == 0);
            jump = k;
        }
    }
    REQUIRE(folded);
    REQUIRE(jump > 0);
    const auto& before = scan.records[jump - 1];
    const auto& after = scan.records[jump];
    REQUIRE(before.branches.size() == 3);
    REQUIRE(after.branches.size() == 1);

    // Locate the fold between the two grid points and check it against turning_points.
    double lo = before.delta_c, hi = after.delta_c;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (steady_state(p, drive, mid).size() == 3 ? lo : hi) = mid;
    }
    const auto folds = turning_points(p, lo);
    REQUIRE(folds.size() == 2);
    const auto& fold = *std::min_element(folds.begin(), folds.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.drive_flux - flux) < std::abs(b.drive_flux - flux);
    });
    CHECK(rel(fold.drive_flux, flux) < 1e-6);
    // The branch that vanished is the followed one.
    const double followed = before.branches[before.followed_branch].intensity();
    const double other = before.branches[1].intensity();
    CHECK(std::abs(fold.intensity - followed) < std::abs(after.branches[0].intensity() - followed));
    CHECK(std::abs(fold.intensity - other) < std::abs(after.branches[0].intensity() - other));
}

TEST_CASE("scan flags a linear-polarization instability window") {
    const auto p = testing::paper_params();
    const double flux = 1.8665e15;
    std::vector<double> grid;
    for (int k = 0; k <= 800; ++k) grid.push_back(mhz(-300.0 + 0.5 * k));
    const auto scan = cavity_scan(p, DriveField{{std::sqrt(flux), 0.0}}, grid);
    bool unstable = false;
    for (const auto& rec : scan.records) {
        const auto& st = rec.branches[rec.followed_branch];
        CHECK(rec.linear_polarization_stable == (y_mode_stability(st, p) < 0.0));
        if (!rec.linear_polarization_stable) unstable = true;
    }
    CHECK(unstable);
}

TEST_CASE("scan rejects a non-monotone grid") {
    const auto p = testing::paper_params();
    const std::vector<double> grid{mhz(1.0), mhz(0.5)};
    CHECK_THROWS_AS(cavity_scan(p, DriveField{{1.0, 0.0}}, grid), std::invalid_argument);
}
