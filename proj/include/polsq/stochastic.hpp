#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "polsq/fluctuations.hpp"

namespace polsq {

/**
 * Settings for one Euler-Maruyama trajectory of the linear Langevin equation.
 *
 * Every `decimation` integration steps are pooled into one output sample, so
 * the output sampling interval is dt * decimation.
 */
struct TrajectoryConfig {
    double dt = 0.0;
    double duration = 0.0;
    std::uint64_t seed = 0;
    double burn_in = 0.1;  ///< leading fraction of samples discarded
    std::vector<double> thetas{0.0};
    std::size_t decimation = 1;

    /// Throws ValidationError on dt <= 0, duration < 1000 dt, burn_in outside
    /// [0, 0.5], zero decimation or an empty theta list.
    void validate() const;
};

/// Classical-equivalent integrator for
///   d(da) = (m11 da + m12 da^*) dt + sqrt(2 kappa) dxi,
/// with <dxi dxi^*> = dt / 2 and <dxi dxi> = 0 (symmetrized vacuum).
/// Only da is stored; da^* follows from the conjugate-pair drift.
class EulerMaruyamaStepper {
public:
    EulerMaruyamaStepper(const FluctuationModel& model, double dt, std::uint64_t seed);

    /// Advances one step and returns the noise increment that drove it.
    std::complex<double> step();

    std::complex<double> field() const { return field_; }
    double dt() const { return dt_; }

private:
    std::complex<double> m11_;
    std::complex<double> m12_;
    double feed_;
    double dt_;
    double noise_scale_;
    std::complex<double> field_{0.0, 0.0};
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Output quadrature samples, one series per theta. Samples are normalized so
/// that vacuum (shot) noise is white with unit variance.
struct QuadratureSeries {
    double sample_dt = 0.0;
    std::vector<double> thetas;
    std::vector<std::vector<double>> samples;
};

/// Integrates one trajectory and records the output quadratures
///   X_theta = e^{-i theta'} (sqrt(2 kappa) da - xi') + c.c.,
/// theta' = theta + arg alpha_x, pooled over each output bin. The feed-through
/// term uses the same increment that drove the step; the field term uses the
/// step midpoint. Deterministic for a fixed seed.
///
/// Throws NumericalError for an unstable model and ValidationError when
/// dt |m11| > 0.1.
QuadratureSeries simulate(const FluctuationModel& model, const TrajectoryConfig& cfg);

/// Segment-averaged spectral density of one real series.
struct SpectralDensity {
    std::vector<double> omegas;  ///< rad/s, bins 0 .. L/2
    std::vector<double> psd;
    std::vector<double> standard_error;
    std::size_t segments = 0;
};

/// Hann-windowed Welch estimate. Unit-variance white noise gives 1 in every
/// bin. Standard errors come from the scatter of the segment periodograms.
/// Throws std::invalid_argument on a bad segment length or overlap and when
/// fewer than 4 segments fit.
SpectralDensity welch(std::span<const double> series, double sample_dt, std::size_t segment_length,
                      double overlap = 0.5);

struct PsdEstimate {
    std::vector<double> omegas;
    std::vector<double> thetas;
    std::vector<std::vector<double>> psd;             ///< [theta][omega]
    std::vector<std::vector<double>> standard_error;  ///< [theta][omega]
    std::size_t segments = 0;
};

PsdEstimate psd_estimate(const QuadratureSeries& series, std::size_t segment_length, double overlap = 0.5);

/// Bin frequencies of `estimate` nearest to each requested |omega|, in order,
/// duplicates removed.
std::vector<double> nearest_bins(const PsdEstimate& estimate, std::span<const double> omegas);

struct ComparisonPoint {
    double omega = 0.0;
    double theta = 0.0;
    double analytic = 0.0;
    double empirical = 0.0;
    double standard_error = 0.0;
    double z = 0.0;
};

struct ComparisonReport {
    std::vector<ComparisonPoint> points;
    double max_abs_z = 0.0;
    double fraction_within = 0.0;  ///< share of points with |z| <= 3
    bool pass = false;             ///< fraction_within >= 0.95
};

/// z-scores (analytic - empirical) / standard_error on the shared grid points.
/// Throws std::invalid_argument when the grids share no point.
ComparisonReport compare(const NoiseSpectrum& analytic, const PsdEstimate& empirical);

}  // namespace polsq
