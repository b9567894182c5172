#include "polsq/stochastic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "polsq/errors.hpp"

namespace polsq {

namespace {

constexpr double kMaxStepRatio = 0.1;
constexpr double kZLimit = 3.0;
constexpr double kPassFraction = 0.95;

struct PlanDeleter {
    void operator()(fftw_plan_s* plan) const { fftw_destroy_plan(plan); }
};
struct BufferDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

// Periodogram accumulator for one segment length; owns the FFTW plan.
class Periodogram {
public:
    explicit Periodogram(std::size_t length)
        : length_(length),
          input_(static_cast<double*>(fftw_malloc(sizeof(double) * length))),
          output_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (length / 2 + 1)))),
          window_(length) {
        plan_.reset(fftw_plan_dft_r2c_1d(static_cast<int>(length), input_.get(),
                                         reinterpret_cast<fftw_complex*>(output_.get()), FFTW_ESTIMATE));
        double power = 0.0;
        for (std::size_t n = 0; n < length; ++n) {
            window_[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / length));
            power += window_[n] * window_[n];
        }
        norm_ = 1.0 / power;
    }

    std::size_t bins() const { return length_ / 2 + 1; }

    void compute(const double* segment, std::vector<double>& out) {
        for (std::size_t n = 0; n < length_; ++n) input_.get()[n] = window_[n] * segment[n];
        fftw_execute(plan_.get());
        auto* spec = reinterpret_cast<fftw_complex*>(output_.get());
        out.resize(bins());
        for (std::size_t k = 0; k < bins(); ++k) out[k] = norm_ * (spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1]);
    }

private:
    std::size_t length_;
    std::unique_ptr<double, BufferDeleter> input_;
    std::unique_ptr<void, BufferDeleter> output_;
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan_;
    std::vector<double> window_;
    double norm_ = 1.0;
};

}  // namespace

void TrajectoryConfig::validate() const {
    if (!(dt > 0.0)) throw ValidationError("oracle_dt", "must be > 0");
    if (!(duration >= 1000.0 * dt)) throw ValidationError("oracle_duration", "must be at least 1000 dt");
    if (!(burn_in >= 0.0 && burn_in <= 0.5)) throw ValidationError("oracle_burn_in", "must lie in [0, 0.5]");
    if (decimation == 0) throw ValidationError("oracle_decimation", "must be >= 1");
    if (thetas.empty()) throw ValidationError("oracle_thetas_deg", "must not be empty");
}

EulerMaruyamaStepper::EulerMaruyamaStepper(const FluctuationModel& model, double dt, std::uint64_t seed)
    : m11_(model.m11()),
      m12_(model.m12()),
      feed_(std::sqrt(2.0 * model.kappa())),
      dt_(dt),
      noise_scale_(std::sqrt(dt / 4.0)),
      rng_(seed) {}

std::complex<double> EulerMaruyamaStepper::step() {
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    const std::complex<double> increment = noise_scale_ * std::complex<double>(re, im);
    field_ += (m11_ * field_ + m12_ * std::conj(field_)) * dt_ + feed_ * increment;
    return increment;
}

QuadratureSeries simulate(const FluctuationModel& model, const TrajectoryConfig& cfg) {
    cfg.validate();
    if (!model.stable())
        throw NumericalError(std::string("simulate: unstable ") + to_string(model.mode()) + "-mode model");
    if (cfg.dt * std::abs(model.m11()) > kMaxStepRatio)
        throw ValidationError("oracle_dt", "step too coarse: dt |m11| exceeds 0.1");

    const auto steps = static_cast<std::size_t>(std::floor(cfg.duration / cfg.dt));
    const std::size_t total = steps / cfg.decimation;
    const auto skipped = static_cast<std::size_t>(std::floor(cfg.burn_in * static_cast<double>(total)));

    QuadratureSeries out;
    out.sample_dt = cfg.dt * static_cast<double>(cfg.decimation);
    out.thetas = cfg.thetas;
    out.samples.assign(cfg.thetas.size(), {});
    for (auto& s : out.samples) s.reserve(total - skipped);

    std::vector<std::complex<double>> projectors;
    for (double theta : cfg.thetas) projectors.push_back(std::polar(1.0, -(theta + model.steady().phase())));

    const double feed = std::sqrt(2.0 * model.kappa());
    const double norm = 1.0 / std::sqrt(out.sample_dt);
    EulerMaruyamaStepper stepper(model, cfg.dt, cfg.seed);

    for (std::size_t sample = 0; sample < total; ++sample) {
        std::complex<double> pooled{0.0, 0.0};
        for (std::size_t k = 0; k < cfg.decimation; ++k) {
            const std::complex<double> before = stepper.field();
            const std::complex<double> increment = stepper.step();
            pooled += feed * 0.5 * (before + stepper.field()) * cfg.dt - increment;
        }
        if (sample < skipped) continue;
        for (std::size_t j = 0; j < projectors.size(); ++j)
            out.samples[j].push_back(2.0 * (projectors[j] * pooled).real() * norm);
    }
    return out;
}

SpectralDensity welch(std::span<const double> series, double sample_dt, std::size_t segment_length, double overlap) {
    if (segment_length < 2 || segment_length > series.size())
        throw std::invalid_argument("welch: segment length must lie in [2, series length]");
    if (!(overlap >= 0.0 && overlap <= 0.9)) throw std::invalid_argument("welch: overlap must lie in [0, 0.9]");
    if (!(sample_dt > 0.0)) throw std::invalid_argument("welch: sample interval must be > 0");

    const auto hop = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(segment_length) * (1.0 - overlap))));
    const std::size_t segments = (series.size() - segment_length) / hop + 1;
    if (segments < 4) throw std::invalid_argument("welch: fewer than 4 segments, no reliable error bars");

    Periodogram periodogram(segment_length);
    const std::size_t bins = periodogram.bins();
    std::vector<double> sum(bins, 0.0), sum_sq(bins, 0.0), current;
    for (std::size_t s = 0; s < segments; ++s) {
        periodogram.compute(series.data() + s * hop, current);
        for (std::size_t k = 0; k < bins; ++k) {
            sum[k] += current[k];
            sum_sq[k] += current[k] * current[k];
        }
    }

    SpectralDensity out;
    out.segments = segments;
    out.omegas.resize(bins);
    out.psd.resize(bins);
    out.standard_error.resize(bins);
    const double n = static_cast<double>(segments);
    for (std::size_t k = 0; k < bins; ++k) {
        out.omegas[k] = 2.0 * std::numbers::pi * static_cast<double>(k) /
                        (static_cast<double>(segment_length) * sample_dt);
        const double mean = sum[k] / n;
        const double var = std::max(0.0, (sum_sq[k] - n * mean * mean) / (n - 1.0));
        out.psd[k] = mean;
        out.standard_error[k] = std::sqrt(var / n);
    }
    return out;
}

PsdEstimate psd_estimate(const QuadratureSeries& series, std::size_t segment_length, double overlap) {
    PsdEstimate out;
    out.thetas = series.thetas;
    for (const auto& samples : series.samples) {
        SpectralDensity d = welch(samples, series.sample_dt, segment_length, overlap);
        out.omegas = std::move(d.omegas);
        out.psd.push_back(std::move(d.psd));
        out.standard_error.push_back(std::move(d.standard_error));
        out.segments = d.segments;
    }
    return out;
}

std::vector<double> nearest_bins(const PsdEstimate& est, std::span<const double> omegas) {
    std::vector<double> out;
    if (est.omegas.empty()) return out;
    for (double omega : omegas) {
        const auto it = std::min_element(est.omegas.begin(), est.omegas.end(), [&](double a, double b) {
            return std::abs(a - std::abs(omega)) < std::abs(b - std::abs(omega));
        });
        if (std::find(out.begin(), out.end(), *it) == out.end()) out.push_back(*it);
    }
    return out;
}

ComparisonReport compare(const NoiseSpectrum& analytic, const PsdEstimate& empirical) {
    const double resolution = empirical.omegas.size() > 1 ? empirical.omegas[1] : 1.0;

    ComparisonReport report;
    for (std::size_t i = 0; i < analytic.omegas.size(); ++i) {
        const double omega = std::abs(analytic.omegas[i]);
        std::size_t bin = empirical.omegas.size();
        for (std::size_t k = 0; k < empirical.omegas.size(); ++k)
            if (std::abs(empirical.omegas[k] - omega) <= 1e-9 * std::max(omega, resolution)) {
                bin = k;
                break;
            }
        if (bin == empirical.omegas.size()) continue;

        for (std::size_t j = 0; j < analytic.thetas.size(); ++j) {
            const auto t = std::find_if(empirical.thetas.begin(), empirical.thetas.end(),
                                        [&](double e) { return std::abs(e - analytic.thetas[j]) <= 1e-12; });
            if (t == empirical.thetas.end()) continue;
            const auto row = static_cast<std::size_t>(t - empirical.thetas.begin());

            ComparisonPoint pt;
            pt.omega = analytic.omegas[i];
            pt.theta = analytic.thetas[j];
            pt.analytic = analytic.at(i, j);
            pt.empirical = empirical.psd[row][bin];
            pt.standard_error = empirical.standard_error[row][bin];
            const double diff = pt.analytic - pt.empirical;
            if (pt.standard_error > 0.0)
                pt.z = diff / pt.standard_error;
            else
                pt.z = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
            report.points.push_back(pt);
        }
    }
    if (report.points.empty()) throw std::invalid_argument("compare: analytic and empirical grids are disjoint");

    std::size_t within = 0;
    for (const auto& pt : report.points) {
        report.max_abs_z = std::max(report.max_abs_z, std::abs(pt.z));
        if (std::abs(pt.z) <= kZLimit) ++within;
    }
    report.fraction_within = static_cast<double>(within) / static_cast<double>(report.points.size());
    report.pass = report.fraction_within >= kPassFraction;
    return report;
}

}  // namespace polsq
