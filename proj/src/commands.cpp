#include "polsq/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "polsq/errors.hpp"
#include "polsq/stokes.hpp"

namespace polsq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kUncertaintySlack = 1e-6;

double flag(bool b) { return b ? 1.0 : 0.0; }

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
    return out.empty() ? "none" : out;
}

void add_operating_metadata(OutputTable& table, const SteadyState& st, const RunConfig& config) {
    table.metadata.emplace_back("detuning_mhz", format_number(config.detuning_mhz));
    table.metadata.emplace_back("branch", std::to_string(st.branch_index));
    table.metadata.emplace_back("intensity", format_number(st.intensity()));
    table.metadata.emplace_back("s_x", format_number(st.s_x));
    table.metadata.emplace_back("delta_0_mhz", format_number(rad_to_mhz(st.delta_0)));
    table.metadata.emplace_back("eta_det", format_number(config.eta_det));
}

FluctuationModel build_model(Mode mode, const SteadyState& st, const PhysicalParams& p) {
    return mode == Mode::x ? build_drift_x(st, p) : build_drift_y(st, p);
}

void require_stable(const FluctuationModel& model) {
    if (model.stable()) return;
    std::ostringstream msg;
    msg << to_string(model.mode()) << "-mode linearization is unstable on branch " << model.steady().branch_index
        << " (margin " << format_number(model.stability_margin()) << " 1/s)";
    throw NumericalError(msg.str());
}

}  // namespace

SteadyState operating_point(const RunConfig& config) {
    const PhysicalParams p = config.physical_params();
    const auto branches = steady_state(p, config.drive(), config.detuning());
    if (config.branch >= static_cast<int>(branches.size())) {
        const auto it = config.key_lines.find("branch");
        throw ValidationError("branch",
                              "only " + std::to_string(branches.size()) + " steady-state branch(es) at this detuning",
                              it == config.key_lines.end() ? 0 : it->second);
    }
    return branches[static_cast<std::size_t>(config.branch)];
}

std::vector<OutputTable> cmd_scan(const RunConfig& config) {
    const PhysicalParams p = config.physical_params();
    const auto grid = config.scan_grid();
    const ScanResult scan = cavity_scan(p, config.drive(), grid);

    OutputTable table;
    table.name = "scan";
    table.columns = {{"delta_c", "MHz"},          {"branches", "count"},      {"intensity_0", "photons"},
                     {"intensity_1", "photons"},  {"intensity_2", "photons"}, {"followed_branch", "index"},
                     {"jumped", "flag"},          {"I_plus", "photons/s"},    {"I_minus", "photons/s"},
                     {"y_margin", "1/s"},         {"linear_stable", "flag"},  {"mean_field_stable", "flag"}};
    table.metadata.emplace_back("drive_flux", format_number(config.drive().flux()));
    for (const auto& rec : scan.records) {
        const SteadyState& on = rec.branches[static_cast<std::size_t>(rec.followed_branch)];
        if (rec.linear_polarization_stable && rec.transmitted_plus != rec.transmitted_minus)
            throw NumericalError("scan: circular components differ while linear polarization is stable");
        std::vector<double> row{rad_to_mhz(rec.delta_c), static_cast<double>(rec.branches.size())};
        for (std::size_t b = 0; b < 3; ++b) row.push_back(b < rec.branches.size() ? rec.branches[b].intensity() : kNaN);
        row.insert(row.end(), {static_cast<double>(rec.followed_branch), flag(rec.jumped), rec.transmitted_plus,
                               rec.transmitted_minus, on.y_mode_margin, flag(rec.linear_polarization_stable),
                               flag(on.mean_field_stable)});
        table.add_row(std::move(row));
    }
    return {table};
}

std::vector<OutputTable> cmd_spectrum(const RunConfig& config, Mode mode) {
    const PhysicalParams p = config.physical_params();
    const SteadyState st = operating_point(config);
    const FluctuationModel model = build_model(mode, st, p);
    require_stable(model);

    const auto omegas = config.omegas();
    const auto thetas = config.thetas();
    const NoiseSpectrum spectrum = evaluate_spectrum(model, omegas, thetas);

    const std::string label = std::string("spectrum_") + to_string(mode);
    OutputTable grid;
    grid.name = label;
    grid.columns = {{"omega", "MHz"}, {"theta", "deg"}, {"S", "shot-noise"}, {"S_after_loss", "shot-noise"}};
    add_operating_metadata(grid, st, config);
    grid.metadata.emplace_back("mode", to_string(mode));

    OutputTable summary;
    summary.name = label + "_summary";
    summary.columns = {{"omega", "MHz"},         {"S_min", "shot-noise"},
                       {"S_max", "shot-noise"},  {"theta_min", "deg"},
                       {"S_min_after_loss", "shot-noise"}, {"S_max_after_loss", "shot-noise"}};
    add_operating_metadata(summary, st, config);
    summary.metadata.emplace_back("mode", to_string(mode));

    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        for (std::size_t j = 0; j < thetas.size(); ++j) {
            const double s = spectrum.at(i, j);
            if (s < 0.0) throw NumericalError("spectrum: negative noise density");
            grid.add_row({config.frequencies_mhz[i], rad_to_deg(thetas[j]), s, apply_detection_loss(s, config.eta_det)});
        }
        const SpectrumExtrema ext = min_max_spectrum(model, omegas[i]);
        if (ext.s_min < 0.0 || ext.s_min * ext.s_max < 1.0 - kUncertaintySlack)
            throw NumericalError("spectrum: extrema violate the uncertainty bound");
        summary.add_row({config.frequencies_mhz[i], ext.s_min, ext.s_max, rad_to_deg(ext.theta_min),
                         apply_detection_loss(ext.s_min, config.eta_det),
                         apply_detection_loss(ext.s_max, config.eta_det)});
        for (const auto& w : model_validity(model, p, omegas[i]))
            warnings.push_back(format_number(config.frequencies_mhz[i]) + " MHz: " + w);
    }
    summary.metadata.emplace_back("warnings", join(warnings));
    return {grid, summary};
}

std::vector<OutputTable> cmd_stokes(const RunConfig& config) {
    const PhysicalParams p = config.physical_params();
    const SteadyState st = operating_point(config);
    const FluctuationModel model = build_drift_y(st, p);
    require_stable(model);

    const auto omegas = config.omegas();
    const auto thetas = config.thetas();
    const double eta = config.eta_det;

    OutputTable scan;
    scan.name = "phase_scan";
    scan.columns = {{"omega", "MHz"},
                    {"theta_hd", "deg"},
                    {"cos_theta", "1"},
                    {"v_theta", "shot-noise"},
                    {"v_theta_lossless", "shot-noise"}};
    add_operating_metadata(scan, st, config);

    OutputTable summary;
    summary.name = "stokes_summary";
    summary.columns = {{"omega", "MHz"},          {"mean_s0", "photons"},   {"mean_s1", "photons"},
                       {"mean_s2", "photons"},    {"mean_s3", "photons"},   {"v_s2", "photons"},
                       {"v_s3", "photons"},       {"v_s2_norm", "coherent"}, {"v_s3_norm", "coherent"},
                       {"product", "coherent^2"}, {"v_s2_norm_det", "coherent"}, {"v_s3_norm_det", "coherent"},
                       {"product_det", "coherent^2"}, {"theta_sq", "deg"},
                       {"v_sq_norm", "coherent"},     {"v_anti_norm", "coherent"}};
    add_operating_metadata(summary, st, config);

    const std::vector<double> stokes_axes{0.0, std::numbers::pi / 2.0};
    const auto records = stokes_noise(evaluate_spectrum(model, omegas, stokes_axes), st.alpha_x);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const PhaseScanDataset data = phase_scan_dataset(model, omegas[i], thetas, eta);
        for (const auto& s : data.samples) {
            if (s.v_theta < 0.0 || (data.eta_applied && s.v_theta < 1.0 - eta - 1e-12))
                throw NumericalError("stokes: phase scan below the detection-loss floor");
            scan.add_row({config.frequencies_mhz[i], rad_to_deg(s.theta_hd), s.cos_theta, s.v_theta,
                          stokes_theta(model, omegas[i], s.theta_hd)});
        }

        const StokesRecord& r = records[i];
        const double s2_det = apply_detection_loss(r.v_s2_norm, eta);
        const double s3_det = apply_detection_loss(r.v_s3_norm, eta);
        if (r.uncertainty_product() < 1.0 - kUncertaintySlack || s2_det * s3_det < 1.0 - kUncertaintySlack)
            throw NumericalError("stokes: uncertainty product below 1");
        // Stokes pair rotated onto the noise ellipse: S_theta_sq and S_theta_sq+pi/2.
        const SpectrumExtrema axes = min_max_spectrum(model, omegas[i]);
        summary.add_row({config.frequencies_mhz[i], r.means.s0, r.means.s1, r.means.s2, r.means.s3, r.v_s2, r.v_s3,
                         r.v_s2_norm, r.v_s3_norm, r.uncertainty_product(), s2_det, s3_det, s2_det * s3_det,
                         rad_to_deg(axes.theta_min), axes.s_min, axes.s_max});
    }
    return {scan, summary};
}

OracleOutcome cmd_oracle(const RunConfig& config) {
    const PhysicalParams p = config.physical_params();
    const Mode mode = config.spectrum_mode;
    const SteadyState st = operating_point(config);
    const FluctuationModel model = build_model(mode, st, p);
    require_stable(model);

    SteadyState shifted = st;
    shifted.s_x *= 1.0 + config.oracle_perturb;
    const FluctuationModel simulated = build_model(mode, shifted, p);
    require_stable(simulated);

    const TrajectoryConfig traj = config.trajectory();
    const QuadratureSeries series = simulate(simulated, traj);
    const PsdEstimate psd = psd_estimate(series, config.oracle_segment, config.oracle_overlap);
    const auto bins = nearest_bins(psd, config.oracle_omegas());
    const NoiseSpectrum analytic = evaluate_spectrum(model, bins, traj.thetas);

    OracleOutcome outcome;
    outcome.report = compare(analytic, psd);

    OutputTable table;
    table.name = "oracle";
    table.columns = {{"omega", "MHz"},           {"theta", "deg"},       {"analytic", "shot-noise"},
                     {"empirical", "shot-noise"}, {"standard_error", "shot-noise"}, {"z", "sigma"}};
    add_operating_metadata(table, st, config);
    table.metadata.emplace_back("mode", to_string(mode));
    table.metadata.emplace_back("perturb", format_number(config.oracle_perturb));
    table.metadata.emplace_back("segments", std::to_string(psd.segments));
    table.metadata.emplace_back("max_abs_z", format_number(outcome.report.max_abs_z));
    table.metadata.emplace_back("fraction_within", format_number(outcome.report.fraction_within));
    table.metadata.emplace_back("pass", outcome.report.pass ? "true" : "false");
    for (const auto& pt : outcome.report.points)
        table.add_row({rad_to_mhz(pt.omega), rad_to_deg(pt.theta), pt.analytic, pt.empirical, pt.standard_error, pt.z});
    outcome.tables.push_back(std::move(table));
    return outcome;
}

std::string cmd_validate(const RunConfig& config) {
    const PhysicalParams p = config.physical_params();
    std::ostringstream out;
    out << "config ok\n";
    out << "kappa = " << format_number(p.kappa) << " 1/s\n";
    out << "gamma = " << format_number(p.gamma) << " 1/s\n";
    out << "delta = " << format_number(p.delta) << " 1/s\n";
    out << "delta_0 = " << format_number(linear_dephasing(p)) << " 1/s\n";
    out << "drive_flux = " << format_number(config.drive().flux()) << " photons/s\n";
    for (const auto& note : p.notes()) out << "note: " << note << '\n';

    const auto branches = steady_state(p, config.drive(), config.detuning());
    out << "branches at detuning " << format_number(config.detuning_mhz) << " MHz: " << branches.size() << '\n';
    for (const auto& st : branches) {
        out << "  branch " << st.branch_index << ": intensity = " << format_number(st.intensity())
            << ", s_x = " << format_number(st.s_x) << ", mean_field_stable = " << (st.mean_field_stable ? 1 : 0)
            << ", y_margin = " << format_number(st.y_mode_margin) << " 1/s\n";
    }
    if (config.branch < static_cast<int>(branches.size())) {
        const SteadyState& st = branches[static_cast<std::size_t>(config.branch)];
        const FluctuationModel model = build_drift_y(st, p);
        for (std::size_t i = 0; i < config.frequencies_mhz.size(); ++i)
            for (const auto& w : model_validity(model, p, mhz_to_rad(config.frequencies_mhz[i])))
                out << "warning: " << format_number(config.frequencies_mhz[i]) << " MHz: " << w << '\n';
    } else {
        out << "warning: branch " << config.branch << " does not exist at this detuning\n";
    }
    return out.str();
}

namespace {

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("--config", "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void emit(const std::vector<OutputTable>& tables, const RunConfig& config, const std::string& command,
          const std::string& format, std::ostream& out) {
    const RunMetadata meta{command, kVersion, config_hash(config)};
    const auto write = [&](const std::string& file, const std::string& body) {
        if (config.output_dir.empty()) {
            out << body;
            return;
        }
        std::filesystem::create_directories(config.output_dir);
        std::ofstream f(std::filesystem::path(config.output_dir) / file, std::ios::binary);
        if (!f) throw ValidationError("--out", "cannot write to " + config.output_dir);
        f << body;
    };
    if (format == "json") {
        write(command + ".json", to_json(tables, meta));
        return;
    }
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (config.output_dir.empty() && i) out << '\n';
        write(tables[i].name + ".csv", to_csv(tables[i], meta));
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Polarization squeezing in a saturable Kerr cavity"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format, mode_name = "y";
    std::uint64_t seed = 0;
    const auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (default: stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "oracle seed, overrides the config");
    };
    CLI::App* scan = app.add_subcommand("scan", "cavity detuning scan");
    CLI::App* spectrum = app.add_subcommand("spectrum", "quadrature noise spectrum");
    CLI::App* stokes = app.add_subcommand("stokes", "Stokes noise and homodyne phase scan");
    CLI::App* oracle = app.add_subcommand("oracle", "stochastic cross-check of the analytic spectrum");
    CLI::App* validate = app.add_subcommand("validate", "check a configuration");
    for (CLI::App* sub : {scan, spectrum, stokes, oracle, validate}) common(sub);
    spectrum->add_option("--mode", mode_name, "x (mean field) or y (vacuum mode)")->check(CLI::IsMember({"x", "y"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig config = load_config(config_path);
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (!format.empty()) config.format = format;
        if (app.get_subcommands().front()->count("--seed")) config.oracle_seed = seed;
        for (const auto& note : config.physical_params().notes()) err << "note: " << note << '\n';

        if (*validate) {
            out << cmd_validate(config);
        } else if (*scan) {
            emit(cmd_scan(config), config, "scan", config.format, out);
        } else if (*spectrum) {
            const Mode mode = mode_name == "x" ? Mode::x : Mode::y;
            emit(cmd_spectrum(config, mode), config, std::string("spectrum_") + to_string(mode), config.format, out);
        } else if (*stokes) {
            emit(cmd_stokes(config), config, "stokes", config.format, out);
        } else if (*oracle) {
            // The oracle report is always JSON.
            const OracleOutcome outcome = cmd_oracle(config);
            emit(outcome.tables, config, "oracle", "json", out);
            if (!outcome.report.pass) {
                err << "oracle mismatch: " << format_number(outcome.report.fraction_within * 100.0)
                    << "% of points within 3 sigma (max |z| = " << format_number(outcome.report.max_abs_z) << ")\n";
                return 3;
            }
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace polsq
