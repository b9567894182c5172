#include "polsq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "polsq/errors.hpp"

namespace polsq {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, std::string_view text, int line) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty())
        throw ValidationError(key, "expected a number, got '" + std::string(text) + "'", line);
    if (!std::isfinite(value)) throw ValidationError(key, "must be finite", line);
    return value;
}

template <typename Int>
Int parse_integer(const std::string& key, std::string_view text, int line) {
    text = trim(text);
    Int value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty())
        throw ValidationError(key, "expected an integer, got '" + std::string(text) + "'", line);
    return value;
}

std::vector<double> parse_list(const std::string& key, std::string_view text, int line) {
    std::vector<double> out;
    text = trim(text);
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(parse_double(key, text.substr(start, comma - start), line));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string render_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_number(values[i]);
    }
    return out;
}

struct Field {
    const char* key;
    std::function<void(RunConfig&, std::string_view, int)> read;
    std::function<std::string(const RunConfig&)> write;
};

Field number(const char* key, double RunConfig::*member) {
    return {key, [key, member](RunConfig& c, std::string_view v, int line) { c.*member = parse_double(key, v, line); },
            [member](const RunConfig& c) { return format_number(c.*member); }};
}

template <typename Int>
Field integer(const char* key, Int RunConfig::*member) {
    return {key,
            [key, member](RunConfig& c, std::string_view v, int line) { c.*member = parse_integer<Int>(key, v, line); },
            [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field list(const char* key, std::vector<double> RunConfig::*member) {
    return {key, [key, member](RunConfig& c, std::string_view v, int line) { c.*member = parse_list(key, v, line); },
            [member](const RunConfig& c) { return render_list(c.*member); }};
}

Field text(const char* key, std::string RunConfig::*member) {
    return {key, [member](RunConfig& c, std::string_view v, int) { c.*member = std::string(trim(v)); },
            [member](const RunConfig& c) { return c.*member; }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        number("kappa_mhz", &RunConfig::kappa_mhz),
        number("gamma_perp_mhz", &RunConfig::gamma_perp_mhz),
        number("gamma_par_mhz", &RunConfig::gamma_par_mhz),
        number("gamma_mhz", &RunConfig::gamma_mhz),
        number("delta_mhz", &RunConfig::delta_mhz),
        number("transmission", &RunConfig::transmission),
        number("n_atoms", &RunConfig::n_atoms),
        number("g_mhz", &RunConfig::g_mhz),
        number("eta_det", &RunConfig::eta_det),
        number("drive_power_uw", &RunConfig::drive_power_uw),
        number("flux_per_uw", &RunConfig::flux_per_uw),
        number("detuning_mhz", &RunConfig::detuning_mhz),
        integer("branch", &RunConfig::branch),
        number("scan_start_mhz", &RunConfig::scan_start_mhz),
        number("scan_stop_mhz", &RunConfig::scan_stop_mhz),
        number("scan_step_mhz", &RunConfig::scan_step_mhz),
        list("frequencies_mhz", &RunConfig::frequencies_mhz),
        number("theta_start_deg", &RunConfig::theta_start_deg),
        number("theta_stop_deg", &RunConfig::theta_stop_deg),
        integer("theta_points", &RunConfig::theta_points),
        {"spectrum_mode",
         [](RunConfig& c, std::string_view v, int line) {
             const auto m = trim(v);
             if (m == "x")
                 c.spectrum_mode = Mode::x;
             else if (m == "y")
                 c.spectrum_mode = Mode::y;
             else
                 throw ValidationError("spectrum_mode", "expected x or y", line);
         },
         [](const RunConfig& c) { return std::string(to_string(c.spectrum_mode)); }},
        number("oracle_dt_ns", &RunConfig::oracle_dt_ns),
        number("oracle_duration_us", &RunConfig::oracle_duration_us),
        integer("oracle_seed", &RunConfig::oracle_seed),
        number("oracle_burn_in", &RunConfig::oracle_burn_in),
        integer("oracle_segment", &RunConfig::oracle_segment),
        number("oracle_overlap", &RunConfig::oracle_overlap),
        integer("oracle_decimation", &RunConfig::oracle_decimation),
        list("oracle_frequencies_mhz", &RunConfig::oracle_frequencies_mhz),
        list("oracle_thetas_deg", &RunConfig::oracle_thetas_deg),
        number("oracle_perturb", &RunConfig::oracle_perturb),
        text("output_dir", &RunConfig::output_dir),
        text("format", &RunConfig::format),
    };
    return table;
}

// PhysicalParams field name -> config key.
std::string config_key_for(const std::string& param) {
    static const std::map<std::string, std::string> names = {
        {"kappa", "kappa_mhz"},   {"gamma_perp", "gamma_perp_mhz"}, {"gamma_par", "gamma_par_mhz"},
        {"gamma", "gamma_mhz"},   {"delta", "delta_mhz"},           {"transmission", "transmission"},
        {"n_atoms", "n_atoms"},   {"g_coupling", "g_mhz"},          {"eta_det", "eta_det"},
    };
    const auto it = names.find(param);
    return it == names.end() ? param : it->second;
}

void check(const RunConfig& c, bool ok, const std::string& key, const std::string& what) {
    if (ok) return;
    const auto it = c.key_lines.find(key);
    throw ValidationError(key, what, it == c.key_lines.end() ? 0 : it->second);
}

void validate(const RunConfig& c) {
    try {
        c.physical_params().validate();
    } catch (const ValidationError& e) {
        const std::string key = config_key_for(e.key());
        check(c, false, key, e.detail());
    }
    check(c, c.drive_power_uw >= 0.0, "drive_power_uw", "must be >= 0");
    check(c, c.flux_per_uw > 0.0, "flux_per_uw", "must be > 0");
    check(c, c.branch >= 0, "branch", "must be >= 0");
    check(c, c.scan_step_mhz > 0.0, "scan_step_mhz", "must be > 0");
    check(c, c.scan_stop_mhz >= c.scan_start_mhz, "scan_stop_mhz", "must be >= scan_start_mhz");
    check(c, (c.scan_stop_mhz - c.scan_start_mhz) / c.scan_step_mhz <= 1e6, "scan_step_mhz",
          "scan grid exceeds 1e6 points");
    check(c, !c.frequencies_mhz.empty(), "frequencies_mhz", "must list at least one frequency");
    check(c, c.theta_points >= 1, "theta_points", "must be >= 1");
    check(c, c.theta_stop_deg >= c.theta_start_deg, "theta_stop_deg", "must be >= theta_start_deg");
    check(c, c.oracle_dt_ns > 0.0, "oracle_dt_ns", "must be > 0");
    check(c, c.oracle_duration_us * 1e3 >= 1000.0 * c.oracle_dt_ns, "oracle_duration_us",
          "must be at least 1000 oracle steps");
    check(c, c.oracle_burn_in >= 0.0 && c.oracle_burn_in <= 0.5, "oracle_burn_in", "must lie in [0, 0.5]");
    check(c, c.oracle_segment >= 16, "oracle_segment", "must be >= 16");
    check(c, c.oracle_overlap >= 0.0 && c.oracle_overlap <= 0.9, "oracle_overlap", "must lie in [0, 0.9]");
    check(c, c.oracle_decimation >= 1, "oracle_decimation", "must be >= 1");
    check(c, !c.oracle_frequencies_mhz.empty(), "oracle_frequencies_mhz", "must list at least one frequency");
    check(c, !c.oracle_thetas_deg.empty(), "oracle_thetas_deg", "must list at least one angle");
    check(c, c.oracle_perturb > -1.0, "oracle_perturb", "must be > -1");
    check(c, c.format == "csv" || c.format == "json", "format", "expected csv or json");
}

}  // namespace

double mhz_to_rad(double mhz) { return 2.0 * std::numbers::pi * 1e6 * mhz; }
double rad_to_mhz(double rad) { return rad / (2.0 * std::numbers::pi * 1e6); }
double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

PhysicalParams RunConfig::physical_params() const {
    PhysicalParams p;
    p.kappa = mhz_to_rad(kappa_mhz);
    p.gamma_perp = mhz_to_rad(gamma_perp_mhz);
    p.gamma_par = mhz_to_rad(gamma_par_mhz);
    // The decay-rate sum is checked in user units (to decimal round-off) and
    // gamma rebuilt from its parts, so unit scaling cannot break it.
    const bool sum_ok = std::abs(gamma_perp_mhz + gamma_par_mhz - gamma_mhz) <= 1e-12 * std::abs(gamma_mhz);
    p.gamma = sum_ok ? p.gamma_perp + p.gamma_par : mhz_to_rad(gamma_mhz);
    p.delta = mhz_to_rad(delta_mhz);
    p.transmission = transmission;
    p.n_atoms = n_atoms;
    p.g_coupling = mhz_to_rad(g_mhz);
    p.eta_det = eta_det;
    return p;
}

DriveField RunConfig::drive() const { return {std::sqrt(drive_power_uw * flux_per_uw)}; }

double RunConfig::detuning() const { return mhz_to_rad(detuning_mhz); }

std::vector<double> RunConfig::scan_grid() const {
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((scan_stop_mhz - scan_start_mhz) / scan_step_mhz + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(mhz_to_rad(scan_start_mhz + static_cast<double>(i) * scan_step_mhz));
    return out;
}

std::vector<double> RunConfig::omegas() const {
    std::vector<double> out;
    for (double f : frequencies_mhz) out.push_back(mhz_to_rad(f));
    return out;
}

std::vector<double> RunConfig::thetas() const {
    std::vector<double> out;
    if (theta_points == 1) return {deg_to_rad(theta_start_deg)};
    const double step = (theta_stop_deg - theta_start_deg) / (theta_points - 1);
    for (int i = 0; i < theta_points; ++i) out.push_back(deg_to_rad(theta_start_deg + i * step));
    return out;
}

std::vector<double> RunConfig::oracle_omegas() const {
    std::vector<double> out;
    for (double f : oracle_frequencies_mhz) out.push_back(mhz_to_rad(f));
    return out;
}

TrajectoryConfig RunConfig::trajectory() const {
    TrajectoryConfig t;
    t.dt = oracle_dt_ns * 1e-9;
    t.duration = oracle_duration_us * 1e-6;
    t.seed = oracle_seed;
    t.burn_in = oracle_burn_in;
    t.decimation = oracle_decimation;
    t.thetas.clear();
    for (double deg : oracle_thetas_deg) t.thetas.push_back(deg_to_rad(deg));
    return t;
}

RunConfig parse_config(std::string_view input) {
    RunConfig config;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= input.size()) {
        const auto eol = input.find('\n', pos);
        const std::string_view raw = input.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? input.size() + 1 : eol + 1;
        ++line_no;

        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ValidationError("", "syntax error, expected key = value", line_no);
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ValidationError("", "syntax error, missing key", line_no);

        const auto& table = fields();
        const auto field = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
        if (field == table.end()) throw ValidationError(key, "unknown key", line_no);
        if (!seen.insert(key).second) throw ValidationError(key, "repeated key", line_no);
        field->read(config, line.substr(eq + 1), line_no);
        config.key_lines[key] = line_no;
    }
    validate(config);
    return config;
}

std::string render_config(const RunConfig& config) {
    std::ostringstream out;
    for (const auto& f : fields()) {
        const std::string value = f.write(config);
        out << f.key << (value.empty() ? " =" : " = ") << value << '\n';
    }
    return out.str();
}

std::string config_hash(const RunConfig& config) {
    // Where and how results are written does not change them.
    RunConfig physics = config;
    physics.output_dir.clear();
    physics.format.clear();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : render_config(physics)) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace polsq
