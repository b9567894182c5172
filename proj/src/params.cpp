#include "polsq/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polsq/errors.hpp"

namespace polsq {

namespace {

void require_finite(const char* key, double value) {
    if (!std::isfinite(value)) throw ValidationError(key, "must be finite");
}

}  // namespace

void PhysicalParams::validate() const {
    require_finite("kappa", kappa);
    require_finite("gamma_perp", gamma_perp);
    require_finite("gamma_par", gamma_par);
    require_finite("gamma", gamma);
    require_finite("delta", delta);
    require_finite("transmission", transmission);
    require_finite("n_atoms", n_atoms);
    require_finite("g_coupling", g_coupling);
    require_finite("eta_det", eta_det);

    if (kappa <= 0.0) throw ValidationError("kappa", "must be > 0");
    if (gamma_perp < 0.0) throw ValidationError("gamma_perp", "must be >= 0");
    if (gamma_par < 0.0) throw ValidationError("gamma_par", "must be >= 0");
    if (transmission <= 0.0 || transmission > 1.0)
        throw ValidationError("transmission", "must lie in (0, 1]");
    if (eta_det <= 0.0 || eta_det > 1.0) throw ValidationError("eta_det", "must lie in (0, 1]");
    if (n_atoms < 0.0) throw ValidationError("n_atoms", "must be >= 0");
    if (delta == 0.0) throw ValidationError("delta", "must be nonzero");

    // Equality up to one rounding of the sum.
    const double sum = gamma_perp + gamma_par;
    if (std::abs(sum - gamma) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(gamma), sum))
        throw ValidationError("gamma", "must equal gamma_perp + gamma_par");
}

bool PhysicalParams::large_detuning_valid() const { return std::abs(delta) >= 10.0 * gamma; }

std::vector<std::string> PhysicalParams::notes() const {
    std::vector<std::string> out;
    if (!large_detuning_valid())
        out.emplace_back("model-validity: |delta| < 10 gamma, large-detuning expansion is not reliable");
    if (kappa > gamma) out.emplace_back("bad-cavity regime: kappa > gamma");
    return out;
}

double linear_dephasing(const PhysicalParams& p) {
    if (p.delta == 0.0) throw std::domain_error("linear_dephasing: zero atomic detuning");
    if (p.transmission <= 0.0) throw std::domain_error("linear_dephasing: transmission must be > 0");
    // 2 N g'^2 kappa / (delta T) with g' the coupling in circulating-flux
    // field units, g'^2 = g^2 T / (2 kappa). This reduces to N g^2 / delta.
    const double flux_coupling_sq = p.g_coupling * p.g_coupling * p.transmission / (2.0 * p.kappa);
    return 2.0 * p.n_atoms * flux_coupling_sq * p.kappa / (p.delta * p.transmission);
}

double saturation_per_photon(const PhysicalParams& p) {
    if (p.delta == 0.0) throw std::domain_error("saturation: zero atomic detuning");
    return 2.0 * p.g_coupling * p.g_coupling / (p.delta * p.delta);
}

double saturation(std::complex<double> alpha_x, const PhysicalParams& p) {
    return saturation_per_photon(p) * std::norm(alpha_x);
}

}  // namespace polsq
