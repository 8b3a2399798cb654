#include "cpbnr/model.hpp"

#include <cmath>

namespace cpbnr {

double device_coupling(const DeviceParams& d) {
    return -4.0 * d.ej0 * std::cos(M_PI * d.phi_x) * d.b_group;
}

double device_energy(const DeviceParams& d) {
    const double cap = d.c1 + 4.0 * d.cj0;
    if (!(cap > 0.0))
        throw std::domain_error("device_energy: capacitance sum C1 + 4*CJ0 must be positive");
    const double ec = 1.0 / cap;          // e = 1
    const double ng = d.c1 * d.vg / 2.0;
    return 8.0 * ec * (ng - 0.5);
}

double eval_f(const ModulationLaw& law, double t) {
    switch (law.kind) {
    case LawKind::Constant:
        return 0.0;
    case LawKind::Sinusoidal:
        return law.tau * std::sin(law.omega_prime * t);
    }
    return 0.0;
}

double integral_f(const ModulationLaw& law, double t) {
    if (law.kind == LawKind::Constant || law.omega_prime == 0.0)
        return 0.0;
    return law.tau * (1.0 - std::cos(law.omega_prime * t)) / law.omega_prime;
}

void SystemParams::validate() const {
    if (!(omega0 > 0.0))
        throw std::invalid_argument("SystemParams: omega0 must be positive");
    if (kappa < 0.0 || delta < 0.0)
        throw std::invalid_argument("SystemParams: loss rates must be non-negative");
    if (chi0 < 0.0)
        throw std::invalid_argument("SystemParams: chi0 must be non-negative");
    if (!std::isfinite(omega0) || !std::isfinite(omega_c) || !std::isfinite(chi0) ||
        !std::isfinite(kappa) || !std::isfinite(delta) || !std::isfinite(epsilon) ||
        !std::isfinite(tau) || !std::isfinite(omega_prime) || !std::isfinite(coupling_scale))
        throw std::invalid_argument("SystemParams: parameters must be finite");
}

CoefficientSet eval_coefficients(const SystemParams& p, const ModulationLaw& law, double t) {
    const double f = eval_f(law, t);
    const double ratio = 1.0 + f / p.omega0;
    if (ratio < 0.0)
        throw std::domain_error("eval_coefficients: 1 + f(t)/omega0 < 0 at t = " + std::to_string(t));
    CoefficientSet c;
    c.omega   = p.omega0 + f;
    c.omega_c = p.omega_c;
    c.lambda  = p.coupling_scale * std::sqrt(ratio);
    c.chi     = p.chi0 + p.epsilon * f;
    c.kappa   = p.kappa;
    c.delta   = p.delta;
    return c;
}

} // namespace cpbnr
