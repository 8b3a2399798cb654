#pragma once

#include <stdexcept>
#include <string>

// Model parameters for a Cooper-pair box coupled to a nanomechanical resonator.
// All dynamical quantities are expressed in units of the static coupling
// lambda0 (frequencies in lambda0, times in 1/lambda0), so coupling_scale = 1
// reproduces the physical device and 0 switches the interaction off.

namespace cpbnr {

// Raw device parameters, used only to derive the working-point constants.
// Natural units: hbar = 1, elementary charge e = 1; capacitances are given
// such that e^2/C has frequency units; phi_x is in units of the flux quantum.
struct DeviceParams {
    double ej0     = 0.0;  // bare Josephson energy E_J^0
    double c1      = 0.0;  // input (gate) capacitance
    double cj0     = 0.0;  // single junction capacitance
    double vg      = 0.0;  // gate voltage
    double phi_x   = 0.0;  // external flux / flux quantum
    double b_group = 0.0;  // pi * B * l * x0 / Phi0, dimensionless
};

// Static coupling lambda0 = -4 E_J^0 cos(pi Phi_x/Phi0) * (pi B l x0/Phi0).
double device_coupling(const DeviceParams& d);

// Effective qubit splitting omega_c = 8 E_c (N_g - 1/2) with
// E_c = e^2/(C_1 + 4 C_J^0) and N_g = C_1 V_g / (2e).
// Throws std::domain_error when the capacitance sum is not positive.
double device_energy(const DeviceParams& d);

enum class LawKind { Constant, Sinusoidal };

// Resonator frequency modulation f(t); the instantaneous frequency is
// omega(t) = omega0 + f(t).
struct ModulationLaw {
    LawKind kind        = LawKind::Constant;
    double tau          = 0.0;  // modulation amplitude (units of lambda0)
    double omega_prime  = 0.0;  // modulation frequency (units of lambda0)

    static ModulationLaw constant() { return {}; }
    static ModulationLaw sinusoidal(double tau, double omega_prime) {
        return {LawKind::Sinusoidal, tau, omega_prime};
    }
};

// f(t): 0 for Constant, tau*sin(omega_prime*t) for Sinusoidal.
double eval_f(const ModulationLaw& law, double t);

// Closed form of the running integral F(t) = \int_0^t f(s) ds.
// Constant: 0.  Sinusoidal: tau*(1 - cos(omega_prime*t))/omega_prime.
// Needed exactly by the trace-phase gauge; omega_prime = 0 degenerates to 0.
double integral_f(const ModulationLaw& law, double t);

// System constants in lambda0 units. omega_c, kappa and delta are held fixed;
// omega, lambda and chi acquire time dependence through f(t).
struct SystemParams {
    double omega0         = 0.0;  // unmodulated resonator frequency
    double omega_c        = 0.0;  // qubit splitting
    double chi0           = 0.0;  // static Kerr coefficient
    double kappa          = 0.0;  // qubit (CPB) loss rate
    double delta          = 0.0;  // resonator loss rate per quantum
    double epsilon        = 0.0;  // Kerr modulation coefficient, dimensionless
    double tau            = 0.0;  // stored modulation amplitude (see ModulationLaw)
    double omega_prime    = 0.0;  // stored modulation frequency
    double coupling_scale = 1.0;  // multiplies the coupling; 0 disables it

    // Throws std::invalid_argument when a rate or frequency is out of range.
    void validate() const;
};

// Instantaneous coefficients entering the equations of motion.
struct CoefficientSet {
    double omega   = 0.0;  // omega0 + f(t)
    double omega_c = 0.0;
    double lambda  = 0.0;  // coupling_scale * sqrt(1 + f/omega0)
    double chi     = 0.0;  // chi0 + epsilon * f(t)
    double kappa   = 0.0;
    double delta   = 0.0;
};

// Evaluates all drive coefficients at time t.  The coupling tracks the
// frequency adiabatically, lambda(t)/lambda0 = sqrt(omega(t)/omega0).
// Throws std::domain_error when 1 + f(t)/omega0 < 0 (coupling undefined).
CoefficientSet eval_coefficients(const SystemParams& p, const ModulationLaw& law, double t);

} // namespace cpbnr
