#pragma once

#include <string>

namespace twolevel {

// All scalar physics inputs, natural units (hbar = c = 1). Energies, rates
// and frequencies share one unit; omega = 2 (so omega0 = 1) sets the default
// scale in the experiments.
struct ModelParams {
    double E_a = 1.0;      // upper level
    double E_b = -1.0;     // lower level
    double nu = 2.0;       // drive carrier frequency
    double gamma = 0.0;    // vacuum decay constant, input scalar
    double omega_c = 3.0;  // dipole-approximation cutoff, > 0, != omega0
    double dipole = 1.0;   // m = mu_ab . e (real)
    double E0 = 0.0;       // drive amplitude
    double T = 1.0;        // drive period

    double omega() const { return E_a - E_b; }
    double omega0() const { return 0.5 * (E_a - E_b); }
    double detuning() const { return omega() - nu; }
    double rabi() const { return 0.5 * dipole * E0; }  // V0 = m E0 / 2
};

// Throws ValidationError listing every violated invariant; returns params
// unchanged otherwise.
ModelParams validate(const ModelParams& params);

// Parameters of the Bethe-Lamb equation. delta is derived so that
// delta = (gamma_a - gamma_b)/2 holds exactly.
struct NHParams {
    double gamma_a = 0.0;
    double gamma_b = 0.0;
    double V0 = 0.0;
    double Delta = 0.0;

    double delta() const { return 0.5 * (gamma_a - gamma_b); }
};

// Decay matching gamma_a = 2 gamma, gamma_b = 0: the zero-field upper-level
// population then decays identically in both tracks.
NHParams nh_from_master(const ModelParams& params);

// Frequency shift Omega_+ = -(gamma/pi) ln[ |wc/w0 - 1| (wc/w0 + 1) ].
double omega_plus(const ModelParams& params);

} // namespace twolevel
