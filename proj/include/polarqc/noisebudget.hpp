#pragma once

#include <string>
#include <vector>

#include "polarqc/config.hpp"

namespace polarqc {

namespace noise {

double coherence_time(double Rs);                      // s
double gate_capacity(double T2, double tau);           // T2 / tau
// Fractional intensity noise (1/sqrt(Hz)) that keeps a tensor light shift
// inside the frequency-noise budget.
double required_intensity_stability(double dnu_budget, double tensor_shift);
// Voltage noise (V/sqrt(Hz)) across plates `gap_cm` apart that moves a dipole
// d_eff by no more than the budget.
double required_voltage_noise(double dnu_budget, double d_eff_debye, double gap_cm);

}  // namespace noise

struct NoiseBudget {
    double Rs = 0.0;             // 1/s
    double T2 = 0.0;             // s
    double delta_nu = 0.0;       // Hz, neighbour coupling at the plateau dipole
    double tau_gate = 0.0;       // s
    double gate_capacity = 0.0;
    double tensor_shift = 0.0;   // Hz
    double dnu_budget = 0.0;     // Hz/sqrt(Hz)
    double dI_over_I_req = 0.0;  // 1/sqrt(Hz)
    double d_eff = 0.0;          // D, plateau value over the configured field range
    double dV_req = 0.0;         // V/sqrt(Hz) at d_eff
    double dV_req_full_mu = 0.0; // V/sqrt(Hz) at the full dipole
    double plate_gap = 0.0;      // cm
    std::vector<std::string> notes;
};

// Largest d_eff over the field range the configured profile covers.
double plateau_d_eff(const RunConfig& cfg);

NoiseBudget budget_report(const RunConfig& cfg);

}  // namespace polarqc
