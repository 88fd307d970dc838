#include "polarqc/noisebudget.hpp"

#include <algorithm>
#include <cmath>

#include "polarqc/error.hpp"
#include "polarqc/units.hpp"

namespace polarqc {

namespace noise {

namespace {
void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be > 0");
}
}  // namespace

double coherence_time(double Rs) {
    require_positive(Rs, "coherence_time: Rs");
    return 1.0 / Rs;
}

double gate_capacity(double T2, double tau) {
    require_positive(T2, "gate_capacity: T2");
    require_positive(tau, "gate_capacity: tau");
    return T2 / tau;
}

double required_intensity_stability(double dnu_budget, double tensor_shift) {
    require_positive(dnu_budget, "required_intensity_stability: dnu_budget");
    require_positive(tensor_shift, "required_intensity_stability: tensor_shift");
    return dnu_budget / tensor_shift;
}

double required_voltage_noise(double dnu_budget, double d_eff_debye, double gap_cm) {
    require_positive(dnu_budget, "required_voltage_noise: dnu_budget");
    require_positive(d_eff_debye, "required_voltage_noise: d_eff");
    require_positive(gap_cm, "required_voltage_noise: gap");
    return dnu_budget / units::dipole_field_to_frequency(d_eff_debye, 1.0) * gap_cm;
}

}  // namespace noise

double plateau_d_eff(const RunConfig& cfg) {
    const double e0 = cfg.field.at_mm(0.0), e1 = cfg.field.at_mm(cfg.trap.L_mm);
    constexpr int kPoints = 61;
    double best = 0.0;
    for (int i = 0; i < kPoints; ++i) {
        const double e = e0 + (e1 - e0) * i / (kPoints - 1);
        if (!(e > 0.0)) continue;
        best = std::max(best, stark::qubit_levels(cfg.molecule, e, cfg.sim.Jmax).d_eff);
    }
    if (!(best > 0.0)) throw ValidationError("budget: field.E0_Vcm / field.dEdx_Vcm_per_mm give no positive field");
    return best;
}

NoiseBudget budget_report(const RunConfig& cfg) {
    std::string bad;
    auto need = [&bad](double v, const char* key) {
        if (!(v > 0.0) || !std::isfinite(v)) bad += (bad.empty() ? "" : ", ") + std::string(key);
    };
    need(cfg.noise.Rs_per_s, "noise.Rs_per_s");
    need(cfg.noise.plate_gap_cm, "noise.plate_gap_cm");
    need(cfg.trap.U0_K, "trap.U0_K");
    need(cfg.trap.lambda_t_um, "trap.lambda_t_um");
    need(cfg.molecule.mu, "molecule.mu_D");
    need(cfg.molecule.B, "molecule.B_Hz");
    if (!bad.empty()) throw ValidationError("budget: missing or non-positive key(s) " + bad);

    NoiseBudget b;
    b.Rs = cfg.noise.Rs_per_s;
    b.plate_gap = cfg.noise.plate_gap_cm;
    b.T2 = noise::coherence_time(b.Rs);
    b.d_eff = plateau_d_eff(cfg);
    b.delta_nu = units::dipole_coupling(b.d_eff, b.d_eff, cfg.trap.spacing_um());
    b.tau_gate = device::cnot_time(b.delta_nu);
    b.gate_capacity = noise::gate_capacity(b.T2, b.tau_gate);
    b.tensor_shift = units::temperature_to_frequency(cfg.trap.U0_K);
    b.dnu_budget = std::sqrt(b.Rs);
    b.dI_over_I_req = noise::required_intensity_stability(b.dnu_budget, b.tensor_shift);
    b.dV_req = noise::required_voltage_noise(b.dnu_budget, b.d_eff, b.plate_gap);
    b.dV_req_full_mu = noise::required_voltage_noise(b.dnu_budget, cfg.molecule.mu, b.plate_gap);

    b.notes = {
        "tensor light shift taken as large as U0",
        "intensity requirement is about 300x above the photon shot-noise limit (informational)",
        "trap heating: not modelled",
        "photodissociation by trap light: not modelled",
        "blackbody transitions: not modelled",
        "background-gas collisions: not modelled",
    };
    if (b.dI_over_I_req < 1e-7) b.notes.push_back("intensity stability requirement below 1e-7/sqrt(Hz)");
    if (b.dV_req < 1e-7) b.notes.push_back("voltage noise requirement below 0.1 uV/sqrt(Hz)");
    return b;
}

}  // namespace polarqc
