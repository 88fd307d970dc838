#include "polarqc/device.hpp"

#include <algorithm>
#include <cmath>

#include "polarqc/error.hpp"
#include "polarqc/units.hpp"

namespace polarqc {

void TrapGeometry::validate() const {
    auto pos = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!pos(lambda_t_um)) throw ValidationError("trap: lambda_t_um must be > 0");
    if (!pos(L_mm)) throw ValidationError("trap: L_mm must be > 0");
    if (!pos(w0_um)) throw ValidationError("trap: w0_um must be > 0");
    if (!pos(wt_um)) throw ValidationError("trap: wt_um must be > 0");
    if (!pos(U0_K)) throw ValidationError("trap: U0_K must be > 0");
}

FieldProfile field_spanning_beta(const MoleculeSpec& mol, const TrapGeometry& trap, double beta_lo, double beta_hi) {
    const double e_lo = units::beta_to_field(beta_lo, mol.mu, mol.B);
    const double e_hi = units::beta_to_field(beta_hi, mol.mu, mol.B);
    return {e_lo, (e_hi - e_lo) / trap.L_mm};
}

namespace device {

double rayleigh_length(double w0_um, double lambda_t_um) {
    if (!(w0_um > 0.0) || !(lambda_t_um > 0.0)) throw ValidationError("rayleigh_length: inputs must be > 0");
    return units::kPi * w0_um * w0_um / lambda_t_um * 1e-3;
}

long site_count(double L_mm, double lambda_t_um) {
    if (!(L_mm > 0.0) || !(lambda_t_um > 0.0)) throw ValidationError("site_count: inputs must be > 0");
    // 2L/lambda in exact-ish arithmetic; the nudge keeps 10000.0000001 and
    // 9999.9999999 from flipping the floor.
    const double n = 2.0 * L_mm * 1e3 / lambda_t_um;
    return long(std::floor(n * (1.0 + 1e-12)));
}

double cnot_time(double delta_nu_hz) {
    if (!(delta_nu_hz > 0.0)) throw ValidationError("cnot_time: delta_nu must be > 0");
    return 1.0 / (2.0 * units::kPi * delta_nu_hz);
}

}  // namespace device

double DeviceLayout::coupling(int a, int b) const {
    if (a < 0 || b < 0 || a >= N || b >= N) throw ValidationError("coupling: site index out of range");
    if (a == b) return 0.0;
    const int lo = std::min(a, b);
    const int k = std::abs(a - b);
    if (k > band_) return 0.0;
    return band_table_[std::size_t(lo) * band_ + (k - 1)];
}

double DeviceLayout::pair_factor(int a, int b) const {
    if (a == b) throw ValidationError("pair_factor: a == b");
    return units::dipole_coupling(1.0, 1.0, std::abs(x_um[a] - x_um[b]));
}

double DeviceLayout::min_step() const {
    double m = INFINITY;
    for (int a = 0; a + 1 < N; ++a) m = std::min(m, nu_linear[a + 1] - nu_linear[a]);
    return m;
}

double DeviceLayout::max_neighbor_coupling() const {
    double m = 0.0;
    for (int a = 0; a + 1 < N; ++a) m = std::max(m, coupling(a, a + 1));
    return m;
}

DeviceLayout build_layout(const MoleculeSpec& mol, const TrapGeometry& trap, const FieldProfile& field, int N) {
    mol.validate();
    trap.validate();
    if (N < 1) throw ValidationError("build_layout: N must be >= 1");
    if (N > device::site_count(trap.L_mm, trap.lambda_t_um))
        throw ValidationError("build_layout: N exceeds the trap's site count");

    DeviceLayout L;
    L.molecule = mol;
    L.trap = trap;
    L.field = field;
    L.N = N;
    const double d_ref = device::kDeffRefFraction * mol.mu;
    for (int a = 0; a < N; ++a) {
        const double x = a * trap.spacing_um();
        const double e = field.at_mm(x * 1e-3);
        if (!(e > 0.0)) throw ValidationError("build_layout: local field must stay > 0 across the array");
        const StarkSolution s = stark::qubit_levels(mol, e);
        L.x_um.push_back(x);
        L.E_local.push_back(e);
        L.nu_linear.push_back(2.0 * mol.B + units::dipole_field_to_frequency(d_ref, e));
        L.nu_exact.push_back((s.W1 - s.W0) * mol.B);
        L.w0_hz.push_back(s.W0 * mol.B);
        L.w1_hz.push_back(s.W1 * mol.B);
        L.d0.push_back(s.d0);
        L.d1.push_back(s.d1);
        L.d_eff_site.push_back(s.d_eff);
    }

    L.band_ = N <= device::kFullTableMax ? N - 1 : device::kBandWidth;
    L.band_table_.assign(std::size_t(N) * L.band_, 0.0);
    for (int a = 0; a < N; ++a)
        for (int k = 1; k <= L.band_ && a + k < N; ++k)
            L.band_table_[std::size_t(a) * L.band_ + (k - 1)] =
                units::dipole_coupling(L.d_eff_site[a], L.d_eff_site[a + k], k * trap.spacing_um());
    return L;
}

std::vector<double> internal_field(const DeviceLayout& layout, const std::vector<int>& config) {
    if (int(config.size()) != layout.N) throw ValidationError("internal_field: config length must equal N");
    std::vector<double> out(layout.N, 0.0);
    for (int a = 0; a < layout.N; ++a) {
        double sum = 0.0;
        for (int b = 0; b < layout.N; ++b) {
            if (b == a) continue;
            const double r = std::abs(layout.x_um[a] - layout.x_um[b]) * units::kMicron;
            const double d = (config[b] ? layout.d1[b] : layout.d0[b]) * units::kDebye;
            sum += -d / (4.0 * units::kPi * units::kEpsilon0 * r * r * r);
        }
        out[a] = sum / units::kVoltPerCm;
    }
    return out;
}

}  // namespace polarqc
