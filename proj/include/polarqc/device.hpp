#pragma once

#include <string>
#include <vector>

#include "polarqc/stark.hpp"

namespace polarqc {

struct TrapGeometry {
    double lambda_t_um = 1.1;
    double L_mm = 5.0;
    double w0_um = 50.0;
    double wt_um = 1.1;
    double U0_K = 100e-6;

    void validate() const;
    double spacing_um() const { return lambda_t_um / 2.0; }
};

struct FieldProfile {
    double E0 = 0.0;    // V/cm at x = 0
    double dEdx = 0.0;  // (V/cm)/mm

    double at_mm(double x_mm) const { return E0 + x_mm * dEdx; }
};

// Bias plus gradient taking the reduced field from beta_lo at x = 0 to
// beta_hi at x = L.
FieldProfile field_spanning_beta(const MoleculeSpec& mol, const TrapGeometry& trap, double beta_lo = 2.0,
                                 double beta_hi = 5.0);

namespace device {

// Plateau dipole used by the linear addressing formula, as a fraction of mu.
inline constexpr double kDeffRefFraction = 0.75;
// Full coupling table up to this many sites; beyond it only a band is kept.
inline constexpr int kFullTableMax = 64;
inline constexpr int kBandWidth = 10;

double rayleigh_length(double w0_um, double lambda_t_um);  // mm
long site_count(double L_mm, double lambda_t_um);
double cnot_time(double delta_nu_hz);  // s

}  // namespace device

class DeviceLayout {
public:
    MoleculeSpec molecule;
    TrapGeometry trap;
    FieldProfile field;
    int N = 0;
    std::vector<double> x_um;
    std::vector<double> E_local;    // V/cm
    std::vector<double> nu_linear;  // Hz
    std::vector<double> nu_exact;   // Hz, W1 - W0
    std::vector<double> w0_hz;      // absolute level energies, Hz
    std::vector<double> w1_hz;
    std::vector<double> d0;  // Debye
    std::vector<double> d1;
    std::vector<double> d_eff_site;

    // delta_nu_ab in Hz; zero on the diagonal and beyond the stored band.
    double coupling(int a, int b) const;
    int band() const { return band_; }

    // 1/(4 pi eps0 h r_ab^3) for unit Debye dipoles, Hz/D^2. Not truncated.
    double pair_factor(int a, int b) const;

    double min_step() const;            // min nu_linear[a+1] - nu_linear[a]
    double max_neighbor_coupling() const;
    bool addressing_degenerate() const { return N > 1 && !(min_step() > 0.0); }

private:
    friend DeviceLayout build_layout(const MoleculeSpec&, const TrapGeometry&, const FieldProfile&, int);
    int band_ = 0;
    std::vector<double> band_table_;  // N x band_, entry (a, k) = coupling(a, a+k+1)
};

// Throws ValidationError for N < 1, N beyond the trap's site count, or a local
// field <= 0 anywhere in the array.
DeviceLayout build_layout(const MoleculeSpec& mol, const TrapGeometry& trap, const FieldProfile& field, int N);

// Field at each site from the other sites' dipoles (V/cm); config[a] selects
// d0 or d1 for site a.
std::vector<double> internal_field(const DeviceLayout& layout, const std::vector<int>& config);

}  // namespace polarqc
