#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace polarqc {

struct MoleculeSpec {
    std::string name = "KCs";
    double B = 1.0e9;   // rotational constant, Hz
    double mu = 1.92;   // body-frame dipole, Debye

    void validate() const;
};

// Two lowest m = 0 pendular levels at one field.
struct StarkSolution {
    double beta = 0.0;
    double W0 = 0.0;  // units of B
    double W1 = 0.0;
    double d0 = 0.0;  // Debye
    double d1 = 0.0;
    double d_eff = 0.0;
    double mu_t = 0.0;
    int Jmax_used = 0;
};

namespace stark {

inline constexpr int kDefaultJmax = 20;

// <J+1,m|cos theta|J,m>. Throws ValidationError for |m| > J or J < 0.
double cos_theta_element(int J, int m);

// Rotor Hamiltonian in units of B on the basis J = |m|..Jmax.
Eigen::MatrixXd build_hamiltonian(double beta, int m, int Jmax);

// Solves the m = 0 block at reduced field beta. The truncation is grown in
// steps of 5 until the next step changes no output by more than 1e-10
// relative; Jmax_used reports the accepted size.
StarkSolution solve_beta(const MoleculeSpec& mol, double beta, int Jmax = kDefaultJmax);

// Same, with the field given in V/cm.
StarkSolution qubit_levels(const MoleculeSpec& mol, double e_v_per_cm, int Jmax = kDefaultJmax);

// One solution per grid point. The grid must be non-empty, >= 0 and strictly
// increasing.
std::vector<StarkSolution> stark_scan(const MoleculeSpec& mol, const std::vector<double>& beta_grid,
                                      int Jmax = kDefaultJmax);

// Index of the minimum of d1 over a scan (the turning point of the upper
// level's dipole).
std::size_t d1_turning_point(const std::vector<StarkSolution>& scan);

}  // namespace stark
}  // namespace polarqc
