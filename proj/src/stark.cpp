#include "polarqc/stark.hpp"

#include <algorithm>
#include <cmath>

#include "polarqc/error.hpp"
#include "polarqc/units.hpp"

namespace polarqc {

void MoleculeSpec::validate() const {
    if (!(B > 0.0) || !std::isfinite(B)) throw ValidationError("molecule: B_Hz must be > 0");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("molecule: mu_D must be > 0");
}

namespace stark {

double cos_theta_element(int J, int m) {
    if (J < 0 || std::abs(m) > J) throw ValidationError("cos_theta_element: need J >= 0 and |m| <= J");
    const double jp = J + 1.0;
    return std::sqrt((jp * jp - double(m) * m) / ((2.0 * J + 1.0) * (2.0 * J + 3.0)));
}

namespace {

struct Tridiag {
    Eigen::VectorXd diag;
    Eigen::VectorXd sub;  // cos theta elements (without the -beta factor)
};

Tridiag rotor(int m, int Jmax) {
    const int j0 = std::abs(m);
    const int n = Jmax - j0 + 1;
    Tridiag t{Eigen::VectorXd(n), Eigen::VectorXd(n - 1)};
    for (int i = 0; i < n; ++i) {
        const int J = j0 + i;
        t.diag(i) = double(J) * (J + 1);
        if (i + 1 < n) t.sub(i) = cos_theta_element(J, m);
    }
    return t;
}

StarkSolution solve_fixed(const MoleculeSpec& mol, double beta, int Jmax) {
    const Tridiag t = rotor(0, Jmax);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(t.diag, -beta * t.sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalError("stark: eigensolver failed");

    const Eigen::VectorXd v0 = es.eigenvectors().col(0);
    const Eigen::VectorXd v1 = es.eigenvectors().col(1);
    // <u|cos|v> for the tridiagonal cos theta operator
    auto cos_elem = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
        double s = 0.0;
        for (Eigen::Index i = 0; i + 1 < u.size(); ++i) s += t.sub(i) * (u(i) * v(i + 1) + u(i + 1) * v(i));
        return s;
    };

    StarkSolution r;
    r.beta = beta;
    r.W0 = es.eigenvalues()(0);
    r.W1 = es.eigenvalues()(1);
    r.d0 = mol.mu * cos_elem(v0, v0);
    r.d1 = mol.mu * cos_elem(v1, v1);
    r.d_eff = std::abs(r.d0 - r.d1);
    r.mu_t = mol.mu * std::abs(cos_elem(v1, v0));
    r.Jmax_used = Jmax;
    return r;
}

bool close(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= 1e-10 * scale || std::abs(a - b) < 1e-15;
}

}  // namespace

Eigen::MatrixXd build_hamiltonian(double beta, int m, int Jmax) {
    if (Jmax < std::abs(m) + 2) throw ValidationError("build_hamiltonian: Jmax must be >= |m| + 2");
    if (!(beta >= 0.0)) throw ValidationError("build_hamiltonian: beta must be >= 0");
    const Tridiag t = rotor(m, Jmax);
    const auto n = t.diag.size();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    H.diagonal() = t.diag;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        H(i, i + 1) = -beta * t.sub(i);
        H(i + 1, i) = -beta * t.sub(i);
    }
    return H;
}

StarkSolution solve_beta(const MoleculeSpec& mol, double beta, int Jmax) {
    mol.validate();
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("stark: field must be >= 0");
    if (Jmax < 2) throw ValidationError("stark: Jmax must be >= 2");
    constexpr int kStep = 5;
    constexpr int kLimit = 400;
    StarkSolution cur = solve_fixed(mol, beta, Jmax);
    for (int j = Jmax; j <= kLimit; j += kStep) {
        const StarkSolution next = solve_fixed(mol, beta, j + kStep);
        if (close(cur.W0, next.W0) && close(cur.W1, next.W1) && close(cur.d0, next.d0) &&
            close(cur.d1, next.d1))
            return cur;
        cur = next;
    }
    throw NumericalError("stark: basis truncation did not converge");
}

StarkSolution qubit_levels(const MoleculeSpec& mol, double e_v_per_cm, int Jmax) {
    mol.validate();
    if (!(e_v_per_cm >= 0.0)) throw ValidationError("stark: field must be >= 0");
    return solve_beta(mol, units::reduced_field_beta(mol.mu, e_v_per_cm, mol.B), Jmax);
}

std::vector<StarkSolution> stark_scan(const MoleculeSpec& mol, const std::vector<double>& beta_grid, int Jmax) {
    if (beta_grid.empty()) throw ValidationError("stark_scan: empty grid");
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        if (!(beta_grid[i] >= 0.0)) throw ValidationError("stark_scan: grid values must be >= 0");
        if (i > 0 && !(beta_grid[i] > beta_grid[i - 1]))
            throw ValidationError("stark_scan: grid must be strictly increasing");
    }
    std::vector<StarkSolution> out;
    out.reserve(beta_grid.size());
    for (double b : beta_grid) out.push_back(solve_beta(mol, b, Jmax));
    return out;
}

std::size_t d1_turning_point(const std::vector<StarkSolution>& scan) {
    if (scan.empty()) throw ValidationError("d1_turning_point: empty scan");
    auto it = std::min_element(scan.begin(), scan.end(),
                               [](const StarkSolution& a, const StarkSolution& b) { return a.d1 < b.d1; });
    return std::size_t(it - scan.begin());
}

}  // namespace stark
}  // namespace polarqc
