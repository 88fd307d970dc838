#include "oracles.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace oracle {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double pt_W0(double beta) { return -beta * beta / 6.0; }
double pt_W1(double beta) { return 2.0 + beta * beta / 10.0; }
double pt_d0(double beta) { return beta / 3.0; }
double pt_d1(double beta) { return -beta / 5.0; }

RotorLevels dense_rotor(double beta, int Jmax) {
    const int n = Jmax + 1;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n), C = Eigen::MatrixXd::Zero(n, n);
    for (int J = 0; J < n; ++J) {
        H(J, J) = J * (J + 1.0);
        if (J + 1 < n) {
            const double c = (J + 1.0) / std::sqrt((2.0 * J + 1.0) * (2.0 * J + 3.0));
            C(J, J + 1) = C(J + 1, J) = c;
        }
    }
    H -= beta * C;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::VectorXd v0 = es.eigenvectors().col(0), v1 = es.eigenvectors().col(1);
    return {es.eigenvalues()(0), es.eigenvalues()(1), v0.dot(C * v0), v1.dot(C * v1), v1.dot(C * v0)};
}

double si_coupling_hz(double da_debye, double db_debye, double r_um) {
    const double debye = 3.33564095198152e-30;  // C m
    const double eps0 = 8.8541878128e-12;
    const double h = 6.62607015e-34;
    const double r = r_um * 1e-6;
    return da_debye * debye * db_debye * debye / (4.0 * kPi * eps0 * r * r * r) / h;
}

double rabi_transfer(double rabi, double det, double t) {
    const double g = std::sqrt(rabi * rabi + det * det);
    if (g == 0.0) return 0.0;
    const double s = std::sin(kPi * g * t);
    return rabi * rabi / (g * g) * s * s;
}

namespace {

using MatC = Eigen::MatrixXcd;

MatC expm_herm(const MatC& H, double scale) {
    Eigen::SelfAdjointEigenSolver<MatC> es(H);
    const Eigen::VectorXd lam = es.eigenvalues();
    Eigen::VectorXcd ph(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) ph(k) = std::polar(1.0, -scale * lam(k));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

std::vector<cplx> brute_force_evolve(const std::vector<double>& energies, int N, const std::vector<DrivePulse>& pulses,
                                     std::vector<cplx> psi0, double t_end, double max_step) {
    const Eigen::Index dim = Eigen::Index(1) << N;
    const double e0 = energies[0];
    Eigen::VectorXcd y(dim);
    for (Eigen::Index s = 0; s < dim; ++s) y(s) = psi0[s];

    // Interaction picture w.r.t. the diagonal; H_I(t) only has drive terms.
    auto h_int = [&](const DrivePulse& p, double t) {
        MatC H = MatC::Zero(dim, dim);
        for (Eigen::Index s = 0; s < dim; ++s)
            for (int a = 0; a < N; ++a) {
                const Eigen::Index m = Eigen::Index(1) << a;
                if (s & m) continue;
                const double det = energies[s | m] - energies[s] - p.freq;
                // Reduce the phase argument at long times.
                const double cyc = det * t;
                const double frac = cyc - std::round(cyc);
                const cplx v = 0.5 * p.rabi * std::polar(1.0, p.phase + 2.0 * kPi * frac);
                H(s | m, s) = v;
                H(s, s | m) = std::conj(v);
            }
        return H;
    };
    const double a1 = 0.25 + std::sqrt(3.0) / 6.0, a2 = 0.25 - std::sqrt(3.0) / 6.0;
    const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
    for (const DrivePulse& p : pulses) {
        const int steps = std::max(1, int(std::ceil(p.duration / max_step)));
        const double h = p.duration / steps;
        for (int k = 0; k < steps; ++k) {
            const double t = p.start + k * h;
            const MatC H1 = h_int(p, t + c1 * h), H2 = h_int(p, t + c2 * h);
            y = expm_herm(a2 * H1 + a1 * H2, 2.0 * kPi * h) * (expm_herm(a1 * H1 + a2 * H2, 2.0 * kPi * h) * y);
        }
    }
    std::vector<cplx> out(dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        const double cyc = (energies[s] - e0) * t_end;
        out[s] = y(s) * std::polar(1.0, -2.0 * kPi * (cyc - std::round(cyc)));
    }
    return out;
}

std::vector<cplx> apply_gates(int N, const std::vector<Gate>& gates, const std::vector<cplx>& psi) {
    const Eigen::Index dim = Eigen::Index(1) << N;
    Eigen::VectorXcd v(dim);
    for (Eigen::Index s = 0; s < dim; ++s) v(s) = psi[s];
    for (const Gate& g : gates) {
        MatC U = MatC::Identity(1, 1);
        if (g.kind == Gate::Rot) {
            MatC r(2, 2);
            const double c = std::cos(g.theta / 2), s = std::sin(g.theta / 2);
            r << c, cplx(0, -1) * s * std::polar(1.0, -g.phi), cplx(0, -1) * s * std::polar(1.0, g.phi), c;
            // Kronecker product with site N-1 as the leftmost factor.
            for (int a = N - 1; a >= 0; --a) {
                const MatC f = a == g.a ? r : MatC::Identity(2, 2);
                MatC K(U.rows() * 2, U.cols() * 2);
                for (Eigen::Index i = 0; i < U.rows(); ++i)
                    for (Eigen::Index j = 0; j < U.cols(); ++j) K.block(i * 2, j * 2, 2, 2) = U(i, j) * f;
                U = K;
            }
        } else {
            U = MatC::Zero(dim, dim);
            for (Eigen::Index s = 0; s < dim; ++s) {
                const Eigen::Index out = ((s >> g.a) & 1) ? (s ^ (Eigen::Index(1) << g.b)) : s;
                U(out, s) = 1.0;
            }
        }
        v = U * v;
    }
    std::vector<cplx> out(dim);
    for (Eigen::Index s = 0; s < dim; ++s) out[s] = v(s);
    return out;
}

double overlap2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx acc{0.0, 0.0};
    for (std::size_t s = 0; s < a.size(); ++s) acc += std::conj(a[s]) * b[s];
    return std::norm(acc);
}

}  // namespace oracle
