#pragma once

#include <random>

#include "polarqc/compiler.hpp"
#include "polarqc/device.hpp"
#include "polarqc/pulsesim.hpp"

namespace testing_support {

// First N sites of the reference device (KCs, 1.1 um lattice, beta 2 -> 5).
inline polarqc::DeviceLayout reference_layout(int N) {
    const polarqc::MoleculeSpec mol;
    const polarqc::TrapGeometry trap;
    return polarqc::build_layout(mol, trap, polarqc::field_spanning_beta(mol, trap), N);
}

inline polarqc::RegisterState random_state(int N, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    polarqc::RegisterState r = polarqc::RegisterState::basis(N, 0);
    double n = 0.0;
    for (auto& a : r.amp) {
        a = {g(rng), g(rng)};
        n += std::norm(a);
    }
    for (auto& a : r.amp) a /= std::sqrt(n);
    return r;
}

inline polarqc::RegisterState random_product(int N, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<polarqc::cplx, polarqc::cplx>> q;
    for (int a = 0; a < N; ++a) {
        const double th = std::acos(1.0 - 2.0 * u(rng)), ph = 2.0 * 3.141592653589793 * u(rng);
        q.push_back({std::cos(th / 2), std::polar(std::sin(th / 2), ph)});
    }
    return polarqc::RegisterState::product(q);
}

// Worst population error of the compiled CNOT over the four basis inputs.
inline double cnot_truth_table_error(const polarqc::DeviceLayout& lay, double kappa) {
    polarqc::Circuit c{2, {polarqc::GateOp::cnot(0, 1)}};
    polarqc::CompileSettings cs;
    cs.kappa_cnot = kappa;
    const auto sched = polarqc::compile(c, lay, cs);
    polarqc::Simulator sim(lay);
    double worst = 0.0;
    for (std::uint64_t in = 0; in < 4; ++in) {
        auto psi = polarqc::RegisterState::basis(2, in);
        sim.run_schedule(psi, sched);
        const std::uint64_t expect = (in & 1) ? (in ^ 2) : in;
        worst = std::max(worst, 1.0 - std::norm(psi.amp[expect]));
    }
    return worst;
}

}  // namespace testing_support
