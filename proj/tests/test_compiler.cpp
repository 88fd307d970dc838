#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "polarqc/compiler.hpp"
#include "polarqc/error.hpp"
#include "support.hpp"

using namespace polarqc;
using testing_support::reference_layout;

namespace {

constexpr double kTwoPi = 6.283185307179586;

std::vector<oracle::Gate> to_oracle(const Circuit& c) {
    std::vector<oracle::Gate> g;
    for (const auto& op : c.ops) {
        if (op.kind == GateOp::Kind::Rot) g.push_back({oracle::Gate::Rot, op.a, 0, op.theta, op.phi});
        if (op.kind == GateOp::Kind::Cnot) g.push_back({oracle::Gate::Cnot, op.a, op.b, 0.0, 0.0});
    }
    return g;
}

// Fidelity of compiled-and-simulated output against the oracle's gate action.
double run_fidelity(const Circuit& c, const DeviceLayout& lay, const PulseSchedule& sched, Simulator& sim,
                    const RegisterState& in) {
    auto psi = in;
    sim.run_schedule(psi, sched);
    const auto logical = to_logical_frame(psi, sched, lay);
    const auto ideal = oracle::apply_gates(c.N, to_oracle(c), {in.amp.begin(), in.amp.end()});
    return oracle::overlap2(ideal, {logical.amp.begin(), logical.amp.end()});
}

Circuit random_circuit(int N, int gates, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Circuit c{N, {}};
    for (int k = 0; k < gates; ++k) {
        const double r = u(rng);
        if (r < 0.45) {
            c.ops.push_back(GateOp::rot(int(u(rng) * N), kTwoPi * u(rng), kTwoPi * u(rng)));
        } else if (r < 0.9) {
            const int a = int(u(rng) * (N - 1));
            c.ops.push_back(u(rng) < 0.5 ? GateOp::cnot(a, a + 1) : GateOp::cnot(a + 1, a));
        } else {
            c.ops.push_back(GateOp::idle(5e-3 * u(rng)));
        }
    }
    return c;
}

}  // namespace

TEST_CASE("circuit parsing") {
    const auto c = parse_circuit("# header\nROT 0 3.14159 0.5\n\ncnot 0 1  # trailing\nIDLE 1e-3\n", 2);
    REQUIRE(c.ops.size() == 3);
    CHECK(c.ops[0].kind == GateOp::Kind::Rot);
    CHECK(c.ops[0].theta == doctest::Approx(3.14159));
    CHECK(c.ops[1].kind == GateOp::Kind::Cnot);
    CHECK(c.ops[1].b == 1);
    CHECK(c.ops[2].duration == doctest::Approx(1e-3));

    auto message = [](const std::string& text) {
        try {
            parse_circuit(text, 3);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("ROT 0 1 0\nFOO 1\n").find("line 2") != std::string::npos);
    CHECK(message("CNOT 0 2\n").find("line 1") != std::string::npos);
    CHECK(message("\n\nROT 0 7 0\n").find("line 3") != std::string::npos);
    CHECK(message("IDLE -1\n").find("line 1") != std::string::npos);
    CHECK(message("ROT 0 1\n").find("line 1") != std::string::npos);
    CHECK(message("CNOT 0 1 2\n").find("line 1") != std::string::npos);
    CHECK(message("ROT 3 1 0\n").find("line 1") != std::string::npos);
}

TEST_CASE("circuit and settings validation") {
    CHECK_THROWS_AS((Circuit{2, {GateOp::cnot(0, 0)}}.validate()), ValidationError);
    CHECK_THROWS_AS((Circuit{3, {GateOp::cnot(0, 2)}}.validate()), ValidationError);
    CHECK_THROWS_AS((Circuit{2, {GateOp::rot(0, kTwoPi, 0)}}.validate()), ValidationError);
    CompileSettings s;
    s.kappa_onebit = 4.9;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    s.kappa_cnot = 9.0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    const auto lay = reference_layout(2);
    CHECK_THROWS_AS(compile(Circuit{3, {}}, lay), ValidationError);
}

TEST_CASE("ideal_state agrees with the Kronecker oracle") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const int N = 2 + trial % 3;
        const auto c = random_circuit(N, 6, rng);
        const auto in = testing_support::random_state(N, rng);
        const auto mine = ideal_state(c, in);
        const auto ref = oracle::apply_gates(N, to_oracle(c), {in.amp.begin(), in.amp.end()});
        for (std::size_t s = 0; s < ref.size(); ++s) CHECK(std::abs(mine.amp[s] - ref[s]) < 1e-12);
    }
}

TEST_CASE("empty circuit") {
    const auto lay = reference_layout(2);
    const auto s = compile(Circuit{2, {}}, lay);
    CHECK(s.pulses.empty());
    CHECK(s.total_duration == 0.0);
    CHECK(s.frame_corrections.size() == 2);
}

TEST_CASE("single CNOT: conditional pi pulse and truth table") {
    const auto lay = reference_layout(2);
    Simulator sim(lay);
    CompileSettings cs;
    cs.kappa_cnot = 10.0;
    const auto sched = compile(Circuit{2, {GateOp::cnot(0, 1)}}, lay, cs);
    sched.validate();
    const double dnu = lay.coupling(0, 1);
    int conditional = 0;
    for (const auto& p : sched.pulses) {
        if (std::abs(p.freq - sim.line(1, 1)) < 1.0) {
            ++conditional;
            CHECK(p.duration == doctest::Approx(10.0 / (2 * dnu)).epsilon(1e-9));
            CHECK(p.rabi == doctest::Approx(dnu / 10.0).epsilon(1e-9));
        }
    }
    CHECK(conditional == 1);
    // kappa/(2 dnu) at a 3.18 kHz splitting
    CHECK(10.0 / (2 * 3.18e3) == doctest::Approx(1.57e-3).epsilon(1e-2));
    CHECK(testing_support::cnot_truth_table_error(lay, 10.0) < 1e-2);
    CHECK(testing_support::cnot_truth_table_error(lay, 20.0) < 1e-2);
}

TEST_CASE("monotone selectivity in kappa_cnot") {
    const auto lay = reference_layout(2);
    const double e10 = testing_support::cnot_truth_table_error(lay, 10.0);
    const double e20 = testing_support::cnot_truth_table_error(lay, 20.0);
    const double e40 = testing_support::cnot_truth_table_error(lay, 40.0);
    CHECK(e20 < e10);
    CHECK(e40 < e20);
}

TEST_CASE("round trip on random two-qubit circuits") {
    const auto lay = reference_layout(2);
    Simulator sim(lay);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 12; ++trial) {
        const auto c = random_circuit(2, 1 + trial % 5, rng);
        const auto sched = compile(c, lay);
        sched.validate();
        for (std::uint64_t in = 0; in < 4; ++in) {
            CHECK(run_fidelity(c, lay, sched, sim, RegisterState::basis(2, in)) > 0.98);
        }
        CHECK(run_fidelity(c, lay, sched, sim, testing_support::random_state(2, rng)) > 0.98);
    }
}

TEST_CASE("rotations") {
    const auto lay = reference_layout(3);
    Simulator sim(lay);
    std::mt19937_64 rng(4);
    for (int a = 0; a < 3; ++a) {
        const Circuit c{3, {GateOp::rot(a, 3.14159265358979, 0.0), GateOp::rot(a, 1.2, 2.0)}};
        const auto sched = compile(c, lay);
        // A single centred pulse leaves an O((dnu/rabi)^2) conditional error;
        // the middle site sees both neighbours and is worst (about 1e-2 at pi).
        CHECK(run_fidelity(c, lay, sched, sim, testing_support::random_product(3, rng)) > 0.98);
    }
}

TEST_CASE("three-site CNOTs") {
    const auto lay = reference_layout(3);
    Simulator sim(lay);
    std::mt19937_64 rng(6);
    for (auto [c, t] : {std::pair{0, 1}, {1, 0}, {1, 2}, {2, 1}}) {
        const Circuit circ{3, {GateOp::cnot(c, t)}};
        const auto sched = compile(circ, lay);
        CHECK(run_fidelity(circ, lay, sched, sim, testing_support::random_state(3, rng)) > 0.99);
    }
}

TEST_CASE("refocused idle preserves product states") {
    std::mt19937_64 rng(10);
    for (int N = 1; N <= 4; ++N) {
        const auto lay = reference_layout(N);
        Simulator sim(lay);
        for (double T : {1e-3, 10e-3, 100e-3}) {
            const Circuit c{N, {GateOp::idle(T)}};
            const auto sched = compile(c, lay);
            sched.validate();
            CHECK(sched.total_duration >= T);
            CHECK(run_fidelity(c, lay, sched, sim, testing_support::random_product(N, rng)) > 0.999);
        }
    }
}

TEST_CASE("bare idle dephases a superposition") {
    const auto lay = reference_layout(3);
    Simulator sim(lay);
    CompileSettings cs;
    cs.refocus = false;
    const Circuit c{3, {GateOp::idle(1.0 / (4 * lay.coupling(0, 1)))}};
    const auto sched = compile(c, lay, cs);
    CHECK(sched.pulses.empty());
    const auto plus = RegisterState::product({{1, 1}, {1, 1}, {1, 1}});
    CHECK(run_fidelity(c, lay, sched, sim, plus) < 0.9);
}

TEST_CASE("schedules are valid on random circuits") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const int N = 2 + trial % 2;
        const auto lay = reference_layout(N);
        const auto c = random_circuit(N, 4, rng);
        CompileDiagnostics d;
        const auto s = compile(c, lay, {}, &d);
        CHECK_NOTHROW(s.validate());
        CHECK(s.N == N);
        CHECK(s.frame_corrections.size() == std::size_t(N));
        if (!s.pulses.empty()) CHECK(s.total_duration >= s.pulses.back().end());
        for (std::size_t i = 1; i < s.pulses.size(); ++i) CHECK(s.pulses[i].start >= s.pulses[i - 1].end() - 1e-15);
    }
}

TEST_CASE("validate diagnostics") {
    const auto lay3 = reference_layout(3);
    const auto r = validate(Circuit{3, {GateOp::cnot(0, 2)}}, lay3, 0.2);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].find("nearest") != std::string::npos);

    const auto lay = reference_layout(2);
    const double tau = 20.0 / (2 * lay.coupling(0, 1));
    const auto one = validate(Circuit{2, {GateOp::cnot(0, 1)}}, lay, 0.2);
    CHECK(one.violations.empty());
    CHECK(one.estimated_duration == doctest::Approx(tau));
    CHECK(one.estimated_duration < 5.0 / 100);
    CHECK(one.budget_fraction == doctest::Approx(tau * 0.2));
    CHECK(one.coherence_time == doctest::Approx(5.0));
    CHECK(one.min_step_over_coupling > 10.0);

    Circuit many{2, {}};
    for (int i = 0; i < 100; ++i) many.ops.push_back(GateOp::cnot(0, 1));
    CHECK(validate(many, lay, 0.2).estimated_duration == doctest::Approx(100 * tau));
}
