#include <doctest.h>

#include <cmath>
#include <random>

#include "polarqc/config.hpp"
#include "polarqc/device.hpp"
#include "polarqc/error.hpp"
#include "polarqc/noisebudget.hpp"
#include "polarqc/units.hpp"

using namespace polarqc;

TEST_CASE("coherence_time") {
    CHECK(noise::coherence_time(0.2) == 5.0);
    CHECK(noise::coherence_time(1.0) == 1.0);
    CHECK(noise::coherence_time(0.1) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK_THROWS_AS(noise::coherence_time(0.0), ValidationError);
}

TEST_CASE("gate_capacity") {
    CHECK(noise::gate_capacity(5, 50e-6) == doctest::Approx(1.0e5).epsilon(1e-12));
    CHECK(noise::gate_capacity(5, 84.6e-6) == doctest::Approx(5.9e4).epsilon(5e-3));
    CHECK(noise::gate_capacity(1, 1) == 1.0);
    CHECK_THROWS_AS(noise::gate_capacity(0, 1), ValidationError);
    CHECK_THROWS_AS(noise::gate_capacity(1, -1), ValidationError);
}

TEST_CASE("required_intensity_stability") {
    const double u0 = 1.380649e-23 * 1e-4 / 6.62607015e-34;
    CHECK(noise::required_intensity_stability(0.5, u0) == doctest::Approx(2.4e-7).epsilon(0.05));
    CHECK(noise::required_intensity_stability(0.5, 2.0e6) == doctest::Approx(2.5e-7).epsilon(1e-12));
    CHECK(noise::required_intensity_stability(1, 1) == 1.0);
    CHECK_THROWS_AS(noise::required_intensity_stability(0, 1), ValidationError);
}

TEST_CASE("required_voltage_noise") {
    // 0.5 Hz divided by (d * (1 D)(1 V/cm)/h), times 1 cm, in volts.
    const double per = (1e-21 / 299792458.0) * 100.0 / 6.62607015e-34;
    CHECK(noise::required_voltage_noise(0.5, 1.44, 1) == doctest::Approx(0.5 / (1.44 * per)).epsilon(1e-12));
    CHECK(noise::required_voltage_noise(0.5, 1.44, 1) == doctest::Approx(0.69e-6).epsilon(0.05));
    CHECK(noise::required_voltage_noise(0.5, 1.92, 1) == doctest::Approx(0.52e-6).epsilon(0.05));
    CHECK_THROWS_AS(noise::required_voltage_noise(0, 1.44, 1), ValidationError);
    CHECK_THROWS_AS(noise::required_voltage_noise(0.5, 0, 1), ValidationError);
    CHECK_THROWS_AS(noise::required_voltage_noise(0.5, 1.44, 0), ValidationError);
}

TEST_CASE("scaling laws") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double b = u(rng), t = 1e6 * u(rng), k = u(rng), d = u(rng), g = u(rng);
        const double base = noise::required_intensity_stability(b, t);
        CHECK(noise::required_intensity_stability(k * b, t) == doctest::Approx(k * base).epsilon(1e-12));
        CHECK(noise::required_intensity_stability(b, k * t) == doctest::Approx(base / k).epsilon(1e-12));
        CHECK(noise::required_voltage_noise(b, d, k * g) ==
              doctest::Approx(k * noise::required_voltage_noise(b, d, g)).epsilon(1e-12));
    }
}

TEST_CASE("budget_report on defaults") {
    const RunConfig cfg;
    const NoiseBudget b = budget_report(cfg);
    CHECK(b.T2 == 5.0);
    CHECK(b.dnu_budget == std::sqrt(0.2));
    CHECK(b.d_eff == doctest::Approx(1.44).epsilon(0.02));
    CHECK(b.gate_capacity == doctest::Approx(1e5).epsilon(0.5));
    CHECK(b.dI_over_I_req == doctest::Approx(2.4e-7 * std::sqrt(0.2) / 0.5).epsilon(0.05));
    CHECK(b.dV_req > 0.0);
    CHECK(b.plate_gap == 1.0);
    // Bit-for-bit composition of the individual operations.
    CHECK(b.gate_capacity == noise::gate_capacity(b.T2, b.tau_gate));
    CHECK(b.tau_gate == device::cnot_time(b.delta_nu));
    CHECK(b.delta_nu == units::dipole_coupling(b.d_eff, b.d_eff, cfg.trap.spacing_um()));
    CHECK(b.tensor_shift == units::temperature_to_frequency(cfg.trap.U0_K));
    CHECK(b.dI_over_I_req == noise::required_intensity_stability(b.dnu_budget, b.tensor_shift));
    CHECK(b.dV_req == noise::required_voltage_noise(b.dnu_budget, b.d_eff, b.plate_gap));
    CHECK(b.dV_req_full_mu == noise::required_voltage_noise(b.dnu_budget, cfg.molecule.mu, b.plate_gap));
    bool shot = false;
    for (const auto& n : b.notes) shot = shot || n.find("shot-noise") != std::string::npos;
    CHECK(shot);
}

TEST_CASE("budget_report functional forms") {
    RunConfig cfg;
    const NoiseBudget base = budget_report(cfg);
    cfg.noise.Rs_per_s = 0.4;
    const NoiseBudget dbl = budget_report(cfg);
    CHECK(dbl.T2 == doctest::Approx(base.T2 / 2));
    CHECK(dbl.T2 == doctest::Approx(2.5));
    CHECK(dbl.dnu_budget == doctest::Approx(base.dnu_budget * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("budget_report names bad keys") {
    RunConfig cfg;
    cfg.noise.Rs_per_s = 0.0;
    cfg.noise.plate_gap_cm = 0.0;
    try {
        budget_report(cfg);
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        const std::string m = e.what();
        CHECK(m.find("noise.Rs_per_s") != std::string::npos);
        CHECK(m.find("noise.plate_gap_cm") != std::string::npos);
    }
}
