#include <doctest.h>

#include <string>

#include "polarqc/config.hpp"
#include "polarqc/error.hpp"
#include "polarqc/units.hpp"

using namespace polarqc;

namespace {
std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}
}  // namespace

TEST_CASE("defaults reproduce the reference device") {
    const RunConfig c = parse_config("{}");
    CHECK(c.molecule.name == "KCs");
    CHECK(c.molecule.B == 1.0e9);
    CHECK(c.molecule.mu == 1.92);
    CHECK(c.trap.lambda_t_um == 1.1);
    CHECK(c.trap.L_mm == 5.0);
    CHECK(c.trap.w0_um == 50.0);
    CHECK(c.trap.U0_K == 100e-6);
    CHECK(c.noise.Rs_per_s == 0.2);
    CHECK(c.noise.plate_gap_cm == 1.0);
    CHECK(c.noise.eta == 0.9);
    CHECK(units::reduced_field_beta(c.molecule.mu, c.field.at_mm(0.0), c.molecule.B) == doctest::Approx(2.0));
    CHECK(units::reduced_field_beta(c.molecule.mu, c.field.at_mm(5.0), c.molecule.B) == doctest::Approx(5.0));
}

TEST_CASE("sections override values") {
    const RunConfig c = parse_config(R"({"noise": {"Rs_per_s": 0.4, "plate_gap_cm": 2, "eta": 1},
                                         "sim": {"N": 3, "Jmax": 25, "seed": 7, "trajectories": 10}})");
    CHECK(c.noise.Rs_per_s == 0.4);
    CHECK(c.noise.plate_gap_cm == 2.0);
    CHECK(c.sim.N == 3);
    CHECK(c.sim.seed == 7u);
    CHECK(c.sim.trajectories == 10);
}

TEST_CASE("field is recomputed for a different molecule when omitted") {
    const RunConfig c = parse_config(R"({"molecule": {"name": "X", "B_Hz": 2e9, "mu_D": 1.0}})");
    CHECK(units::reduced_field_beta(1.0, c.field.at_mm(0.0), 2e9) == doctest::Approx(2.0));
}

TEST_CASE("errors name the key") {
    CHECK(error_of(R"({"nosie": {}})").find("nosie") != std::string::npos);
    CHECK(error_of(R"({"noise": {"Rs_per_s": 0.2, "plate_gap_cm": 1, "eta": 0.9, "extra": 1}})").find("noise.extra") !=
          std::string::npos);
    CHECK(error_of(R"({"noise": {"plate_gap_cm": 1, "eta": 0.9}})").find("noise.Rs_per_s") != std::string::npos);
    CHECK(error_of(R"({"noise": {"Rs_per_s": "x", "plate_gap_cm": 1, "eta": 0.9}})").find("noise.Rs_per_s") !=
          std::string::npos);
    CHECK(error_of(R"({"noise": {"Rs_per_s": 0, "plate_gap_cm": 1, "eta": 0.9}})").find("Rs_per_s") !=
          std::string::npos);
    CHECK(error_of(R"({"sim": {"N": 20, "Jmax": 20, "seed": 1, "trajectories": 0}})").find("sim.N") !=
          std::string::npos);
    CHECK(error_of("{not json").find("parse") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("canonical form and hash") {
    const RunConfig a = parse_config("{}");
    const RunConfig b = parse_config(canonical_json(a));
    CHECK(canonical_json(a) == canonical_json(b));
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    RunConfig c = a;
    c.sim.seed = 2;
    CHECK(config_hash(a) != config_hash(c));
}
