#include "polarqc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "polarqc/error.hpp"
#include "polarqc/pulsesim.hpp"

namespace polarqc {

using nlohmann::json;

namespace {

void check_keys(const json& sec, const std::string& name, std::initializer_list<const char*> keys) {
    if (!sec.is_object()) throw ValidationError("config: '" + name + "' must be an object");
    for (auto it = sec.begin(); it != sec.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) throw ValidationError("config: unknown key '" + name + "." + it.key() + "'");
    }
    std::string missing;
    for (const char* k : keys)
        if (!sec.contains(k)) missing += (missing.empty() ? "" : ", ") + name + "." + k;
    if (!missing.empty()) throw ValidationError("config: missing key(s) " + missing);
}

double num(const json& sec, const std::string& sect, const char* key) {
    const json& v = sec.at(key);
    if (!v.is_number()) throw ValidationError("config: '" + sect + "." + key + "' must be a number");
    return v.get<double>();
}

long long integer(const json& sec, const std::string& sect, const char* key) {
    const json& v = sec.at(key);
    if (!v.is_number_integer()) throw ValidationError("config: '" + sect + "." + key + "' must be an integer");
    return v.get<long long>();
}

}  // namespace

void RunConfig::validate() const {
    molecule.validate();
    trap.validate();
    auto fin = [](double v) { return std::isfinite(v); };
    if (!fin(field.E0) || !fin(field.dEdx)) throw ValidationError("config: field values must be finite");
    if (!(noise.Rs_per_s > 0.0) || !fin(noise.Rs_per_s)) throw ValidationError("config: noise.Rs_per_s must be > 0");
    if (!(noise.plate_gap_cm > 0.0) || !fin(noise.plate_gap_cm))
        throw ValidationError("config: noise.plate_gap_cm must be > 0");
    if (!(noise.eta >= 0.0 && noise.eta <= 1.0)) throw ValidationError("config: noise.eta must be in [0, 1]");
    if (sim.N < 1 || sim.N > kMaxQubits) throw ValidationError("config: sim.N must be in [1, 14]");
    if (sim.Jmax < 1) throw ValidationError("config: sim.Jmax must be >= 1");
    if (sim.trajectories < 0) throw ValidationError("config: sim.trajectories must be >= 0");
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config: top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "molecule" && k != "trap" && k != "field" && k != "noise" && k != "sim")
            throw ValidationError("config: unknown key '" + k + "'");
    }
    RunConfig c;
    if (j.contains("molecule")) {
        const json& s = j["molecule"];
        check_keys(s, "molecule", {"name", "B_Hz", "mu_D"});
        if (!s["name"].is_string()) throw ValidationError("config: 'molecule.name' must be a string");
        c.molecule.name = s["name"].get<std::string>();
        c.molecule.B = num(s, "molecule", "B_Hz");
        c.molecule.mu = num(s, "molecule", "mu_D");
    }
    if (j.contains("trap")) {
        const json& s = j["trap"];
        check_keys(s, "trap", {"lambda_t_um", "L_mm", "w0_um", "wt_um", "U0_K"});
        c.trap.lambda_t_um = num(s, "trap", "lambda_t_um");
        c.trap.L_mm = num(s, "trap", "L_mm");
        c.trap.w0_um = num(s, "trap", "w0_um");
        c.trap.wt_um = num(s, "trap", "wt_um");
        c.trap.U0_K = num(s, "trap", "U0_K");
    }
    if (j.contains("field")) {
        const json& s = j["field"];
        check_keys(s, "field", {"E0_Vcm", "dEdx_Vcm_per_mm"});
        c.field.E0 = num(s, "field", "E0_Vcm");
        c.field.dEdx = num(s, "field", "dEdx_Vcm_per_mm");
    } else {
        c.molecule.validate();
        c.trap.validate();
        c.field = field_spanning_beta(c.molecule, c.trap);
    }
    if (j.contains("noise")) {
        const json& s = j["noise"];
        check_keys(s, "noise", {"Rs_per_s", "plate_gap_cm", "eta"});
        c.noise.Rs_per_s = num(s, "noise", "Rs_per_s");
        c.noise.plate_gap_cm = num(s, "noise", "plate_gap_cm");
        c.noise.eta = num(s, "noise", "eta");
    }
    if (j.contains("sim")) {
        const json& s = j["sim"];
        check_keys(s, "sim", {"N", "Jmax", "seed", "trajectories"});
        c.sim.N = int(integer(s, "sim", "N"));
        c.sim.Jmax = int(integer(s, "sim", "Jmax"));
        const long long seed = integer(s, "sim", "seed");
        if (seed < 0) throw ValidationError("config: 'sim.seed' must be >= 0");
        c.sim.seed = std::uint64_t(seed);
        c.sim.trajectories = int(integer(s, "sim", "trajectories"));
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["molecule"] = {{"name", c.molecule.name}, {"B_Hz", c.molecule.B}, {"mu_D", c.molecule.mu}};
    j["trap"] = {{"lambda_t_um", c.trap.lambda_t_um},
                 {"L_mm", c.trap.L_mm},
                 {"w0_um", c.trap.w0_um},
                 {"wt_um", c.trap.wt_um},
                 {"U0_K", c.trap.U0_K}};
    j["field"] = {{"E0_Vcm", c.field.E0}, {"dEdx_Vcm_per_mm", c.field.dEdx}};
    j["noise"] = {{"Rs_per_s", c.noise.Rs_per_s}, {"plate_gap_cm", c.noise.plate_gap_cm}, {"eta", c.noise.eta}};
    j["sim"] = {{"N", c.sim.N}, {"Jmax", c.sim.Jmax}, {"seed", c.sim.seed}, {"trajectories", c.sim.trajectories}};
    return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical_json(cfg)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace polarqc
