#include "polarqc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "polarqc/error.hpp"
#include "polarqc/units.hpp"

namespace polarqc::io {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

ojson metadata_json(const Metadata& m) {
    return ojson{{"tool_version", m.tool_version},
                 {"command", m.command},
                 {"config_hash", m.config_hash},
                 {"seed", m.seed}};
}

std::string metadata_comment(const Metadata& m) {
    std::ostringstream os;
    os << "# tool_version: " << m.tool_version << "\n"
       << "# command: " << m.command << "\n"
       << "# config_hash: " << m.config_hash << "\n"
       << "# seed: " << m.seed << "\n";
    return os.str();
}

std::string stark_scan_csv(const std::vector<StarkSolution>& scan, const MoleculeSpec& mol, const Metadata& m) {
    std::ostringstream os;
    os << metadata_comment(m);
    os << "beta,E_V_per_cm,W0_over_B,W1_over_B,d0_D,d1_D,d_eff_D,mu_t_D\n";
    for (const StarkSolution& s : scan) {
        const double e = units::beta_to_field(s.beta, mol.mu, mol.B);
        os << fmt12(s.beta) << ',' << fmt12(e) << ',' << fmt12(s.W0) << ',' << fmt12(s.W1) << ',' << fmt12(s.d0)
           << ',' << fmt12(s.d1) << ',' << fmt12(s.d_eff) << ',' << fmt12(s.mu_t) << '\n';
    }
    return os.str();
}

ojson schedule_to_json(const PulseSchedule& s) {
    ojson pulses = ojson::array();
    for (const Pulse& p : s.pulses)
        pulses.push_back({{"start_s", p.start},
                          {"duration_s", p.duration},
                          {"freq_Hz", p.freq},
                          {"rabi_Hz", p.rabi},
                          {"phase_rad", p.phase}});
    return ojson{{"N", s.N},
                 {"pulses", pulses},
                 {"frame_corrections", s.frame_corrections},
                 {"total_duration_s", s.total_duration}};
}

PulseSchedule schedule_from_json(const nlohmann::json& j) {
    PulseSchedule s;
    try {
        s.N = j.at("N").get<int>();
        for (const auto& p : j.at("pulses"))
            s.pulses.push_back({p.at("start_s").get<double>(), p.at("duration_s").get<double>(),
                                p.at("freq_Hz").get<double>(), p.at("rabi_Hz").get<double>(),
                                p.at("phase_rad").get<double>()});
        s.frame_corrections = j.at("frame_corrections").get<std::vector<double>>();
        if (j.contains("total_duration_s"))
            s.total_duration = j.at("total_duration_s").get<double>();
        else if (!s.pulses.empty())
            s.total_duration = s.pulses.back().end();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("schedule JSON: ") + e.what());
    }
    s.validate();
    return s;
}

ojson trajectory_to_json(std::uint64_t seed, const std::vector<DephasingEvent>& events,
                         const MeasurementRecord& outcomes, double fidelity_vs_ideal) {
    ojson ev = ojson::array();
    for (const DephasingEvent& e : events) ev.push_back({{"t", e.t}, {"site", e.site}, {"phase", e.phase}});
    ojson out = ojson::array();
    for (Outcome o : outcomes.outcomes) out.push_back(int(o));
    return ojson{{"seed", seed}, {"events", ev}, {"final_outcomes", out}, {"fidelity_vs_ideal", fidelity_vs_ideal}};
}

ojson budget_to_json(const NoiseBudget& b) {
    return ojson{{"Rs_per_s", b.Rs},
                 {"T2_s", b.T2},
                 {"delta_nu_Hz", b.delta_nu},
                 {"tau_gate_s", b.tau_gate},
                 {"gate_capacity", b.gate_capacity},
                 {"tensor_shift_Hz", b.tensor_shift},
                 {"dnu_budget_Hz_per_rtHz", b.dnu_budget},
                 {"dI_over_I_req_per_rtHz", b.dI_over_I_req},
                 {"d_eff_D", b.d_eff},
                 {"dV_req_V_per_rtHz", b.dV_req},
                 {"dV_req_full_mu_V_per_rtHz", b.dV_req_full_mu},
                 {"plate_gap_cm", b.plate_gap},
                 {"notes", b.notes}};
}

std::string budget_table(const NoiseBudget& b) {
    const std::vector<std::pair<std::string, std::string>> rows = {
        {"scattering rate Rs (1/s)", fmt12(b.Rs)},
        {"coherence time T2 (s)", fmt12(b.T2)},
        {"neighbour coupling (Hz)", fmt12(b.delta_nu)},
        {"CNOT time (s)", fmt12(b.tau_gate)},
        {"gate capacity", fmt12(b.gate_capacity)},
        {"tensor shift (Hz)", fmt12(b.tensor_shift)},
        {"frequency noise budget (Hz/rtHz)", fmt12(b.dnu_budget)},
        {"required dI/I (1/rtHz)", fmt12(b.dI_over_I_req)},
        {"plateau d_eff (D)", fmt12(b.d_eff)},
        {"required dV at d_eff (V/rtHz)", fmt12(b.dV_req)},
        {"required dV at full mu (V/rtHz)", fmt12(b.dV_req_full_mu)},
        {"plate gap (cm)", fmt12(b.plate_gap)},
    };
    std::size_t w = 0;
    for (const auto& r : rows) w = std::max(w, r.first.size());
    std::ostringstream os;
    for (const auto& r : rows) os << std::left << std::setw(int(w) + 2) << r.first << r.second << "\n";
    os << "\nnotes:\n";
    for (const auto& n : b.notes) os << "  - " << n << "\n";
    return os.str();
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

}  // namespace polarqc::io
