#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarqc/noisebudget.hpp"
#include "polarqc/pulsesim.hpp"
#include "polarqc/stark.hpp"

namespace polarqc::io {

using ojson = nlohmann::ordered_json;

struct Metadata {
    std::string tool_version = POLARQC_VERSION;
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
};

// %.12g
std::string fmt12(double v);

std::string read_file(const std::string& path);   // throws IoError
void write_file(const std::string& path, const std::string& content);

ojson metadata_json(const Metadata& m);
// "# key: value" lines for CSV and text outputs.
std::string metadata_comment(const Metadata& m);

// Header: beta, E_V_per_cm, W0_over_B, W1_over_B, d0_D, d1_D, d_eff_D, mu_t_D.
std::string stark_scan_csv(const std::vector<StarkSolution>& scan, const MoleculeSpec& mol, const Metadata& m);

ojson schedule_to_json(const PulseSchedule& s);
// Throws ValidationError on missing fields or an invalid schedule.
PulseSchedule schedule_from_json(const nlohmann::json& j);

ojson trajectory_to_json(std::uint64_t seed, const std::vector<DephasingEvent>& events,
                         const MeasurementRecord& outcomes, double fidelity_vs_ideal);

ojson budget_to_json(const NoiseBudget& b);
std::string budget_table(const NoiseBudget& b);

// Deterministic JSON text: 2-space indent, trailing newline.
std::string dump(const ojson& j);

}  // namespace polarqc::io
