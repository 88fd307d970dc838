#pragma once

#include <cstdint>
#include <string>

#include "polarqc/device.hpp"
#include "polarqc/stark.hpp"

namespace polarqc {

struct NoiseSettings {
    double Rs_per_s = 0.2;
    double plate_gap_cm = 1.0;
    double eta = 0.9;  // per-qubit readout efficiency
};

struct SimSettings {
    int N = 2;
    int Jmax = stark::kDefaultJmax;
    std::uint64_t seed = 1;
    int trajectories = 0;
};

// Run configuration. Defaults are the reference device: KCs in a 1.1 um
// lattice over 5 mm, field spanning beta 2 -> 5.
struct RunConfig {
    MoleculeSpec molecule;
    TrapGeometry trap;
    FieldProfile field = field_spanning_beta(MoleculeSpec{}, TrapGeometry{});
    NoiseSettings noise;
    SimSettings sim;

    // Range and sign checks only; physics checks live with the commands.
    void validate() const;
};

// JSON text. Omitted sections keep their defaults, but a section that is
// present must list every one of its keys; unknown keys are rejected. If the
// field section is omitted it is recomputed to span beta 2 -> 5 for the
// configured molecule and trap. Errors name the offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical JSON of every resolved value, used for hashing and echoing.
std::string canonical_json(const RunConfig& cfg);
// 64-bit FNV-1a of canonical_json, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace polarqc
