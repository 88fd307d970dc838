#pragma once

#include <string>
#include <vector>

#include "polarqc/device.hpp"
#include "polarqc/pulsesim.hpp"

namespace polarqc {

struct GateOp {
    enum class Kind { Rot, Cnot, Idle };
    Kind kind = Kind::Idle;
    int a = 0;  // Rot site, CNOT control
    int b = 0;  // CNOT target
    double theta = 0.0;
    double phi = 0.0;
    double duration = 0.0;  // Idle, s

    static GateOp rot(int site, double theta, double phi) { return {Kind::Rot, site, 0, theta, phi, 0.0}; }
    static GateOp cnot(int c, int t) { return {Kind::Cnot, c, t, 0.0, 0.0, 0.0}; }
    static GateOp idle(double seconds) { return {Kind::Idle, 0, 0, 0.0, 0.0, seconds}; }
};

struct Circuit {
    int N = 0;
    std::vector<GateOp> ops;

    // Throws ValidationError on bad indices, non-neighbour CNOTs, theta
    // outside [0, 2 pi) or negative idles.
    void validate() const;
};

// Line-oriented text: "ROT site theta phi", "CNOT c t", "IDLE seconds",
// '#' starts a comment. Errors carry the 1-based line number.
Circuit parse_circuit(const std::string& text, int N);

struct CompileSettings {
    double kappa_onebit = 10.0;
    double kappa_cnot = 20.0;
    // false: Idle is a bare wait and no echo-based phase flushes are emitted.
    bool refocus = true;
    // Lower each Rot's Rabi frequency onto a nearest-neighbour crosstalk null.
    bool rabi_null = true;

    void validate() const;
};

struct CompileDiagnostics {
    // Largest non-separable ledger phase left at a Rot midpoint or at the end.
    double max_residual_rad = 0.0;
    int echo_flips = 0;
    int flush_blocks = 0;
    std::vector<std::string> notes;
};

PulseSchedule compile(const Circuit& circuit, const DeviceLayout& layout, const CompileSettings& settings = {},
                      CompileDiagnostics* diag = nullptr);

// Frequencies of the per-site logical frames: the midpoint of each site's
// conditional lines, f_a = line(a | others 0) + sum_b delta_nu_ab / 2.
std::vector<double> frame_frequencies(const DeviceLayout& layout);

// Maps a lab-frame state at the end of `sched` into the logical frame, so it
// can be compared with ideal_state().
RegisterState to_logical_frame(const RegisterState& lab, const PulseSchedule& sched, const DeviceLayout& layout);

// Exact gate-level action of the circuit. Rot(theta, phi) is
// exp(-i theta/2 (cos phi X + sin phi Y)); Idle is the identity.
RegisterState ideal_state(const Circuit& circuit, const RegisterState& input);

struct CircuitReport {
    std::vector<std::string> violations;
    double min_step_over_coupling = 0.0;  // addressing step / max neighbour coupling
    double estimated_duration = 0.0;      // s
    double coherence_time = 0.0;          // s, 1/Rs
    double budget_fraction = 0.0;         // estimated_duration * Rs
};

// Non-throwing rule check plus a duration estimate (sum of nominal gate
// times, no refocusing overhead).
CircuitReport validate(const Circuit& circuit, const DeviceLayout& layout, double Rs,
                       const CompileSettings& settings = {});

}  // namespace polarqc
