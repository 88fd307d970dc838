#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polarqc/device.hpp"

namespace polarqc {

using cplx = std::complex<double>;

inline constexpr int kMaxQubits = 14;

// Amplitudes over basis states ordered by bit-string value, site 0 the least
// significant bit. `t` is the lab-frame clock in seconds.
struct RegisterState {
    int N = 0;
    std::vector<cplx> amp;
    double t = 0.0;

    static RegisterState basis(int N, std::uint64_t index);
    // Product state; qubits[a] = (c0, c1) for site a, normalized on entry.
    static RegisterState product(const std::vector<std::pair<cplx, cplx>>& qubits);

    std::size_t dim() const { return amp.size(); }
    double norm2() const;
};

struct Pulse {
    double start = 0.0;     // s
    double duration = 0.0;  // s
    double freq = 0.0;      // Hz
    double rabi = 0.0;      // Hz, t_pi = 1/(2 rabi)
    double phase = 0.0;     // rad

    double end() const { return start + duration; }
};

struct PulseSchedule {
    int N = 0;
    std::vector<Pulse> pulses;
    double total_duration = 0.0;
    std::vector<double> frame_corrections;  // rad, in [0, 2 pi)

    // Throws ValidationError on overlap, bad ordering, negative values or a
    // total_duration shorter than the last pulse.
    void validate() const;
};

struct DephasingEvent {
    double t = 0.0;
    int site = 0;
    double phase = 0.0;
};

struct NoiseModel {
    double Rs = 0.0;  // events per second per site
    std::uint64_t seed = 0;
};

enum class Outcome : int { Zero = 0, One = 1, Lost = -1 };

struct MeasurementRecord {
    std::vector<Outcome> outcomes;
    std::uint64_t seed = 0;
};

enum class Propagator { Auto, Dense, Chebyshev };

// Lab-frame simulator for one layout (N <= kMaxQubits). Not thread-safe: the
// eigenbasis cache is mutable. Use one Simulator per thread.
class Simulator {
public:
    explicit Simulator(const DeviceLayout& layout, Propagator prop = Propagator::Auto);

    int N() const { return N_; }
    const DeviceLayout& layout() const { return layout_; }

    // W(s)/h in Hz for every basis state.
    const std::vector<double>& energies() const { return W_; }
    double config_energy(std::uint64_t s) const;
    double config_energy(const std::vector<int>& bits) const;

    // Conditional line of `site` with the other sites in configuration s
    // (the bit of `site` in s is ignored).
    double line(int site, std::uint64_t s) const;

    void evolve_idle(RegisterState& psi, double duration) const;
    // Idles from psi.t to p.start first; throws if p.start < psi.t.
    void evolve_pulse(RegisterState& psi, const Pulse& p);

    std::vector<DephasingEvent> run_schedule(RegisterState& psi, const PulseSchedule& sched,
                                             const std::optional<NoiseModel>& noise = std::nullopt);

    void clear_cache() { cache_.clear(); }

private:
    struct Eigenbasis {
        Eigen::MatrixXcd V;          // columns are eigenvectors of the phase-free matrix
        Eigen::VectorXd lambda;      // Hz
    };
    const Eigenbasis& eigenbasis(double freq, double rabi);
    void rotating_step(RegisterState& psi, const Pulse& p, double t0, double dur);
    void dense_step(std::vector<cplx>& x, const Pulse& p, double dur);
    void chebyshev_step(std::vector<cplx>& x, const Pulse& p, double dur) const;

    DeviceLayout layout_;
    int N_;
    Propagator prop_;
    std::vector<double> W_;
    std::vector<double> W_ref_;  // W - W(0), what actually enters the phases
    std::vector<int> pop_;
    std::map<std::pair<double, double>, Eigenbasis> cache_;
};

MeasurementRecord measure(const RegisterState& psi, double eta, std::uint64_t seed);

// |<reference|psi>|^2
double fidelity(const RegisterState& psi, const RegisterState& reference);

// Applies a phase kick exp(i phase) to every amplitude with `site` = 1.
void apply_z_kick(RegisterState& psi, int site, double phase);

}  // namespace polarqc
