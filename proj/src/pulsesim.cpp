#include "polarqc/pulsesim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "polarqc/error.hpp"
#include "polarqc/kernels.hpp"
#include "polarqc/units.hpp"

namespace polarqc {

namespace {

constexpr double kTwoPi = 2.0 * units::kPi;
// Largest register handled by dense eigendecomposition; above this the
// Chebyshev propagator is used.
constexpr int kDenseMaxQubits = 10;

// exp(-i 2 pi cycles), reducing the argument first so large clocks keep
// their phase resolution.
cplx phase_factor(double cycles) {
    const double frac = cycles - std::round(cycles);
    return std::polar(1.0, -kTwoPi * frac);
}

}  // namespace

RegisterState RegisterState::basis(int N, std::uint64_t index) {
    if (N < 1 || N > kMaxQubits) throw ValidationError("RegisterState: N must be in [1, 14]");
    if (index >= (std::uint64_t{1} << N)) throw ValidationError("RegisterState: basis index out of range");
    RegisterState r;
    r.N = N;
    r.amp.assign(std::size_t{1} << N, cplx{0.0, 0.0});
    r.amp[index] = 1.0;
    return r;
}

RegisterState RegisterState::product(const std::vector<std::pair<cplx, cplx>>& qubits) {
    const int N = int(qubits.size());
    if (N < 1 || N > kMaxQubits) throw ValidationError("RegisterState: N must be in [1, 14]");
    RegisterState r;
    r.N = N;
    r.amp.assign(1, cplx{1.0, 0.0});
    for (int a = 0; a < N; ++a) {
        auto [c0, c1] = qubits[a];
        const double n = std::sqrt(std::norm(c0) + std::norm(c1));
        if (!(n > 0.0)) throw ValidationError("RegisterState: zero single-site vector");
        c0 /= n;
        c1 /= n;
        // site a is bit a: new amplitudes are [old*c0, old*c1] blocks
        std::vector<cplx> next(r.amp.size() * 2);
        for (std::size_t i = 0; i < r.amp.size(); ++i) {
            next[i] = r.amp[i] * c0;
            next[i + r.amp.size()] = r.amp[i] * c1;
        }
        r.amp.swap(next);
    }
    return r;
}

double RegisterState::norm2() const { return kernels::active().norm2(amp.data(), amp.size()); }

void PulseSchedule::validate() const {
    double last_end = 0.0;
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        const Pulse& p = pulses[i];
        if (!(p.duration > 0.0) || !std::isfinite(p.duration))
            throw ValidationError("schedule: pulse " + std::to_string(i) + " duration must be > 0");
        if (!(p.rabi >= 0.0) || !std::isfinite(p.rabi))
            throw ValidationError("schedule: pulse " + std::to_string(i) + " rabi must be >= 0");
        if (!(p.start >= 0.0) || !std::isfinite(p.freq) || !std::isfinite(p.phase))
            throw ValidationError("schedule: pulse " + std::to_string(i) + " has invalid fields");
        // Abutting pulses are computed as start = previous end, allow rounding.
        if (p.start < last_end - 1e-12 * std::max(1.0, last_end))
            throw ValidationError("schedule: pulse " + std::to_string(i) + " overlaps or is out of order");
        last_end = p.end();
    }
    if (total_duration < last_end - 1e-12 * std::max(1.0, last_end))
        throw ValidationError("schedule: total_duration ends before the last pulse");
    for (double c : frame_corrections)
        if (!(c >= 0.0 && c < kTwoPi)) throw ValidationError("schedule: frame corrections must lie in [0, 2pi)");
}

Simulator::Simulator(const DeviceLayout& layout, Propagator prop) : layout_(layout), N_(layout.N), prop_(prop) {
    if (N_ < 1 || N_ > kMaxQubits) throw ValidationError("simulator: N must be in [1, 14]");
    const std::size_t dim = std::size_t{1} << N_;
    W_.resize(dim);
    W_ref_.resize(dim);
    pop_.resize(dim);
    for (std::size_t s = 0; s < dim; ++s) {
        W_[s] = config_energy(std::uint64_t(s));
        pop_[s] = std::popcount(s);
    }
    for (std::size_t s = 0; s < dim; ++s) W_ref_[s] = W_[s] - W_[0];
}

double Simulator::config_energy(std::uint64_t s) const {
    double w = 0.0;
    for (int a = 0; a < N_; ++a) w += ((s >> a) & 1) ? layout_.w1_hz[a] : layout_.w0_hz[a];
    for (int a = 0; a < N_; ++a) {
        const double da = ((s >> a) & 1) ? layout_.d1[a] : layout_.d0[a];
        for (int b = a + 1; b < N_; ++b) {
            const double db = ((s >> b) & 1) ? layout_.d1[b] : layout_.d0[b];
            w += da * db * layout_.pair_factor(a, b);
        }
    }
    return w;
}

double Simulator::config_energy(const std::vector<int>& bits) const {
    if (int(bits.size()) != N_) throw ValidationError("config_energy: bit-string length must equal N");
    std::uint64_t s = 0;
    for (int a = 0; a < N_; ++a) {
        if (bits[a] != 0 && bits[a] != 1) throw ValidationError("config_energy: bits must be 0 or 1");
        s |= std::uint64_t(bits[a]) << a;
    }
    return config_energy(s);
}

double Simulator::line(int site, std::uint64_t s) const {
    const std::uint64_t m = std::uint64_t{1} << site;
    return W_[s | m] - W_[s & ~m];
}

void Simulator::evolve_idle(RegisterState& psi, double duration) const {
    if (psi.N != N_) throw ValidationError("evolve_idle: register size mismatch");
    if (!(duration >= 0.0)) throw ValidationError("evolve_idle: duration must be >= 0");
    if (duration > 0.0) {
        std::vector<cplx> ph(psi.dim());
        for (std::size_t s = 0; s < ph.size(); ++s) ph[s] = phase_factor(W_ref_[s] * duration);
        kernels::active().cmul(psi.amp.data(), ph.data(), ph.size());
    }
    psi.t += duration;
}

const Simulator::Eigenbasis& Simulator::eigenbasis(double freq, double rabi) {
    const auto key = std::make_pair(freq, rabi);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    if (cache_.size() > 256) cache_.clear();

    const Eigen::Index dim = Eigen::Index(1) << N_;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        H(s, s) = W_ref_[s] - freq * pop_[s];
        for (int a = 0; a < N_; ++a) {
            const Eigen::Index m = Eigen::Index(1) << a;
            if (!(s & m)) {
                H(s | m, s) = 0.5 * rabi;
                H(s, s | m) = 0.5 * rabi;
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw NumericalError("pulsesim: eigensolver failed");
    Eigenbasis eb{es.eigenvectors().cast<cplx>(), es.eigenvalues()};
    return cache_.emplace(key, std::move(eb)).first->second;
}

// x <- Z exp(-i 2 pi H0 dur) Z^dag x, where Z = diag(exp(i phase n(s))) carries
// the drive phase.
void Simulator::dense_step(std::vector<cplx>& x, const Pulse& p, double dur) {
    const Eigenbasis& eb = eigenbasis(p.freq, p.rabi);
    const auto& K = kernels::active();
    const std::size_t dim = x.size();

    std::vector<cplx> z(dim), zc(dim);
    for (std::size_t s = 0; s < dim; ++s) {
        z[s] = std::polar(1.0, p.phase * pop_[s]);
        zc[s] = std::conj(z[s]);
    }
    K.cmul(x.data(), zc.data(), dim);

    std::vector<cplx> y(dim);
    for (std::size_t k = 0; k < dim; ++k) y[k] = K.cdot(eb.V.col(Eigen::Index(k)).data(), x.data(), dim);
    std::vector<cplx> ev(dim);
    for (std::size_t k = 0; k < dim; ++k) ev[k] = phase_factor(eb.lambda(Eigen::Index(k)) * dur);
    K.cmul(y.data(), ev.data(), dim);

    std::fill(x.begin(), x.end(), cplx{0.0, 0.0});
    for (std::size_t k = 0; k < dim; ++k) K.caxpy(y[k], eb.V.col(Eigen::Index(k)).data(), x.data(), dim);
    K.cmul(x.data(), z.data(), dim);
}

// Chebyshev expansion of exp(-i 2 pi H dur), split into chunks whose scaled
// argument stays below 20 so the Bessel coefficients are well behaved.
void Simulator::chebyshev_step(std::vector<cplx>& x, const Pulse& p, double dur) const {
    const std::size_t dim = x.size();
    const auto& K = kernels::active();
    std::vector<cplx> diag(dim);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t s = 0; s < dim; ++s) {
        const double d = W_ref_[s] - p.freq * pop_[s];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    lo -= 0.5 * p.rabi * N_;
    hi += 0.5 * p.rabi * N_;
    const double c = 0.5 * (hi + lo);
    const double r = std::max(0.5 * (hi - lo), 1e-300);
    const double inv_r = 1.0 / r;
    for (std::size_t s = 0; s < dim; ++s) diag[s] = (W_ref_[s] - p.freq * pop_[s] - c) * inv_r;
    const cplx up = std::polar(0.5 * p.rabi * inv_r, p.phase);  // <s|a=1| H |s|a=0>
    const cplx down = std::conj(up);

    // y = Hn x
    auto apply = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
        out = in;
        K.cmul(out.data(), diag.data(), dim);
        for (int a = 0; a < N_; ++a) {
            const std::size_t m = std::size_t{1} << a;
            for (std::size_t base = 0; base < dim; base += 2 * m) {
                K.caxpy(down, in.data() + base + m, out.data() + base, m);
                K.caxpy(up, in.data() + base, out.data() + base + m, m);
            }
        }
    };

    const double total_arg = kTwoPi * r * dur;
    const int chunks = std::max(1, int(std::ceil(total_arg / 20.0)));
    const double arg = total_arg / chunks;
    std::vector<double> J;
    for (int k = 0;; ++k) {
        const double j = std::cyl_bessel_j(double(k), arg);
        J.push_back(j);
        if (k > arg + 10 && std::abs(j) < 1e-18) break;
    }
    const cplx shift = phase_factor(c * dur / chunks);
    static const cplx kMinusI[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};

    std::vector<cplx> t0, t1, t2, acc(dim);
    for (int ch = 0; ch < chunks; ++ch) {
        t0 = x;
        apply(t0, t1);
        std::fill(acc.begin(), acc.end(), cplx{0.0, 0.0});
        K.caxpy(J[0], t0.data(), acc.data(), dim);
        K.caxpy(2.0 * J[1] * kMinusI[1], t1.data(), acc.data(), dim);
        for (std::size_t k = 2; k < J.size(); ++k) {
            apply(t1, t2);
            // T_k = 2 Hn T_{k-1} - T_{k-2}
            for (std::size_t s = 0; s < dim; ++s) t2[s] = 2.0 * t2[s] - t0[s];
            K.caxpy(2.0 * J[k] * kMinusI[k % 4], t2.data(), acc.data(), dim);
            std::swap(t0, t1);
            std::swap(t1, t2);
        }
        for (std::size_t s = 0; s < dim; ++s) x[s] = acc[s] * shift;
    }
}

void Simulator::rotating_step(RegisterState& psi, const Pulse& p, double t0, double dur) {
    if (dur <= 0.0) return;
    const std::size_t dim = psi.dim();
    std::vector<cplx> frame(dim);
    // lab -> frame rotating at p.freq anchored at t = 0
    for (std::size_t s = 0; s < dim; ++s) frame[s] = phase_factor(-p.freq * pop_[s] * t0);
    kernels::active().cmul(psi.amp.data(), frame.data(), dim);

    const bool dense = prop_ == Propagator::Dense || (prop_ == Propagator::Auto && N_ <= kDenseMaxQubits);
    if (dense)
        dense_step(psi.amp, p, dur);
    else
        chebyshev_step(psi.amp, p, dur);

    const double t1 = t0 + dur;
    for (std::size_t s = 0; s < dim; ++s) frame[s] = phase_factor(p.freq * pop_[s] * t1);
    kernels::active().cmul(psi.amp.data(), frame.data(), dim);
    psi.t = t1;
}

void Simulator::evolve_pulse(RegisterState& psi, const Pulse& p) {
    if (psi.N != N_) throw ValidationError("evolve_pulse: register size mismatch");
    if (!(p.duration > 0.0) || !(p.rabi >= 0.0)) throw ValidationError("evolve_pulse: invalid pulse");
    const double tol = 1e-12 * std::max(1.0, std::abs(psi.t));
    if (p.start < psi.t - tol) throw ValidationError("evolve_pulse: pulse starts before the state clock");
    if (p.start > psi.t) evolve_idle(psi, p.start - psi.t);
    rotating_step(psi, p, p.start, p.duration);
}

std::vector<DephasingEvent> Simulator::run_schedule(RegisterState& psi, const PulseSchedule& sched,
                                                    const std::optional<NoiseModel>& noise) {
    if (sched.N != N_ || psi.N != N_) throw ValidationError("run_schedule: register size mismatch");
    sched.validate();
    const double t_begin = psi.t;
    const double t_end = std::max(t_begin, sched.total_duration);

    std::vector<DephasingEvent> events;
    if (noise) {
        if (!(noise->Rs >= 0.0)) throw ValidationError("run_schedule: Rs must be >= 0");
        if (noise->Rs > 0.0) {
            std::mt19937_64 rng(noise->seed);
            std::exponential_distribution<double> wait(noise->Rs);
            std::uniform_real_distribution<double> kick(0.0, kTwoPi);
            for (int a = 0; a < N_; ++a) {
                for (double t = t_begin + wait(rng); t < t_end; t += wait(rng))
                    events.push_back({t, a, kick(rng)});
            }
            std::stable_sort(events.begin(), events.end(),
                             [](const DephasingEvent& x, const DephasingEvent& y) { return x.t < y.t; });
        }
    }

    std::size_t ev = 0;
    auto idle_until = [&](double t) {
        for (; ev < events.size() && events[ev].t < t; ++ev) {
            evolve_idle(psi, std::max(0.0, events[ev].t - psi.t));
            apply_z_kick(psi, events[ev].site, events[ev].phase);
        }
        evolve_idle(psi, std::max(0.0, t - psi.t));
    };

    for (const Pulse& p : sched.pulses) {
        if (p.start < psi.t - 1e-12 * std::max(1.0, psi.t))
            throw ValidationError("run_schedule: schedule starts before the state clock");
        idle_until(p.start);
        double seg = psi.t;
        for (; ev < events.size() && events[ev].t < p.end(); ++ev) {
            rotating_step(psi, p, seg, events[ev].t - seg);
            seg = events[ev].t;
            psi.t = seg;
            apply_z_kick(psi, events[ev].site, events[ev].phase);
        }
        rotating_step(psi, p, seg, p.end() - seg);
        psi.t = p.end();
    }
    idle_until(t_end);
    return events;
}

MeasurementRecord measure(const RegisterState& psi, double eta, std::uint64_t seed) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("measure: eta must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double total = psi.norm2();
    const double target = u(rng) * total;
    double cum = 0.0;
    std::size_t pick = psi.dim() - 1;
    for (std::size_t s = 0; s < psi.dim(); ++s) {
        cum += std::norm(psi.amp[s]);
        if (target < cum) {
            pick = s;
            break;
        }
    }
    MeasurementRecord rec;
    rec.seed = seed;
    std::bernoulli_distribution keep(eta);
    for (int a = 0; a < psi.N; ++a) {
        const bool ok = keep(rng);
        rec.outcomes.push_back(!ok ? Outcome::Lost : (((pick >> a) & 1) ? Outcome::One : Outcome::Zero));
    }
    return rec;
}

double fidelity(const RegisterState& psi, const RegisterState& reference) {
    if (psi.dim() != reference.dim()) throw ValidationError("fidelity: dimension mismatch");
    return std::norm(kernels::active().cdot(reference.amp.data(), psi.amp.data(), psi.dim()));
}

void apply_z_kick(RegisterState& psi, int site, double phase) {
    if (site < 0 || site >= psi.N) throw ValidationError("apply_z_kick: site out of range");
    const cplx k = std::polar(1.0, phase);
    const std::size_t m = std::size_t{1} << site;
    for (std::size_t s = 0; s < psi.dim(); ++s)
        if (s & m) psi.amp[s] *= k;
}

}  // namespace polarqc
