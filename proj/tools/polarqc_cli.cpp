#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "polarqc/compiler.hpp"
#include "polarqc/config.hpp"
#include "polarqc/device.hpp"
#include "polarqc/error.hpp"
#include "polarqc/io.hpp"
#include "polarqc/noisebudget.hpp"
#include "polarqc/pulsesim.hpp"
#include "polarqc/stark.hpp"
#include "polarqc/units.hpp"

using namespace polarqc;
using io::ojson;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitPhysics = 3;

// Truth tables are tabulated over all basis inputs only up to this size.
constexpr int kTruthTableMaxN = 4;
constexpr int kNoiselessShots = 1000;
// Nominal rf drive amplitude for the reported pi time.
constexpr double kRfFieldVcm = 10e-3;

struct Common {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    bool strict = false;
};

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

RunConfig load(const Common& c) {
    RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
    if (c.seed) cfg.sim.seed = *c.seed;
    cfg.validate();
    return cfg;
}

io::Metadata meta(const RunConfig& cfg, const std::string& cmd) {
    io::Metadata m;
    m.command = cmd;
    m.config_hash = config_hash(cfg);
    m.seed = cfg.sim.seed;
    return m;
}

void emit(const Common& c, const std::string& text) {
    if (c.out_path.empty())
        std::cout << text;
    else
        io::write_file(c.out_path, text);
}

ojson checks_json(const std::vector<Check>& checks) {
    ojson a = ojson::array();
    for (const Check& k : checks) a.push_back({{"name", k.name}, {"pass", k.pass}, {"detail", k.detail}});
    return a;
}

int finish(const Common& c, const std::vector<Check>& checks) {
    bool ok = true;
    for (const Check& k : checks)
        if (!k.pass) {
            ok = false;
            std::cerr << "check failed: " << k.name << ": " << k.detail << "\n";
        }
    return (!ok && c.strict) ? kExitPhysics : kExitOk;
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string outcome_key(const MeasurementRecord& r) {
    std::string k;
    for (auto it = r.outcomes.rbegin(); it != r.outcomes.rend(); ++it)
        k += *it == Outcome::Lost ? 'L' : (*it == Outcome::One ? '1' : '0');
    return k;
}

int cmd_stark_scan(const Common& c, double bmin, double bmax, int points) {
    const RunConfig cfg = load(c);
    if (!(bmin >= 0.0) || !(bmax > bmin) || points < 2)
        throw ValidationError("stark-scan: need 0 <= beta-min < beta-max and points >= 2");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = bmin + (bmax - bmin) * i / (points - 1);
    const auto scan = stark::stark_scan(cfg.molecule, grid, cfg.sim.Jmax);
    emit(c, io::stark_scan_csv(scan, cfg.molecule, meta(cfg, "stark-scan")));
    return kExitOk;
}

int cmd_design_report(const Common& c) {
    const RunConfig cfg = load(c);
    const long sites = device::site_count(cfg.trap.L_mm, cfg.trap.lambda_t_um);
    const DeviceLayout lay = build_layout(cfg.molecule, cfg.trap, cfg.field, int(sites));
    const NoiseBudget budget = budget_report(cfg);

    double step_min = INFINITY, step_max = -INFINITY;
    for (int a = 0; a + 1 < lay.N; ++a) {
        step_min = std::min(step_min, lay.nu_linear[a + 1] - lay.nu_linear[a]);
        step_max = std::max(step_max, lay.nu_linear[a + 1] - lay.nu_linear[a]);
    }
    if (lay.N < 2) step_min = step_max = 0.0;
    const double z0 = device::rayleigh_length(cfg.trap.w0_um, cfg.trap.lambda_t_um);
    const double e_end = lay.E_local.back();
    const double nu_end_full_mu = 2.0 * cfg.molecule.B + units::dipole_field_to_frequency(cfg.molecule.mu, e_end);
    const double e_mid = cfg.field.at_mm(0.5 * cfg.trap.L_mm);
    const double mu_t = stark::qubit_levels(cfg.molecule, e_mid, cfg.sim.Jmax).mu_t;
    const double rf_rabi = units::dipole_field_to_frequency(mu_t, kRfFieldVcm);
    const double t_pi = 0.5 / rf_rabi;

    bool exact_monotone = true;
    for (int a = 0; a + 1 < lay.N; ++a) exact_monotone = exact_monotone && lay.nu_exact[a + 1] > lay.nu_exact[a];
    double lin_dev = 0.0;
    for (int a = 0; a < lay.N; ++a) lin_dev = std::max(lin_dev, std::abs(lay.nu_exact[a] / lay.nu_linear[a] - 1.0));
    const double cmax = lay.max_neighbor_coupling();

    std::vector<Check> checks;
    checks.push_back({"rayleigh_length_exceeds_L", z0 > cfg.trap.L_mm,
                      "z0 = " + io::fmt12(z0) + " mm, L = " + io::fmt12(cfg.trap.L_mm) + " mm"});
    checks.push_back({"addressing_resolved", !lay.addressing_degenerate() && step_min > 10.0 * cmax,
                      "min step " + io::fmt12(step_min) + " Hz vs coupling " + io::fmt12(cmax) + " Hz"});
    checks.push_back({"exact_frequencies_increasing", exact_monotone, ""});

    ojson j;
    j["metadata"] = io::metadata_json(meta(cfg, "design-report"));
    j["config"] = ojson::parse(canonical_json(cfg));
    j["layout"] = {{"site_count", lay.N},
                   {"spacing_um", cfg.trap.spacing_um()},
                   {"E_first_Vcm", lay.E_local.front()},
                   {"E_last_Vcm", e_end},
                   {"nu_linear_first_Hz", lay.nu_linear.front()},
                   {"nu_linear_last_Hz", lay.nu_linear.back()},
                   {"nu_exact_first_Hz", lay.nu_exact.front()},
                   {"nu_exact_last_Hz", lay.nu_exact.back()},
                   {"nu_last_full_mu_Hz", nu_end_full_mu},
                   {"exact_vs_linear_max_rel_dev", lin_dev},
                   {"step_min_Hz", step_min},
                   {"step_max_Hz", step_max},
                   {"neighbor_coupling_max_Hz", cmax},
                   {"plateau_coupling_Hz", budget.delta_nu},
                   {"cnot_time_s", budget.tau_gate},
                   {"rayleigh_length_mm", z0},
                   {"rf_field_Vcm", kRfFieldVcm},
                   {"rf_pi_time_s", t_pi}};
    j["checks"] = checks_json(checks);
    j["budget"] = io::budget_to_json(budget);

    std::ostringstream txt;
    txt << io::metadata_comment(meta(cfg, "design-report"));
    txt << "sites                  " << lay.N << "\n"
        << "nu_linear range (Hz)   " << io::fmt12(lay.nu_linear.front()) << " .. " << io::fmt12(lay.nu_linear.back())
        << "\n"
        << "nu_exact range (Hz)    " << io::fmt12(lay.nu_exact.front()) << " .. " << io::fmt12(lay.nu_exact.back())
        << "\n"
        << "exact/linear max dev   " << io::fmt12(lin_dev) << "\n"
        << "last site, full mu (Hz) " << io::fmt12(nu_end_full_mu) << "\n"
        << "site step (Hz)         " << io::fmt12(step_min) << " .. " << io::fmt12(step_max) << "\n"
        << "neighbour coupling (Hz) " << io::fmt12(budget.delta_nu) << "\n"
        << "CNOT time (s)          " << io::fmt12(budget.tau_gate) << "\n"
        << "Rayleigh length (mm)   " << io::fmt12(z0) << "\n"
        << "rf pi time @10 mV/cm (s) " << io::fmt12(t_pi) << "\n\n";
    for (const Check& k : checks)
        txt << (k.pass ? "[ok]   " : "[FAIL] ") << k.name << (k.detail.empty() ? "" : "  (" + k.detail + ")") << "\n";
    if (lay.addressing_degenerate()) txt << "warning: addressing is degenerate (zero field gradient)\n";
    txt << "\n" << io::budget_table(budget);
    std::cout << txt.str();
    if (!c.out_path.empty()) io::write_file(c.out_path, io::dump(j));
    return finish(c, checks);
}

int cmd_simulate(const Common& c, const std::string& circuit_path, const CompileSettings& settings) {
    const RunConfig cfg = load(c);
    const int N = cfg.sim.N;
    const Circuit circ = parse_circuit(io::read_file(circuit_path), N);
    const DeviceLayout lay = build_layout(cfg.molecule, cfg.trap, cfg.field, N);
    CompileDiagnostics diag;
    const PulseSchedule sched = compile(circ, lay, settings, &diag);
    Simulator sim(lay);

    auto run = [&](std::uint64_t input, const std::optional<NoiseModel>& noise, std::vector<DephasingEvent>* ev) {
        RegisterState psi = RegisterState::basis(N, input);
        auto events = sim.run_schedule(psi, sched, noise);
        if (ev) *ev = std::move(events);
        return to_logical_frame(psi, sched, lay);
    };

    ojson j;
    j["metadata"] = io::metadata_json(meta(cfg, "simulate"));
    j["schedule"] = io::schedule_to_json(sched);
    j["diagnostics"] = {{"max_residual_rad", diag.max_residual_rad},
                        {"echo_flips", diag.echo_flips},
                        {"flush_blocks", diag.flush_blocks},
                        {"notes", diag.notes}};

    const std::size_t dim = std::size_t{1} << N;
    const std::size_t inputs = N <= kTruthTableMaxN ? dim : 1;
    ojson table = ojson::array();
    double worst = 0.0;
    RegisterState out0;
    double fid0 = 0.0;
    for (std::size_t in = 0; in < inputs; ++in) {
        const RegisterState out = run(in, std::nullopt, nullptr);
        const RegisterState ideal = ideal_state(circ, RegisterState::basis(N, in));
        const double f = fidelity(out, ideal);
        std::vector<double> pops(dim);
        double perr = 0.0;
        for (std::size_t s = 0; s < dim; ++s) {
            pops[s] = std::norm(out.amp[s]);
            perr += std::abs(pops[s] - std::norm(ideal.amp[s]));
        }
        worst = std::max(worst, 0.5 * perr);
        table.push_back({{"input", in}, {"populations", pops}, {"fidelity_vs_ideal", f}});
        if (in == 0) {
            out0 = out;
            fid0 = f;
        }
    }
    j["truth_table"] = table;
    j["truth_table_population_error"] = worst;
    j["fidelity_vs_ideal"] = fid0;

    std::map<std::string, int> hist;
    const std::uint64_t seed = cfg.sim.seed;
    if (cfg.sim.trajectories > 0) {
        ojson trajs = ojson::array();
        double sum = 0.0, sum2 = 0.0;
        const RegisterState ideal = ideal_state(circ, RegisterState::basis(N, 0));
        for (int k = 0; k < cfg.sim.trajectories; ++k) {
            const std::uint64_t sk = splitmix(seed + std::uint64_t(k));
            std::vector<DephasingEvent> ev;
            const RegisterState out = run(0, NoiseModel{cfg.noise.Rs_per_s, sk}, &ev);
            const double f = fidelity(out, ideal);
            sum += f;
            sum2 += f * f;
            const MeasurementRecord rec = measure(out, cfg.noise.eta, splitmix(sk));
            ++hist[outcome_key(rec)];
            trajs.push_back(io::trajectory_to_json(sk, ev, rec, f));
        }
        const double n = cfg.sim.trajectories;
        const double mean = sum / n;
        const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
        j["noise"] = {{"Rs_per_s", cfg.noise.Rs_per_s},
                      {"trajectories", cfg.sim.trajectories},
                      {"mean_fidelity", mean},
                      {"standard_error", std::sqrt(var / n)}};
        j["trajectories"] = trajs;
    } else {
        for (int k = 0; k < kNoiselessShots; ++k)
            ++hist[outcome_key(measure(out0, cfg.noise.eta, splitmix(seed + std::uint64_t(k))))];
    }
    ojson h = ojson::object();
    for (const auto& [k, v] : hist) h[k] = v;
    j["histogram"] = h;

    std::vector<Check> checks;
    checks.push_back({"truth_table_population_error_below_1e-2", worst < 1e-2, io::fmt12(worst)});
    j["checks"] = checks_json(checks);
    emit(c, io::dump(j));
    return finish(c, checks);
}

int cmd_budget(const Common& c) {
    const RunConfig cfg = load(c);
    const NoiseBudget b = budget_report(cfg);
    std::cout << io::metadata_comment(meta(cfg, "budget")) << io::budget_table(b);
    if (!c.out_path.empty()) {
        ojson j;
        j["metadata"] = io::metadata_json(meta(cfg, "budget"));
        j["budget"] = io::budget_to_json(b);
        io::write_file(c.out_path, io::dump(j));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polar-molecule register simulator and design calculator", "polarqc"};
    app.set_version_flag("--version", std::string(POLARQC_VERSION));
    app.require_subcommand(1);

    Common common;
    std::uint64_t seed_value = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "JSON run configuration");
        sub->add_option("--out", common.out_path, "output file (stdout if omitted)");
        sub->add_option("--seed", seed_value, "override sim.seed");
        sub->add_flag("--strict", common.strict, "exit 3 when a physics check fails");
    };

    double bmin = 0.0, bmax = 6.0;
    int points = 121;
    auto* scan = app.add_subcommand("stark-scan", "pendular-state scan over reduced field, CSV");
    add_common(scan);
    scan->add_option("--beta-min", bmin);
    scan->add_option("--beta-max", bmax);
    scan->add_option("--points", points);

    auto* report = app.add_subcommand("design-report", "register layout, geometry checks and noise budget");
    add_common(report);

    std::string circuit_path;
    CompileSettings settings;
    bool no_refocus = false;
    auto* simulate = app.add_subcommand("simulate", "compile and simulate a circuit, JSON");
    add_common(simulate);
    simulate->add_option("--circuit", circuit_path, "circuit text file")->required();
    simulate->add_option("--kappa-cnot", settings.kappa_cnot);
    simulate->add_option("--kappa-onebit", settings.kappa_onebit);
    simulate->add_flag("--no-refocus", no_refocus, "idle without echoes");

    auto* budget = app.add_subcommand("budget", "decoherence and technical-noise budget");
    add_common(budget);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    for (CLI::App* sub : app.get_subcommands())
        if (sub->count("--seed")) common.seed = seed_value;
    settings.refocus = !no_refocus;

    try {
        if (*scan) return cmd_stark_scan(common, bmin, bmax, points);
        if (*report) return cmd_design_report(common);
        if (*simulate) return cmd_simulate(common, circuit_path, settings);
        if (*budget) return cmd_budget(common);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
