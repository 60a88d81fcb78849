// qnd: command-line front end.
//
//   qnd verify       [--dims 2,3,4,5] [--inject-fault] [--seed N]
//   qnd simulate     --config PATH [--seed N] [--out DIR] [--format json|csv|both]
//   qnd attack-demo  --kind K [--fraction F] [--seed N] [--n PAIRS]
//   qnd sweep        --axis A (--range a:b:s | --values v,...) [--config PATH]
//                    [--groups N] [--seed N] [--out FILE]
//
// Exit codes: 0 success, 1 verification failure, 2 usage or config error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qnd/adversary.hpp"
#include "qnd/experiments.hpp"
#include "qnd/io.hpp"

namespace fs = std::filesystem;
using namespace qnd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    out << content;
}

std::string fmt(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

const char* label(std::size_t flat) {
    static const char* names[16] = {"0000", "0001", "0010", "0011", "0100", "0101", "0110", "0111",
                                    "1000", "1001", "1010", "1011", "1100", "1101", "1110", "1111"};
    return names[flat];
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
    std::vector<int> dims{2, 3, 4, 5};
    bool inject_fault = false;
    std::uint64_t seed = 1;
};

int cmd_verify(const VerifyArgs& a) {
    constexpr double kTol = 1e-12;
    for (int d : a.dims)
        if (d < 2 || d > kMaxDim) throw UsageError("--dims: each dimension must be in [2, " + std::to_string(kMaxDim) + "]");
    OracleOptions opt;
    opt.dims = a.dims;
    opt.seed = a.seed;
    opt.inject_fault = a.inject_fault;
    bool ok = true;
    std::printf("%-62s %6s %12s  %s\n", "check", "cases", "max dev", "verdict");
    for (const auto& c : run_oracle_suite(opt)) {
        const bool pass = c.pass(kTol);
        ok = ok && pass;
        std::printf("%-62s %6zu %12.3e  %s\n", c.name.c_str(), c.cases, c.max_deviation, pass ? "ok" : "FAIL");
    }
    std::printf("%s (tolerance %.0e)\n", ok ? "all checks within tolerance" : "verification FAILED", kTol);
    return ok ? kExitOk : kExitVerifyFailed;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::string format = "both";
};

int cmd_simulate(const SimulateArgs& a) {
    if (!fs::exists(a.config)) throw UsageError("config file '" + a.config + "' does not exist");
    ProtocolConfig cfg = load_config(a.config);
    if (a.seed) cfg.master_seed = *a.seed;

    const fs::path dir(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory '" + a.out + "'");

    const bool want_json = a.format != "csv";
    const bool want_csv = a.format != "json";
    RunManifest manifest{cfg, std::nullopt, {}};
    if (want_json) manifest.outputs.push_back((dir / "session_report.json").string());
    if (want_csv) manifest.outputs.push_back((dir / "groups.csv").string());

    const SessionReport r = run_session(cfg);
    if (want_json) write_file(dir / "session_report.json", to_json(r, manifest).dump(2) + "\n");
    if (want_csv) write_file(dir / "groups.csv", groups_csv(r));

    std::printf("groups: %zu, kept: %llu, key length: %zu, pairs sent: %llu, efficiency: %.3e\n", r.groups.size(),
                static_cast<unsigned long long>(r.groups_kept), r.final_key.size(),
                static_cast<unsigned long long>(r.total_sent), r.efficiency());
    std::printf("discarded: accuracy %llu, eavesdrop %llu, phi_degeneracy %llu, digit_comparison %llu\n",
                static_cast<unsigned long long>(r.discarded_accuracy),
                static_cast<unsigned long long>(r.discarded_eavesdrop), static_cast<unsigned long long>(r.discarded_phi),
                static_cast<unsigned long long>(r.discarded_digits));
    std::printf("final key: %s\n", r.final_key.empty() ? "(empty)" : r.final_key.c_str());
    for (const auto& o : manifest.outputs) std::printf("wrote %s\n", o.c_str());
    return kExitOk;
}

// ---- attack-demo -----------------------------------------------------------

struct DemoArgs {
    std::string kind;
    double fraction = 1.0;
    std::uint64_t seed = 1;
    std::uint64_t n = 10000;
};

void print_verdicts(const char* title, const GroupResult& g) {
    std::printf("%s: accuracy=%s eavesdrop=%s phi_degeneracy=%s estimates_reliable=%s digits=%s -> %s\n", title,
                g.verdicts.accuracy ? "pass" : "fail", g.verdicts.eavesdrop ? "pass" : "fail",
                g.verdicts.phi_degeneracy ? "pass" : "fail", g.verdicts.estimates_reliable ? "pass" : "fail",
                g.verdicts.digit_comparison ? "pass" : "fail", g.kept() ? "kept" : ("discard: " + g.discard_reason).c_str());
}

int cmd_attack_demo(const DemoArgs& a) {
    using std::numbers::pi;
    AttackConfig attack;
    try {
        attack.kind = parse_attack_kind(a.kind);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--kind: ") + e.what());
    }
    attack.fraction = a.fraction;
    if (a.fraction < 0 || a.fraction > 1) throw UsageError("--fraction must be in [0,1]");
    if (a.n < 1) throw UsageError("--n must be >= 1");

    const PreparationParams alice{pi / 6, pi / 6}, bob{pi / 3, pi / 6};
    const ProbabilityTable honest = honest_probabilities(alice, bob);
    const ProbabilityTable attacked = attacked_probabilities(honest, attack, alice, bob);

    std::printf("attack: %s, fraction %.3f\n", to_string(attack.kind), attack.fraction);
    std::printf("alice (theta, phi) = (%.6f, %.6f), bob (theta, phi) = (%.6f, %.6f)\n\n", alice.theta, alice.phi,
                bob.theta, bob.phi);
    std::printf("%-6s %12s %12s\n", "ijkl", "honest", "attacked");
    for (std::size_t i = 0; i < 16; ++i)
        std::printf("%-6s %12s %12s\n", label(i), fmt(honest.entries[i]).c_str(), fmt(attacked.entries[i]).c_str());

    ProtocolConfig cfg;
    cfg.group_size = a.n;
    cfg.attack = attack;
    std::printf("\nchecks at %llu received pairs\n", static_cast<unsigned long long>(a.n));
    GroupOptions exact;
    exact.exact_probabilities = true;
    print_verdicts("  exact    ", run_group(alice, bob, cfg, a.seed, exact));
    const GroupResult sampled = run_group(alice, bob, cfg, a.seed);
    print_verdicts("  sampled  ", sampled);
    std::printf("  sampled quadruple: %s %s %s %s\n", fmt(sampled.quadruple.p1010).c_str(),
                fmt(sampled.quadruple.p1011).c_str(), fmt(sampled.quadruple.p1110).c_str(),
                fmt(sampled.quadruple.p1111).c_str());

    if (attack.kind == AttackKind::kInterceptResend) {
        std::printf("\neve (intercept-resend)\n");
        const EveTranscript tr = simulate_intercept_transcript(alice, bob, attack, a.n, 1.0, derive_seed(a.seed, 9));
        const EveEstimate e = eve_recovered_values(attack, tr);
        if (!e.reason.empty() && !e.reliable) std::printf("  estimate unreliable: %s\n", e.reason.c_str());
        if (attack.fraction >= 1.0) {
            std::printf("  %-12s %10s %10s\n", "value", "truth", "eve");
            std::printf("  %-12s %10s %10s\n", "cos theta_a", fmt(std::cos(alice.theta)).c_str(),
                        fmt(e.alice_values.cos_theta).c_str());
            std::printf("  %-12s %10s %10s\n", "cos phi_a", fmt(std::cos(alice.phi)).c_str(),
                        fmt(e.alice_values.cos_phi).c_str());
            std::printf("  %-12s %10s %10s\n", "cos theta_b", fmt(std::cos(bob.theta)).c_str(),
                        fmt(e.bob_values.cos_theta).c_str());
            std::printf("  %-12s %10s %10s\n", "cos phi_b", fmt(std::cos(bob.phi)).c_str(),
                        fmt(e.bob_values.cos_phi).c_str());
        }
    } else if (attack.kind == AttackKind::kEntangleMeasure) {
        // Eve's own (eta, E) outcome distribution, summed over Alice and Bob.
        const ProbabilityTable full = squared_magnitudes(
            joint_bell_coefficients_6(entangle_measure_state(alice, bob, attack.eve_eta), entangle_measure_pairing()));
        std::printf("\neve (entangle-measure) outcome marginals on (eta, E)\n");
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) {
                double s = 0.0;
                for (std::size_t f = 0; f < 16; ++f) s += full.entries[f * 4 + m * 2 + n];
                std::printf("  Phi_%d%d %12s\n", m, n, fmt(s).c_str());
            }
    }
    return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
    std::string axis;
    std::string range;
    std::string values;
    std::string config;
    std::optional<std::uint64_t> groups;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_sweep(const SweepArgs& a) {
    SweepAxis axis;
    std::vector<double> values;
    try {
        axis = parse_sweep_axis(a.axis);
        if (a.range.empty() == a.values.empty()) throw std::invalid_argument("give exactly one of --range or --values");
        values = a.range.empty() ? parse_values(a.values) : parse_range(a.range);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    ProtocolConfig base;
    if (!a.config.empty()) {
        if (!fs::exists(a.config)) throw UsageError("config file '" + a.config + "' does not exist");
        base = load_config(a.config);
    }
    if (a.groups) base.num_groups = *a.groups;
    if (a.seed) base.master_seed = *a.seed;

    std::vector<SweepRow> rows;
    try {
        for (double v : values) with_axis(base, axis, v).validate();
        rows = run_sweep(base, axis, values);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const std::string csv = sweep_csv(rows);
    if (a.out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_file(a.out, csv);
        std::printf("wrote %s (%zu rows)\n", a.out.c_str(), rows.size());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-way quantum number distribution: simulation and analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "Check closed forms against the brute-force Bell expansion");
    v->add_option("--dims", verify.dims, "Qudit dimensions to cover")->delimiter(',');
    v->add_flag("--inject-fault", verify.inject_fault, "Flip one closed-form sign; the run must then fail");
    v->add_option("--seed", verify.seed, "Seed for the random test cases");

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Run a protocol session from a config file");
    s->add_option("--config", sim.config, "Session config (JSON)")->required();
    s->add_option("--seed", sim.seed, "Override the config's master seed");
    s->add_option("--out", sim.out, "Output directory");
    s->add_option("--format", sim.format, "Which files to write")
        ->check(CLI::IsMember({"json", "csv", "both"}));

    DemoArgs demo;
    auto* d = app.add_subcommand("attack-demo", "Honest vs attacked tables, verdicts and Eve's view");
    d->add_option("--kind", demo.kind, "none, intercept_resend or entangle_measure")->required();
    d->add_option("--fraction", demo.fraction, "Fraction of pairs attacked");
    d->add_option("--seed", demo.seed, "Sampling seed");
    d->add_option("--n", demo.n, "Received pairs for the sampled run");

    SweepArgs sweep;
    auto* w = app.add_subcommand("sweep", "Sweep one parameter and emit CSV");
    w->add_option("--axis", sweep.axis, "n, error_rate, fraction or distance")->required();
    w->add_option("--range", sweep.range, "start:stop:step");
    w->add_option("--values", sweep.values, "Comma-separated values");
    w->add_option("--config", sweep.config, "Base config (JSON)");
    w->add_option("--groups", sweep.groups, "Groups per point");
    w->add_option("--seed", sweep.seed, "Master seed");
    w->add_option("--out", sweep.out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*v) return cmd_verify(verify);
        if (*s) return cmd_simulate(sim);
        if (*d) return cmd_attack_demo(demo);
        if (*w) return cmd_sweep(sweep);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
