// experiments.hpp
// Batch studies on top of the protocol: one-axis parameter sweeps and the
// closed-form vs brute-force equivalence suite.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qnd/analytic.hpp"
#include "qnd/io.hpp"
#include "qnd/protocol.hpp"
#include "qnd/qmath.hpp"
#include "qnd/sampling.hpp"

namespace qnd {

// ---- sweeps ----------------------------------------------------------------

enum class SweepAxis { kGroupSize, kErrorRate, kFraction, kDistance };

inline SweepAxis parse_sweep_axis(const std::string& s) {
    if (s == "n") return SweepAxis::kGroupSize;
    if (s == "error_rate") return SweepAxis::kErrorRate;
    if (s == "fraction") return SweepAxis::kFraction;
    if (s == "distance") return SweepAxis::kDistance;
    throw std::invalid_argument("unknown sweep axis '" + s + "' (expected n, error_rate, fraction or distance)");
}

inline const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::kGroupSize: return "n";
        case SweepAxis::kErrorRate: return "error_rate";
        case SweepAxis::kFraction: return "fraction";
        case SweepAxis::kDistance: return "distance";
    }
    return "?";
}

inline ProtocolConfig with_axis(ProtocolConfig cfg, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::kGroupSize:
            if (value < 1 || value != std::floor(value)) throw std::invalid_argument("sweep n: values must be positive integers");
            cfg.group_size = static_cast<std::uint64_t>(value);
            break;
        case SweepAxis::kErrorRate: cfg.channel.error_rate = value; break;
        case SweepAxis::kFraction:
            cfg.attack.fraction = value;
            if (cfg.attack.kind == AttackKind::kNone) cfg.attack.kind = AttackKind::kInterceptResend;
            break;
        case SweepAxis::kDistance: cfg.channel.length_km = value; break;
    }
    return cfg;
}

/// Per-point statistics. Errors compare all four recovered reals
/// (each party's view of the other's cos theta, cos phi) against the truth.
struct SweepRow {
    SweepAxis axis = SweepAxis::kGroupSize;
    double value = 0.0;
    std::uint64_t groups = 0;
    std::uint64_t group_size = 0;
    double transmittance = 1.0;
    std::uint64_t pairs_sent = 0;
    double median_abs_error = 0.0;
    double mean_abs_error = 0.0;
    double median_theta_error = 0.0;
    double first_digit_reliability = 0.0;
    double all_digits_reliability = 0.0;  // every one of the D digits matches
    double discard_rate = 0.0;
    std::uint64_t key_digits = 0;
    double key_rate = 0.0;
};

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
    return m;
}

/// The four (recovered, truth) pairs of one group.
inline std::array<std::pair<double, double>, 4> recovered_vs_truth(const GroupResult& g) {
    return {{{g.alice_recovered.cos_theta, std::cos(g.bob_params.theta)},
             {g.alice_recovered.cos_phi, std::cos(g.bob_params.phi)},
             {g.bob_recovered.cos_theta, std::cos(g.alice_params.theta)},
             {g.bob_recovered.cos_phi, std::cos(g.alice_params.phi)}}};
}

inline SweepRow summarize(const SessionReport& r, const ProtocolConfig& cfg, SweepAxis axis, double value) {
    SweepRow row;
    row.axis = axis;
    row.value = value;
    row.groups = r.groups.size();
    row.group_size = cfg.group_size;
    row.transmittance = transmittance(cfg.channel);
    row.pairs_sent = r.total_sent;
    std::vector<double> errs, theta_errs;
    std::uint64_t first_ok = 0, all_ok = 0, total = 0;
    for (const auto& g : r.groups) {
        const auto pairs = recovered_vs_truth(g);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto [rec, truth] = pairs[i];
            errs.push_back(std::abs(rec - truth));
            if (i % 2 == 0) theta_errs.push_back(std::abs(rec - truth));
            const std::string rd = value_digits(rec, cfg.digits_per_value);
            const std::string td = value_digits(truth, cfg.digits_per_value);
            first_ok += rd[0] == td[0];
            all_ok += rd == td;
            ++total;
        }
    }
    if (total > 0) {
        row.first_digit_reliability = static_cast<double>(first_ok) / static_cast<double>(total);
        row.all_digits_reliability = static_cast<double>(all_ok) / static_cast<double>(total);
        double s = 0.0;
        for (double e : errs) s += e;
        row.mean_abs_error = s / static_cast<double>(errs.size());
    }
    row.median_abs_error = median(errs);
    row.median_theta_error = median(theta_errs);
    row.discard_rate = r.discard_rate();
    row.key_digits = r.final_key.size();
    row.key_rate = r.efficiency();
    return row;
}

/// Each point reuses the base master seed so that points differ only in the
/// swept quantity.
inline std::vector<SweepRow> run_sweep(const ProtocolConfig& base, SweepAxis axis, const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("sweep: empty range");
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) {
        const ProtocolConfig cfg = with_axis(base, axis, v);
        rows.push_back(summarize(run_session(cfg), cfg, axis, v));
    }
    return rows;
}

/// start:stop:step, inclusive of stop up to rounding.
inline std::vector<double> parse_range(const std::string& text) {
    double start = 0, stop = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !is.eof())
        throw std::invalid_argument("range must look like start:stop:step, got '" + text + "'");
    if (step <= 0 || stop < start) throw std::invalid_argument("range '" + text + "' is empty");
    std::vector<double> out;
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

inline std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::istringstream is(list);
    std::string item;
    while (std::getline(is, item, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse value '" + item + "'");
        }
        if (used != item.size()) throw std::invalid_argument("cannot parse value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty value list");
    return out;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os.precision(10);
    os << "# " << kSweepCsvSchema << '\n';
    os << "axis,value,groups,group_size,transmittance,pairs_sent,median_abs_error,mean_abs_error,"
          "median_theta_error,first_digit_reliability,all_digits_reliability,discard_rate,key_digits,key_rate\n";
    for (const auto& r : rows) {
        os << to_string(r.axis) << ',' << r.value << ',' << r.groups << ',' << r.group_size << ',' << r.transmittance
           << ',' << r.pairs_sent << ',' << r.median_abs_error << ',' << r.mean_abs_error << ','
           << r.median_theta_error << ',' << r.first_digit_reliability << ',' << r.all_digits_reliability << ','
           << r.discard_rate << ',' << r.key_digits << ',' << r.key_rate << '\n';
    }
    return os.str();
}

// ---- closed form vs brute force -------------------------------------------

inline PreparationParams random_params(Rng& rng) {
    return {rng.uniform(0.0, std::numbers::pi / 2), rng.uniform(0.0, std::numbers::pi / 2)};
}

inline QuditPreparation random_qudit(Rng& rng, int d) {
    std::vector<cplx> c(d);
    double n2 = 0.0;
    for (auto& v : c) {
        v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        n2 += std::norm(v);
    }
    for (auto& v : c) v /= std::sqrt(n2);
    return {c};
}

struct OracleCheck {
    std::string name;
    std::size_t cases = 0;
    double max_deviation = 0.0;
    bool pass(double tol) const { return max_deviation < tol; }
};

struct OracleOptions {
    std::vector<int> dims{2, 3, 4, 5};
    std::size_t qubit_trials = 100;
    std::size_t qudit_trials = 25;
    std::size_t entangle_trials = 50;
    std::uint64_t seed = 1;
    bool inject_fault = false;  // flips one closed-form sign to prove the suite can fail
};

inline double max_abs_diff(const AmplitudeTable& lhs, const AmplitudeTable& rhs) {
    double m = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) m = std::max(m, std::abs(lhs.entries[i] - rhs.entries[i]));
    return m;
}

inline std::vector<OracleCheck> run_oracle_suite(const OracleOptions& opt) {
    std::vector<OracleCheck> out;
    Rng rng(opt.seed);

    OracleCheck v3{"qubit amplitudes (closed form vs expansion)"};
    OracleCheck p5{"conclusive probabilities (theta/phi form vs expansion)"};
    for (std::size_t t = 0; t < opt.qubit_trials; ++t) {
        const auto alice = random_params(rng), bob = random_params(rng);
        AmplitudeTable closed = closed_form_v_qubit(alice, bob);
        if (opt.inject_fault) closed.entries[qubit_index(0, 1, 1, 1)] *= -1.0;
        const AmplitudeTable brute = joint_bell_coefficients(honest_state(alice, bob), honest_pairing());
        v3.max_deviation = std::max(v3.max_deviation, max_abs_diff(closed, brute));
        const auto q = conclusive_probabilities(alice, bob);
        const auto qb = ConclusiveQuadruple::from_table(squared_magnitudes(brute));
        for (double d : {q.p1010 - qb.p1010, q.p1011 - qb.p1011, q.p1110 - qb.p1110, q.p1111 - qb.p1111})
            p5.max_deviation = std::max(p5.max_deviation, std::abs(d));
        ++v3.cases;
        ++p5.cases;
    }
    out.push_back(v3);
    out.push_back(p5);

    for (int d : opt.dims) {
        OracleCheck v8{"qudit amplitudes d=" + std::to_string(d)};
        for (std::size_t t = 0; t < opt.qudit_trials; ++t) {
            const auto a = random_qudit(rng, d), x = random_qudit(rng, d);
            const AmplitudeTable closed = closed_form_v_qudit(a, x, d);
            const AmplitudeTable brute = joint_bell_coefficients(qudit_honest_state(a, x), honest_pairing());
            v8.max_deviation = std::max(v8.max_deviation, max_abs_diff(closed, brute));
            ++v8.cases;
        }
        out.push_back(v8);
    }

    OracleCheck p10{"entangle-measure marginals (closed form vs six-site expansion)"};
    for (std::size_t t = 0; t < opt.entangle_trials; ++t) {
        const auto alice = random_params(rng), bob = random_params(rng), eve = random_params(rng);
        const ProbabilityTable closed = entangle_measure_probabilities(alice, bob, eve);
        const ProbabilityTable brute = marginalize_last_pair(squared_magnitudes(
            joint_bell_coefficients_6(entangle_measure_state(alice, bob, eve), entangle_measure_pairing())));
        for (std::size_t i = 0; i < closed.size(); ++i)
            p10.max_deviation = std::max(p10.max_deviation, std::abs(closed.entries[i] - brute.entries[i]));
        ++p10.cases;
    }
    out.push_back(p10);
    return out;
}

}  // namespace qnd
