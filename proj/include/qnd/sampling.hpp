// sampling.hpp
// Seeded Monte Carlo over joint Bell-outcome tables.
//
// Random source: std::mt19937_64 (its output sequence is fixed by the C++
// standard), seeded through SplitMix64. Uniform doubles take the top 53 bits
// of one engine output, so no std:: distribution (whose algorithms are
// implementation-defined) sits between the engine and the draws. Outcomes
// are drawn by inverse CDF over the table in flat (lexicographic ijkl)
// order. Together these make a run reproducible bit-for-bit on any
// conforming platform.
//
// Seed splitting: derive_seed(master, stream) is the SplitMix64 finalizer
// applied to master + (stream + 1) * 0x9E3779B97F4A7C15. Groups, sweep
// points and repetitions each take their own stream index.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "qnd/qmath.hpp"

namespace qnd {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64_mix(master + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64_mix(seed)) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

private:
    std::mt19937_64 engine_;
};

inline constexpr std::size_t kQubitOutcomes = 16;
inline constexpr double kTableNormTolerance = 1e-9;

/// One emitted pair: whether B survived the channel, and if so the joint
/// outcome as a flat qubit index (Alice's Phi_ij, Bob's Phi_kl).
struct PairDraw {
    bool received = false;
    std::uint8_t joint = 0;

    int alice_shift() const { return (joint >> 3) & 1; }
    int alice_phase() const { return (joint >> 2) & 1; }
    int bob_shift() const { return (joint >> 1) & 1; }
    int bob_phase() const { return joint & 1; }

    friend bool operator==(const PairDraw&, const PairDraw&) = default;
};

/// Only Phi_10 and Phi_11 are resolvable with linear optics.
inline bool is_conclusive(int shift) { return shift == 1; }

struct CountTable {
    std::array<std::uint64_t, kQubitOutcomes> counts{};
    std::uint64_t n_sent = 0;
    std::uint64_t n_received = 0;
    std::uint64_t alice_conclusive = 0;
    std::uint64_t alice_inconclusive = 0;
    std::uint64_t bob_conclusive = 0;
    std::uint64_t bob_inconclusive = 0;

    void add(const PairDraw& d) {
        ++n_sent;
        if (!d.received) return;
        ++n_received;
        ++counts[d.joint];
        (is_conclusive(d.alice_shift()) ? alice_conclusive : alice_inconclusive)++;
        (is_conclusive(d.bob_shift()) ? bob_conclusive : bob_inconclusive)++;
    }

    std::uint64_t at(int i, int j, int k, int l) const { return counts[qubit_index(i, j, k, l)]; }

    friend bool operator==(const CountTable&, const CountTable&) = default;
};

enum class Announcement : std::uint8_t { kPhi10, kPhi11, kInconclusive, kLost };

inline const char* to_string(Announcement a) {
    switch (a) {
        case Announcement::kPhi10: return "Phi10";
        case Announcement::kPhi11: return "Phi11";
        case Announcement::kInconclusive: return "inconclusive";
        case Announcement::kLost: return "lost";
    }
    return "?";
}

inline Announcement announce(int shift, int phase) {
    if (!is_conclusive(shift)) return Announcement::kInconclusive;
    return phase == 0 ? Announcement::kPhi10 : Announcement::kPhi11;
}

struct AnnouncementPair {
    Announcement alice = Announcement::kLost;
    Announcement bob = Announcement::kLost;

    friend bool operator==(const AnnouncementPair&, const AnnouncementPair&) = default;
};

/// Public record, one entry per emitted pair. Alice only measures partners
/// of pairs Bob received, so a lost pair is lost on both sides.
using MeasurementRecord = std::vector<AnnouncementPair>;

inline AnnouncementPair to_announcement(const PairDraw& d) {
    if (!d.received) return {};
    return {announce(d.alice_shift(), d.alice_phase()), announce(d.bob_shift(), d.bob_phase())};
}

inline MeasurementRecord to_announcements(const std::vector<PairDraw>& draws) {
    MeasurementRecord rec;
    rec.reserve(draws.size());
    for (const auto& d : draws) rec.push_back(to_announcement(d));
    return rec;
}

/// Inverse-CDF draws from a 16-entry table with Bernoulli(eta) loss.
class PairSampler {
public:
    PairSampler(const ProbabilityTable& table, double eta) : eta_(eta) {
        if (table.size() != kQubitOutcomes) throw std::invalid_argument("PairSampler: need a 16-entry table");
        if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("PairSampler: eta outside [0,1]");
        double acc = 0.0;
        for (std::size_t i = 0; i < kQubitOutcomes; ++i) {
            if (table.entries[i] < 0.0) throw std::invalid_argument("PairSampler: negative probability");
            acc += table.entries[i];
            cumulative_[i] = acc;
            if (table.entries[i] > 0.0) last_nonzero_ = static_cast<std::uint8_t>(i);
        }
        if (std::abs(acc - 1.0) > kTableNormTolerance) throw std::invalid_argument("PairSampler: table is not normalized");
    }

    bool survives(Rng& rng) const { return eta_ >= 1.0 || rng.uniform() < eta_; }

    std::uint8_t outcome(Rng& rng) const {
        const double u = rng.uniform();
        for (std::size_t i = 0; i < kQubitOutcomes; ++i)
            if (u < cumulative_[i]) return static_cast<std::uint8_t>(i);
        return last_nonzero_;
    }

    PairDraw draw(Rng& rng) const {
        if (!survives(rng)) return {false, 0};
        return {true, outcome(rng)};
    }

private:
    double eta_;
    std::array<double, kQubitOutcomes> cumulative_{};
    std::uint8_t last_nonzero_ = 0;
};

inline std::vector<PairDraw> sample_draws(const ProbabilityTable& table, std::uint64_t n, double eta,
                                          std::uint64_t seed) {
    const PairSampler sampler(table, eta);
    Rng rng(seed);
    std::vector<PairDraw> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(sampler.draw(rng));
    return out;
}

inline CountTable tally(const std::vector<PairDraw>& draws) {
    CountTable c;
    for (const auto& d : draws) c.add(d);
    return c;
}

/// Same draw sequence as sample_draws, without storing it.
inline CountTable sample_counts(const ProbabilityTable& table, std::uint64_t n, double eta, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_counts: n must be >= 1");
    const PairSampler sampler(table, eta);
    Rng rng(seed);
    CountTable c;
    for (std::uint64_t i = 0; i < n; ++i) c.add(sampler.draw(rng));
    return c;
}

/// Per-pair attack simulation: each surviving pair is attacked independently
/// with probability `fraction` and then drawn from the attacked table,
/// otherwise from the honest one.
inline CountTable sample_counts_per_pair_attack(const ProbabilityTable& honest, const ProbabilityTable& attacked,
                                                double fraction, std::uint64_t n, double eta, std::uint64_t seed) {
    if (fraction < 0 || fraction > 1) throw std::invalid_argument("attack fraction outside [0,1]");
    const PairSampler honest_sampler(honest, eta);
    const PairSampler attacked_sampler(attacked, eta);
    Rng rng(seed);
    CountTable c;
    for (std::uint64_t i = 0; i < n; ++i) {
        if (!honest_sampler.survives(rng)) {
            c.add({false, 0});
            continue;
        }
        const bool hit = rng.uniform() < fraction;
        c.add({true, (hit ? attacked_sampler : honest_sampler).outcome(rng)});
    }
    return c;
}

}  // namespace qnd
