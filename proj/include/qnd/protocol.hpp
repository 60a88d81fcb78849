// protocol.hpp
// One group of the two-way number distribution protocol and the
// divide-repeat session built from many groups.
//
// A group runs as follows. The source (Nature below) emits Phi_00 pairs
// until `group_size` of them reach Bob. Bob announces Phi_10 / Phi_11 /
// inconclusive for every received pair and Alice does the same for their
// partners. Both parties count the four jointly conclusive outcomes on the
// public record, run the accuracy and eavesdropping checks on them, recover
// the other side's two reals from their own preparation, publish whether
// their recovered cos(phi_a + phi_b) is clear of zero, and finally reveal
// and compare a few seed-chosen digit positions. If everything passes, the
// remaining positions are the group's contribution to the key.
//
// Party objects are constructed from their own preparation only and read
// nothing but the public Transcript, so neither side can see the other's
// secret parameters.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qnd/adversary.hpp"
#include "qnd/analytic.hpp"
#include "qnd/channel.hpp"
#include "qnd/estimator.hpp"
#include "qnd/sampling.hpp"

namespace qnd {

struct CheckTolerances {
    double accuracy_factor = 2.0;    // multiples of the binomial half-width
    double separation_factor = 2.0;  // multiples of the binomial half-width
    double phi_sum_floor = 0.1;      // min |cos(phi_a + phi_b)|, drawing and checking
    double theta_margin = kDefaultThetaMargin;
};

struct ProtocolConfig {
    std::uint64_t group_size = 100;
    std::uint64_t num_groups = 1;
    int digits_per_value = 1;
    int digits_sacrificed = 2;
    CheckTolerances tolerances;
    ChannelConfig channel;
    AttackConfig attack;
    std::uint64_t master_seed = 1;
    Normalization normalization = Normalization::kReceived;

    int digits_per_group() const { return 4 * digits_per_value; }

    void validate() const {
        if (group_size < 1) throw std::invalid_argument("protocol.group_size must be >= 1");
        if (digits_per_value < 1 || digits_per_value > 15)
            throw std::invalid_argument("protocol.digits_per_value must be in [1,15]");
        if (digits_sacrificed < 0 || digits_sacrificed > digits_per_group())
            throw std::invalid_argument("protocol.digits_sacrificed must be in [0, 4 * digits_per_value]");
        if (tolerances.accuracy_factor < 0) throw std::invalid_argument("tolerances.accuracy_factor must be >= 0");
        if (tolerances.separation_factor < 0) throw std::invalid_argument("tolerances.separation_factor must be >= 0");
        if (tolerances.phi_sum_floor < 0 || tolerances.phi_sum_floor >= 1)
            throw std::invalid_argument("tolerances.phi_sum_floor must be in [0,1)");
        if (tolerances.theta_margin < 0 || tolerances.theta_margin >= std::numbers::pi / 8)
            throw std::invalid_argument("tolerances.theta_margin must be in [0, pi/8)");
        channel.validate();
        attack.validate();
        if (transmittance(channel) <= 0.0) throw std::invalid_argument("channel transmittance is zero");
    }
};

// ---- checks ----------------------------------------------------------------

/// P_1010 must agree with P_1111 and P_1011 with P_1110, each within
/// `factor` binomial half-widths at the pair's mean probability.
inline bool accuracy_check(const ConclusiveQuadruple& q, std::uint64_t n, double factor = 2.0) {
    auto agree = [n, factor](double lhs, double rhs) {
        const double p = std::clamp(0.5 * (lhs + rhs), 0.0, 1.0);
        return std::abs(lhs - rhs) <= factor * accuracy_halfwidth(n, p);
    };
    return agree(q.p1010, q.p1111) && agree(q.p1011, q.p1110);
}

/// Fails (discard) when the averaged symmetric and antisymmetric
/// probabilities sit within `factor` half-widths of each other, which is
/// what either attack on every pair produces.
inline bool eavesdrop_check(const ConclusiveQuadruple& q, std::uint64_t n, double factor = 2.0) {
    const double p = std::clamp(q.sum() / 4.0, 0.0, 1.0);
    return std::abs(q.symmetric_mean() - q.antisymmetric_mean()) >= factor * accuracy_halfwidth(n, p);
}

inline bool phi_degeneracy_check(double recovered_cos_phi_sum, double floor) {
    return std::abs(recovered_cos_phi_sum) >= floor;
}

struct DigitComparison {
    bool pass = true;
    std::vector<int> positions;  // ascending, consumed by the comparison
    std::string alice_kept;
    std::string bob_kept;
};

/// Seed-chosen positions, identical for both parties.
inline std::vector<int> comparison_positions(int total, int num_to_compare, std::uint64_t position_seed) {
    if (num_to_compare < 0 || num_to_compare > total)
        throw std::invalid_argument("comparison_positions: cannot compare more digits than exist");
    std::vector<int> idx(total);
    for (int i = 0; i < total; ++i) idx[i] = i;
    Rng rng(position_seed);
    for (int i = 0; i < num_to_compare; ++i) {
        const auto j = i + static_cast<int>(rng.index(static_cast<std::size_t>(total - i)));
        std::swap(idx[i], idx[j]);
    }
    std::vector<int> chosen(idx.begin(), idx.begin() + num_to_compare);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

inline DigitComparison digit_comparison(const std::string& alice_digits, const std::string& bob_digits,
                                        int num_to_compare, std::uint64_t position_seed) {
    if (alice_digits.size() != bob_digits.size()) throw std::invalid_argument("digit_comparison: length mismatch");
    DigitComparison out;
    out.positions = comparison_positions(static_cast<int>(alice_digits.size()), num_to_compare, position_seed);
    for (int p : out.positions)
        if (alice_digits[p] != bob_digits[p]) out.pass = false;
    for (std::size_t i = 0; i < alice_digits.size(); ++i) {
        if (std::binary_search(out.positions.begin(), out.positions.end(), static_cast<int>(i))) continue;
        out.alice_kept.push_back(alice_digits[i]);
        out.bob_kept.push_back(bob_digits[i]);
    }
    return out;
}

/// Digits of a value that may have been clamped to exactly 1.
inline std::string value_digits(double v, int num_digits) {
    return extract_digits(std::clamp(v, 0.0, std::nextafter(1.0, 0.0)), num_digits);
}

// ---- parties ---------------------------------------------------------------

enum class Role { kAlice, kBob };

/// Everything said in public during one group.
struct Transcript {
    MeasurementRecord record;
    std::optional<bool> alice_estimate_ok;  // recovered values in domain and phi sum clear of zero
    std::optional<bool> bob_estimate_ok;
    std::vector<int> compared_positions;
    std::string alice_revealed;
    std::string bob_revealed;
};

class Party {
public:
    Party(Role role, PreparationParams own, int digits_per_value)
        : role_(role), own_(own), digits_per_value_(digits_per_value) {}

    Role role() const { return role_; }

    /// Own Bell outcomes, one per emitted pair; lost pairs have none.
    void measure(std::vector<std::optional<BellIndex>> outcomes) { outcomes_ = std::move(outcomes); }

    /// Step 2: Phi_10 / Phi_11 / inconclusive per received pair.
    void announce(Transcript& t) const {
        if (t.record.size() != outcomes_.size()) t.record.resize(outcomes_.size());
        for (std::size_t i = 0; i < outcomes_.size(); ++i) {
            const Announcement a =
                outcomes_[i] ? qnd::announce(outcomes_[i]->shift, outcomes_[i]->phase) : Announcement::kLost;
            (role_ == Role::kAlice ? t.record[i].alice : t.record[i].bob) = a;
        }
    }

    /// Step 3: estimate from the public record and invert for the partner.
    void estimate(const Transcript& t, Normalization norm, double theta_margin) {
        counts_ = ConclusiveCounts::from(t.record);
        quadruple_ = estimate_probabilities(counts_, norm);
        recovered_ = recover_partner(own_, quadruple_, theta_margin);
        const std::string own = value_digits(std::cos(own_.theta), digits_per_value_) +
                                value_digits(std::cos(own_.phi), digits_per_value_);
        const std::string partner = value_digits(recovered_.cos_theta, digits_per_value_) +
                                    value_digits(recovered_.cos_phi, digits_per_value_);
        // Layout: cos theta_a, cos phi_a, cos theta_b, cos phi_b.
        digits_ = role_ == Role::kAlice ? own + partner : partner + own;
    }

    void publish_estimate_status(Transcript& t, double phi_sum_floor) const {
        const bool ok = recovered_.reliable() && phi_degeneracy_check(recovered_.cos_phi_sum, phi_sum_floor);
        (role_ == Role::kAlice ? t.alice_estimate_ok : t.bob_estimate_ok) = ok;
    }

    /// Step 4: reveal the digits at the agreed positions.
    void reveal(Transcript& t) const {
        std::string out;
        for (int p : t.compared_positions) out.push_back(digits_[p]);
        (role_ == Role::kAlice ? t.alice_revealed : t.bob_revealed) = out;
    }

    const ConclusiveCounts& counts() const { return counts_; }
    const ConclusiveQuadruple& quadruple() const { return quadruple_; }
    const RecoveredValues& recovered() const { return recovered_; }
    const std::string& digits() const { return digits_; }

private:
    Role role_;
    PreparationParams own_;
    int digits_per_value_;
    std::vector<std::optional<BellIndex>> outcomes_;
    ConclusiveCounts counts_;
    ConclusiveQuadruple quadruple_;
    RecoveredValues recovered_;
    std::string digits_;
};

/// Source, channel and adversary: the only place both preparations meet.
class Nature {
public:
    Nature(const PreparationParams& alice, const PreparationParams& bob, const ProtocolConfig& cfg)
        : table_(outcome_table(alice, bob, cfg)), eta_(transmittance(cfg.channel)) {}

    static ProbabilityTable outcome_table(const PreparationParams& alice, const PreparationParams& bob,
                                          const ProtocolConfig& cfg) {
        const ProbabilityTable attacked =
            attacked_probabilities(honest_probabilities(alice, bob), cfg.attack, alice, bob);
        return apply_error_mixture(attacked, cfg.channel.error_rate);
    }

    const ProbabilityTable& table() const { return table_; }
    double eta() const { return eta_; }

    /// Emits pairs until `received` of them arrive at Bob.
    std::vector<PairDraw> emit_until_received(std::uint64_t received, std::uint64_t seed) const {
        const PairSampler sampler(table_, eta_);
        Rng rng(seed);
        std::vector<PairDraw> draws;
        draws.reserve(static_cast<std::size_t>(static_cast<double>(received) / eta_) + 16);
        std::uint64_t got = 0;
        while (got < received) {
            draws.push_back(sampler.draw(rng));
            if (draws.back().received) ++got;
        }
        return draws;
    }

private:
    ProbabilityTable table_;
    double eta_;
};

// ---- group and session -----------------------------------------------------

struct Verdicts {
    bool accuracy = false;
    bool eavesdrop = false;
    bool phi_degeneracy = false;
    bool estimates_reliable = false;  // folded into the accuracy discard reason
    bool digit_comparison = false;

    bool all_pass() const { return accuracy && estimates_reliable && eavesdrop && phi_degeneracy && digit_comparison; }
};

struct GroupResult {
    PreparationParams alice_params;
    PreparationParams bob_params;
    std::uint64_t n_sent = 0;
    std::uint64_t n_received = 0;
    ConclusiveCounts counts;
    ConclusiveQuadruple quadruple;
    RecoveredValues alice_recovered;  // Alice's estimate of Bob's reals
    RecoveredValues bob_recovered;    // Bob's estimate of Alice's reals
    std::string alice_digits;
    std::string bob_digits;
    std::vector<int> compared_positions;
    Verdicts verdicts;
    std::string kept_digits;      // Alice's copy; empty unless every verdict passes
    std::string bob_kept_digits;  // Bob's copy
    std::string discard_reason;   // empty when kept

    bool kept() const { return discard_reason.empty(); }
};

struct GroupOptions {
    /// Replace sampled frequencies by the exact outcome table (test hook).
    bool exact_probabilities = false;
};

inline const char* kReasonAccuracy = "accuracy";
inline const char* kReasonEavesdrop = "eavesdrop";
inline const char* kReasonPhiDegenerate = "phi_degeneracy";
inline const char* kReasonDigitMismatch = "digit_comparison";

inline GroupResult run_group(const PreparationParams& alice_params, const PreparationParams& bob_params,
                             const ProtocolConfig& cfg, std::uint64_t seed, GroupOptions opts = {}) {
    const Nature nature(alice_params, bob_params, cfg);
    Party alice(Role::kAlice, alice_params, cfg.digits_per_value);
    Party bob(Role::kBob, bob_params, cfg.digits_per_value);
    Transcript transcript;
    const CheckTolerances& tol = cfg.tolerances;

    GroupResult g;
    g.alice_params = alice_params;
    g.bob_params = bob_params;

    if (opts.exact_probabilities) {
        // Public record is bypassed; both parties see the exact quadruple.
        const auto q = ConclusiveQuadruple::from_table(nature.table());
        g.n_received = cfg.group_size;
        g.n_sent = static_cast<std::uint64_t>(std::ceil(static_cast<double>(cfg.group_size) / nature.eta()));
        g.quadruple = q;
        g.alice_recovered = recover_partner(alice_params, q, tol.theta_margin);
        g.bob_recovered = recover_partner(bob_params, q, tol.theta_margin);
        const int D = cfg.digits_per_value;
        g.alice_digits = value_digits(std::cos(alice_params.theta), D) + value_digits(std::cos(alice_params.phi), D) +
                         value_digits(g.alice_recovered.cos_theta, D) + value_digits(g.alice_recovered.cos_phi, D);
        g.bob_digits = value_digits(g.bob_recovered.cos_theta, D) + value_digits(g.bob_recovered.cos_phi, D) +
                       value_digits(std::cos(bob_params.theta), D) + value_digits(std::cos(bob_params.phi), D);
        transcript.alice_estimate_ok =
            g.alice_recovered.reliable() && phi_degeneracy_check(g.alice_recovered.cos_phi_sum, tol.phi_sum_floor);
        transcript.bob_estimate_ok =
            g.bob_recovered.reliable() && phi_degeneracy_check(g.bob_recovered.cos_phi_sum, tol.phi_sum_floor);
    } else {
        const auto draws = nature.emit_until_received(cfg.group_size, derive_seed(seed, 1));
        std::vector<std::optional<BellIndex>> alice_out(draws.size()), bob_out(draws.size());
        for (std::size_t i = 0; i < draws.size(); ++i) {
            if (!draws[i].received) continue;
            alice_out[i] = BellIndex{draws[i].alice_shift(), draws[i].alice_phase()};
            bob_out[i] = BellIndex{draws[i].bob_shift(), draws[i].bob_phase()};
        }
        alice.measure(std::move(alice_out));
        bob.measure(std::move(bob_out));

        bob.announce(transcript);
        alice.announce(transcript);

        alice.estimate(transcript, cfg.normalization, tol.theta_margin);
        bob.estimate(transcript, cfg.normalization, tol.theta_margin);
        alice.publish_estimate_status(transcript, tol.phi_sum_floor);
        bob.publish_estimate_status(transcript, tol.phi_sum_floor);

        g.counts = alice.counts();
        g.n_sent = g.counts.n_sent;
        g.n_received = g.counts.n_received;
        g.quadruple = alice.quadruple();
        g.alice_recovered = alice.recovered();
        g.bob_recovered = bob.recovered();
        g.alice_digits = alice.digits();
        g.bob_digits = bob.digits();
    }

    const std::uint64_t n_norm = cfg.normalization == Normalization::kReceived ? g.n_received : g.n_sent;
    g.verdicts.accuracy = accuracy_check(g.quadruple, n_norm, tol.accuracy_factor);
    g.verdicts.eavesdrop = eavesdrop_check(g.quadruple, n_norm, tol.separation_factor);
    g.verdicts.estimates_reliable = g.alice_recovered.reliable() && g.bob_recovered.reliable();
    g.verdicts.phi_degeneracy = phi_degeneracy_check(g.alice_recovered.cos_phi_sum, tol.phi_sum_floor) &&
                                phi_degeneracy_check(g.bob_recovered.cos_phi_sum, tol.phi_sum_floor);

    transcript.compared_positions =
        comparison_positions(cfg.digits_per_group(), cfg.digits_sacrificed, derive_seed(seed, 2));
    const DigitComparison cmp =
        digit_comparison(g.alice_digits, g.bob_digits, cfg.digits_sacrificed, derive_seed(seed, 2));
    if (!opts.exact_probabilities) {
        alice.reveal(transcript);
        bob.reveal(transcript);
        if ((transcript.alice_revealed == transcript.bob_revealed) != cmp.pass)
            throw std::logic_error("run_group: revealed digits disagree with comparison verdict");
    }
    g.compared_positions = cmp.positions;
    g.verdicts.digit_comparison = cmp.pass;

    if (!g.verdicts.accuracy || !g.verdicts.estimates_reliable) {
        g.discard_reason = kReasonAccuracy;
    } else if (!g.verdicts.eavesdrop) {
        g.discard_reason = kReasonEavesdrop;
    } else if (!g.verdicts.phi_degeneracy) {
        g.discard_reason = kReasonPhiDegenerate;
    } else if (!g.verdicts.digit_comparison) {
        g.discard_reason = kReasonDigitMismatch;
    } else {
        g.kept_digits = cmp.alice_kept;
        g.bob_kept_digits = cmp.bob_kept;
    }
    return g;
}

/// Uniform theta in (margin, pi/2 - margin) outside (pi/4 - margin, pi/4 + margin),
/// uniform phi in (0, pi/2); redrawn until |cos(phi_a + phi_b)| >= floor.
inline std::pair<PreparationParams, PreparationParams> draw_group_params(Rng& rng, const CheckTolerances& tol) {
    constexpr double half_pi = std::numbers::pi / 2;
    const double m = tol.theta_margin;
    auto theta = [&] {
        for (;;) {
            const double t = rng.uniform(m, half_pi - m);
            if (std::abs(t - std::numbers::pi / 4) >= m && t > 0.0) return t;
        }
    };
    auto phi = [&] {
        for (;;) {
            const double p = rng.uniform(0.0, half_pi);
            if (p > 0.0) return p;
        }
    };
    for (;;) {
        PreparationParams a{theta(), phi()};
        PreparationParams b{theta(), phi()};
        if (std::abs(std::cos(a.phi + b.phi)) >= tol.phi_sum_floor) return {a, b};
    }
}

struct SessionReport {
    std::vector<GroupResult> groups;
    std::string final_key;  // Alice's copy
    std::string bob_key;
    std::uint64_t total_sent = 0;
    std::uint64_t total_received = 0;
    std::uint64_t groups_kept = 0;
    std::uint64_t discarded_accuracy = 0;
    std::uint64_t discarded_eavesdrop = 0;
    std::uint64_t discarded_phi = 0;
    std::uint64_t discarded_digits = 0;

    bool keys_agree() const { return final_key == bob_key; }
    std::uint64_t groups_discarded() const { return groups.size() - groups_kept; }
    double discard_rate() const {
        return groups.empty() ? 0.0 : static_cast<double>(groups_discarded()) / static_cast<double>(groups.size());
    }
    double efficiency() const {
        return total_sent == 0 ? 0.0 : static_cast<double>(final_key.size()) / static_cast<double>(total_sent);
    }
};

inline SessionReport run_session(const ProtocolConfig& cfg, GroupOptions opts = {}) {
    cfg.validate();
    SessionReport r;
    r.groups.reserve(cfg.num_groups);
    for (std::uint64_t gi = 0; gi < cfg.num_groups; ++gi) {
        const std::uint64_t gseed = derive_seed(cfg.master_seed, gi);
        Rng param_rng(derive_seed(gseed, 0));
        const auto [alice, bob] = draw_group_params(param_rng, cfg.tolerances);
        GroupResult g = run_group(alice, bob, cfg, gseed, opts);

        r.total_sent += g.n_sent;
        r.total_received += g.n_received;
        if (g.kept()) {
            ++r.groups_kept;
            r.final_key += g.kept_digits;
            r.bob_key += g.bob_kept_digits;
        } else if (g.discard_reason == kReasonAccuracy) {
            ++r.discarded_accuracy;
        } else if (g.discard_reason == kReasonEavesdrop) {
            ++r.discarded_eavesdrop;
        } else if (g.discard_reason == kReasonPhiDegenerate) {
            ++r.discarded_phi;
        } else {
            ++r.discarded_digits;
        }
        r.groups.push_back(std::move(g));
    }
    return r;
}

}  // namespace qnd
