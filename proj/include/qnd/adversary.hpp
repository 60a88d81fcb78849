// adversary.hpp
// Eve's two individual attacks on qubit B and what they do to the joint
// outcome table Alice and Bob see.
//
// intercept_resend: Eve keeps B, sends Bob half of her own Phi_00 pair (F),
//   and runs Bell measurements on (gamma, B) and (delta, E). A and F are
//   unentangled, so Alice's and Bob's outcomes are independent and uniform.
// entangle_measure: CNOT from B onto an ancilla E in |0>, then a Bell
//   measurement on (eta, E).
//
// Attacked pairs are chosen independently with probability `fraction`, so
// the table Alice and Bob sample is (1 - f) honest + f attacked.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "qnd/analytic.hpp"
#include "qnd/estimator.hpp"
#include "qnd/sampling.hpp"

namespace qnd {

enum class AttackKind { kNone, kInterceptResend, kEntangleMeasure };

inline const char* to_string(AttackKind k) {
    switch (k) {
        case AttackKind::kNone: return "none";
        case AttackKind::kInterceptResend: return "intercept_resend";
        case AttackKind::kEntangleMeasure: return "entangle_measure";
    }
    return "?";
}

inline AttackKind parse_attack_kind(const std::string& s) {
    if (s == "none") return AttackKind::kNone;
    if (s == "intercept_resend" || s == "intercept") return AttackKind::kInterceptResend;
    if (s == "entangle_measure" || s == "entangle") return AttackKind::kEntangleMeasure;
    throw std::invalid_argument("unknown attack kind '" + s + "'");
}

struct AttackConfig {
    AttackKind kind = AttackKind::kNone;
    double fraction = 0.0;
    PreparationParams eve_gamma{0.45, 0.35};  // (x', y') probe paired with B
    PreparationParams eve_delta{1.15, 0.55};  // (a', b') probe paired with E
    PreparationParams eve_eta{0.6, 0.25};     // (u, v) probe for the CNOT ancilla

    void validate() const {
        if (fraction < 0 || fraction > 1) throw std::invalid_argument("attack.fraction must be in [0,1]");
    }
};

/// The table Alice and Bob sample under `attack`.
inline ProbabilityTable attacked_probabilities(const ProbabilityTable& honest, const AttackConfig& attack,
                                               const PreparationParams& alice, const PreparationParams& bob) {
    attack.validate();
    if (attack.kind == AttackKind::kNone || attack.fraction == 0.0) return honest;

    const ProbabilityTable full = attack.kind == AttackKind::kInterceptResend
                                      ? uniform_qubit_table()
                                      : entangle_measure_probabilities(alice, bob, attack.eve_eta);
    ProbabilityTable out = honest;
    const double f = attack.fraction;
    for (std::size_t i = 0; i < out.size(); ++i) out.entries[i] = (1.0 - f) * honest.entries[i] + f * full.entries[i];
    return out;
}

/// Under full intercept-resend Eve's (gamma, B) measurement against Alice's
/// (alpha, A) is the honest scheme with Bob's preparation replaced by
/// gamma's; her (delta, E) measurement against Bob's (beta, F) is the honest
/// scheme with Alice's preparation replaced by delta's.
struct EveTables {
    ProbabilityTable alice_side;  // Alice (i,j) x Eve-gamma (k,l)
    ProbabilityTable bob_side;    // Eve-delta (i,j) x Bob (k,l)
};

inline EveTables intercept_eve_tables(const PreparationParams& alice, const PreparationParams& bob,
                                      const AttackConfig& attack) {
    return {honest_probabilities(alice, attack.eve_gamma), honest_probabilities(attack.eve_delta, bob)};
}

/// Alice's public announcements cross-tabulated with Eve's private outcomes.
struct EveTranscript {
    ConclusiveCounts alice_side;
    ConclusiveCounts bob_side;
};

inline EveTranscript simulate_intercept_transcript(const PreparationParams& alice, const PreparationParams& bob,
                                                   const AttackConfig& attack, std::uint64_t n, double eta,
                                                   std::uint64_t seed) {
    const auto tables = intercept_eve_tables(alice, bob, attack);
    return {ConclusiveCounts::from(sample_counts(tables.alice_side, n, eta, derive_seed(seed, 0))),
            ConclusiveCounts::from(sample_counts(tables.bob_side, n, eta, derive_seed(seed, 1)))};
}

struct EveEstimate {
    RecoveredValues alice_values;  // cos theta_a, cos phi_a
    RecoveredValues bob_values;    // cos theta_b, cos phi_b
    bool reliable = false;
    std::string reason;
};

inline constexpr std::uint64_t kDefaultEveMinConclusive = 20;

/// Eve inverts exactly as an honest party would, using her own probes as
/// the "own" preparation.
inline EveEstimate eve_recovered_values(const AttackConfig& attack, const ConclusiveQuadruple& alice_side,
                                        const ConclusiveQuadruple& bob_side,
                                        double theta_margin = kDefaultThetaMargin) {
    EveEstimate e;
    if (attack.kind != AttackKind::kInterceptResend || attack.fraction < 1.0) {
        e.reason = "not applicable: requires intercept_resend on every pair";
        return e;
    }
    e.alice_values = recover_partner(attack.eve_gamma, alice_side, theta_margin);
    e.bob_values = recover_partner(attack.eve_delta, bob_side, theta_margin);
    e.reliable = e.alice_values.reliable() && e.bob_values.reliable();
    if (!e.reliable) e.reason = "inversion left its domain";
    return e;
}

inline EveEstimate eve_recovered_values(const AttackConfig& attack, const EveTranscript& transcript,
                                        std::uint64_t min_conclusive = kDefaultEveMinConclusive,
                                        double theta_margin = kDefaultThetaMargin) {
    if (attack.kind != AttackKind::kInterceptResend || attack.fraction < 1.0) {
        EveEstimate e;
        e.reason = "not applicable: requires intercept_resend on every pair";
        return e;
    }
    auto conclusive = [](const ConclusiveCounts& c) { return c.n1010 + c.n1011 + c.n1110 + c.n1111; };
    if (transcript.alice_side.n_received == 0 || transcript.bob_side.n_received == 0) {
        EveEstimate e;
        e.reason = "no received pairs";
        return e;
    }
    EveEstimate e = eve_recovered_values(attack, estimate_probabilities(transcript.alice_side),
                                         estimate_probabilities(transcript.bob_side), theta_margin);
    if (conclusive(transcript.alice_side) < min_conclusive || conclusive(transcript.bob_side) < min_conclusive) {
        e.reliable = false;
        e.reason = "insufficient conclusive counts";
    }
    return e;
}

}  // namespace qnd
