// analytic.hpp
// Closed-form Bell-outcome amplitudes and probabilities for the two-way
// number distribution scheme: qubit tables, the qudit generalization, the
// conclusive-outcome probabilities in (theta, phi) form, and the
// entangle-measure marginals. The composite states the brute-force oracle
// expands are built here as well, from qmath primitives only.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qnd/qmath.hpp"

namespace qnd {

/// theta, phi in radians. Amplitudes are (cos theta, sin theta e^{i phi}).
struct PreparationParams {
    double theta = 0.0;
    double phi = 0.0;

    cplx zero_amplitude() const { return std::cos(theta); }
    cplx one_amplitude() const { return std::polar(std::sin(theta), phi); }

    PureState state() const { return PureState::site({zero_amplitude(), one_amplitude()}); }

    friend bool operator==(const PreparationParams&, const PreparationParams&) = default;
};

inline constexpr double kDefaultThetaMargin = 0.1;

/// Both angles strictly inside (0, pi/2) and theta at least `theta_margin`
/// from pi/4, where inverting the conclusive probabilities degenerates.
inline bool is_admissible(const PreparationParams& p, double theta_margin = kDefaultThetaMargin) {
    constexpr double half_pi = std::numbers::pi / 2;
    return p.theta > 0 && p.theta < half_pi && p.phi > 0 && p.phi < half_pi &&
           std::abs(p.theta - std::numbers::pi / 4) >= theta_margin;
}

/// A qudit preparation sum_i c_i |i>.
struct QuditPreparation {
    std::vector<cplx> coeffs;

    int dim() const { return static_cast<int>(coeffs.size()); }

    PureState state() const { return PureState::site(coeffs); }
};

/// The four probabilities accessible with linear optics.
struct ConclusiveQuadruple {
    double p1010 = 0.0;
    double p1011 = 0.0;
    double p1110 = 0.0;
    double p1111 = 0.0;

    /// (P_1010 + P_1111) / 2
    double symmetric_mean() const { return 0.5 * (p1010 + p1111); }
    /// (P_1011 + P_1110) / 2
    double antisymmetric_mean() const { return 0.5 * (p1011 + p1110); }
    double sum() const { return p1010 + p1011 + p1110 + p1111; }

    static ConclusiveQuadruple from_table(const ProbabilityTable& t) {
        if (t.dim != 2 || t.arity != 2) throw std::invalid_argument("ConclusiveQuadruple: need a 16-entry qubit table");
        return {t.entries[qubit_index(1, 0, 1, 0)], t.entries[qubit_index(1, 0, 1, 1)],
                t.entries[qubit_index(1, 1, 1, 0)], t.entries[qubit_index(1, 1, 1, 1)]};
    }

    friend bool operator==(const ConclusiveQuadruple&, const ConclusiveQuadruple&) = default;
};

// ---- composite states ------------------------------------------------------

/// Sites: alpha, beta, A, B. Alice measures (alpha, A), Bob (beta, B).
inline const Pairing& honest_pairing() {
    static const Pairing p{{0, 2}, {1, 3}};
    return p;
}

/// Sites: alpha, beta, eta, A, B, E. Pairs (alpha,A), (beta,B), (eta,E).
inline const Pairing& entangle_measure_pairing() {
    static const Pairing p{{0, 3}, {1, 4}, {2, 5}};
    return p;
}

/// |psi>_alpha |psi>_beta |Phi_00>_AB
inline PureState honest_state(const PreparationParams& alice, const PreparationParams& bob) {
    return tensor({alice.state(), bob.state(), bell_state(2, {0, 0})});
}

inline PureState qudit_honest_state(const QuditPreparation& alice, const QuditPreparation& bob) {
    if (alice.dim() != bob.dim()) throw std::invalid_argument("qudit_honest_state: dimension mismatch");
    return tensor({alice.state(), bob.state(), bell_state(alice.dim(), {0, 0})});
}

/// Alpha, beta and Eve's eta probe, times (|000> + |111>)_ABE / sqrt 2: the
/// source pair after Eve's CNOT from B onto an ancilla prepared in |0>.
inline PureState entangle_measure_state(const PreparationParams& alice, const PreparationParams& bob,
                                        const PreparationParams& eve) {
    const double h = 1.0 / std::numbers::sqrt2;
    std::vector<cplx> ghz(8);
    ghz[0] = h;
    ghz[7] = h;
    return tensor({alice.state(), bob.state(), eve.state(), PureState(2, 3, std::move(ghz))});
}

// ---- closed forms ----------------------------------------------------------

/// V_ijkl for the qubit scheme. Four value classes:
///   (xa+yb) at 0000 0101 1010 1111
///   (xa-yb) at 0001 0100 1011 1110
///   (xb+ya) at 0010 1000, negated at 0111 1101
///   (xb-ya) at 0011 1001, negated at 0110 1100
/// all divided by 2 sqrt 2.
inline AmplitudeTable closed_form_v_qubit(const PreparationParams& alice, const PreparationParams& bob) {
    const cplx a = alice.zero_amplitude(), b = alice.one_amplitude();
    const cplx x = bob.zero_amplitude(), y = bob.one_amplitude();
    const double k = 1.0 / (2.0 * std::numbers::sqrt2);
    const cplx same_plus = k * (x * a + y * b);
    const cplx same_minus = k * (x * a - y * b);
    const cplx cross_plus = k * (x * b + y * a);
    const cplx cross_minus = k * (x * b - y * a);

    AmplitudeTable t(2, 2);
    auto set = [&t](int i, int j, int kk, int l, cplx v) { t.entries[qubit_index(i, j, kk, l)] = v; };
    for (auto [i, j, kk, l] : std::array<std::array<int, 4>, 4>{{{0, 0, 0, 0}, {0, 1, 0, 1}, {1, 0, 1, 0}, {1, 1, 1, 1}}})
        set(i, j, kk, l, same_plus);
    for (auto [i, j, kk, l] : std::array<std::array<int, 4>, 4>{{{0, 0, 0, 1}, {0, 1, 0, 0}, {1, 0, 1, 1}, {1, 1, 1, 0}}})
        set(i, j, kk, l, same_minus);
    set(0, 0, 1, 0, cross_plus);
    set(1, 0, 0, 0, cross_plus);
    set(0, 1, 1, 1, -cross_plus);
    set(1, 1, 0, 1, -cross_plus);
    set(0, 0, 1, 1, cross_minus);
    set(1, 0, 0, 1, cross_minus);
    set(0, 1, 1, 0, -cross_minus);
    set(1, 1, 0, 0, -cross_minus);
    return t;
}

/// V for d-level preparations. With Alice's label (s, p) and Bob's (s', p'):
///   V = omega^{s p + s' p'} / (d sqrt d) * sum_m omega^{-(p + p') m} a_{m-s} x_{m-s'}
/// indices mod d. The shifts select the preparation components, the phases
/// enter the exponent; at d = 2 this reproduces closed_form_v_qubit exactly,
/// signs included.
inline AmplitudeTable closed_form_v_qudit(const QuditPreparation& alice, const QuditPreparation& bob, int d) {
    if (alice.dim() != d || bob.dim() != d) throw std::invalid_argument("closed_form_v_qudit: preparation length != d");
    if (d < 2) throw std::invalid_argument("closed_form_v_qudit: d must be >= 2");
    const double scale = 1.0 / (d * std::sqrt(static_cast<double>(d)));
    auto mod = [d](int v) { return ((v % d) + d) % d; };

    AmplitudeTable t(d, 2);
    for (int s = 0; s < d; ++s)
        for (int p = 0; p < d; ++p)
            for (int s2 = 0; s2 < d; ++s2)
                for (int p2 = 0; p2 < d; ++p2) {
                    cplx sum = 0.0;
                    for (int m = 0; m < d; ++m) {
                        sum += root_of_unity(d, -static_cast<long long>(p + p2) * m) * alice.coeffs[mod(m - s)] *
                               bob.coeffs[mod(m - s2)];
                    }
                    t.entries[((static_cast<std::size_t>(s) * d + p) * d + s2) * d + p2] =
                        scale * root_of_unity(d, static_cast<long long>(s) * p + static_cast<long long>(s2) * p2) * sum;
                }
    return t;
}

/// |closed_form_v_qubit|^2 as a 16-entry table.
inline ProbabilityTable honest_probabilities(const PreparationParams& alice, const PreparationParams& bob) {
    return squared_magnitudes(closed_form_v_qubit(alice, bob));
}

/// P_1010 = P_1111 = (1/8)[c_a^2 c_b^2 + s_a^2 s_b^2 + 2 c_a c_b s_a s_b cos(phi_a + phi_b)]
/// P_1011 = P_1110 = same with the cross term subtracted.
inline ConclusiveQuadruple conclusive_probabilities(const PreparationParams& alice, const PreparationParams& bob) {
    const double ca = std::cos(alice.theta), sa = std::sin(alice.theta);
    const double cb = std::cos(bob.theta), sb = std::sin(bob.theta);
    const double base = ca * ca * cb * cb + sa * sa * sb * sb;
    const double cross = 2.0 * ca * cb * sa * sb * std::cos(alice.phi + bob.phi);
    const double sym = (base + cross) / 8.0;
    const double asym = (base - cross) / 8.0;
    return {sym, asym, asym, sym};
}

/// Alice-Bob outcome probabilities under the entangle-measure attack on every
/// pair. Same-shift outcomes get (|xa|^2 + |yb|^2)/8, cross-shift outcomes
/// (|xb|^2 + |ya|^2)/8; Eve's probe drops out entirely.
inline ProbabilityTable entangle_measure_probabilities(const PreparationParams& alice, const PreparationParams& bob,
                                                       const PreparationParams& /*eve*/ = {}) {
    const double a2 = std::norm(alice.zero_amplitude()), b2 = std::norm(alice.one_amplitude());
    const double x2 = std::norm(bob.zero_amplitude()), y2 = std::norm(bob.one_amplitude());
    const double same = (x2 * a2 + y2 * b2) / 8.0;
    const double cross = (x2 * b2 + y2 * a2) / 8.0;
    ProbabilityTable t(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) t.entries[qubit_index(i, j, k, l)] = (i == k) ? same : cross;
    return t;
}

inline ProbabilityTable uniform_qubit_table() {
    ProbabilityTable t(2, 2);
    for (auto& e : t.entries) e = 1.0 / 16.0;
    return t;
}

}  // namespace qnd
