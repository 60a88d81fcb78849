// qmath.hpp
// Dense pure states over d-level sites, tensor products and the generalized
// Bell basis. Everything in the closed-form layer is checked against the
// brute-force expansion implemented here.
//
// Index convention: site-major (big-endian). For sites s_0 ... s_{n-1} with
// digits q_0 ... q_{n-1}, the amplitude index is sum_k q_k * d^(n-1-k), so
// the leftmost ket factor is the most significant digit.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qnd {

using cplx = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr int kMaxDim = 5;
inline constexpr std::size_t kMaxAmplitudes = 15625;  // 5^6

/// Integer power with no floating point involved.
inline std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

/// e^{i 2 pi k / d}, with k reduced mod d first so that repeated powers stay
/// exact at the table points.
inline cplx root_of_unity(int d, long long k) {
    long long r = k % d;
    if (r < 0) r += d;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / d;
    return {std::cos(angle), std::sin(angle)};
}

/// Generalized Bell label: `shift` is the j in |q>|q+j>, `phase` is the l in
/// omega^{lq}. For d = 2, (shift, phase) = (0,0),(0,1),(1,0),(1,1) are
/// Phi+, Phi-, Psi+, Psi-.
struct BellIndex {
    int shift = 0;
    int phase = 0;

    BellIndex() = default;
    BellIndex(int s, int p) : shift(s), phase(p) {}

    static BellIndex reduced(int s, int p, int d) {
        auto mod = [d](int v) { return ((v % d) + d) % d; };
        return {mod(s), mod(p)};
    }

    friend bool operator==(const BellIndex&, const BellIndex&) = default;
};

class PureState {
public:
    /// Validates length d^n and unit norm within kNormTolerance.
    PureState(int dim_per_site, int num_sites, std::vector<cplx> amplitudes)
        : dim_(dim_per_site), sites_(num_sites), amps_(std::move(amplitudes)) {
        validate_shape(dim_, sites_, amps_.size());
        const double n2 = norm_squared();
        if (std::abs(n2 - 1.0) > kNormTolerance) {
            throw std::invalid_argument("PureState: squared norm " + std::to_string(n2) +
                                        " is not 1");
        }
    }

    /// Rescales to unit norm; throws on the zero vector.
    static PureState normalized(int dim_per_site, int num_sites, std::vector<cplx> amplitudes) {
        validate_shape(dim_per_site, num_sites, amplitudes.size());
        double n2 = 0.0;
        for (const auto& a : amplitudes) n2 += std::norm(a);
        if (n2 <= 0.0) throw std::invalid_argument("PureState: zero vector");
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& a : amplitudes) a *= inv;
        return PureState(dim_per_site, num_sites, std::move(amplitudes));
    }

    static PureState basis(int dim_per_site, std::span<const int> digits) {
        const int n = static_cast<int>(digits.size());
        std::vector<cplx> amps(ipow(dim_per_site, n));
        std::size_t idx = 0;
        for (int q : digits) {
            if (q < 0 || q >= dim_per_site) throw std::invalid_argument("PureState::basis: digit out of range");
            idx = idx * dim_per_site + q;
        }
        amps[idx] = 1.0;
        return PureState(dim_per_site, n, std::move(amps));
    }

    /// Single site a|0> + b|1> (+ ...).
    static PureState site(std::vector<cplx> coeffs) {
        const int d = static_cast<int>(coeffs.size());
        return PureState(d, 1, std::move(coeffs));
    }

    int dim() const { return dim_; }
    int num_sites() const { return sites_; }
    std::size_t size() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

private:
    static void validate_shape(int d, int n, std::size_t len) {
        if (d < 2) throw std::invalid_argument("PureState: dim_per_site must be >= 2");
        if (n < 1) throw std::invalid_argument("PureState: num_sites must be >= 1");
        if (len != ipow(d, n)) throw std::invalid_argument("PureState: amplitude count != d^n");
    }

    int dim_;
    int sites_;
    std::vector<cplx> amps_;
};

/// <lhs|rhs>
inline cplx inner(const PureState& lhs, const PureState& rhs) {
    if (lhs.dim() != rhs.dim() || lhs.num_sites() != rhs.num_sites()) {
        throw std::invalid_argument("inner: shape mismatch");
    }
    cplx s = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) s += std::conj(lhs[i]) * rhs[i];
    return s;
}

/// (1/sqrt d) sum_q omega^{phase q} |q>|q + shift>
inline PureState bell_state(int d, BellIndex idx) {
    if (d < 2) throw std::invalid_argument("bell_state: d must be >= 2");
    if (idx.shift < 0 || idx.shift >= d || idx.phase < 0 || idx.phase >= d) {
        throw std::invalid_argument("bell_state: index out of range");
    }
    std::vector<cplx> amps(static_cast<std::size_t>(d) * d);
    const double inv = 1.0 / std::sqrt(static_cast<double>(d));
    for (int q = 0; q < d; ++q) {
        amps[static_cast<std::size_t>(q) * d + (q + idx.shift) % d] =
            inv * root_of_unity(d, static_cast<long long>(idx.phase) * q);
    }
    return PureState(d, 2, std::move(amps));
}

/// Kronecker product, leftmost factor most significant.
inline PureState tensor(std::span<const PureState> states) {
    if (states.empty()) throw std::invalid_argument("tensor: empty list");
    const int d = states.front().dim();
    int sites = 0;
    std::size_t len = 1;
    for (const auto& s : states) {
        if (s.dim() != d) throw std::invalid_argument("tensor: mismatched dim_per_site");
        sites += s.num_sites();
        len *= s.size();
    }
    if (len > kMaxAmplitudes) throw std::invalid_argument("tensor: composite exceeds supported size");

    std::vector<cplx> acc{1.0};
    for (const auto& s : states) {
        std::vector<cplx> next(acc.size() * s.size());
        for (std::size_t i = 0; i < acc.size(); ++i)
            for (std::size_t j = 0; j < s.size(); ++j) next[i * s.size() + j] = acc[i] * s[j];
        acc = std::move(next);
    }
    return PureState(d, sites, std::move(acc));
}

inline PureState tensor(std::initializer_list<PureState> states) {
    return tensor(std::span<const PureState>(states.begin(), states.size()));
}

/// Ordered site pair (first, second): the Bell state is laid out as
/// |q>_first |q + shift>_second.
using SitePair = std::pair<int, int>;
using Pairing = std::vector<SitePair>;

/// Coefficients of a state in a product of Bell bases, or squared
/// magnitudes of them. Entries are stored with the Bell labels of pair 0
/// most significant: flat = ((s0*d + p0)*d + s1)*d + p1 ... For qubits and
/// two pairs this is the lexicographic (i,j,k,l) order, 1010 -> 10.
template <typename T>
struct BellTable {
    int dim = 2;
    int arity = 2;
    std::vector<T> entries;

    BellTable() = default;
    BellTable(int d, int num_pairs)
        : dim(d), arity(num_pairs), entries(ipow(static_cast<std::size_t>(d) * d, num_pairs)) {}

    std::size_t size() const { return entries.size(); }

    std::size_t flat(std::span<const BellIndex> labels) const {
        if (static_cast<int>(labels.size()) != arity) throw std::invalid_argument("BellTable: wrong arity");
        std::size_t f = 0;
        for (const auto& b : labels) f = (f * dim + b.shift) * dim + b.phase;
        return f;
    }

    std::vector<BellIndex> labels(std::size_t flat_index) const {
        std::vector<BellIndex> out(arity);
        for (int p = arity - 1; p >= 0; --p) {
            const int phase = static_cast<int>(flat_index % dim);
            flat_index /= dim;
            const int shift = static_cast<int>(flat_index % dim);
            flat_index /= dim;
            out[p] = {shift, phase};
        }
        return out;
    }

    T& at(std::initializer_list<BellIndex> labels) {
        return entries[flat(std::span<const BellIndex>(labels.begin(), labels.size()))];
    }
    const T& at(std::initializer_list<BellIndex> labels) const {
        return entries[flat(std::span<const BellIndex>(labels.begin(), labels.size()))];
    }
};

using AmplitudeTable = BellTable<cplx>;
using ProbabilityTable = BellTable<double>;

/// Flat index of the qubit outcome "ijkl": Alice's Phi_ij, Bob's Phi_kl.
constexpr std::size_t qubit_index(int i, int j, int k, int l) {
    return static_cast<std::size_t>(i * 8 + j * 4 + k * 2 + l);
}

namespace detail {

inline void validate_pairing(const Pairing& pairing, int num_sites) {
    if (static_cast<int>(pairing.size()) * 2 != num_sites) {
        throw std::invalid_argument("pairing does not cover every site");
    }
    std::vector<bool> seen(num_sites, false);
    for (const auto& [a, b] : pairing) {
        for (int s : {a, b}) {
            if (s < 0 || s >= num_sites) throw std::invalid_argument("pairing names a site out of range");
            if (seen[s]) throw std::invalid_argument("pairing has overlapping sites");
            seen[s] = true;
        }
    }
}

}  // namespace detail

/// Brute-force expansion: entry for labels (b_0, ..., b_{k-1}) is
/// <Phi_{b_0}|<Phi_{b_1}|... |state> with pair p placed on pairing[p].
/// Works for any number of pairs; cost d^{3k}.
inline AmplitudeTable bell_coefficients(const PureState& state, const Pairing& pairing) {
    const int n = state.num_sites();
    const int d = state.dim();
    detail::validate_pairing(pairing, n);
    const int k = n / 2;

    std::vector<std::size_t> weight(n);
    for (int s = 0; s < n; ++s) weight[s] = ipow(d, n - 1 - s);

    AmplitudeTable table(d, k);
    const double scale = std::pow(static_cast<double>(d), -0.5 * k);
    const std::size_t q_count = ipow(d, k);
    std::vector<int> q(k);

    for (std::size_t f = 0; f < table.size(); ++f) {
        const auto labels = table.labels(f);
        cplx sum = 0.0;
        for (std::size_t qi = 0; qi < q_count; ++qi) {
            std::size_t rest = qi;
            for (int p = k - 1; p >= 0; --p) {
                q[p] = static_cast<int>(rest % d);
                rest /= d;
            }
            std::size_t amp_index = 0;
            long long phase = 0;
            for (int p = 0; p < k; ++p) {
                amp_index += weight[pairing[p].first] * q[p];
                amp_index += weight[pairing[p].second] * ((q[p] + labels[p].shift) % d);
                phase += static_cast<long long>(labels[p].phase) * q[p];
            }
            // bra: conjugate of omega^{phase}
            sum += root_of_unity(d, -phase) * state[amp_index];
        }
        table.entries[f] = scale * sum;
    }
    return table;
}

/// Four-site expansion V_ijkl.
inline AmplitudeTable joint_bell_coefficients(const PureState& state, const Pairing& pairing) {
    if (state.num_sites() != 4) throw std::invalid_argument("joint_bell_coefficients: need 4 sites");
    return bell_coefficients(state, pairing);
}

/// Six-site expansion V_ijklmn.
inline AmplitudeTable joint_bell_coefficients_6(const PureState& state, const Pairing& pairing) {
    if (state.num_sites() != 6) throw std::invalid_argument("joint_bell_coefficients_6: need 6 sites");
    return bell_coefficients(state, pairing);
}

/// Product of Bell states laid out on `pairing`; inverse of bell_coefficients.
inline PureState bell_product_state(int d, const Pairing& pairing, std::span<const BellIndex> labels) {
    const int n = static_cast<int>(pairing.size()) * 2;
    detail::validate_pairing(pairing, n);
    if (labels.size() != pairing.size()) throw std::invalid_argument("bell_product_state: label count");
    const int k = static_cast<int>(pairing.size());

    std::vector<std::size_t> weight(n);
    for (int s = 0; s < n; ++s) weight[s] = ipow(d, n - 1 - s);

    std::vector<cplx> amps(ipow(d, n));
    const double scale = std::pow(static_cast<double>(d), -0.5 * k);
    const std::size_t q_count = ipow(d, k);
    for (std::size_t qi = 0; qi < q_count; ++qi) {
        std::size_t rest = qi;
        std::size_t amp_index = 0;
        long long phase = 0;
        for (int p = k - 1; p >= 0; --p) {
            const int q = static_cast<int>(rest % d);
            rest /= d;
            amp_index += weight[pairing[p].first] * q;
            amp_index += weight[pairing[p].second] * ((q + labels[p].shift) % d);
            phase += static_cast<long long>(labels[p].phase) * q;
        }
        amps[amp_index] = scale * root_of_unity(d, phase);
    }
    return PureState(d, n, std::move(amps));
}

inline ProbabilityTable squared_magnitudes(const AmplitudeTable& amps) {
    ProbabilityTable out(amps.dim, amps.arity);
    for (std::size_t i = 0; i < amps.size(); ++i) out.entries[i] = std::norm(amps.entries[i]);
    return out;
}

/// Sums out the last Bell pair: P_ijkl = sum_mn P_ijklmn.
inline ProbabilityTable marginalize_last_pair(const ProbabilityTable& table) {
    if (table.arity < 2) throw std::invalid_argument("marginalize_last_pair: arity < 2");
    ProbabilityTable out(table.dim, table.arity - 1);
    const std::size_t inner_size = static_cast<std::size_t>(table.dim) * table.dim;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (std::size_t m = 0; m < inner_size; ++m) s += table.entries[i * inner_size + m];
        out.entries[i] = s;
    }
    return out;
}

inline double total(const ProbabilityTable& table) {
    double s = 0.0;
    for (double v : table.entries) s += v;
    return s;
}

}  // namespace qnd
