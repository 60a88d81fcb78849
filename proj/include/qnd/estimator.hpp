// estimator.hpp
// From outcome counts to the partner's secret reals: probability estimates,
// inversion of the conclusive-outcome probabilities, the binomial accuracy
// band, and decimal digit extraction.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qnd/analytic.hpp"
#include "qnd/sampling.hpp"

namespace qnd {

/// Counts of the four jointly conclusive outcomes as seen on the public
/// transcript, plus the two candidate normalizers.
struct ConclusiveCounts {
    std::uint64_t n1010 = 0;
    std::uint64_t n1011 = 0;
    std::uint64_t n1110 = 0;
    std::uint64_t n1111 = 0;
    std::uint64_t n_sent = 0;
    std::uint64_t n_received = 0;

    static ConclusiveCounts from(const CountTable& c) {
        return {c.at(1, 0, 1, 0), c.at(1, 0, 1, 1), c.at(1, 1, 1, 0), c.at(1, 1, 1, 1), c.n_sent, c.n_received};
    }

    static ConclusiveCounts from(const MeasurementRecord& record) {
        ConclusiveCounts c;
        c.n_sent = record.size();
        for (const auto& [alice, bob] : record) {
            if (bob == Announcement::kLost) continue;
            ++c.n_received;
            if (alice == Announcement::kPhi10 && bob == Announcement::kPhi10) ++c.n1010;
            if (alice == Announcement::kPhi10 && bob == Announcement::kPhi11) ++c.n1011;
            if (alice == Announcement::kPhi11 && bob == Announcement::kPhi10) ++c.n1110;
            if (alice == Announcement::kPhi11 && bob == Announcement::kPhi11) ++c.n1111;
        }
        return c;
    }
};

enum class Normalization { kReceived, kSent };

inline ConclusiveQuadruple estimate_probabilities(const ConclusiveCounts& c,
                                                  Normalization norm = Normalization::kReceived) {
    const std::uint64_t denom = norm == Normalization::kReceived ? c.n_received : c.n_sent;
    if (denom == 0) throw std::invalid_argument("estimate_probabilities: zero normalizer");
    const double inv = 1.0 / static_cast<double>(denom);
    return {c.n1010 * inv, c.n1011 * inv, c.n1110 * inv, c.n1111 * inv};
}

inline ConclusiveQuadruple estimate_probabilities(const CountTable& c, Normalization norm = Normalization::kReceived) {
    return estimate_probabilities(ConclusiveCounts::from(c), norm);
}

/// The partner's two shared reals as recovered by one party.
/// theta_reliable is false when cos^2 theta left [0,1] before clamping or the
/// own-side divisor |cos 2 theta_own| fell below the margin floor;
/// phi_reliable additionally requires the theta estimate, an in-range
/// cos(phi_a + phi_b), and a partner phase inside [0, pi/2].
struct RecoveredValues {
    double cos_theta = 0.0;
    double cos_phi = 0.0;
    double cos_phi_sum = 0.0;
    double divisor_margin = 0.0;
    bool theta_reliable = false;
    bool phi_reliable = false;

    bool reliable() const { return theta_reliable && phi_reliable; }
};

/// Slack on the domain checks so exact inputs do not trip on rounding.
inline constexpr double kDomainSlack = 1e-12;

inline double divisor_floor(double theta_margin) { return std::sin(2.0 * theta_margin); }

/// Inverts the conclusive probabilities for the partner's (cos theta, cos phi)
/// given the caller's own preparation. Uses the averaged pairs
/// sym = (P_1010 + P_1111)/2 and asym = (P_1011 + P_1110)/2:
///   cos^2 theta_p = (4 (sym + asym) - sin^2 theta_o) / cos 2 theta_o
///   cos(phi_o + phi_p) = 2 (sym - asym) / (cos theta_o sin theta_o cos theta_p sin theta_p)
/// and phi_p = arccos(.) - phi_o, unique because phi_o + phi_p lies in (0, pi).
inline RecoveredValues recover_partner(const PreparationParams& own, const ConclusiveQuadruple& probs,
                                       double theta_margin = kDefaultThetaMargin) {
    constexpr double half_pi = std::numbers::pi / 2;
    RecoveredValues r;
    const double sym = probs.symmetric_mean();
    const double asym = probs.antisymmetric_mean();
    const double co = std::cos(own.theta), so = std::sin(own.theta);
    const double c2 = std::cos(2.0 * own.theta);

    r.divisor_margin = std::abs(c2);
    bool theta_ok = r.divisor_margin >= divisor_floor(theta_margin) * (1.0 - kDomainSlack);

    double cos2 = 0.5;
    if (c2 != 0.0) {
        const double raw = (4.0 * (sym + asym) - so * so) / c2;
        theta_ok = theta_ok && raw >= -kDomainSlack && raw <= 1.0 + kDomainSlack;
        cos2 = std::clamp(raw, 0.0, 1.0);
    } else {
        theta_ok = false;
    }
    const double cp = std::sqrt(cos2), sp = std::sqrt(1.0 - cos2);
    r.cos_theta = cp;
    r.theta_reliable = theta_ok;

    bool phi_ok = theta_ok;
    const double denom = co * so * cp * sp;
    if (denom > 1e-300) {
        const double raw = 2.0 * (sym - asym) / denom;
        phi_ok = phi_ok && raw >= -1.0 - kDomainSlack && raw <= 1.0 + kDomainSlack;
        r.cos_phi_sum = std::clamp(raw, -1.0, 1.0);
    } else {
        phi_ok = false;
        r.cos_phi_sum = 0.0;
    }
    const double phi_p = std::acos(r.cos_phi_sum) - own.phi;
    phi_ok = phi_ok && phi_p >= -kDomainSlack && phi_p <= half_pi + kDomainSlack;
    r.cos_phi = std::clamp(std::cos(std::clamp(phi_p, 0.0, half_pi)), 0.0, 1.0);
    r.phi_reliable = phi_ok;
    return r;
}

/// Half-width of the binomial band on the probability scale:
/// sqrt(2 n p (1 - p)) / n.
inline double accuracy_halfwidth(std::uint64_t n, double p) {
    if (n < 1) throw std::invalid_argument("accuracy_halfwidth: n must be >= 1");
    if (p < 0 || p > 1) throw std::invalid_argument("accuracy_halfwidth: p outside [0,1]");
    const double nn = static_cast<double>(n);
    return std::sqrt(2.0 * nn * p * (1.0 - p)) / nn;
}

inline double pow10(int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= 10.0;
    return r;
}

/// k-th decimal digit (k >= 1) by truncation: floor(value 10^k) mod 10.
inline int decimal_digit(double value, int k) {
    const auto scaled = static_cast<long long>(std::floor(value * pow10(k)));
    return static_cast<int>(scaled % 10);
}

/// First D decimal digits of a value in [0, 1), truncated.
inline std::string extract_digits(double value, int num_digits) {
    if (num_digits < 1) throw std::invalid_argument("extract_digits: need at least one digit");
    if (num_digits > 15) throw std::invalid_argument("extract_digits: more digits than a double carries");
    if (!(value >= 0.0 && value < 1.0)) throw std::invalid_argument("extract_digits: value outside [0,1)");
    std::string out;
    out.reserve(num_digits);
    for (int k = 1; k <= num_digits; ++k) out.push_back(static_cast<char>('0' + decimal_digit(value, k)));
    return out;
}

/// True when every value within `halfwidth` of `value` shares its k-th
/// truncated digit, i.e. no digit boundary falls inside the band.
inline bool digit_reliable(double value, int k, double halfwidth) {
    const double scale = pow10(k);
    return std::floor((value - halfwidth) * scale) == std::floor((value + halfwidth) * scale);
}

/// Number of leading digits guaranteed by digit_reliable.
inline int guaranteed_digits(double value, double halfwidth, int max_digits = 15) {
    int k = 0;
    while (k < max_digits && digit_reliable(value, k + 1, halfwidth)) ++k;
    return k;
}

}  // namespace qnd
