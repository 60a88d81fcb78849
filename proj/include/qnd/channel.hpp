// channel.hpp
// Fiber loss and a scalar error rate for the leg that carries qubit B.

#pragma once

#include <cmath>
#include <stdexcept>

#include "qnd/qmath.hpp"

namespace qnd {

struct ChannelConfig {
    double alpha_db_per_km = 0.0;
    double length_km = 0.0;
    double fixed_loss_db = 0.0;
    double error_rate = 0.0;

    void validate() const {
        if (alpha_db_per_km < 0) throw std::invalid_argument("channel.alpha_db_per_km must be >= 0");
        if (length_km < 0) throw std::invalid_argument("channel.length_km must be >= 0");
        if (fixed_loss_db < 0) throw std::invalid_argument("channel.fixed_loss_db must be >= 0");
        if (error_rate < 0 || error_rate > 1) throw std::invalid_argument("channel.error_rate must be in [0,1]");
    }
};

/// eta = 10^{-(alpha l + c)/10}
inline double transmittance(const ChannelConfig& cfg) {
    cfg.validate();
    return std::pow(10.0, -(cfg.alpha_db_per_km * cfg.length_km + cfg.fixed_loss_db) / 10.0);
}

/// Depolarizing B mixes the joint outcome distribution toward uniform:
/// entry <- (1 - eps) entry + eps / size.
inline ProbabilityTable apply_error_mixture(const ProbabilityTable& ideal, double error_rate) {
    if (error_rate < 0 || error_rate > 1) throw std::invalid_argument("apply_error_mixture: error rate outside [0,1]");
    ProbabilityTable out = ideal;
    const double floor = error_rate / static_cast<double>(ideal.size());
    for (auto& e : out.entries) e = (1.0 - error_rate) * e + floor;
    return out;
}

}  // namespace qnd
