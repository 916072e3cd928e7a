#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace fcs {

// Protocol-level knobs: round count, signal intensity, estimation-round
// probability, declared correlation ranges and vacuum-probability floors.
// Floors left empty follow the ideal-coherent convention P0 = exp(-mu).
struct ProtocolParams {
    std::int64_t n_rounds = 0;
    double mu = 0.0;
    double p_est = 0.0;
    int r1 = 0;
    int r2 = 0;
    std::optional<double> p0a_floor;
    std::optional<double> p0b_floor;

    int range_total() const { return r1 + r2; }

    double effective_p0a() const { return p0a_floor ? *p0a_floor : std::exp(-mu); }
    double effective_p0b() const { return p0b_floor ? *p0b_floor : std::exp(-mu); }
};

inline void validate(const ProtocolParams& p) {
    if (p.n_rounds < 1) throw std::domain_error("ProtocolParams: n_rounds must be >= 1");
    if (!(p.mu >= 0.0)) throw std::domain_error("ProtocolParams: mu must be >= 0");
    if (!(p.p_est > 0.0) || !(p.p_est < 1.0))
        throw std::domain_error("ProtocolParams: p_est must be in (0, 1)");
    if (p.r1 < 0 || p.r2 < 0) throw std::domain_error("ProtocolParams: ranges must be >= 0");
    for (const auto& f : {p.p0a_floor, p.p0b_floor})
        if (f && (!(*f > 0.0) || *f > 1.0))
            throw std::domain_error("ProtocolParams: vacuum floors must be in (0, 1]");
}

} // namespace fcs
