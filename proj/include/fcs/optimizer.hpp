#pragma once

// Derivative-free maximization of the key rate over (mu, P_est): a coarse
// log-spaced grid followed by two shrink-refinement rounds around the
// incumbent. Deterministic given inputs.

#include <cmath>
#include <cstdint>
#include <tuple>
#include <vector>

#include "fcs/security.hpp"

namespace fcs {

struct GridPoint {
    double mu = 0.0;
    double p_est = 0.0;
    double rate = 0.0;
};

struct OptimizationResult {
    double mu_opt = 0.0;
    double p_est_opt = 0.0;
    double rate_opt = 0.0;
    bool all_zero = false;           // every evaluated point gave zero key
    std::vector<GridPoint> trace;    // every evaluated point, in order
};

namespace detail {

// The |--> bound scales like (mu*(r1+r2+1))^2, so useful intensities reach
// down to ~1e-7 at large correlation ranges; the grid floor must cover that.
inline constexpr double kMuLo = 1e-8;
inline constexpr double kMuHi = 1.0;
inline constexpr double kPestLo = 1e-3;
inline constexpr double kPestHi = 0.5;
inline constexpr int kGridPoints = 25;

inline std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    double llo = std::log10(lo), lhi = std::log10(hi);
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] =
            std::pow(10.0, llo + (lhi - llo) * i / (points - 1));
    return g;
}

} // namespace detail

// Maximizes key_rate over the (mu, P_est) box with the correlation ranges,
// round count, channel and eps_tot held fixed. Ideal-coherent vacuum floors
// P0 = e^(-mu) are applied at every evaluated point. Ties break toward
// smaller mu, then smaller P_est.
inline OptimizationResult optimize(const ChannelParams& channel, std::int64_t n_rounds,
                                   int r1, int r2, double eps_tot) {
    validate(channel);
    OptimizationResult out;

    auto evaluate = [&](double mu, double p_est) {
        ProtocolParams p;
        p.n_rounds = n_rounds;
        p.mu = mu;
        p.p_est = p_est;
        p.r1 = r1;
        p.r2 = r2;
        double rate = key_rate(p, channel, eps_tot).rate;
        out.trace.push_back({mu, p_est, rate});
        return rate;
    };
    auto better = [](double rate, double mu, double p_est, const OptimizationResult& inc) {
        return std::make_tuple(rate, -mu, -p_est)
             > std::make_tuple(inc.rate_opt, -inc.mu_opt, -inc.p_est_opt);
    };

    auto run_grid = [&](double mu_lo, double mu_hi, double pe_lo, double pe_hi) {
        for (double mu : detail::log_grid(mu_lo, mu_hi, detail::kGridPoints))
            for (double p_est : detail::log_grid(pe_lo, pe_hi, detail::kGridPoints)) {
                double rate = evaluate(mu, p_est);
                if (better(rate, mu, p_est, out)) {
                    out.rate_opt = rate;
                    out.mu_opt = mu;
                    out.p_est_opt = p_est;
                }
            }
    };

    run_grid(detail::kMuLo, detail::kMuHi, detail::kPestLo, detail::kPestHi);
    if (out.rate_opt <= 0.0) {
        out.all_zero = true;
        out.mu_opt = 0.0;
        out.p_est_opt = 0.0;
        return out;
    }

    // Two refinement rounds: shrink the log-space span by 3x around the
    // incumbent, clipped to the global bounds.
    double span_mu = (std::log10(detail::kMuHi) - std::log10(detail::kMuLo)) / 3.0;
    double span_pe = (std::log10(detail::kPestHi) - std::log10(detail::kPestLo)) / 3.0;
    for (int round = 0; round < 2; ++round) {
        double lm = std::log10(out.mu_opt);
        double lp = std::log10(out.p_est_opt);
        double mu_lo = std::pow(10.0, std::max(lm - span_mu / 2.0, std::log10(detail::kMuLo)));
        double mu_hi = std::pow(10.0, std::min(lm + span_mu / 2.0, std::log10(detail::kMuHi)));
        double pe_lo = std::pow(10.0, std::max(lp - span_pe / 2.0, std::log10(detail::kPestLo)));
        double pe_hi = std::pow(10.0, std::min(lp + span_pe / 2.0, std::log10(detail::kPestHi)));
        run_grid(mu_lo, mu_hi, pe_lo, pe_hi);
        span_mu /= 3.0;
        span_pe /= 3.0;
    }
    return out;
}

} // namespace fcs
