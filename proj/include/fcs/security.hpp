#pragma once

// The finite-key bound pipeline: epsilon budget, round grouping, the grouped
// Chernoff bound on |--> signal counts, the phase-error upper bound, and the
// final key-length formula.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fcs/channel.hpp"
#include "fcs/concentration.hpp"
#include "fcs/protocol.hpp"

namespace fcs {

// The six security parameters and their identity
// eps_tot = eps_cor + 2*sqrt(r1+r2+4)*eps + eps_tilde.
struct EpsilonBudget {
    double eps = 0.0;
    double eps_cor = 0.0;
    double eps_tilde = 0.0;
    double eps_prime = 0.0;
    double eps_sec = 0.0;
    double eps_tot = 0.0;
};

// Realized protocol counters and the abort thresholds.
struct Tallies {
    std::int64_t n_sig = 0;
    std::int64_t n_est_bit = 0;
    std::int64_t n_sig_tol = 0;
    std::int64_t n_est_tol = 0;

    bool aborts() const { return n_est_bit > n_est_tol || n_sig < n_sig_tol; }
};

struct KeyRateResult {
    double n_ph_bar = 0.0;
    double leak_ec = 0.0;
    double key_length = 0.0;
    double rate = 0.0;
};

// Even split eps = eps_cor = eps_tilde = eps_tot / (2 + 2*sqrt(r1+r2+4)).
// Computed in extended precision so the budget identity survives to ~1 ulp.
inline EpsilonBudget epsilon_budget(double eps_tot, int r1, int r2) {
    if (!(eps_tot > 0.0) || !(eps_tot < 1.0))
        throw std::domain_error("epsilon_budget: eps_tot must be in (0, 1)");
    if (r1 < 0 || r2 < 0)
        throw std::domain_error("epsilon_budget: ranges must be >= 0");
    long double s = sqrtl(static_cast<long double>(r1) + r2 + 4.0L);
    long double eps = static_cast<long double>(eps_tot) / (2.0L + 2.0L * s);
    EpsilonBudget b;
    b.eps = static_cast<double>(eps);
    b.eps_cor = b.eps;
    b.eps_tilde = b.eps;
    b.eps_prime = static_cast<double>(s * eps);
    b.eps_sec = static_cast<double>(2.0L * s * eps + eps);
    b.eps_tot = eps_tot;
    return b;
}

// Round g + k*(r1+r2+1) belongs to group g (1-based); N_g = floor((N-g)/w) + 1.
// Groups beyond N are empty; the sizes always partition N.
inline std::vector<std::int64_t> group_sizes(std::int64_t n_rounds, int r1, int r2) {
    if (n_rounds < 1) throw std::domain_error("group_sizes: n_rounds must be >= 1");
    std::int64_t w = static_cast<std::int64_t>(r1) + r2 + 1;
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(w));
    for (std::int64_t g = 1; g <= w; ++g)
        sizes[static_cast<std::size_t>(g - 1)] = g > n_rounds ? 0 : (n_rounds - g) / w + 1;
    return sizes;
}

// N_sig^{--} upper bound: sum over groups of the Chernoff bound at confidence
// eps^2 on N_g(1-P_est)(1-P0A^w)(1-P0B^w). Within a group the draws are
// conditionally independent, and the union over the w groups puts the total
// failure probability at (r1+r2+1) eps^2.
inline double minus_minus_bound(const ProtocolParams& params, double eps) {
    validate(params);
    ConfidenceLevel conf2 = ConfidenceLevel(eps).squared();
    std::int64_t w = static_cast<std::int64_t>(params.r1) + params.r2 + 1;
    double p_flip = (1.0 - params.p_est)
                  * (1.0 - std::pow(params.effective_p0a(), static_cast<double>(w)))
                  * (1.0 - std::pow(params.effective_p0b(), static_cast<double>(w)));
    // Group sizes take only the two values q and q+1; rem groups have q+1.
    std::int64_t q = params.n_rounds / w;
    std::int64_t rem = params.n_rounds % w;
    double total = 0.0;
    if (rem > 0)
        total += static_cast<double>(rem)
               * chernoff_upper(static_cast<double>(q + 1) * p_flip, conf2);
    if (w - rem > 0)
        total += static_cast<double>(w - rem)
               * chernoff_upper(static_cast<double>(q) * p_flip, conf2);
    return total;
}

// Upper bound on the phase-error count given the estimation-round bit errors.
// All Kato invocations run over the full N rounds at confidence eps^2; the
// stated failure probability of the whole statement is (r1+r2+4) eps^2.
inline double phase_error_upper(double n_est_bit, const ProtocolParams& params, double eps) {
    validate(params);
    if (!(n_est_bit >= 0.0))
        throw std::domain_error("phase_error_upper: n_est_bit must be >= 0");
    ConfidenceLevel conf2 = ConfidenceLevel(eps).squared();
    double n = static_cast<double>(params.n_rounds);

    double ue_bit = expectation_upper(TallyFrame(n, std::min(n_est_bit, n)), conf2);
    double nmm = minus_minus_bound(params, eps);
    double ue_mm = expectation_upper(TallyFrame(n, std::min(nmm, n)), conf2);

    double p = params.p_est;
    double inner = 2.0 * (1.0 - p) / p * ue_bit
                 + 2.0 * ue_mm
                 + 2.0 * std::sqrt(2.0) * std::sqrt(1.0 - p) / std::sqrt(p)
                       * std::sqrt(ue_bit) * std::sqrt(ue_mm);
    if (inner >= n) return n;
    return observation_upper(inner, n, conf2);
}

// Binary Shannon entropy, H2(0) = H2(1) = 0.
inline double binary_entropy(double p) {
    if (!(p >= 0.0) || p > 1.0)
        throw std::domain_error("binary_entropy: argument must be in [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Bits announced during error correction, leak_ec = f * n_sig * H2(e_bit).
inline double ec_leak(double n_sig, double e_bit, double f_ec) {
    if (!(n_sig >= 0.0)) throw std::domain_error("ec_leak: n_sig must be >= 0");
    if (!(f_ec >= 1.0)) throw std::domain_error("ec_leak: f_ec must be >= 1");
    return f_ec * n_sig * binary_entropy(e_bit);
}

// l = n_sig_tol (1 - H2(n_ph_bar / n_sig_tol)) - leak_ec
//     - log2(2/eps_cor) - 2 log2(1/(2 eps_tilde)), clamped at 0.
// A phase-error ratio at or above 1/2 zero-rates the key.
inline double key_length(double n_sig_tol, double n_ph_bar, double leak_ec,
                         const EpsilonBudget& budget) {
    if (!(n_sig_tol > 0.0))
        throw std::domain_error("key_length: n_sig_tol must be > 0");
    double ratio = n_ph_bar / n_sig_tol;
    double entropy = ratio >= 0.5 ? 1.0 : binary_entropy(ratio);
    double l = n_sig_tol * (1.0 - entropy) - leak_ec
             - std::log2(2.0 / budget.eps_cor)
             - 2.0 * std::log2(1.0 / (2.0 * budget.eps_tilde));
    return std::max(l, 0.0);
}

// Every intermediate of one end-to-end rate evaluation.
struct KeyRateBreakdown {
    KeyRateResult result;
    EpsilonBudget budget;
    ExpectedTallies expected;
    double nmm_bar = 0.0;
    std::int64_t n_sig_tol = 0;
    std::int64_t n_est_tol = 0;
    bool degenerate = false;
};

// Full pipeline at one operating point. Thresholds default to the expected
// tallies (floor for n_sig_tol, ceil for n_est_tol); a degenerate stage
// yields rate 0 rather than an error.
inline KeyRateBreakdown key_rate_breakdown(const ProtocolParams& params,
                                           const ChannelParams& channel,
                                           double eps_tot) {
    validate(params);
    validate(channel);
    KeyRateBreakdown out;
    out.budget = epsilon_budget(eps_tot, params.r1, params.r2);
    try {
        out.expected = expected_statistics(params, channel);
    } catch (const DegenerateChannelError&) {
        out.degenerate = true;
        return out;
    }
    out.n_sig_tol = static_cast<std::int64_t>(std::floor(out.expected.exp_n_sig));
    out.n_est_tol = static_cast<std::int64_t>(std::ceil(out.expected.exp_n_est_bit));
    if (out.n_sig_tol < 1) {
        out.degenerate = true;
        return out;
    }
    out.nmm_bar = minus_minus_bound(params, out.budget.eps);
    out.result.n_ph_bar = phase_error_upper(static_cast<double>(out.n_est_tol),
                                            params, out.budget.eps);
    out.result.leak_ec = ec_leak(static_cast<double>(out.n_sig_tol),
                                 out.expected.e_bit, channel.f_ec);
    out.result.key_length = key_length(static_cast<double>(out.n_sig_tol),
                                       out.result.n_ph_bar, out.result.leak_ec, out.budget);
    out.result.rate = out.result.key_length / static_cast<double>(params.n_rounds);
    return out;
}

inline KeyRateResult key_rate(const ProtocolParams& params, const ChannelParams& channel,
                              double eps_tot) {
    return key_rate_breakdown(params, channel, eps_tot).result;
}

} // namespace fcs
