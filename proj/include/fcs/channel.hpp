#pragma once

// Honest-middle-node click statistics: two phase-encoded weak coherent pulses
// interfering on a balanced beam splitter, threshold detectors with dark
// counts, and an intensity-mixing misalignment model.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "fcs/protocol.hpp"

namespace fcs {

struct ChannelParams {
    double attenuation_db = 0.0;  // total Alice->Bob loss, split equally per arm
    double dark = 0.0;            // dark-count probability per detector per round
    double e_mis = 0.0;           // misalignment error probability
    double f_ec = 1.0;            // error-correction efficiency
};

inline void validate(const ChannelParams& c) {
    if (!(c.attenuation_db >= 0.0))
        throw std::domain_error("ChannelParams: attenuation must be >= 0 dB");
    if (!(c.dark >= 0.0) || c.dark > 1.0)
        throw std::domain_error("ChannelParams: dark must be in [0, 1]");
    if (!(c.e_mis >= 0.0) || c.e_mis > 0.5)
        throw std::domain_error("ChannelParams: e_mis must be in [0, 1/2]");
    if (!(c.f_ec >= 1.0))
        throw std::domain_error("ChannelParams: f_ec must be >= 1");
}

// Outcome probabilities of one round at the measurement node.
struct ClickDistribution {
    double p_left_only = 0.0;
    double p_right_only = 0.0;
    double p_none = 0.0;
    double p_double = 0.0;
};

// Per-round success/error probabilities and the expected protocol tallies.
struct ExpectedTallies {
    double p_succ = 0.0;       // single-click probability per round
    double e_bit = 0.0;        // sifted bit error rate
    double exp_n_sig = 0.0;    // expected clicked signal rounds
    double exp_n_est = 0.0;    // expected clicked estimation rounds
    double exp_n_est_bit = 0.0;// expected estimation-round bit errors
};

struct DegenerateChannelError : std::runtime_error {
    DegenerateChannelError() : std::runtime_error("channel produces no clicks") {}
};

// Per-arm transmittance; the middle node sits halfway, so each arm carries
// half of the total dB budget.
inline double arm_transmittance(double attenuation_db) {
    if (!(attenuation_db >= 0.0))
        throw std::domain_error("arm_transmittance: attenuation must be >= 0 dB");
    return std::pow(10.0, -(attenuation_db / 2.0) / 10.0);
}

// Beam-splitter outputs for arbitrary input amplitudes, with a fraction e_mis
// of each output intensity routed to the wrong port. Conserves total energy.
inline std::pair<double, double>
interference_from_amplitudes(std::complex<double> alpha_a, std::complex<double> alpha_b,
                             double eta_arm, double e_mis) {
    double i_left = 0.5 * eta_arm * std::norm(alpha_a + alpha_b);
    double i_right = 0.5 * eta_arm * std::norm(alpha_a - alpha_b);
    return {i_left * (1.0 - e_mis) + i_right * e_mis,
            i_right * (1.0 - e_mis) + i_left * e_mis};
}

// Output intensities (I_L, I_R) for equal-intensity pulses with the same or
// opposite encoded phase. Constructive interference feeds the left detector.
inline std::pair<double, double>
interference_intensities(double mu, double eta_arm, bool same_phase, double e_mis) {
    if (!(mu >= 0.0) || !(eta_arm >= 0.0) || eta_arm > 1.0)
        throw std::domain_error("interference_intensities: invalid mu or eta");
    double amp = std::sqrt(mu);
    return interference_from_amplitudes(amp, same_phase ? amp : -amp, eta_arm, e_mis);
}

// Threshold detectors: each fires unless it sees vacuum and no dark count,
// q(I) = 1 - (1 - dark) e^(-I). Outcomes of the two detectors are independent.
inline ClickDistribution click_distribution(double i_left, double i_right, double dark) {
    if (!(i_left >= 0.0) || !(i_right >= 0.0))
        throw std::domain_error("click_distribution: intensities must be >= 0");
    double ql = 1.0 - (1.0 - dark) * std::exp(-i_left);
    double qr = 1.0 - (1.0 - dark) * std::exp(-i_right);
    ClickDistribution d;
    d.p_left_only = ql * (1.0 - qr);
    d.p_right_only = qr * (1.0 - ql);
    d.p_double = ql * qr;
    d.p_none = (1.0 - ql) * (1.0 - qr);
    return d;
}

// Averages the click distribution over the four equally likely (s_A, s_B)
// phase pairs. A sifted error is a left click with s_A != s_B or a right
// click with s_A == s_B (the receiver flips his bit on right clicks).
inline ExpectedTallies expected_statistics(const ProtocolParams& protocol,
                                           const ChannelParams& channel) {
    validate(protocol);
    validate(channel);
    double eta = arm_transmittance(channel.attenuation_db);

    auto [il_same, ir_same] = interference_intensities(protocol.mu, eta, true, channel.e_mis);
    ClickDistribution same = click_distribution(il_same, ir_same, channel.dark);
    auto [il_diff, ir_diff] = interference_intensities(protocol.mu, eta, false, channel.e_mis);
    ClickDistribution diff = click_distribution(il_diff, ir_diff, channel.dark);

    double p_succ = 0.5 * (same.p_left_only + same.p_right_only)
                  + 0.5 * (diff.p_left_only + diff.p_right_only);
    if (p_succ <= 0.0) throw DegenerateChannelError();
    double p_err = 0.5 * same.p_right_only + 0.5 * diff.p_left_only;

    double n = static_cast<double>(protocol.n_rounds);
    ExpectedTallies t;
    t.p_succ = p_succ;
    t.e_bit = p_err / p_succ;
    t.exp_n_sig = n * (1.0 - protocol.p_est) * p_succ;
    t.exp_n_est = n * protocol.p_est * p_succ;
    t.exp_n_est_bit = n * protocol.p_est * p_succ * t.e_bit;
    return t;
}

} // namespace fcs
