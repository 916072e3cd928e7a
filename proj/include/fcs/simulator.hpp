#pragma once

// Seeded Monte Carlo execution of protocol steps 1-4 against an honest
// middle node, plus empirical coverage experiments for the concentration
// bounds and the grouped |--> count. All randomness is counter-mode, so a
// run chunked across workers reproduces the sequential run bit for bit.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fcs/channel.hpp"
#include "fcs/concentration.hpp"
#include "fcs/rng.hpp"
#include "fcs/security.hpp"
#include "fcs/statemodel.hpp"

namespace fcs {

struct SimConfig {
    std::uint64_t seed = 0;
    std::int64_t n_rounds = 0;
    CorrelationKernel kernel_a = CorrelationKernel::ideal(0.0);
    CorrelationKernel kernel_b = CorrelationKernel::ideal(0.0);
    ChannelParams channel;
    ProtocolParams protocol;
    std::optional<std::int64_t> n_sig_tol;  // default: floor(expected n_sig)
    std::optional<std::int64_t> n_est_tol;  // default: ceil(expected n_est_bit)
};

struct ZScores {
    double n_sig = 0.0;
    double n_est = 0.0;
    double n_est_bit = 0.0;
};

struct SimResult {
    Tallies tallies;
    std::int64_t n_est_clicks = 0;
    std::int64_t n_clicks_total = 0;
    PackedBits sifted_alice;
    PackedBits sifted_bob;
    bool aborted = false;
    ZScores z;
};

namespace detail {

// Counter-RNG stream ids; one purpose per independent decision.
enum SimStream : std::uint64_t {
    kBitsA = 0,
    kBitsB = 1,
    kEstFlag = 2,
    kDetectLeft = 3,
    kDetectRight = 4,
};

} // namespace detail

// Partial tallies over a contiguous round range [first, last).
struct SimRange {
    std::int64_t first = 0;
    std::int64_t last = 0;
    std::int64_t n_sig = 0;
    std::int64_t n_est_bit = 0;
    std::int64_t n_est_clicks = 0;
    std::int64_t n_clicks_total = 0;
    PackedBits sifted_alice;
    PackedBits sifted_bob;
};

// Simulates rounds [first, last) of the configured run. Because every draw
// and every modulation bit is keyed by (seed, stream, round), ranges can be
// computed independently and merged in round order.
inline SimRange simulate_range(const SimConfig& config, std::int64_t first, std::int64_t last) {
    validate(config.channel);
    if (!(config.protocol.p_est > 0.0) || !(config.protocol.p_est < 1.0))
        throw std::domain_error("simulate_range: p_est must be in (0, 1)");
    if (first < 0 || last > config.n_rounds || first > last)
        throw std::domain_error("simulate_range: invalid round range");
    CounterRng rng{config.seed};
    std::int64_t n = config.n_rounds;
    auto bits_a = [&](std::int64_t j) {
        return (j < 0 || j >= n) ? 0 : rng.bit(detail::kBitsA, static_cast<std::uint64_t>(j));
    };
    auto bits_b = [&](std::int64_t j) {
        return (j < 0 || j >= n) ? 0 : rng.bit(detail::kBitsB, static_cast<std::uint64_t>(j));
    };
    double eta = arm_transmittance(config.channel.attenuation_db);
    double dark = config.channel.dark;
    double p_est = config.protocol.p_est;

    SimRange out;
    out.first = first;
    out.last = last;
    for (std::int64_t i = first; i < last; ++i) {
        auto u = static_cast<std::uint64_t>(i);
        auto alpha_a = config.kernel_a.amplitude(bits_a, i);
        auto alpha_b = config.kernel_b.amplitude(bits_b, i);
        auto [i_left, i_right] =
            interference_from_amplitudes(alpha_a, alpha_b, eta, config.channel.e_mis);
        bool left = rng.uniform(detail::kDetectLeft, u) < 1.0 - (1.0 - dark) * std::exp(-i_left);
        bool right = rng.uniform(detail::kDetectRight, u) < 1.0 - (1.0 - dark) * std::exp(-i_right);
        if (left == right) continue;  // no click, or double click (discarded)

        ++out.n_clicks_total;
        int bit_a = bits_a(i);
        int bit_b = bits_b(i) ^ (right ? 1 : 0);  // flip on right clicks
        if (rng.uniform(detail::kEstFlag, u) < p_est) {
            ++out.n_est_clicks;
            if (bit_a != bit_b) ++out.n_est_bit;
        } else {
            ++out.n_sig;
            out.sifted_alice.push_back(bit_a);
            out.sifted_bob.push_back(bit_b);
        }
    }
    return out;
}

// Joins contiguous partial results (in round order) and applies thresholds
// and z-scores against the analytic expected tallies.
inline SimResult merge_ranges(const SimConfig& config, const std::vector<SimRange>& ranges) {
    SimResult res;
    std::int64_t cursor = 0;
    for (const auto& r : ranges) {
        if (r.first != cursor)
            throw std::domain_error("merge_ranges: ranges must be contiguous from round 0");
        cursor = r.last;
        res.tallies.n_sig += r.n_sig;
        res.tallies.n_est_bit += r.n_est_bit;
        res.n_est_clicks += r.n_est_clicks;
        res.n_clicks_total += r.n_clicks_total;
        res.sifted_alice.append(r.sifted_alice);
        res.sifted_bob.append(r.sifted_bob);
    }
    if (cursor != config.n_rounds)
        throw std::domain_error("merge_ranges: ranges must cover all rounds");

    ProtocolParams proto = config.protocol;
    proto.n_rounds = config.n_rounds;
    ExpectedTallies expected{};
    bool degenerate = false;
    try {
        expected = expected_statistics(proto, config.channel);
    } catch (const DegenerateChannelError&) {
        degenerate = true;
    }
    // A run needs at least one retained click, so the default threshold never
    // drops below 1 even when the expected tallies vanish.
    res.tallies.n_sig_tol = config.n_sig_tol
        ? *config.n_sig_tol
        : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(expected.exp_n_sig)));
    res.tallies.n_est_tol = config.n_est_tol
        ? *config.n_est_tol
        : static_cast<std::int64_t>(std::ceil(expected.exp_n_est_bit));
    res.aborted = res.tallies.aborts();

    if (!degenerate) {
        double n = static_cast<double>(config.n_rounds);
        auto zscore = [n](std::int64_t observed, double p) {
            double var = n * p * (1.0 - p);
            if (var <= 0.0) return 0.0;
            return (static_cast<double>(observed) - n * p) / std::sqrt(var);
        };
        res.z.n_sig = zscore(res.tallies.n_sig, (1.0 - proto.p_est) * expected.p_succ);
        res.z.n_est = zscore(res.n_est_clicks, proto.p_est * expected.p_succ);
        res.z.n_est_bit = zscore(res.tallies.n_est_bit,
                                 proto.p_est * expected.p_succ * expected.e_bit);
    }
    return res;
}

inline SimResult run_protocol(const SimConfig& config) {
    if (config.n_rounds < 1)
        throw std::domain_error("run_protocol: n_rounds must be >= 1");
    return merge_ranges(config, {simulate_range(config, 0, config.n_rounds)});
}

// ---------------------------------------------------------------------------
// Coverage experiments for the concentration bounds.

enum class BoundKind {
    ExpectationUpper,   // U_e
    ExpectationLower,   // L_e
    ObservationUpper,   // U_m
    ObservationLower,   // L_m
    ChernoffUpper,      // C_U
};

struct SequenceSpec {
    enum class Kind {
        IidBernoulli,      // X_m ~ Bernoulli(p), independent
        PrefixMartingale,  // p_m = base + gain * (running mean of X_1..X_{m-1})
        Binomial,          // same as IidBernoulli; for the Chernoff bound
    };
    Kind kind = Kind::IidBernoulli;
    double p = 0.5;
    double base = 0.2;
    double gain = 0.3;
};

// Samples `trials` sequences of length n, evaluates the named bound on each,
// and returns the fraction of trials that violate it.
inline double coverage_experiment(BoundKind bound, const SequenceSpec& spec, std::int64_t n,
                                  double eps, int trials, std::uint64_t seed) {
    if (trials < 100)
        throw std::domain_error("coverage_experiment: trials must be >= 100");
    ConfidenceLevel conf(eps);
    CounterRng rng{seed};
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        double lambda = 0.0;
        double esum = 0.0;
        for (std::int64_t m = 0; m < n; ++m) {
            double p_m = spec.p;
            if (spec.kind == SequenceSpec::Kind::PrefixMartingale)
                p_m = spec.base + spec.gain * (m == 0 ? 0.0 : lambda / static_cast<double>(m));
            esum += p_m;
            if (rng.uniform(static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(m)) < p_m)
                lambda += 1.0;
        }
        TallyFrame frame(static_cast<double>(n), lambda);
        bool violated = false;
        switch (bound) {
        case BoundKind::ExpectationUpper:
            violated = esum > expectation_upper(frame, conf);
            break;
        case BoundKind::ExpectationLower:
            violated = esum < expectation_lower(frame, conf);
            break;
        case BoundKind::ObservationUpper:
            violated = lambda > observation_upper(esum, static_cast<double>(n), conf);
            break;
        case BoundKind::ObservationLower:
            violated = lambda < observation_lower(esum, static_cast<double>(n), conf);
            break;
        case BoundKind::ChernoffUpper:
            violated = lambda >= chernoff_upper(esum, conf);
            break;
        }
        if (violated) ++violations;
    }
    return static_cast<double>(violations) / trials;
}

// ---------------------------------------------------------------------------
// Empirical distribution of the |--> signal count.

namespace detail {

enum MinusStream : std::uint64_t {
    kMmBitsA = 0,
    kMmBitsB = 1,
    kMmEst = 2,
    kMmDrawA = 3,
    kMmDrawB = 4,
    kMmStreams = 8,
};

// P^- depends only on the 2w+1 bits around the pivot (w = kernel range), so
// values are cached per window pattern. Out-of-string bits read as 0.
class PMinusTable {
public:
    explicit PMinusTable(const CorrelationKernel& kernel)
        : kernel_(kernel), w_(kernel.range_total()),
          values_(std::size_t{1} << (2 * w_), std::numeric_limits<double>::quiet_NaN()) {}

    double at(const std::vector<int>& bits, std::int64_t i) {
        std::size_t pattern = 0;
        std::int64_t n = static_cast<std::int64_t>(bits.size());
        for (std::int64_t j = i - w_; j <= i + w_; ++j) {
            if (j == i) continue;
            int bit = (j < 0 || j >= n) ? 0 : bits[static_cast<std::size_t>(j)];
            pattern = (pattern << 1) | static_cast<unsigned>(bit);
        }
        double& slot = values_[pattern];
        if (std::isnan(slot)) {
            BitWindow window;
            window.base = 0;
            window.bits.resize(static_cast<std::size_t>(2 * w_ + 1));
            std::size_t p = pattern;
            for (std::int64_t j = 2 * w_; j >= 0; --j) {
                if (j == w_) continue;
                window.bits[static_cast<std::size_t>(j)] = static_cast<int>(p & 1u);
                p >>= 1;
            }
            slot = p_minus_exact(kernel_, window, w_);
        }
        return slot;
    }

private:
    CorrelationKernel kernel_;
    int w_;
    std::vector<double> values_;
};

} // namespace detail

// Simulates the hypothetical X-basis measurement: per trial, draws all
// modulation bits, then per round draws the signal flag and one Bernoulli per
// user with the exact P^- for that user's realized context (within a group
// the draws are conditionally independent given the out-of-group bits).
// Returns the count of |--> signal rounds for each trial.
inline std::vector<std::int64_t> minus_minus_experiment(const CorrelationKernel& kernel_a,
                                                        const CorrelationKernel& kernel_b,
                                                        const ProtocolParams& protocol,
                                                        int trials, std::uint64_t seed) {
    validate(protocol);
    if (protocol.range_total() > 8 || kernel_a.range_total() > 8 || kernel_b.range_total() > 8)
        throw std::range_error("minus_minus_experiment: exact P^- needs r1+r2 <= 8");
    CounterRng rng{seed};
    detail::PMinusTable table_a(kernel_a);
    detail::PMinusTable table_b(kernel_b);
    std::int64_t n = protocol.n_rounds;

    std::vector<std::int64_t> counts;
    counts.reserve(static_cast<std::size_t>(trials));
    std::vector<int> bits_a(static_cast<std::size_t>(n));
    std::vector<int> bits_b(static_cast<std::size_t>(n));
    for (int t = 0; t < trials; ++t) {
        std::uint64_t s = static_cast<std::uint64_t>(t) * detail::kMmStreams;
        for (std::int64_t i = 0; i < n; ++i) {
            bits_a[static_cast<std::size_t>(i)] = rng.bit(s + detail::kMmBitsA, static_cast<std::uint64_t>(i));
            bits_b[static_cast<std::size_t>(i)] = rng.bit(s + detail::kMmBitsB, static_cast<std::uint64_t>(i));
        }
        std::int64_t count = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            auto u = static_cast<std::uint64_t>(i);
            if (rng.uniform(s + detail::kMmEst, u) < protocol.p_est) continue;
            if (rng.uniform(s + detail::kMmDrawA, u) >= table_a.at(bits_a, i)) continue;
            if (rng.uniform(s + detail::kMmDrawB, u) >= table_b.at(bits_b, i)) continue;
            ++count;
        }
        counts.push_back(count);
    }
    return counts;
}

} // namespace fcs
