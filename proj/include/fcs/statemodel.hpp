#pragma once

// Exact coherent-state computations for correlated sources: finite-range
// correlation kernels, the block states around a pivot round, and the
// |-> projection probability with its vacuum-probability bound.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fcs {

// <alpha|beta> for coherent states.
inline std::complex<double> coherent_overlap(std::complex<double> alpha,
                                             std::complex<double> beta) {
    return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta)
                    + std::conj(alpha) * beta);
}

// |<0|alpha>|^2 = e^(-|alpha|^2).
inline double vacuum_probability(std::complex<double> alpha) {
    return std::exp(-std::norm(alpha));
}

enum class KernelKind { Ideal, PhaseLeak, IntensityLeak };

// Finite-range map from a bit string to per-round coherent amplitudes.
// The emitted amplitude of round i depends on bits i-r2 .. i+r1 only
// (equivalently: bit i influences rounds i-r1 .. i+r2). Three concrete
// mechanisms are shipped:
//   Ideal:          alpha_i = sqrt(mu) * e^(i pi s_i)
//   PhaseLeak:      alpha_i = sqrt(mu) * e^(i pi (s_i + sum_k c_k s_{i+k}))
//   IntensityLeak: |alpha_i|^2 = mu * (1 + sum_k g_k (2 s_{i+k} - 1)), clipped at 0
// Coefficient index k runs over [-r2, -1] (coeff_prev) and [+1, +r1] (coeff_next).
class CorrelationKernel {
public:
    static CorrelationKernel ideal(double mu) {
        return CorrelationKernel(KernelKind::Ideal, mu, {}, {});
    }
    static CorrelationKernel phase_leak(double mu, std::vector<double> coeff_prev,
                                        std::vector<double> coeff_next) {
        return CorrelationKernel(KernelKind::PhaseLeak, mu,
                                 std::move(coeff_prev), std::move(coeff_next));
    }
    static CorrelationKernel intensity_leak(double mu, std::vector<double> coeff_prev,
                                            std::vector<double> coeff_next) {
        return CorrelationKernel(KernelKind::IntensityLeak, mu,
                                 std::move(coeff_prev), std::move(coeff_next));
    }

    KernelKind kind() const { return kind_; }
    double mu() const { return mu_; }
    int r1() const { return static_cast<int>(next_.size()); }
    int r2() const { return static_cast<int>(prev_.size()); }
    int range_total() const { return r1() + r2(); }
    const std::vector<double>& coeff_prev() const { return prev_; }
    const std::vector<double>& coeff_next() const { return next_; }

    // Guaranteed minimum per-round vacuum probability over all bit strings.
    double vacuum_floor() const {
        if (kind_ != KernelKind::IntensityLeak) return std::exp(-mu_);
        double gain = 0.0;
        for (double g : prev_) gain += std::abs(g);
        for (double g : next_) gain += std::abs(g);
        return std::exp(-mu_ * (1.0 + gain));
    }

    // Amplitude emitted in round i given the bit string. Bits accessor is any
    // callable (std::int64_t) -> int returning 0 or 1.
    template <class Bits>
    std::complex<double> amplitude(const Bits& bits, std::int64_t i) const {
        switch (kind_) {
        case KernelKind::Ideal:
            return std::sqrt(mu_) * phase_factor(bits(i));
        case KernelKind::PhaseLeak: {
            double phase = bits(i);
            for (int k = 1; k <= r2(); ++k) phase += prev_[k - 1] * bits(i - k);
            for (int k = 1; k <= r1(); ++k) phase += next_[k - 1] * bits(i + k);
            return std::sqrt(mu_) * std::exp(std::complex<double>(0.0, std::numbers::pi * phase));
        }
        case KernelKind::IntensityLeak: {
            double intensity = 1.0;
            for (int k = 1; k <= r2(); ++k) intensity += prev_[k - 1] * (2.0 * bits(i - k) - 1.0);
            for (int k = 1; k <= r1(); ++k) intensity += next_[k - 1] * (2.0 * bits(i + k) - 1.0);
            intensity = std::max(mu_ * intensity, 0.0);
            return std::sqrt(intensity) * phase_factor(bits(i));
        }
        }
        return {};
    }

private:
    CorrelationKernel(KernelKind kind, double mu, std::vector<double> prev,
                      std::vector<double> next)
        : kind_(kind), mu_(mu), prev_(std::move(prev)), next_(std::move(next)) {
        if (!(mu_ >= 0.0)) throw std::domain_error("CorrelationKernel: mu must be >= 0");
    }

    static std::complex<double> phase_factor(int bit) {
        return bit ? std::complex<double>(-1.0, 0.0) : std::complex<double>(1.0, 0.0);
    }

    KernelKind kind_;
    double mu_;
    std::vector<double> prev_;  // coefficients for s_{i-1}, s_{i-2}, ...
    std::vector<double> next_;  // coefficients for s_{i+1}, s_{i+2}, ...
};

// The r1+r2+1 amplitudes emitted in rounds pivot-r1 .. pivot+r2, i.e. every
// round the pivot bit can influence.
struct BlockState {
    std::vector<std::complex<double>> amplitudes;
};

// Explicit bit context over rounds [base, base + bits.size()). Accessing a
// round outside the window throws, which catches pivots whose dependence
// window is not fully specified.
struct BitWindow {
    std::int64_t base = 0;
    std::vector<int> bits;

    int operator()(std::int64_t j) const {
        if (j < base || j >= base + static_cast<std::int64_t>(bits.size()))
            throw std::out_of_range("BitWindow: round index outside provided context");
        return bits[static_cast<std::size_t>(j - base)];
    }
};

namespace detail {

template <class Bits>
struct ForcedBit {
    const Bits& bits;
    std::int64_t pivot;
    int value;
    int operator()(std::int64_t j) const { return j == pivot ? value : bits(j); }
};

} // namespace detail

// The two block states with the pivot bit forced to 0 and 1, all other bits
// taken from context_bits.
template <class Bits>
std::pair<BlockState, BlockState> block_states(const CorrelationKernel& kernel,
                                               const Bits& context_bits,
                                               std::int64_t pivot_index) {
    detail::ForcedBit<Bits> b0{context_bits, pivot_index, 0};
    detail::ForcedBit<Bits> b1{context_bits, pivot_index, 1};
    BlockState s0, s1;
    s0.amplitudes.reserve(kernel.range_total() + 1);
    s1.amplitudes.reserve(kernel.range_total() + 1);
    for (std::int64_t m = pivot_index - kernel.r1(); m <= pivot_index + kernel.r2(); ++m) {
        s0.amplitudes.push_back(kernel.amplitude(b0, m));
        s1.amplitudes.push_back(kernel.amplitude(b1, m));
    }
    return {std::move(s0), std::move(s1)};
}

// P^- = (1/4) || phi_0 - phi_1 ||^2 for the normalized product coherent
// blocks, evaluated exactly as (1 - Re prod_k <phi0_k|phi1_k>) / 2.
template <class Bits>
double p_minus_exact(const CorrelationKernel& kernel, const Bits& context_bits,
                     std::int64_t pivot_index) {
    auto [s0, s1] = block_states(kernel, context_bits, pivot_index);
    std::complex<double> prod(1.0, 0.0);
    for (std::size_t k = 0; k < s0.amplitudes.size(); ++k)
        prod *= coherent_overlap(s0.amplitudes[k], s1.amplitudes[k]);
    double p = 0.5 * (1.0 - prod.real());
    return std::clamp(p, 0.0, 1.0);
}

struct VacuumBoundCheck {
    bool holds;
    double slack;  // bound - p_minus; negative means the declared floor is wrong
};

// Checks P^- <= 1 - p0_floor^(r1+r2+1) for the given context.
template <class Bits>
VacuumBoundCheck vacuum_bound_check(const CorrelationKernel& kernel, const Bits& context_bits,
                                    std::int64_t pivot_index, double p0_floor) {
    double p = p_minus_exact(kernel, context_bits, pivot_index);
    double bound = 1.0 - std::pow(p0_floor, kernel.range_total() + 1);
    return {p <= bound, bound - p};
}

} // namespace fcs
