#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they check.

#include <cmath>
#include <random>

namespace oracle {

struct KatoSolution {
    long double a;
    long double b;
    long double objective;
};

// Independent constrained minimizer for the Kato coefficients: minimize
// b + a(2*lambda/n - 1) subject to exp(-2(b^2-a^2)/(1 +/- 4a/(3 sqrt n))^2) = eps,
// i.e. b(a) = sqrt(a^2 + K/2 (1 +/- 4a/(3 sqrt n))^2) with K = -ln(eps).
// The objective is convex in a, so golden-section search converges.
inline KatoSolution kato_minimize(long double n, long double lambda, long double eps,
                                  bool plus_branch) {
    long double k = -std::log(eps);
    long double sn = std::sqrt(n);
    long double c = 2.0L * lambda / n - 1.0L;
    long double sgn = plus_branch ? 1.0L : -1.0L;
    auto objective = [&](long double a) {
        long double t = 1.0L + sgn * 4.0L * a / (3.0L * sn);
        return std::sqrt(a * a + 0.5L * k * t * t) + a * c;
    };
    long double lo = -10.0L * sn * (1.0L + std::sqrt(k));
    long double hi = 10.0L * sn * (1.0L + std::sqrt(k));
    const long double phi = 0.6180339887498948482L;
    long double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    long double f1 = objective(x1), f2 = objective(x2);
    for (int i = 0; i < 300; ++i) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - phi * (hi - lo); f1 = objective(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + phi * (hi - lo); f2 = objective(x2);
        }
    }
    long double a = 0.5L * (lo + hi);
    long double t = 1.0L + sgn * 4.0L * a / (3.0L * sn);
    long double b = std::sqrt(a * a + 0.5L * k * t * t);
    return {a, b, objective(a)};
}

// Kato confidence constraint value exp(-2(b^2-a^2)/(1 +/- 4a/(3 sqrt n))^2).
inline double kato_constraint(double n, double a, double b, bool plus_branch) {
    double t = 1.0 + (plus_branch ? 1.0 : -1.0) * 4.0 * a / (3.0 * std::sqrt(n));
    return std::exp(-2.0 * (b * b - a * a) / (t * t));
}

// Threshold detector Monte Carlo: Poissonian photon number plus independent
// dark counts; returns empirical single-click frequencies.
struct ClickFrequencies {
    double left_only = 0.0;
    double right_only = 0.0;
    double both = 0.0;
    double none = 0.0;
};

inline ClickFrequencies click_monte_carlo(double i_left, double i_right, double dark,
                                          long samples, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::poisson_distribution<int> pl(i_left), pr(i_right);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long nl = 0, nr = 0, nb = 0, nn = 0;
    for (long s = 0; s < samples; ++s) {
        bool left = pl(gen) > 0 || u(gen) < dark;
        bool right = pr(gen) > 0 || u(gen) < dark;
        if (left && right) ++nb;
        else if (left) ++nl;
        else if (right) ++nr;
        else ++nn;
    }
    double inv = 1.0 / static_cast<double>(samples);
    return {nl * inv, nr * inv, nb * inv, nn * inv};
}

} // namespace oracle
