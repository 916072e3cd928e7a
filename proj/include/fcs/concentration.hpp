#pragma once

// Closed-form Kato martingale bounds and the multiplicative Chernoff upper
// bound. All four Kato directions are exposed: expectation from observation
// (U_e, L_e) and observation from expectation (U_m, L_m).

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fcs {

// Failure probability of a single concentration statement.
struct ConfidenceLevel {
    double epsilon;

    explicit ConfidenceLevel(double eps) : epsilon(eps) {
        if (!(eps > 0.0) || eps > 1.0)
            throw std::domain_error("ConfidenceLevel: epsilon must be in (0, 1]");
    }

    ConfidenceLevel squared() const { return ConfidenceLevel(epsilon * epsilon); }
};

// n Bernoulli-like trials (each X_m in [0,1]) with observed sum Lambda.
struct TallyFrame {
    double n;
    double lambda;

    TallyFrame(double n_, double lambda_) : n(n_), lambda(lambda_) {
        if (!(n >= 1.0) || n != std::floor(n) || !std::isfinite(n))
            throw std::domain_error("TallyFrame: n must be a positive integer");
        if (!(lambda >= 0.0) || lambda > n || !std::isfinite(lambda))
            throw std::domain_error("TallyFrame: lambda must lie in [0, n]");
    }
};

// The (a, b) pair entering the Kato deviation term (b + a(2*Lambda/n - 1))*sqrt(n).
struct KatoCoefficients {
    double a;
    double b;
};

namespace detail {

// Shared pieces of the two closed forms. log_eps <= 0 is required by callers.
struct KatoParts {
    double sqrt_n;
    double quad;      // 9*Lambda*(n-Lambda) - 2*n*ln(eps), always > 0 for eps < 1
    double root;      // sqrt(-ln(eps) * quad)
    double denom;     // 4*(9n - 8 ln(eps)) * quad
};

inline KatoParts kato_parts(const TallyFrame& f, double log_eps) {
    KatoParts p;
    p.sqrt_n = std::sqrt(f.n);
    p.quad = 9.0 * f.lambda * (f.n - f.lambda) - 2.0 * f.n * log_eps;
    p.root = std::sqrt(std::max(-log_eps * p.quad, 0.0));
    p.denom = 4.0 * (9.0 * f.n - 8.0 * log_eps) * p.quad;
    return p;
}

inline double kato_b(double a, double n, double sqrt_n, double log_eps, double cross_sign) {
    // b = sqrt(18 a^2 n - (16 a^2 +/- 24 a sqrt(n) + 9 n) ln(eps)) / (3 sqrt(2 n))
    double rad = 18.0 * a * a * n
               - (16.0 * a * a + cross_sign * 24.0 * a * sqrt_n + 9.0 * n) * log_eps;
    return std::sqrt(std::max(rad, 0.0)) / (3.0 * std::sqrt(2.0 * n));
}

} // namespace detail

// Coefficients minimizing b + a(2*Lambda/n - 1) under
// exp(-2(b^2-a^2)/(1 + 4a/(3 sqrt n))^2) = eps. Used by U_e and L_m.
inline KatoCoefficients kato_coeffs_upper(const TallyFrame& frame, const ConfidenceLevel& conf) {
    double log_eps = std::log(conf.epsilon);
    if (log_eps == 0.0) return {0.0, 0.0};  // eps = 1 limit
    auto p = detail::kato_parts(frame, log_eps);
    double num = 3.0 * (72.0 * p.sqrt_n * frame.lambda * (frame.n - frame.lambda) * log_eps
                        - 16.0 * frame.n * p.sqrt_n * log_eps * log_eps
                        + 9.0 * std::sqrt(2.0) * (frame.n - 2.0 * frame.lambda) * frame.n * p.root);
    double a = num / p.denom;
    return {a, detail::kato_b(a, frame.n, p.sqrt_n, log_eps, +1.0)};
}

// Mirror coefficients for the sign-flipped constraint denominator
// (1 - 4a/(3 sqrt n))^2. Used by L_e and U_m.
inline KatoCoefficients kato_coeffs_lower(const TallyFrame& frame, const ConfidenceLevel& conf) {
    double log_eps = std::log(conf.epsilon);
    if (log_eps == 0.0) return {0.0, 0.0};
    auto p = detail::kato_parts(frame, log_eps);
    double num = -3.0 * (72.0 * p.sqrt_n * frame.lambda * (frame.n - frame.lambda) * log_eps
                         - 16.0 * frame.n * p.sqrt_n * log_eps * log_eps
                         - 9.0 * std::sqrt(2.0) * (frame.n - 2.0 * frame.lambda) * frame.n * p.root);
    double a = num / p.denom;
    return {a, detail::kato_b(a, frame.n, p.sqrt_n, log_eps, -1.0)};
}

// U_e: with probability >= 1 - eps, sum_m E(X_m | F_{m-1}) <= expectation_upper(frame).
// Capped at n (the expectation sum of [0,1] variables cannot exceed n).
inline double expectation_upper(const TallyFrame& frame, const ConfidenceLevel& conf) {
    auto c = kato_coeffs_upper(frame, conf);
    double v = frame.lambda
             + (c.b + c.a * (2.0 * frame.lambda / frame.n - 1.0)) * std::sqrt(frame.n);
    return std::min(v, frame.n);
}

// L_e: lower bound on the conditional-expectation sum, floored at 0.
inline double expectation_lower(const TallyFrame& frame, const ConfidenceLevel& conf) {
    auto c = kato_coeffs_lower(frame, conf);
    double v = frame.lambda
             - (c.b + c.a * (2.0 * frame.lambda / frame.n - 1.0)) * std::sqrt(frame.n);
    return std::max(v, 0.0);
}

namespace detail {

inline void check_expectation_sum(double s, double n) {
    if (!(n >= 1.0) || n != std::floor(n))
        throw std::domain_error("observation bound: n must be a positive integer");
    if (!(s >= 0.0) || s > n)
        throw std::domain_error("observation bound: expectation sum must lie in [0, n]");
}

} // namespace detail

// U_m: with probability >= 1 - eps, the observation Lambda stays below this
// bound computed from the expectation sum. The printed coefficients depend on
// Lambda, which is unknown here; they are evaluated at a data-independent
// surrogate via one fixed-point pass, keeping the looser of the two candidate
// bounds (each candidate is valid on its own). Capped at n.
inline double observation_upper(double expectation_sum, double frame_n, const ConfidenceLevel& conf) {
    detail::check_expectation_sum(expectation_sum, frame_n);
    double sqrt_n = std::sqrt(frame_n);
    // With a nonpositive denominator the rearrangement no longer yields an
    // upper bound; the defining pass rejects it, the refinement pass falls
    // back to the vacuous cap n.
    auto bound_at = [&](double lambda_hat, bool defining) {
        auto c = kato_coeffs_lower(TallyFrame(frame_n, lambda_hat), conf);
        double den = 1.0 - 2.0 * c.a / sqrt_n;
        if (den <= 0.0) {
            if (defining)
                throw std::domain_error("observation_upper: nonpositive denominator");
            return frame_n;
        }
        return (expectation_sum + (c.b - c.a) * sqrt_n) / den;
    };
    double u1 = bound_at(expectation_sum, true);
    double u2 = bound_at(std::clamp(u1, 0.0, frame_n), false);
    return std::min(std::max(u1, u2), frame_n);
}

// L_m: matching lower bound on the observation, floored at 0.
inline double observation_lower(double expectation_sum, double frame_n, const ConfidenceLevel& conf) {
    detail::check_expectation_sum(expectation_sum, frame_n);
    double sqrt_n = std::sqrt(frame_n);
    // A nonpositive denominator flips the rearranged inequality, so that
    // coefficient pair carries no lower bound; fall back to the vacuous 0.
    auto bound_at = [&](double lambda_hat) {
        auto c = kato_coeffs_upper(TallyFrame(frame_n, lambda_hat), conf);
        double den = 1.0 + 2.0 * c.a / sqrt_n;
        if (den <= 0.0) return 0.0;
        return (expectation_sum - (c.b - c.a) * sqrt_n) / den;
    };
    double l1 = bound_at(expectation_sum);
    double l2 = bound_at(std::clamp(l1, 0.0, frame_n));
    return std::max(std::min(l1, l2), 0.0);
}

// C_U: multiplicative Chernoff upper bound (1+delta)*mu on a sum of
// independent {0,1} variables with expectation mu, failure probability eps.
// At mu = 0 the analytic limit ln(1/eps) is returned.
inline double chernoff_upper(double mu_expect, const ConfidenceLevel& conf) {
    if (!(mu_expect >= 0.0))
        throw std::domain_error("chernoff_upper: expectation must be nonnegative");
    double k = -std::log(conf.epsilon);  // ln(1/eps) >= 0
    if (mu_expect == 0.0) return k;
    // (1 + delta) mu with delta = (k + sqrt(k^2 + 8 mu k)) / (2 mu)
    return mu_expect + 0.5 * (k + std::sqrt(k * k + 8.0 * mu_expect * k));
}

} // namespace fcs
