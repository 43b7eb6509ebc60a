#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace seqlid {

using Count = std::uint64_t;

// Low/base/high probability bounds for one token in one category.
struct ProbabilityTriple {
    double low = 0.0;
    double base = 0.0;
    double high = 0.0;

    bool ordered() const { return 0.0 <= low && low <= base && base <= high && high <= 1.0; }
};

inline bool operator==(const ProbabilityTriple& a, const ProbabilityTriple& b) {
    return a.low == b.low && a.base == b.base && a.high == b.high;
}

struct EstimatorConfig {
    double deviations = 2.0;               // number of standard deviations d
    Count small_count_cutoff = 10;         // counts below this use the exact interval
    double zero_target = 0.95;             // confidence target for the zero probability
    double large_count_base_cutoff = 0.05; // base level above which the plain normal form is used

    void validate() const {
        if (!(deviations > 0.0)) throw std::invalid_argument("estimator: deviations must be > 0");
        if (small_count_cutoff < 1) throw std::invalid_argument("estimator: small_count_cutoff must be >= 1");
        if (!(zero_target > 0.0 && zero_target < 1.0))
            throw std::invalid_argument("estimator: zero_target must be in (0,1)");
        if (!(large_count_base_cutoff > 0.0 && large_count_base_cutoff < 1.0))
            throw std::invalid_argument("estimator: large_count_base_cutoff must be in (0,1)");
    }
};

namespace detail {

inline void check_counts(Count m, Count n, const char* where) {
    if (n == 0) throw std::invalid_argument(std::string(where) + ": trial count must be >= 1");
    if (m > n) throw std::invalid_argument(std::string(where) + ": successes exceed trials");
}

// P(X <= m) for X ~ Binomial(n, p). Terms are evaluated in log space so the
// sum stays finite for large n; callers keep m small.
inline double binomial_cdf(Count m, Count n, double p) {
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return m >= n ? 1.0 : 0.0;
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double log_fact_n = std::lgamma(static_cast<double>(n) + 1.0);
    double sum = 0.0;
    for (Count k = 0; k <= m; ++k) {
        const double kd = static_cast<double>(k);
        const double log_term = log_fact_n - std::lgamma(kd + 1.0) -
                                std::lgamma(static_cast<double>(n - k) + 1.0) + kd * log_p +
                                static_cast<double>(n - k) * log_q;
        sum += std::exp(log_term);
    }
    return std::min(sum, 1.0);
}

// Bisects f (strictly decreasing, f(0) > 0 > f(1)) on [0,1].
template <typename F>
inline double bisect_decreasing(F f, double abs_tol, int max_iter) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < max_iter && hi - lo > abs_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// f(t,l)/f(l), the base probability in every regime.
inline double base_probability(Count m, Count n) {
    detail::check_counts(m, n, "base_probability");
    return static_cast<double>(m) / static_cast<double>(n);
}

// Normal approximation to the binomial: base +/- d standard deviations,
// clamped to [0,1].
inline ProbabilityTriple normal_interval(Count m, Count n, double d) {
    detail::check_counts(m, n, "normal_interval");
    if (!(d > 0.0)) throw std::invalid_argument("normal_interval: deviations must be > 0");
    const double nd = static_cast<double>(n);
    const double base = static_cast<double>(m) / nd;
    const double sigma = std::sqrt(nd * base * (1.0 - base));
    const double low = (static_cast<double>(m) - d * sigma) / nd;
    const double high = (static_cast<double>(m) + d * sigma) / nd;
    return {std::max(low, 0.0), base, std::min(high, 1.0)};
}

// Solves the normal-approximation bounds with the deviation evaluated at the
// bound itself rather than at the base, under 1-p ~= 1:
//   low  = (sqrt(d^2 + 4m) - d)^2 / 4n
//   high = (sqrt(d^2 + 4m) + d)^2 / 4n
inline ProbabilityTriple refined_interval(Count m, Count n, double d) {
    detail::check_counts(m, n, "refined_interval");
    if (!(d > 0.0)) throw std::invalid_argument("refined_interval: deviations must be > 0");
    const double nd = static_cast<double>(n);
    const double root = std::sqrt(d * d + 4.0 * static_cast<double>(m));
    const double low = (root - d) * (root - d) / (4.0 * nd);
    const double high = (root + d) * (root + d) / (4.0 * nd);
    return {low, static_cast<double>(m) / nd, std::min(high, 1.0)};
}

// Exact (Clopper-Pearson) binomial interval for small counts, obtained by
// inverting the cumulative tails:
//   low  solves P(X >= m | n, p) = alpha/2
//   high solves P(X <= m | n, p) = alpha/2
// Roots are bisected to an absolute tolerance of 1e-12; both tails are
// strictly monotone in p, so each root is unique.
inline ProbabilityTriple exact_small_count_interval(Count m, Count n, double alpha,
                                                    Count small_count_cutoff = 10) {
    detail::check_counts(m, n, "exact_small_count_interval");
    if (m == 0)
        throw std::invalid_argument("exact_small_count_interval: zero count is handled by zero_probability");
    if (m >= small_count_cutoff)
        throw std::invalid_argument("exact_small_count_interval: count at or above the small-count cutoff");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("exact_small_count_interval: alpha must be in (0,1)");

    constexpr double tol = 1e-12;
    constexpr int max_iter = 200;
    const double tail = alpha / 2.0;

    // P(X >= m | p) = 1 - cdf(m-1, p) rises from 0 to 1 in p.
    const double low = detail::bisect_decreasing(
        [&](double p) { return detail::binomial_cdf(m - 1, n, p) - (1.0 - tail); }, tol, max_iter);

    // P(X <= m | p) falls from 1 as p grows; when m = n it is identically 1
    // and the upper bound saturates.
    double high = 1.0;
    if (m < n) {
        high = detail::bisect_decreasing(
            [&](double p) { return detail::binomial_cdf(m, n, p) - tail; }, tol, max_iter);
    }
    return {low, static_cast<double>(m) / static_cast<double>(n), high};
}

// Probability assigned to a token never seen in n training trials: the value
// of p at which observing zero occurrences has probability `target`,
//   p = 1 - target^(1/n).
inline double zero_probability(Count n, double target) {
    if (n == 0) throw std::invalid_argument("zero_probability: trial count must be >= 1");
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("zero_probability: target must be in (0,1)");
    return -std::expm1(std::log(target) / static_cast<double>(n));
}

// Two-sided tail mass outside d standard deviations of a standard normal,
// i.e. the alpha for which [-d, d] is a (1-alpha) confidence interval.
// Floored so extreme d (erfc underflow) still yields a valid probability.
inline double alpha_for_deviations(double d) {
    if (!(d > 0.0)) throw std::invalid_argument("alpha_for_deviations: deviations must be > 0");
    return std::max(std::erfc(d / std::sqrt(2.0)), 1e-300);
}

// Regime dispatch: zero counts take the zero probability, small counts the
// exact interval, moderate bases the refined form, large bases the plain
// normal form.
inline ProbabilityTriple estimate(Count m, Count n, const EstimatorConfig& config = {}) {
    config.validate();
    detail::check_counts(m, n, "estimate");
    if (m == 0) {
        const double z = zero_probability(n, config.zero_target);
        return {z, z, z};
    }
    if (m < config.small_count_cutoff) {
        return exact_small_count_interval(m, n, alpha_for_deviations(config.deviations),
                                          config.small_count_cutoff);
    }
    const double base = static_cast<double>(m) / static_cast<double>(n);
    if (base <= config.large_count_base_cutoff) return refined_interval(m, n, config.deviations);
    return normal_interval(m, n, config.deviations);
}

// A-priori token probability across all categories pooled. Only the base
// value is kept; unseen tokens fall back to the zero probability.
inline double prior_probability(Count m, Count total, const EstimatorConfig& config = {}) {
    config.validate();
    detail::check_counts(m, total, "prior_probability");
    if (m == 0) return zero_probability(total, config.zero_target);
    return static_cast<double>(m) / static_cast<double>(total);
}

}  // namespace seqlid
