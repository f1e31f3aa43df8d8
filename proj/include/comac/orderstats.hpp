#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "comac/parallel.hpp"
#include "comac/rng.hpp"

namespace comac {

// x-quantile of the Exp(1) gain distribution, xi_x = -ln(1-x).
inline double xi_quantile(double x) {
    if (!(x >= 0.0 && x < 1.0))
        throw std::domain_error("xi_quantile: x must lie in [0, 1)");
    return -std::log1p(-x);
}

// Mean of the j-th largest of K Exp(1) variates: sum_{i=j}^{K} 1/i.
inline double order_stat_mean(int num_samples, int j) {
    if (j < 1 || j > num_samples)
        throw std::domain_error("order_stat_mean: rank out of range");
    double sum = 0.0;
    for (int i = num_samples; i >= j; --i) sum += 1.0 / i;
    return sum;
}

// Expectation constants varpi_l coupling ordered gains to the power budget.
// values[l-1] = (1/M) * sum_{j in group l} E[X_(Ml) / X_(j)], where X_(j) is
// the j-th largest of K sorted Exp(1) samples. Rank-averaging keeps the ratio
// finite and in (0, 1] and makes the average-power identity exact.
struct VarpiTable {
    int num_nodes = 0;   // K
    int group_size = 0;  // M
    long trials = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;           // indexed by group l-1, l in [1..B]
    std::vector<double> standard_errors;

    double varpi(int l) const { return values.at(l - 1); }
};

inline VarpiTable estimate_varpi(int num_nodes, int group_size, long trials,
                                 std::uint64_t seed) {
    if (num_nodes <= 0 || group_size <= 0 || num_nodes % group_size != 0)
        throw std::invalid_argument("estimate_varpi: K must be a multiple of M");
    if (trials <= 0) throw std::invalid_argument("estimate_varpi: trials == 0");

    const int num_groups = num_nodes / group_size;
    VarpiTable table;
    table.num_nodes = num_nodes;
    table.group_size = group_size;
    table.trials = trials;
    table.seed = seed;
    table.values.resize(num_groups);
    table.standard_errors.resize(num_groups);

    // One pass per group keeps the reduction deterministic; samples are
    // regenerated per group from the same per-trial streams.
    for (int l = 1; l <= num_groups; ++l) {
        auto eval = [&, l](long trial) {
            Philox stream(seed, static_cast<std::uint64_t>(trial));
            std::vector<double> sample(num_nodes);
            for (double& v : sample) v = stream.exponential();
            std::sort(sample.begin(), sample.end(), std::greater<>());
            const double pivot = sample[group_size * l - 1];  // X_(Ml)
            double acc = 0.0;
            for (int j = group_size * (l - 1); j < group_size * l; ++j)
                acc += pivot / sample[j];
            return acc / group_size;
        };
        const MeanEstimate est = parallel_mean(trials, eval);
        table.values[l - 1] = est.mean;
        table.standard_errors[l - 1] = est.std_error;
    }
    return table;
}

namespace detail {
inline double log_factorial(int n) { return std::lgamma(n + 1.0); }
}

// Joint density of the M-th and 2M-th largest of K Exp(1) variates,
//   f(x,y) = Theta * e^{-Mx} (e^{-y}-e^{-x})^{M-1} e^{-y} (1-e^{-y})^{K-2M}
// for x >= y >= 0, with Theta = K! / ((M-1)!^2 (K-2M)!). The e^{-Mx} factor
// is the sample at x together with the M-1 samples above it, each carrying
// survival weight e^{-x}. Factorials are taken in log space so large K does
// not overflow.
inline double joint_order_pdf(int num_nodes, int group_size, double x, double y) {
    const int k = num_nodes, m = group_size;
    if (k < 2 * m) throw std::invalid_argument("joint_order_pdf: K < 2M");
    if (x < y || y < 0.0) return 0.0;
    const double log_theta = detail::log_factorial(k) -
                             2.0 * detail::log_factorial(m - 1) -
                             detail::log_factorial(k - 2 * m);
    const double ey = std::exp(-y);
    const double middle = ey - std::exp(-x);
    if (middle < 0.0) return 0.0;  // guards x == y rounding
    double log_f = log_theta - m * x - y;
    if (m > 1) {
        if (middle == 0.0) return 0.0;
        log_f += (m - 1) * std::log(middle);
    }
    if (k > 2 * m) {
        const double one_minus_ey = -std::expm1(-y);
        if (one_minus_ey <= 0.0) return 0.0;
        log_f += (k - 2 * m) * std::log(one_minus_ey);
    }
    return std::exp(log_f);
}

// Single order-statistic density of the M-th largest of K Exp(1) variates.
inline double order_stat_pdf(int num_nodes, int group_size, double x) {
    const int k = num_nodes, m = group_size;
    if (m < 1 || m > k) throw std::invalid_argument("order_stat_pdf: rank range");
    if (x < 0.0) return 0.0;
    const double log_coef = detail::log_factorial(k) -
                            detail::log_factorial(m - 1) -
                            detail::log_factorial(k - m);
    const double one_minus_ex = -std::expm1(-x);
    double log_f = log_coef - m * x;
    if (k > m) {
        if (one_minus_ex <= 0.0) return 0.0;
        log_f += (k - m) * std::log(one_minus_ex);
    }
    return std::exp(log_f);
}

}  // namespace comac
