#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "comac/fading.hpp"
#include "comac/orderstats.hpp"
#include "comac/parallel.hpp"

namespace comac {

enum class Method { MonteCarlo, ClosedForm, Limiting, Asymptote };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::MonteCarlo: return "monte-carlo";
        case Method::ClosedForm: return "closed-form";
        case Method::Limiting: return "limiting";
        case Method::Asymptote: return "asymptote";
    }
    return "?";
}

// A rate value in bits per channel use plus estimator metadata. std_error is
// meaningful only for Monte Carlo estimates.
struct RateEstimate {
    double value = 0.0;
    Method method = Method::ClosedForm;
    long trials = 0;
    double std_error = 0.0;
};

// C+(x) = max(1/2 log2(x), 0).
inline double c_plus(double x) {
    if (x <= 0.0) throw std::domain_error("c_plus: non-positive argument");
    return std::max(0.5 * std::log2(x), 0.0);
}

namespace detail {

// u-th largest (1-based) of a gain column, via partial selection.
inline double nth_largest(std::vector<double>& scratch, int u) {
    std::nth_element(scratch.begin(), scratch.begin() + (u - 1), scratch.end(),
                     std::greater<>());
    return scratch[u - 1];
}

}  // namespace detail

// Ergodic NB-CoMAC rate: (1/B) E[ C+( 1/M + X_(M) K P / (M varpi1) ) ].
inline RateEstimate nb_rate(int num_nodes, int group_size, double power,
                            const VarpiTable& varpi, long trials,
                            std::uint64_t seed) {
    if (num_nodes % group_size != 0)
        throw std::invalid_argument("nb_rate: K must be a multiple of M");
    const int k = num_nodes, m = group_size;
    const int num_groups = k / m;
    const double varpi1 = varpi.varpi(1);
    auto eval = [=](long trial) {
        Philox stream(seed, static_cast<std::uint64_t>(trial));
        std::vector<double> gains = draw_gains(k, 1, stream);
        const double x_m = detail::nth_largest(gains, m);
        return c_plus(1.0 / m + x_m * k * power / (m * varpi1)) / num_groups;
    };
    const MeanEstimate est = parallel_mean(trials, eval);
    return {est.mean, Method::MonteCarlo, trials, est.std_error};
}

// Ergodic WB-CoMAC rate over N sub-carriers:
// (1/(BN)) E[ sum_g C+( N/M + K P X^g_(M) / (M varpi1) ) ].
inline RateEstimate wb_rate(int num_nodes, int group_size, int num_subcarriers,
                            double power, const VarpiTable& varpi, long trials,
                            std::uint64_t seed) {
    if (num_nodes % group_size != 0)
        throw std::invalid_argument("wb_rate: K must be a multiple of M");
    const int k = num_nodes, m = group_size, n = num_subcarriers;
    const int num_groups = k / m;
    const double varpi1 = varpi.varpi(1);
    auto eval = [=](long trial) {
        Philox stream(seed, static_cast<std::uint64_t>(trial));
        std::vector<double> gains = draw_gains(k, n, stream);
        std::vector<double> column(k);
        double sum = 0.0;
        for (int g = 0; g < n; ++g) {
            std::copy_n(gains.begin() + static_cast<std::size_t>(g) * k, k,
                        column.begin());
            const double x_m = detail::nth_largest(column, m);
            sum += c_plus(static_cast<double>(n) / m +
                          k * power * x_m / (m * varpi1));
        }
        return sum / (static_cast<double>(num_groups) * n);
    };
    const MeanEstimate est = parallel_mean(trials, eval);
    return {est.mean, Method::MonteCarlo, trials, est.std_error};
}

// Ergodic NOMA-CoMAC pair rate with average power control (L = 2):
// (2/(BN)) E[ sum_g C+( N/M + 2 P (K/M) x / (Gamma + sqrt(Gamma^2 +
// 4 P (K/M) x varpi1)) ) ], Gamma = (x/y) varpi2 + varpi1, x = X_(M),
// y = X_(2M) per sub-carrier.
inline RateEstimate noma_pair_rate(int num_nodes, int group_size,
                                   int num_subcarriers, double power,
                                   const VarpiTable& varpi, long trials,
                                   std::uint64_t seed) {
    if (num_nodes % (2 * group_size) != 0)
        throw std::invalid_argument("noma_pair_rate: K must be a multiple of 2M");
    const int k = num_nodes, m = group_size, n = num_subcarriers;
    const int num_groups = k / m;
    const double varpi1 = varpi.varpi(1);
    const double varpi2 = varpi.varpi(2);
    const double a = power * k / m;
    auto eval = [=](long trial) {
        Philox stream(seed, static_cast<std::uint64_t>(trial));
        std::vector<double> gains = draw_gains(k, n, stream);
        std::vector<double> column(k);
        double sum = 0.0;
        for (int g = 0; g < n; ++g) {
            std::copy_n(gains.begin() + static_cast<std::size_t>(g) * k, k,
                        column.begin());
            std::nth_element(column.begin(), column.begin() + (2 * m - 1),
                             column.end(), std::greater<>());
            std::nth_element(column.begin(), column.begin() + (m - 1),
                             column.begin() + (2 * m - 1), std::greater<>());
            const double x = column[m - 1];
            const double y = column[2 * m - 1];
            const double gamma = (x / y) * varpi2 + varpi1;
            const double sinr =
                2.0 * a * x /
                (gamma + std::sqrt(gamma * gamma + 4.0 * a * x * varpi1));
            sum += c_plus(static_cast<double>(n) / m + sinr);
        }
        return 2.0 * sum / (static_cast<double>(num_groups) * n);
    };
    const MeanEstimate est = parallel_mean(trials, eval);
    return {est.mean, Method::MonteCarlo, trials, est.std_error};
}

// Limiting NOMA pair rate as K -> infinity at fixed r = M/K, r in (0, 1/2).
inline double limit_rate_noma(double r, int num_nodes, int num_subcarriers,
                              double power, double varpi1, double varpi2) {
    if (!(r > 0.0 && r < 0.5))
        throw std::domain_error("limit_rate_noma: r must lie in (0, 1/2)");
    const double xi1 = xi_quantile(1.0 - r);
    const double xi2 = xi_quantile(1.0 - 2.0 * r);
    const double delta = varpi1 * xi2 + varpi2 * xi1;
    const double sinr =
        2.0 * power * xi1 * xi2 /
        (r * delta + std::sqrt(r * delta * r * delta +
                               4.0 * r * varpi1 * power * xi1 * xi2 * xi2));
    return 2.0 * r *
           c_plus(num_subcarriers / (r * num_nodes) + sinr);
}

// Limiting WB rate: r C+( N/(rK) + xi_{1-r} P / (r varpi1) ); N = 1 gives the
// NB limit.
inline double limit_rate_wb(double r, int num_nodes, int num_subcarriers,
                            double power, double varpi1) {
    if (!(r > 0.0 && r < 1.0))
        throw std::domain_error("limit_rate_wb: r must lie in (0, 1)");
    const double xi1 = xi_quantile(1.0 - r);
    return r * c_plus(num_subcarriers / (r * num_nodes) +
                      xi1 * power / (r * varpi1));
}

inline double limit_rate_nb(double r, int num_nodes, double power,
                            double varpi1) {
    return limit_rate_wb(r, num_nodes, 1, power, varpi1);
}

// High-SNR asymptote of the NOMA limiting rate: 2r C+( sqrt(P xi_{1-r}) ).
inline double high_snr_asymptote(double r, double power) {
    if (!(r > 0.0 && r < 0.5))
        throw std::domain_error("high_snr_asymptote: r must lie in (0, 1/2)");
    if (power <= 0.0)
        throw std::domain_error("high_snr_asymptote: power must be positive");
    return 2.0 * r * c_plus(std::sqrt(power * xi_quantile(1.0 - r)));
}

}  // namespace comac
