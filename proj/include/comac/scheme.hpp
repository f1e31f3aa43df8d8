#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "comac/closedform.hpp"
#include "comac/config.hpp"
#include "comac/fading.hpp"
#include "comac/orderstats.hpp"
#include "comac/parallel.hpp"

namespace comac {

using BigInt = boost::multiprecision::cpp_int;

// Cardinalities of the sub-function set S, the superposition set H, and the
// combination set X. Exact arbitrary-precision integers.
struct EnumerationCounts {
    BigInt subfunctions;    // |S| = C(K, M)
    BigInt superpositions;  // |H| = prod_{l=0}^{L-1} C(K - Ml, M)
    BigInt combinations;    // |X| = prod_l C(ML - Ml, M) * prod_d C(K - Md, ML)
};

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt result = 1;
    for (int i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

inline EnumerationCounts enumeration_counts(int num_nodes, int group_size,
                                            int num_superposed) {
    const int k = num_nodes, m = group_size, l = num_superposed;
    if (k <= 0 || m <= 0 || l <= 0 || k % m != 0)
        throw std::invalid_argument("enumeration_counts: K must be a multiple of M");
    if (l * m > k)
        throw std::invalid_argument("enumeration_counts: L*M exceeds K");
    const int num_groups = k / m;
    if (num_groups % l != 0)
        throw std::invalid_argument("enumeration_counts: B must be a multiple of L");
    const int d = num_groups / l;

    EnumerationCounts counts;
    counts.subfunctions = binomial(k, m);
    counts.superpositions = 1;
    counts.combinations = 1;
    for (int i = 0; i < l; ++i) {
        counts.superpositions *= binomial(k - m * i, m);
        counts.combinations *= binomial(m * l - m * i, m);
    }
    for (int i = 0; i < d; ++i) counts.combinations *= binomial(k - m * i, m * l);
    return counts;
}

// Per-node per-sub-carrier transmit powers and the power factors behind them.
struct PowerPlan {
    int num_nodes = 0;
    int num_subcarriers = 0;
    std::vector<double> powers;               // powers[i + K*g]
    std::vector<std::vector<double>> betas;   // betas[g][l-1], chosen groups only

    double power(int node, int subcarrier) const {
        return powers[node + static_cast<std::size_t>(num_nodes) * subcarrier];
    }
};

// Average power control (all expectations noise-normalized): node at rank
// u in group l of sub-carrier g transmits
//   P_u = beta_l * K * P * (X_(Ml) / X_(u)) / (N * M * sum_l beta_l varpi_l),
// zero outside the first L groups. The normalizer makes E[P_{i,g}] = P/N under
// the rank-averaged varpi table, and equalizes gain*power within each group.
inline PowerPlan allocate_power(const ChannelBlock& block,
                                const SystemConfig& cfg,
                                const VarpiTable& varpi,
                                const std::vector<std::vector<double>>& betas) {
    if (varpi.num_nodes != cfg.num_nodes || varpi.group_size != cfg.group_size)
        throw std::invalid_argument("allocate_power: varpi table mismatch");
    const int k = cfg.num_nodes, m = cfg.group_size, l_max = cfg.num_superposed;
    const int n = cfg.num_subcarriers;

    PowerPlan plan;
    plan.num_nodes = k;
    plan.num_subcarriers = n;
    plan.powers.assign(static_cast<std::size_t>(k) * n, 0.0);
    plan.betas = betas;

    for (int g = 0; g < n; ++g) {
        const auto& beta = betas.at(g);
        double norm = 0.0;
        for (int l = 1; l <= l_max; ++l) {
            if (beta.at(l - 1) < 0.0)
                throw std::invalid_argument("allocate_power: negative beta");
            norm += beta[l - 1] * varpi.varpi(l);
        }
        if (norm <= 0.0)
            throw std::invalid_argument("allocate_power: all-zero betas");
        const double scale = k * cfg.power_budget / (n * m * norm);
        for (int l = 1; l <= l_max; ++l) {
            const double group_gain = block.gain_at_rank(m * l - 1, g);
            for (int u = m * (l - 1); u < m * l; ++u) {
                const int node = block.ranks[g][u];
                plan.powers[node + static_cast<std::size_t>(k) * g] =
                    beta[l - 1] * scale * group_gain / block.gain(node, g);
            }
        }
    }
    return plan;
}

// Optimal power-factor pair for L = 2 (beta2 normalized to 1; only the ratio
// matters). Solving R_1 = R_2 for beta1 gives
//   beta1 = (sqrt((U varpi2 + varpi1)^2 + 4 P (K/M) gain_M varpi1)
//            + varpi1 - U varpi2) / (2 U varpi1),  U = gain_M / gain_2M.
inline std::pair<double, double> beta_pair(double gain_m, double gain_2m,
                                           double varpi1, double varpi2,
                                           const SystemConfig& cfg) {
    if (!(gain_2m > 0.0) || !(gain_m >= gain_2m))
        throw std::invalid_argument("beta_pair: need gain_M >= gain_2M > 0");
    const double ratio = gain_m / gain_2m;
    const double a = cfg.power_budget * cfg.num_nodes / cfg.group_size;
    const double gamma = ratio * varpi2 + varpi1;
    const double beta1 =
        (std::sqrt(gamma * gamma + 4.0 * a * gain_m * varpi1) + varpi1 -
         ratio * varpi2) /
        (2.0 * ratio * varpi1);
    return {beta1, 1.0};
}

namespace detail {

// min over group l of gain*power on sub-carrier g (the group's SIC signal).
inline double group_signal(const ChannelBlock& block, const PowerPlan& plan,
                           int g, int l, int group_size) {
    double lowest = std::numeric_limits<double>::infinity();
    for (int u = group_size * (l - 1); u < group_size * l; ++u) {
        const int node = block.ranks[g][u];
        lowest = std::min(lowest, block.gain(node, g) * plan.power(node, g));
    }
    return lowest;
}

// C+ argument of the l-th sub-function under SIC (groups l+1..L interfere).
inline double sic_argument(const ChannelBlock& block, const PowerPlan& plan,
                           const SystemConfig& cfg, int g, int l) {
    const int n = cfg.num_subcarriers;
    double interference = 0.0;
    for (int j = l + 1; j <= cfg.num_superposed; ++j)
        interference += group_signal(block, plan, g, j, cfg.group_size);
    const double signal = group_signal(block, plan, g, l, cfg.group_size);
    return static_cast<double>(n) / cfg.group_size +
           n * signal / (1.0 + n * interference);
}

}  // namespace detail

// Instantaneous rate of the l-th sub-function on sub-carrier g (both 1-based
// rank group and 0-based sub-carrier index).
inline double sub_function_rate(const ChannelBlock& block, const PowerPlan& plan,
                                int g, int l, const SystemConfig& cfg) {
    if (l < 1 || l > cfg.num_superposed)
        throw std::out_of_range("sub_function_rate: group index");
    return c_plus(detail::sic_argument(block, plan, cfg, g, l)) /
           cfg.num_subcarriers;
}

// Rate of a superposition: the slowest of its sub-functions.
inline double superposition_rate(std::span<const double> rates) {
    if (rates.empty())
        throw std::invalid_argument("superposition_rate: empty rate vector");
    double lowest = rates[0];
    for (double r : rates) lowest = std::min(lowest, r);
    return lowest;
}

// Instantaneous NOMA-CoMAC rate of one OFDM symbol:
//   (M L / (K N)) * sum_g min_l C+( sic_argument(g, l) ).
inline double symbol_rate(const ChannelBlock& block, const PowerPlan& plan,
                          const SystemConfig& cfg) {
    double sum = 0.0;
    for (int g = 0; g < cfg.num_subcarriers; ++g) {
        double lowest = std::numeric_limits<double>::infinity();
        for (int l = 1; l <= cfg.num_superposed; ++l)
            lowest = std::min(lowest,
                              c_plus(detail::sic_argument(block, plan, cfg, g, l)));
        sum += lowest;
    }
    return sum * cfg.group_size * cfg.num_superposed /
           (static_cast<double>(cfg.num_nodes) * cfg.num_subcarriers);
}

enum class PowerRule { EqualBeta, PairOptimal };

// Per-sub-carrier power factors for one block under the given rule.
inline std::vector<std::vector<double>> choose_betas(const ChannelBlock& block,
                                                     const SystemConfig& cfg,
                                                     const VarpiTable& varpi,
                                                     PowerRule rule) {
    std::vector<std::vector<double>> betas(cfg.num_subcarriers);
    for (int g = 0; g < cfg.num_subcarriers; ++g) {
        if (rule == PowerRule::PairOptimal) {
            const double x = block.gain_at_rank(cfg.group_size - 1, g);
            const double y = block.gain_at_rank(2 * cfg.group_size - 1, g);
            const auto [b1, b2] =
                beta_pair(x, y, varpi.varpi(1), varpi.varpi(2), cfg);
            betas[g] = {b1, b2};
        } else {
            betas[g].assign(cfg.num_superposed, 1.0);
        }
    }
    return betas;
}

// Ergodic computation rate: symbol_rate averaged over cfg.trials blocks.
inline RateEstimate ergodic_rate_mc(const SystemConfig& cfg, PowerRule rule,
                                    const VarpiTable& varpi) {
    cfg.validate();
    if (rule == PowerRule::PairOptimal && cfg.num_superposed != 2)
        throw std::invalid_argument("ergodic_rate_mc: pair-optimal needs L == 2");
    auto eval = [&cfg, &varpi, rule](long trial) {
        Philox stream(cfg.seed, static_cast<std::uint64_t>(trial));
        const ChannelBlock block = draw_block(cfg, stream);
        const auto betas = choose_betas(block, cfg, varpi, rule);
        const PowerPlan plan = allocate_power(block, cfg, varpi, betas);
        return symbol_rate(block, plan, cfg);
    };
    const MeanEstimate est = parallel_mean(cfg.trials, eval);
    return {est.mean, Method::MonteCarlo, cfg.trials, est.std_error};
}

}  // namespace comac
