#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "comac/closedform.hpp"
#include "comac/fading.hpp"
#include "comac/orderstats.hpp"
#include "comac/parallel.hpp"
#include "comac/quadrature.hpp"
#include "comac/rng.hpp"
#include "comac/scheme.hpp"

namespace comac {

// Fixed-power-factor outage setup for the sub-function pair scheme (L = 2).
struct OutageConfig {
    int num_nodes = 0;        // K
    int group_size = 1;       // M
    int num_subcarriers = 1;  // N
    double target_rate = 0.0; // R^T, bits per channel use
    double beta1 = 1.0;
    double beta2 = 1.0;
    std::vector<double> power_grid;  // ascending, linear

    // epsilon_{R^T} = 2^{R^T K N / (2M)} - N/M; outage is identically zero
    // when the target sits below the guaranteed C+ floor (epsilon <= 0).
    double epsilon() const {
        return std::exp2(target_rate * num_nodes * num_subcarriers /
                         (2.0 * group_size)) -
               static_cast<double>(num_subcarriers) / group_size;
    }

    void validate() const {
        if (num_nodes <= 2 * group_size)
            throw std::invalid_argument("outage: K must exceed 2M");
        if (num_subcarriers <= 0)
            throw std::invalid_argument("outage: N must be positive");
        if (target_rate <= 0.0)
            throw std::invalid_argument("outage: target rate must be positive");
        if (beta1 <= 0.0 || beta2 <= 0.0)
            throw std::invalid_argument("outage: betas must be positive");
        for (std::size_t i = 0; i < power_grid.size(); ++i) {
            if (power_grid[i] <= 0.0 ||
                (i > 0 && power_grid[i] <= power_grid[i - 1]))
                throw std::invalid_argument(
                    "outage: power grid must be ascending and positive");
        }
    }
};

struct OutagePoint {
    double power = 0.0;
    double outage = 0.0;
    double std_error = 0.0;  // zero for analytic points
};

struct OutageCurve {
    std::vector<OutagePoint> points;
    Method method = Method::ClosedForm;
    std::optional<double> fitted_slope;
};

namespace detail {

// log of Theta = K! / ((M-1)!^2 (K-2M)!), the two-order-statistic coefficient.
inline double log_theta(int k, int m) {
    return log_factorial(k) - 2.0 * log_factorial(m - 1) -
           log_factorial(k - 2 * m);
}

// Closed form of int_a^b e^{-Mx} (e^{-y} - e^{-x})^{M-1} dx for y <= a <= b;
// pass b = +inf for the open upper tail. Substituting u = e^{-y} - e^{-x}
// turns it into int (c - u)^{M-1} u^{M-1} du with c = e^{-y}, a polynomial.
inline double inner_x_integral(int m, double y, double a, double b) {
    const double c = std::exp(-y);
    const double ua = std::max(0.0, c - std::exp(-a));
    const double ub = std::isinf(b) ? c : std::max(0.0, c - std::exp(-b));
    if (ub <= ua) return 0.0;
    double sum = 0.0;
    double coef = 1.0;  // C(M-1, j) c^{M-1-j} (-1)^j, built incrementally
    for (int j = 0; j < m; ++j) {
        if (j == 0) {
            coef = std::pow(c, m - 1);
        } else {
            coef *= -static_cast<double>(m - j) / (j * c);
        }
        sum += coef * (std::pow(ub, m + j) - std::pow(ua, m + j)) / (m + j);
    }
    return sum;
}

}  // namespace detail

// Per-sub-carrier outage probability by quadrature of the joint order-statistic
// density over the two success regions of the pair scheme: with x = X_(M),
// y = X_(2M),
//   alpha1 = Pr{ phi1 < x < phi2, y > xi/P }   (decode order 1 then 2)
//   alpha2 = Pr{ x > phi3, y > eps/(N P beta2) } (decode order 2 then 1)
// and outage = 1 - alpha1 - alpha2. The x-integral is exact; only the y
// integral is adaptive.
inline double outage_subcarrier_analytic(const OutageConfig& cfg, double power) {
    cfg.validate();
    if (power <= 0.0)
        throw std::invalid_argument("outage: power must be positive");
    const double eps = cfg.epsilon();
    if (eps <= 0.0) return 0.0;

    const int k = cfg.num_nodes, m = cfg.group_size;
    const double n = cfg.num_subcarriers;
    const double b1 = cfg.beta1, b2 = cfg.beta2;
    const double theta = std::exp(detail::log_theta(k, m));

    const auto weight = [&](double y) {
        double w = std::exp(-y);
        if (k > 2 * m) w *= std::pow(-std::expm1(-y), k - 2 * m);
        return w;
    };
    const auto phi1 = [&](double y) { return eps / (n * b1 * power) + eps * b2 / b1 * y; };
    const auto phi2 = [&](double y) { return b2 / b1 * y + n * power * b2 / b1 * y * y; };

    const double xi =
        (eps - 1.0 + std::sqrt(4.0 * eps / b2 + (eps - 1.0) * (eps - 1.0))) /
        (2.0 * n);
    const double y1 = xi / power;                 // alpha1 y threshold
    const double y2 = eps / (n * power * b2);     // alpha2 y threshold

    const auto alpha1_integrand = [&](double y) {
        const double lo = std::max(y, phi1(y));
        const double hi = std::max(lo, phi2(y));
        return weight(y) * detail::inner_x_integral(m, y, lo, hi);
    };
    const auto alpha2_integrand = [&](double y) {
        const double lo = std::max(y, phi2(y));  // phi3 == phi2
        return weight(y) *
               detail::inner_x_integral(m, y, lo,
                                        std::numeric_limits<double>::infinity());
    };

    const double alpha1 = integrate_tail(alpha1_integrand, y1).value;
    const double alpha2 = integrate_tail(alpha2_integrand, y2).value;
    const double outage = 1.0 - theta * (alpha1 + alpha2);
    return std::clamp(outage, 0.0, 1.0);
}

// Independence across sub-carriers: P_out = (P_out^sub)^N.
inline double outage_analytic(const OutageConfig& cfg, double power) {
    return std::pow(outage_subcarrier_analytic(cfg, power),
                    cfg.num_subcarriers);
}

namespace detail {

// Success test for one sub-carrier: either SIC order must push both
// sub-function rates past the target. Comparisons run on the C+ arguments,
// mapped through the same epsilon scale as the analytic regions.
inline bool subcarrier_success(double z1, double z2, double eps) {
    const double r1 = z1 / (1.0 + z2);  // group l1 decoded first, l2 interferes
    const double r2 = z2;               // group l2 decoded after cancellation
    const bool order12 = r1 > eps && r2 >= r1;
    const bool order21 = r2 > eps && r1 > r2;
    return order12 || order21;
}

}  // namespace detail

// Monte Carlo outage for the group pair (l1, l2) by rank (1-based, l1 < l2).
// By default powers follow the fixed-factor rule P_u = beta_l P X_(Ml)/X_u,
// the model behind the analytic regions, so both methods target the same
// event. When a varpi table is supplied, the per-realization optimal pair
// factors are used instead (the adaptive rule behind the rate results); the
// first group's strength then shifts the curve while the second group still
// sets the decay.
inline MeanEstimate pair_choice_outage(const OutageConfig& cfg, double power,
                                       std::pair<int, int> pair, long trials,
                                       std::uint64_t seed,
                                       const VarpiTable* varpi = nullptr) {
    cfg.validate();
    const auto [l1, l2] = pair;
    const int k = cfg.num_nodes, m = cfg.group_size, n = cfg.num_subcarriers;
    if (l1 < 1 || l1 >= l2 || l2 * m > k)
        throw std::invalid_argument("pair_choice_outage: bad group pair");
    if (varpi && (varpi->num_nodes != k || varpi->group_size != m))
        throw std::invalid_argument("pair_choice_outage: varpi table mismatch");
    const double eps = cfg.epsilon();
    if (eps <= 0.0) return {0.0, 0.0, trials};
    SystemConfig pair_cfg;
    pair_cfg.num_nodes = k;
    pair_cfg.group_size = m;
    pair_cfg.num_superposed = 2;
    pair_cfg.num_subcarriers = n;
    pair_cfg.power_budget = power;

    // P_out = (P_out^sub)^N: the symbol is in outage only when every
    // sub-carrier fails (frequency diversity across independent carriers).
    auto eval = [&, l1 = l1, l2 = l2](long trial) {
        Philox stream(seed, static_cast<std::uint64_t>(trial));
        std::vector<double> column(k);
        for (int g = 0; g < n; ++g) {
            for (double& v : column) v = stream.exponential();
            std::nth_element(column.begin(), column.begin() + (m * l2 - 1),
                             column.end(), std::greater<>());
            std::nth_element(column.begin(), column.begin() + (m * l1 - 1),
                             column.begin() + (m * l2 - 1), std::greater<>());
            const double x = column[m * l1 - 1];
            const double y = column[m * l2 - 1];
            double z1, z2;
            if (varpi) {
                const double w1 = varpi->varpi(l1), w2 = varpi->varpi(l2);
                const auto [b1, b2] = beta_pair(x, y, w1, w2, pair_cfg);
                const double scale = static_cast<double>(k) * power /
                                     (n * m * (b1 * w1 + b2 * w2));
                z1 = n * scale * b1 * x;
                z2 = n * scale * b2 * y;
            } else {
                z1 = n * power * cfg.beta1 * x;
                z2 = n * power * cfg.beta2 * y;
            }
            if (detail::subcarrier_success(z1, z2, eps)) return 0.0;
        }
        return 1.0;
    };
    MeanEstimate est = parallel_mean(trials, eval);
    // Bernoulli standard error.
    est.std_error = std::sqrt(std::max(0.0, est.mean * (1.0 - est.mean)) /
                              static_cast<double>(trials));
    return est;
}

// Default pair (1, 2): the strongest two rank groups, matching the analytic
// regions above.
inline MeanEstimate outage_mc(const OutageConfig& cfg, double power,
                              long trials, std::uint64_t seed) {
    return pair_choice_outage(cfg, power, {1, 2}, trials, seed);
}

// Least-squares slope of log10(outage) against log10(P) over a power window,
// negated so a P^-d curve yields d.
inline double diversity_fit(const OutageCurve& curve, double power_low,
                            double power_high) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : curve.points) {
        if (p.power >= power_low && p.power <= power_high && p.outage > 0.0)
            pts.emplace_back(std::log10(p.power), std::log10(p.outage));
    }
    if (pts.size() < 3)
        throw std::invalid_argument(
            "diversity_fit: need at least 3 positive-outage points in window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = pts.size() * sxx - sx * sx;
    return -(pts.size() * sxy - sx * sy) / denom;
}

}  // namespace comac
