#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace comac {

// All scheme parameters. Power is linear and noise-normalized: the per-node
// budget P is spread across N sub-carriers, SNR(dB) = 10*log10(P).
struct SystemConfig {
    int num_nodes = 0;        // K
    int group_size = 1;       // M, nodes per sub-function
    int num_superposed = 1;   // L, sub-functions per sub-carrier
    int num_subcarriers = 1;  // N
    double power_budget = 1.0;
    long trials = 100000;
    std::uint64_t seed = 0;

    int num_groups() const { return num_nodes / group_size; }  // B = K/M

    void validate() const {
        if (num_nodes <= 0 || group_size <= 0 || num_superposed <= 0 ||
            num_subcarriers <= 0)
            throw std::invalid_argument("config: K, M, L, N must be positive");
        if (num_nodes % group_size != 0)
            throw std::invalid_argument("config: K must be divisible by M");
        if (num_superposed * group_size > num_nodes)
            throw std::invalid_argument("config: L*M must not exceed K");
        if (num_superposed == 2 && num_nodes % (2 * group_size) != 0)
            throw std::invalid_argument(
                "config: pair pipeline requires K divisible by 2M");
        if (power_budget <= 0.0)
            throw std::invalid_argument("config: power budget must be positive");
        if (trials <= 0)
            throw std::invalid_argument("config: trials must be positive");
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double p) { return 10.0 * std::log10(p); }

}  // namespace comac
