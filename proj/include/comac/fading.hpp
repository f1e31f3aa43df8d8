#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "comac/config.hpp"
#include "comac/rng.hpp"

namespace comac {

// One OFDM symbol worth of channel state: K x N Rayleigh gains |h|^2 and the
// per-sub-carrier node orderings, strongest first. Immutable after draw.
struct ChannelBlock {
    int num_nodes = 0;
    int num_subcarriers = 0;
    std::vector<double> gains;            // gains[i + K*g]
    std::vector<std::vector<int>> ranks;  // ranks[g][u] = node with (u+1)-th largest gain

    double gain(int node, int subcarrier) const {
        return gains[node + static_cast<std::size_t>(num_nodes) * subcarrier];
    }
    // Gain of the node holding rank u (0-based, 0 = strongest) on sub-carrier g.
    double gain_at_rank(int u, int g) const { return gain(ranks[g][u], g); }
};

// Permutation sorting a gain column in descending order; ties broken by
// ascending node index so the ordering is deterministic.
inline std::vector<int> rank_nodes(std::span<const double> gains_column) {
    for (double v : gains_column)
        if (std::isnan(v)) throw std::invalid_argument("rank_nodes: NaN gain");
    std::vector<int> perm(gains_column.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
        return gains_column[a] > gains_column[b];
    });
    return perm;
}

// Raw i.i.d. Exp(1) gain matrix, K x N, drawn column by column. Shared by the
// pipeline and the closed-form estimators so identical streams give identical
// channel realizations.
inline std::vector<double> draw_gains(int num_nodes, int num_subcarriers,
                                      Philox& stream) {
    std::vector<double> gains(static_cast<std::size_t>(num_nodes) *
                              num_subcarriers);
    for (double& g : gains) g = stream.exponential();
    return gains;
}

inline ChannelBlock draw_block(const SystemConfig& cfg, Philox& stream) {
    ChannelBlock block;
    block.num_nodes = cfg.num_nodes;
    block.num_subcarriers = cfg.num_subcarriers;
    block.gains = draw_gains(cfg.num_nodes, cfg.num_subcarriers, stream);
    block.ranks.reserve(cfg.num_subcarriers);
    for (int g = 0; g < cfg.num_subcarriers; ++g) {
        std::span<const double> column(
            block.gains.data() + static_cast<std::size_t>(g) * cfg.num_nodes,
            static_cast<std::size_t>(cfg.num_nodes));
        block.ranks.push_back(rank_nodes(column));
    }
    return block;
}

}  // namespace comac
