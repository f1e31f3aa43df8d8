#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace comac {

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long count = 0;
};

// Runs eval(trial) for trial in [0, trials) across hardware threads and
// averages the results. Trials are grouped into fixed-size chunks; each chunk
// is summed serially and chunk sums are combined in index order, so the result
// is bit-identical for any worker count.
inline MeanEstimate parallel_mean(long trials,
                                  const std::function<double(long)>& eval,
                                  unsigned workers = 0) {
    constexpr long kChunk = 4096;
    const long num_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<double> sums(num_chunks, 0.0), sqsums(num_chunks, 0.0);

    if (workers == 0) workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;

    std::atomic<long> next{0};
    auto body = [&] {
        for (long c = next.fetch_add(1); c < num_chunks; c = next.fetch_add(1)) {
            const long lo = c * kChunk;
            const long hi = std::min(trials, lo + kChunk);
            double s = 0.0, s2 = 0.0;
            for (long t = lo; t < hi; ++t) {
                const double v = eval(t);
                s += v;
                s2 += v * v;
            }
            sums[c] = s;
            sqsums[c] = s2;
        }
    };

    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();

    double sum = 0.0, sqsum = 0.0;
    for (long c = 0; c < num_chunks; ++c) {
        sum += sums[c];
        sqsum += sqsums[c];
    }
    MeanEstimate est;
    est.count = trials;
    est.mean = sum / static_cast<double>(trials);
    if (trials > 1) {
        const double var =
            std::max(0.0, (sqsum - sum * est.mean) / static_cast<double>(trials - 1));
        est.std_error = std::sqrt(var / static_cast<double>(trials));
    }
    return est;
}

}  // namespace comac
