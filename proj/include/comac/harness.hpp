#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "comac/closedform.hpp"
#include "comac/config.hpp"
#include "comac/outage.hpp"
#include "comac/scheme.hpp"

namespace comac {

// ---------------------------------------------------------------------------
// Tabular output. CSV is the primary format ('#' comment header carrying the
// seed and parameters, then a header row); JSON mirrors it.

struct CsvDocument {
    std::vector<std::string> comments;  // without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string format_sig(double v, int digits = 4) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

inline void write_csv(std::ostream& os, const CsvDocument& doc) {
    for (const auto& c : doc.comments) os << "# " << c << "\n";
    for (std::size_t i = 0; i < doc.header.size(); ++i)
        os << (i ? "," : "") << doc.header[i];
    os << "\n";
    for (const auto& row : doc.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << row[i];
        os << "\n";
    }
}

inline void write_json(std::ostream& os, const CsvDocument& doc) {
    nlohmann::json j;
    j["comments"] = doc.comments;
    j["columns"] = doc.header;
    j["rows"] = doc.rows;
    os << j.dump(2) << "\n";
}

inline void write_document(const std::string& path, const CsvDocument& doc,
                           const std::string& format) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    if (format == "json")
        write_json(os, doc);
    else
        write_csv(os, doc);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    return fields;
}

inline CsvDocument read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open file: " + path);
    CsvDocument doc;
    std::string line;
    bool saw_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            doc.comments.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        if (!saw_header) {
            doc.header = split_csv_line(line);
            saw_header = true;
        } else {
            doc.rows.push_back(split_csv_line(line));
        }
    }
    if (!saw_header) throw std::runtime_error("malformed CSV: no header row");
    return doc;
}

// ---------------------------------------------------------------------------
// VarpiTable JSON serialization and disk cache keyed by (K, M, trials, seed).

inline nlohmann::json varpi_to_json(const VarpiTable& table) {
    return {{"K", table.num_nodes},       {"M", table.group_size},
            {"trials", table.trials},     {"seed", table.seed},
            {"values", table.values},     {"standard_errors", table.standard_errors}};
}

inline VarpiTable varpi_from_json(const nlohmann::json& j) {
    VarpiTable table;
    table.num_nodes = j.at("K").get<int>();
    table.group_size = j.at("M").get<int>();
    table.trials = j.at("trials").get<long>();
    table.seed = j.at("seed").get<std::uint64_t>();
    table.values = j.at("values").get<std::vector<double>>();
    table.standard_errors = j.at("standard_errors").get<std::vector<double>>();
    return table;
}

inline VarpiTable load_or_estimate_varpi(int num_nodes, int group_size,
                                         long trials, std::uint64_t seed,
                                         const std::string& cache_dir = "") {
    if (cache_dir.empty())
        return estimate_varpi(num_nodes, group_size, trials, seed);
    std::ostringstream name;
    name << "varpi_K" << num_nodes << "_M" << group_size << "_T" << trials
         << "_S" << seed << ".json";
    const std::filesystem::path path =
        std::filesystem::path(cache_dir) / name.str();
    if (std::filesystem::exists(path)) {
        std::ifstream is(path);
        nlohmann::json j;
        is >> j;
        return varpi_from_json(j);
    }
    VarpiTable table = estimate_varpi(num_nodes, group_size, trials, seed);
    std::filesystem::create_directories(cache_dir);
    std::ofstream os(path);
    os << varpi_to_json(table).dump(2) << "\n";
    return table;
}

// ---------------------------------------------------------------------------
// Experiments. Every document records seed and fixed parameters in comments;
// a timestamp comment is appended unless deterministic output is requested.

inline void stamp(CsvDocument& doc, std::uint64_t seed, bool deterministic) {
    doc.comments.push_back("seed=" + std::to_string(seed));
    if (!deterministic) {
        std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
        doc.comments.push_back(std::string("generated=") + buf);
    }
}

// Rates versus K at fixed r = M/K: NB / WB / NOMA Monte Carlo estimates plus
// the two limiting rates.
inline CsvDocument rate_vs_k_experiment(const std::vector<int>& k_grid,
                                        double ratio, int num_subcarriers,
                                        double power, long trials,
                                        long varpi_trials, std::uint64_t seed,
                                        const std::string& cache_dir,
                                        bool deterministic) {
    CsvDocument doc;
    doc.comments.push_back("experiment=rate-vs-K r=" + format_double(ratio) +
                           " N=" + std::to_string(num_subcarriers) +
                           " P=" + format_double(power) +
                           " trials=" + std::to_string(trials));
    stamp(doc, seed, deterministic);
    doc.header = {"K",  "M",          "nb_rate",    "nb_se",    "wb_rate",
                  "wb_se", "noma_rate", "noma_se",    "limit_noma", "limit_wb"};
    for (int k : k_grid) {
        const int m = static_cast<int>(std::lround(k * ratio));
        const VarpiTable varpi =
            load_or_estimate_varpi(k, m, varpi_trials, seed, cache_dir);
        const RateEstimate nb = nb_rate(k, m, power, varpi, trials, seed + 1);
        const RateEstimate wb =
            wb_rate(k, m, num_subcarriers, power, varpi, trials, seed + 2);
        const RateEstimate noma =
            noma_pair_rate(k, m, num_subcarriers, power, varpi, trials, seed + 3);
        const double lim_noma = limit_rate_noma(ratio, k, num_subcarriers, power,
                                                varpi.varpi(1), varpi.varpi(2));
        const double lim_wb =
            limit_rate_wb(ratio, k, num_subcarriers, power, varpi.varpi(1));
        doc.rows.push_back({std::to_string(k), std::to_string(m),
                            format_double(nb.value), format_double(nb.std_error),
                            format_double(wb.value), format_double(wb.std_error),
                            format_double(noma.value),
                            format_double(noma.std_error),
                            format_double(lim_noma), format_double(lim_wb)});
    }
    return doc;
}

// NOMA pair rate versus SNR for several sub-carrier counts, with the high-SNR
// asymptote alongside.
inline CsvDocument rate_vs_snr_experiment(int num_nodes, int group_size,
                                          const std::vector<int>& n_values,
                                          const std::vector<double>& snr_db_grid,
                                          long trials, long varpi_trials,
                                          std::uint64_t seed,
                                          const std::string& cache_dir,
                                          bool deterministic) {
    CsvDocument doc;
    doc.comments.push_back("experiment=rate-vs-SNR K=" + std::to_string(num_nodes) +
                           " M=" + std::to_string(group_size) +
                           " trials=" + std::to_string(trials));
    stamp(doc, seed, deterministic);
    doc.header = {"snr_db"};
    for (int n : n_values) {
        doc.header.push_back("noma_rate_N" + std::to_string(n));
        doc.header.push_back("noma_se_N" + std::to_string(n));
    }
    doc.header.push_back("asymptote");
    const double ratio = static_cast<double>(group_size) / num_nodes;
    const VarpiTable varpi =
        load_or_estimate_varpi(num_nodes, group_size, varpi_trials, seed, cache_dir);
    for (double snr : snr_db_grid) {
        const double power = db_to_linear(snr);
        std::vector<std::string> row{format_double(snr)};
        for (int n : n_values) {
            const RateEstimate est = noma_pair_rate(num_nodes, group_size, n,
                                                    power, varpi, trials, seed + 1);
            row.push_back(format_double(est.value));
            row.push_back(format_double(est.std_error));
        }
        row.push_back(format_double(high_snr_asymptote(ratio, power)));
        doc.rows.push_back(std::move(row));
    }
    return doc;
}

// NOMA pair rate versus M at fixed K and N.
inline CsvDocument rate_vs_m_experiment(int num_nodes, int num_subcarriers,
                                        const std::vector<int>& m_grid,
                                        double power, long trials,
                                        long varpi_trials, std::uint64_t seed,
                                        const std::string& cache_dir,
                                        bool deterministic) {
    CsvDocument doc;
    doc.comments.push_back("experiment=rate-vs-M K=" + std::to_string(num_nodes) +
                           " N=" + std::to_string(num_subcarriers) +
                           " P=" + format_double(power) +
                           " trials=" + std::to_string(trials));
    stamp(doc, seed, deterministic);
    doc.header = {"M", "noma_rate", "noma_se"};
    for (int m : m_grid) {
        const VarpiTable varpi =
            load_or_estimate_varpi(num_nodes, m, varpi_trials, seed, cache_dir);
        const RateEstimate est = noma_pair_rate(num_nodes, m, num_subcarriers,
                                                power, varpi, trials, seed + 1);
        doc.rows.push_back({std::to_string(m), format_double(est.value),
                            format_double(est.std_error)});
    }
    return doc;
}

// Outage curve over the configured power grid: analytic quadrature and
// (optionally) Monte Carlo, one row per (P, method).
inline CsvDocument outage_experiment(const OutageConfig& cfg, long mc_trials,
                                     std::uint64_t seed, bool with_mc,
                                     std::pair<int, int> pair,
                                     bool deterministic,
                                     const VarpiTable* varpi = nullptr) {
    cfg.validate();
    CsvDocument doc;
    doc.comments.push_back(
        "experiment=outage K=" + std::to_string(cfg.num_nodes) +
        " M=" + std::to_string(cfg.group_size) +
        " N=" + std::to_string(cfg.num_subcarriers) +
        " target_rate=" + format_double(cfg.target_rate) +
        " beta1=" + format_double(cfg.beta1) +
        " beta2=" + format_double(cfg.beta2) +
        " pair=(" + std::to_string(pair.first) + "," +
        std::to_string(pair.second) + ")");
    stamp(doc, seed, deterministic);
    doc.header = {"P_linear", "P_dB", "outage", "std_error", "method"};
    const bool canonical_pair = pair == std::make_pair(1, 2) && !varpi;
    for (double p : cfg.power_grid) {
        if (canonical_pair) {
            const double analytic = outage_analytic(cfg, p);
            doc.rows.push_back({format_double(p), format_double(linear_to_db(p)),
                                format_double(analytic), "",
                                "analytic-quadrature"});
        }
        if (with_mc || !canonical_pair) {
            const MeanEstimate mc =
                pair_choice_outage(cfg, p, pair, mc_trials, seed, varpi);
            doc.rows.push_back({format_double(p), format_double(linear_to_db(p)),
                                format_double(mc.mean),
                                format_double(mc.std_error), "monte-carlo"});
        }
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Summarize: aligned table with 4 significant digits; outage tables also get
// a fitted log-log slope per method.

inline int find_column(const CsvDocument& doc, const std::string& name) {
    for (std::size_t i = 0; i < doc.header.size(); ++i)
        if (doc.header[i] == name) return static_cast<int>(i);
    return -1;
}

inline std::string summarize(const CsvDocument& doc) {
    std::ostringstream os;
    if (doc.rows.empty()) {
        os << "0 rows\n";
        return os.str();
    }
    std::vector<std::vector<std::string>> cells;
    cells.push_back(doc.header);
    for (const auto& row : doc.rows) {
        std::vector<std::string> formatted;
        for (const auto& cell : row) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            formatted.push_back(end && *end == '\0' && !cell.empty()
                                    ? format_sig(v)
                                    : cell);
        }
        cells.push_back(std::move(formatted));
    }
    std::vector<std::size_t> widths(doc.header.size(), 0);
    for (const auto& row : cells)
        for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << std::setw(static_cast<int>(widths[i]) + 2) << row[i];
        os << "\n";
    }
    os << doc.rows.size() << " rows\n";

    const int col_p = find_column(doc, "P_linear");
    const int col_out = find_column(doc, "outage");
    const int col_method = find_column(doc, "method");
    if (col_p >= 0 && col_out >= 0) {
        for (const std::string method : {"analytic-quadrature", "monte-carlo"}) {
            OutageCurve curve;
            for (const auto& row : doc.rows) {
                if (col_method >= 0 && row[col_method] != method) continue;
                curve.points.push_back({std::stod(row[col_p]),
                                        std::stod(row[col_out]), 0.0});
            }
            if (curve.points.size() >= 3) {
                const double lo = curve.points.front().power;
                const double hi = curve.points.back().power;
                try {
                    os << "fitted slope (" << method
                       << "): " << format_sig(diversity_fit(curve, lo, hi))
                       << "\n";
                } catch (const std::exception&) {
                    // not enough positive points; skip
                }
            }
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Validation suite: fast self-checks of the core invariants.

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

inline std::vector<CheckResult> run_validation(std::uint64_t seed) {
    std::vector<CheckResult> results;
    const auto check = [&](const std::string& name, bool ok,
                           const std::string& detail) {
        results.push_back({name, ok, detail});
    };

    // Exp(1) gain distribution: Kolmogorov-Smirnov on 1e5 samples.
    {
        const long n = 100000;
        Philox stream(seed, 0);
        std::vector<double> samples(n);
        for (double& s : samples) s = stream.exponential();
        std::sort(samples.begin(), samples.end());
        double ks = 0.0;
        for (long i = 0; i < n; ++i) {
            const double cdf = -std::expm1(-samples[i]);
            ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
            ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
        }
        check("gain KS statistic < 0.01", ks < 0.01, "ks=" + format_sig(ks));
    }

    // Rank permutations: bijection and sortedness over random blocks.
    {
        SystemConfig cfg{12, 3, 2, 4, 10.0, 1, seed};
        bool ok = true;
        for (long t = 0; t < 200 && ok; ++t) {
            Philox stream(cfg.seed, static_cast<std::uint64_t>(t));
            const ChannelBlock block = draw_block(cfg, stream);
            for (int g = 0; g < cfg.num_subcarriers && ok; ++g) {
                std::vector<bool> seen(cfg.num_nodes, false);
                for (int u = 0; u < cfg.num_nodes; ++u) {
                    const int node = block.ranks[g][u];
                    if (node < 0 || node >= cfg.num_nodes || seen[node]) ok = false;
                    else seen[node] = true;
                    if (u > 0 &&
                        block.gain_at_rank(u - 1, g) < block.gain_at_rank(u, g))
                        ok = false;
                }
            }
        }
        check("rank permutations valid", ok, "200 blocks");
    }

    // Quantile identity.
    {
        bool ok = true;
        for (double x : {0.0, 0.1, 0.5, 0.75, 0.9, 0.99})
            ok = ok && std::abs(-std::expm1(-xi_quantile(x)) - x) < 1e-12;
        check("xi_quantile inverse identity", ok, "|F(xi_x) - x| < 1e-12");
    }

    // Beta-pair equality R1 == R2.
    {
        SystemConfig cfg{8, 2, 2, 2, 10.0, 1, seed};
        const VarpiTable varpi = estimate_varpi(8, 2, 20000, seed);
        double worst = 0.0;
        for (long t = 0; t < 1000; ++t) {
            Philox stream(cfg.seed, static_cast<std::uint64_t>(t));
            const ChannelBlock block = draw_block(cfg, stream);
            const auto betas = choose_betas(block, cfg, varpi, PowerRule::PairOptimal);
            const PowerPlan plan = allocate_power(block, cfg, varpi, betas);
            for (int g = 0; g < cfg.num_subcarriers; ++g)
                worst = std::max(worst,
                                 std::abs(sub_function_rate(block, plan, g, 1, cfg) -
                                          sub_function_rate(block, plan, g, 2, cfg)));
        }
        check("beta-pair rate equality", worst < 1e-10,
              "max |R1-R2|=" + format_sig(worst));
    }

    // Average power budget E[P_{i,g}] == P/N.
    {
        SystemConfig cfg{8, 2, 2, 2, 10.0, 100000, seed + 7};
        const VarpiTable varpi = estimate_varpi(8, 2, 200000, seed);
        auto eval = [&](long trial) {
            Philox stream(cfg.seed, static_cast<std::uint64_t>(trial));
            const ChannelBlock block = draw_block(cfg, stream);
            const auto betas = choose_betas(block, cfg, varpi, PowerRule::PairOptimal);
            const PowerPlan plan = allocate_power(block, cfg, varpi, betas);
            return plan.power(0, 0);  // any fixed node; nodes are exchangeable
        };
        const MeanEstimate est = parallel_mean(cfg.trials, eval);
        const double target = cfg.power_budget / cfg.num_subcarriers;
        const double rel = std::abs(est.mean - target) / target;
        check("average power budget P/N", rel < 0.02,
              "rel err=" + format_sig(rel));
    }

    // Determinism: equal seeds give bit-identical estimates.
    {
        SystemConfig cfg{8, 2, 2, 2, 10.0, 2000, seed};
        const VarpiTable varpi = estimate_varpi(8, 2, 20000, seed);
        const RateEstimate a = ergodic_rate_mc(cfg, PowerRule::PairOptimal, varpi);
        const RateEstimate b = ergodic_rate_mc(cfg, PowerRule::PairOptimal, varpi);
        check("seeded reproducibility", a.value == b.value,
              "delta=" + format_sig(std::abs(a.value - b.value)));
    }

    return results;
}

}  // namespace comac
