// comac: NOMA computation-over-multiple-access-channel rate and outage tool.
//
// Subcommands:
//   rate       Monte Carlo ergodic computation rate of the full pipeline,
//              or the NB / WB / NOMA closed-form estimators.
//   limit      large-K limiting rates and the high-SNR asymptote.
//   outage     outage probability curve (analytic quadrature + Monte Carlo).
//   sweep      figure-style experiments: rate-vs-K, rate-vs-SNR, rate-vs-M.
//   counts     exact cardinalities of the sub-function / superposition /
//              combination sets.
//   validate   fast self-checks of the core invariants.
//   summarize  aligned-table summary of a previously written CSV.
//
// Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "comac/harness.hpp"

namespace {

struct CommonOpts {
    std::string out;
    std::string format = "csv";
    std::string cache_dir = ".comac-cache";
    bool deterministic = false;
    std::uint64_t seed = 1;
    long trials = 100000;
    long varpi_trials = 200000;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out, "output file (default: stdout)");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--cache-dir", opts.cache_dir,
                    "directory for cached rank-ratio tables");
    cmd->add_flag("--deterministic", opts.deterministic,
                  "suppress timestamps so output is byte-reproducible");
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--trials", opts.trials, "Monte Carlo trials")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--varpi-trials", opts.varpi_trials,
                    "trials for the rank-ratio table")
        ->check(CLI::PositiveNumber);
}

void emit(const comac::CsvDocument& doc, const CommonOpts& opts) {
    if (opts.out.empty()) {
        if (opts.format == "json")
            comac::write_json(std::cout, doc);
        else
            comac::write_csv(std::cout, doc);
    } else {
        comac::write_document(opts.out, doc, opts.format);
    }
}

double resolve_power(double power, double snr_db, bool snr_set) {
    return snr_set ? comac::db_to_linear(snr_db) : power;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NOMA-CoMAC rate and outage calculator"};
    app.set_config("--config", "", "key=value config file (flags override it)");
    app.require_subcommand(1);

    // ---- rate ----
    CommonOpts rate_opts;
    int rate_k = 16, rate_m = 4, rate_l = 2, rate_n = 4;
    double rate_power = 10.0, rate_snr_db = 10.0;
    std::string rate_estimator = "pipeline";
    std::string rate_rule = "pair";
    auto* rate_cmd = app.add_subcommand("rate", "ergodic computation rate");
    rate_cmd->add_option("-K,--nodes", rate_k, "total nodes K")->required();
    rate_cmd->add_option("-M,--group-size", rate_m, "nodes per sub-function M")
        ->required();
    rate_cmd->add_option("-L,--superposed", rate_l, "sub-functions per carrier L");
    rate_cmd->add_option("-N,--subcarriers", rate_n, "sub-carriers N");
    auto* rate_pow = rate_cmd->add_option("--power", rate_power,
                                          "total transmit power (linear)");
    auto* rate_snr =
        rate_cmd->add_option("--snr-db", rate_snr_db, "transmit SNR in dB");
    rate_pow->excludes(rate_snr);
    rate_cmd
        ->add_option("--estimator", rate_estimator,
                     "pipeline | nb | wb | noma")
        ->check(CLI::IsMember({"pipeline", "nb", "wb", "noma"}));
    rate_cmd->add_option("--rule", rate_rule, "power rule for pipeline")
        ->check(CLI::IsMember({"pair", "equal"}));
    add_common(rate_cmd, rate_opts);

    // ---- limit ----
    CommonOpts limit_opts;
    int limit_k = 64, limit_n = 4;
    double limit_r = 0.25, limit_power = 10.0, limit_snr_db = 10.0;
    std::string limit_scheme = "noma";
    auto* limit_cmd = app.add_subcommand("limit", "large-K limiting rates");
    limit_cmd->add_option("-K,--nodes", limit_k, "total nodes K")->required();
    limit_cmd->add_option("-N,--subcarriers", limit_n, "sub-carriers N");
    limit_cmd->add_option("-r,--ratio", limit_r, "group-size ratio r = M/K")
        ->required();
    auto* limit_pow = limit_cmd->add_option("--power", limit_power,
                                            "total transmit power (linear)");
    auto* limit_snr =
        limit_cmd->add_option("--snr-db", limit_snr_db, "transmit SNR in dB");
    limit_pow->excludes(limit_snr);
    limit_cmd->add_option("--scheme", limit_scheme,
                          "noma | wb | nb | asymptote")
        ->check(CLI::IsMember({"noma", "wb", "nb", "asymptote"}));
    add_common(limit_cmd, limit_opts);

    // ---- outage ----
    CommonOpts outage_opts;
    int out_k = 3, out_m = 1, out_n = 1;
    double out_target = 0.5, out_beta1 = 1.0, out_beta2 = 1.0;
    double out_snr_lo = 0.0, out_snr_hi = 30.0, out_snr_step = 5.0;
    bool out_mc = false;
    bool out_adaptive = false;
    std::vector<int> out_pair = {1, 2};
    auto* outage_cmd = app.add_subcommand("outage", "outage probability curve");
    outage_cmd->add_option("-K,--nodes", out_k)->required();
    outage_cmd->add_option("-M,--group-size", out_m)->required();
    outage_cmd->add_option("-N,--subcarriers", out_n);
    outage_cmd->add_option("--target-rate", out_target, "target computation rate")
        ->required();
    outage_cmd->add_option("--beta1", out_beta1, "power factor of group 1");
    outage_cmd->add_option("--beta2", out_beta2, "power factor of group 2");
    outage_cmd->add_option("--snr-db-min", out_snr_lo);
    outage_cmd->add_option("--snr-db-max", out_snr_hi);
    outage_cmd->add_option("--snr-db-step", out_snr_step)
        ->check(CLI::PositiveNumber);
    outage_cmd->add_flag("--mc", out_mc, "add Monte Carlo rows");
    outage_cmd->add_flag("--adaptive-beta", out_adaptive,
                         "use per-realization optimal pair factors (MC only)");
    outage_cmd
        ->add_option("--pair", out_pair,
                     "rank groups (l1 l2) chosen per sub-carrier")
        ->expected(2);
    add_common(outage_cmd, outage_opts);

    // ---- sweep ----
    CommonOpts sweep_opts;
    std::string sweep_kind;
    int sweep_k = 64, sweep_m = 16, sweep_n = 4;
    double sweep_r = 0.25, sweep_power = 10.0, sweep_snr_db = 10.0;
    std::vector<int> sweep_k_grid = {16, 32, 64, 128};
    std::vector<int> sweep_n_values = {2, 4, 8};
    std::vector<int> sweep_m_grid;
    std::vector<double> sweep_snr_grid = {0, 5, 10, 15, 20, 25, 30};
    auto* sweep_cmd = app.add_subcommand("sweep", "figure-style experiments");
    sweep_cmd->add_option("--kind", sweep_kind, "rate-vs-K | rate-vs-SNR | rate-vs-M")
        ->required()
        ->check(CLI::IsMember({"rate-vs-K", "rate-vs-SNR", "rate-vs-M"}));
    sweep_cmd->add_option("-K,--nodes", sweep_k);
    sweep_cmd->add_option("-M,--group-size", sweep_m);
    sweep_cmd->add_option("-N,--subcarriers", sweep_n);
    sweep_cmd->add_option("-r,--ratio", sweep_r, "group-size ratio for rate-vs-K");
    auto* sweep_pow = sweep_cmd->add_option("--power", sweep_power);
    auto* sweep_snr = sweep_cmd->add_option("--snr-db", sweep_snr_db);
    sweep_pow->excludes(sweep_snr);
    sweep_cmd->add_option("--k-grid", sweep_k_grid, "K values for rate-vs-K");
    sweep_cmd->add_option("--n-values", sweep_n_values,
                          "sub-carrier counts for rate-vs-SNR");
    sweep_cmd->add_option("--m-grid", sweep_m_grid, "M values for rate-vs-M");
    sweep_cmd->add_option("--snr-grid", sweep_snr_grid,
                          "SNR grid (dB) for rate-vs-SNR");
    add_common(sweep_cmd, sweep_opts);

    // ---- counts ----
    int counts_k = 4, counts_m = 1, counts_l = 2;
    auto* counts_cmd =
        app.add_subcommand("counts", "exact set cardinalities");
    counts_cmd->add_option("-K,--nodes", counts_k)->required();
    counts_cmd->add_option("-M,--group-size", counts_m)->required();
    counts_cmd->add_option("-L,--superposed", counts_l);

    // ---- validate ----
    std::uint64_t validate_seed = 1;
    auto* validate_cmd =
        app.add_subcommand("validate", "run built-in invariant checks");
    validate_cmd->add_option("--seed", validate_seed);

    // ---- summarize ----
    std::string summarize_path;
    auto* summarize_cmd =
        app.add_subcommand("summarize", "summarize a written CSV");
    summarize_cmd->add_option("file", summarize_path, "CSV file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (rate_cmd->parsed()) {
            const double power =
                resolve_power(rate_power, rate_snr_db, rate_snr->count() > 0);
            comac::SystemConfig cfg{rate_k, rate_m, rate_l, rate_n,
                                    power,  rate_opts.trials, rate_opts.seed};
            cfg.validate();
            const comac::VarpiTable varpi = comac::load_or_estimate_varpi(
                rate_k, rate_m, rate_opts.varpi_trials, rate_opts.seed,
                rate_opts.cache_dir);
            comac::RateEstimate est{};
            if (rate_estimator == "pipeline") {
                const auto rule = rate_rule == "pair"
                                      ? comac::PowerRule::PairOptimal
                                      : comac::PowerRule::EqualBeta;
                est = comac::ergodic_rate_mc(cfg, rule, varpi);
            } else if (rate_estimator == "nb") {
                est = comac::nb_rate(rate_k, rate_m, power, varpi,
                                     rate_opts.trials, rate_opts.seed);
            } else if (rate_estimator == "wb") {
                est = comac::wb_rate(rate_k, rate_m, rate_n, power, varpi,
                                     rate_opts.trials, rate_opts.seed);
            } else {
                est = comac::noma_pair_rate(rate_k, rate_m, rate_n, power, varpi,
                                            rate_opts.trials, rate_opts.seed);
            }
            comac::CsvDocument doc;
            doc.comments.push_back(
                "rate estimator=" + rate_estimator + " K=" + std::to_string(rate_k) +
                " M=" + std::to_string(rate_m) + " L=" + std::to_string(rate_l) +
                " N=" + std::to_string(rate_n) + " P=" + comac::format_double(power));
            comac::stamp(doc, rate_opts.seed, rate_opts.deterministic);
            doc.header = {"rate", "std_error", "trials", "method"};
            doc.rows.push_back({comac::format_double(est.value),
                                comac::format_double(est.std_error),
                                std::to_string(est.trials),
                                comac::method_name(est.method)});
            emit(doc, rate_opts);
        } else if (limit_cmd->parsed()) {
            const double power =
                resolve_power(limit_power, limit_snr_db, limit_snr->count() > 0);
            const int m = static_cast<int>(std::lround(limit_k * limit_r));
            double value = 0.0;
            if (limit_scheme == "asymptote") {
                value = comac::high_snr_asymptote(limit_r, power);
            } else if (limit_scheme == "nb") {
                const comac::VarpiTable varpi = comac::load_or_estimate_varpi(
                    limit_k, m, limit_opts.varpi_trials, limit_opts.seed,
                    limit_opts.cache_dir);
                value = comac::limit_rate_nb(limit_r, limit_k, power,
                                             varpi.varpi(1));
            } else {
                const comac::VarpiTable varpi = comac::load_or_estimate_varpi(
                    limit_k, m, limit_opts.varpi_trials, limit_opts.seed,
                    limit_opts.cache_dir);
                value = limit_scheme == "noma"
                            ? comac::limit_rate_noma(limit_r, limit_k, limit_n,
                                                     power, varpi.varpi(1),
                                                     varpi.varpi(2))
                            : comac::limit_rate_wb(limit_r, limit_k, limit_n,
                                                   power, varpi.varpi(1));
            }
            comac::CsvDocument doc;
            doc.comments.push_back("limit scheme=" + limit_scheme +
                                   " K=" + std::to_string(limit_k) +
                                   " N=" + std::to_string(limit_n) +
                                   " r=" + comac::format_double(limit_r) +
                                   " P=" + comac::format_double(power));
            comac::stamp(doc, limit_opts.seed, limit_opts.deterministic);
            doc.header = {"rate", "method"};
            doc.rows.push_back({comac::format_double(value), "limiting"});
            emit(doc, limit_opts);
        } else if (outage_cmd->parsed()) {
            comac::OutageConfig cfg;
            cfg.num_nodes = out_k;
            cfg.group_size = out_m;
            cfg.num_subcarriers = out_n;
            cfg.target_rate = out_target;
            cfg.beta1 = out_beta1;
            cfg.beta2 = out_beta2;
            for (double s = out_snr_lo; s <= out_snr_hi + 1e-9; s += out_snr_step)
                cfg.power_grid.push_back(comac::db_to_linear(s));
            comac::VarpiTable varpi;
            if (out_adaptive)
                varpi = comac::load_or_estimate_varpi(
                    out_k, out_m, outage_opts.varpi_trials, outage_opts.seed,
                    outage_opts.cache_dir);
            const comac::CsvDocument doc = comac::outage_experiment(
                cfg, outage_opts.trials, outage_opts.seed, out_mc,
                {out_pair[0], out_pair[1]}, outage_opts.deterministic,
                out_adaptive ? &varpi : nullptr);
            emit(doc, outage_opts);
        } else if (sweep_cmd->parsed()) {
            const double power =
                resolve_power(sweep_power, sweep_snr_db, sweep_snr->count() > 0);
            comac::CsvDocument doc;
            if (sweep_kind == "rate-vs-K") {
                doc = comac::rate_vs_k_experiment(
                    sweep_k_grid, sweep_r, sweep_n, power, sweep_opts.trials,
                    sweep_opts.varpi_trials, sweep_opts.seed,
                    sweep_opts.cache_dir, sweep_opts.deterministic);
            } else if (sweep_kind == "rate-vs-SNR") {
                doc = comac::rate_vs_snr_experiment(
                    sweep_k, sweep_m, sweep_n_values, sweep_snr_grid,
                    sweep_opts.trials, sweep_opts.varpi_trials, sweep_opts.seed,
                    sweep_opts.cache_dir, sweep_opts.deterministic);
            } else {
                std::vector<int> m_grid = sweep_m_grid;
                if (m_grid.empty())
                    for (int m = 1; 2 * m <= sweep_k; m *= 2)
                        if (sweep_k % (2 * m) == 0) m_grid.push_back(m);
                doc = comac::rate_vs_m_experiment(
                    sweep_k, sweep_n, m_grid, power, sweep_opts.trials,
                    sweep_opts.varpi_trials, sweep_opts.seed,
                    sweep_opts.cache_dir, sweep_opts.deterministic);
            }
            emit(doc, sweep_opts);
        } else if (counts_cmd->parsed()) {
            const comac::EnumerationCounts counts =
                comac::enumeration_counts(counts_k, counts_m, counts_l);
            std::cout << "|S|=" << counts.subfunctions << "\n"
                      << "|H|=" << counts.superpositions << "\n"
                      << "|X|=" << counts.combinations << "\n";
        } else if (validate_cmd->parsed()) {
            const auto results = comac::run_validation(validate_seed);
            bool all_ok = true;
            for (const auto& r : results) {
                std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name
                          << "  (" << r.detail << ")\n";
                all_ok = all_ok && r.passed;
            }
            if (!all_ok) return 1;
        } else if (summarize_cmd->parsed()) {
            std::cout << comac::summarize(comac::read_csv(summarize_path));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
