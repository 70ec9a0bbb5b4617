// Command-line front end: argument parsing and dispatch for the `leadlag`
// binary. Kept in a header so the test suite can drive it in-process.
#pragma once

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "leadlag/leadlag.hpp"

namespace leadlag::cli {

/// Bad command line: unknown or missing flags, unreadable inputs, infeasible
/// level requests.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct RunConfig {
    std::string subcommand;
    bool help = false;
    std::string help_text;

    // paths
    std::string in1, in2, out, model, config, ticks1, ticks2;

    std::string family = "la20";
    int level = 1;          // gain
    int points = 1024;      // gain
    int levels = 8;         // estimate
    int maxlag = 300;       // estimate: grid half-width, grid units
    double tau = 1.0;       // estimate: seconds
    std::optional<double> t0;
    std::optional<long> n;
    std::string scale = "raw";
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> seed_override;  // mc
    std::optional<std::size_t> reps;             // mc
    std::optional<double> delta;                 // model-check: seconds
    std::optional<std::size_t> sim_maxlag;       // simulate
    unsigned threads = default_thread_count();
};

namespace detail {

inline void require_readable(const std::string& path, const std::string& flag)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read file given to " + flag + ": " + path);
}

inline void require_writable_dir(const std::string& path, const std::string& flag)
{
    const auto parent = std::filesystem::absolute(path).parent_path();
    if (!std::filesystem::is_directory(parent))
        throw UsageError("output directory for " + flag + " does not exist: " + parent.string());
}

}  // namespace detail

inline RunConfig parse_args(int argc, const char* const* argv)
{
    RunConfig cfg;
    CLI::App app{"Scale-by-scale lead-lag estimation with wavelet cross-covariances", "leadlag"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--threads", cfg.threads,
                   "worker threads (default: available cores; LEADLAG_THREADS overrides)")
        ->check(CLI::PositiveNumber);

    auto* gain = app.add_subcommand("gain", "Tabulate the level-j squared gain H_{j,L} against the cascade filter");
    gain->add_option("--family", cfg.family, "wavelet family: haar, la8, la20")->required();
    gain->add_option("--level", cfg.level, "level j >= 1 (dimensionless)")->required();
    gain->add_option("--points", cfg.points, "equispaced frequencies in [0, pi] (radians per sample)");
    gain->add_option("--out", cfg.out, "output CSV (default: stdout)");

    auto* simulate = app.add_subcommand(
        "simulate", "Simulate one increment path of a model; CSV columns k,r1,r2,miss1,miss2 "
                    "(r = increment over [k tau, (k+1) tau], miss = grid point k+1 missing)");
    simulate->add_option("--model", cfg.model, "model JSON (tau and theta in seconds)")->required();
    simulate->add_option("--seed", cfg.seed, "64-bit seed");
    simulate->add_option("--out", cfg.out, "output CSV")->required();
    simulate->add_option("--ticks1", cfg.ticks1, "also write observed ticks of series 1 (timestamp in seconds, price)");
    simulate->add_option("--ticks2", cfg.ticks2, "also write observed ticks of series 2 (timestamp in seconds, price)");
    simulate->add_option("--maxlag", cfg.sim_maxlag, "covariance truncation lag (grid units; default: automatic)");

    auto* estimate = app.add_subcommand("estimate", "Estimate lead-lag per wavelet level from two tick CSV files");
    estimate->add_option("--in1", cfg.in1, "first tick CSV (timestamp in seconds, price)")->required();
    estimate->add_option("--in2", cfg.in2, "second tick CSV (timestamp in seconds, price)")->required();
    estimate->add_option("--family", cfg.family, "wavelet family: haar, la8, la20");
    estimate->add_option("--levels", cfg.levels, "number of levels j = 1..levels");
    estimate->add_option("--maxlag", cfg.maxlag, "grid half-width |l| <= maxlag (grid units)");
    estimate->add_option("--tau", cfg.tau, "grid spacing (seconds)")->check(CLI::PositiveNumber);
    estimate->add_option("--t0", cfg.t0, "grid origin (seconds; default: latest first tick of the two files)");
    estimate->add_option("--n", cfg.n, "number of grid returns (default: as many as both files cover)");
    estimate->add_option("--scale", cfg.scale, "price column scale: raw (log is taken) or log")
        ->check(CLI::IsMember({"raw", "log"}));
    estimate->add_option("--out", cfg.out, "output report JSON (lags in seconds and grid units)")->required();

    auto* mc = app.add_subcommand("mc", "Monte Carlo study: median and MAD of lag estimates (grid units)");
    mc->add_option("--config", cfg.config, "Monte Carlo config JSON")->required();
    mc->add_option("--reps", cfg.reps, "replications (overrides the config)");
    mc->add_option("--seed", cfg.seed_override, "master seed (overrides the config)");
    mc->add_option("--out", cfg.out, "output CSV (rows family/statistic, columns j1..jJ, grid units)")->required();

    auto* check = app.add_subcommand("model-check", "Validate a model JSON (admissibility, symmetry, embedding)");
    check->add_option("--model", cfg.model, "model JSON (tau and theta in seconds)")->required();
    check->add_option("--delta", cfg.delta, "grid half-width; require |theta_j| < delta (seconds)");
    check->add_option("--out", cfg.out, "output report JSON (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        cfg.help = true;
        CLI::App* target = &app;
        for (auto* sub : app.get_subcommands()) target = sub;
        cfg.help_text = target->help();
        return cfg;
    } catch (const CLI::CallForAllHelp&) {
        cfg.help = true;
        cfg.help_text = app.help("", CLI::AppFormatMode::All);
        return cfg;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();

    if (const char* env = std::getenv("LEADLAG_THREADS")) {
        try {
            const long t = std::stol(env);
            if (t < 1) throw std::invalid_argument("");
            cfg.threads = static_cast<unsigned>(t);
        } catch (const std::exception&) {
            throw UsageError(std::string("LEADLAG_THREADS must be a positive integer, got '") + env + "'");
        }
    }

    try {
        if (cfg.subcommand == "gain" || cfg.subcommand == "estimate") (void)parse_family(cfg.family);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    if (cfg.subcommand == "gain") {
        if (cfg.level < 1 || cfg.level > 16) throw UsageError("--level must be between 1 and 16");
        if (cfg.points < 2) throw UsageError("--points must be at least 2");
        if (!cfg.out.empty()) detail::require_writable_dir(cfg.out, "--out");
    } else if (cfg.subcommand == "simulate") {
        detail::require_readable(cfg.model, "--model");
        detail::require_writable_dir(cfg.out, "--out");
        if (!cfg.ticks1.empty()) detail::require_writable_dir(cfg.ticks1, "--ticks1");
        if (!cfg.ticks2.empty()) detail::require_writable_dir(cfg.ticks2, "--ticks2");
    } else if (cfg.subcommand == "estimate") {
        detail::require_readable(cfg.in1, "--in1");
        detail::require_readable(cfg.in2, "--in2");
        detail::require_writable_dir(cfg.out, "--out");
        if (cfg.levels < 1) throw UsageError("--levels must be >= 1");
        if (cfg.maxlag < 0) throw UsageError("--maxlag must be >= 0");
        if (cfg.n) {
            if (*cfg.n < 1) throw UsageError("--n must be >= 1");
            try {
                const Family f = parse_family(cfg.family);
                check_levels_feasible(std::vector<Family>{f}, cfg.levels, static_cast<std::size_t>(*cfg.n),
                                      cfg.maxlag);
            } catch (const DataError& e) {
                throw UsageError(e.what());
            }
        }
    } else if (cfg.subcommand == "mc") {
        detail::require_readable(cfg.config, "--config");
        detail::require_writable_dir(cfg.out, "--out");
        if (cfg.reps && *cfg.reps < 1) throw UsageError("--reps must be >= 1");
    } else if (cfg.subcommand == "model-check") {
        detail::require_readable(cfg.model, "--model");
        if (!cfg.out.empty()) detail::require_writable_dir(cfg.out, "--out");
    }
    return cfg;
}

/// Writes via a temporary file in the target directory and renames it into
/// place, so a failed run leaves no partial output.
inline void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& writer)
{
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp-" + std::to_string(::getpid());
    try {
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out) throw DataError("cannot write file: " + tmp.string());
            writer(out);
            out.flush();
            if (!out) throw DataError("write failed: " + tmp.string());
        }
        std::filesystem::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

inline void emit(const std::string& path, std::ostream& stdout_stream, const std::function<void(std::ostream&)>& writer)
{
    if (path.empty()) writer(stdout_stream);
    else write_atomically(path, writer);
}

namespace detail {

inline nlohmann::json estimate_json(const LagEstimate& e)
{
    return {{"theta_hat_grid", e.lag},     {"theta_hat_seconds", e.theta_seconds},
            {"peak", e.peak},              {"runner_up_gap", e.runner_up_gap},
            {"degenerate", e.degenerate},  {"tie", e.tie}};
}

inline int run_gain(const RunConfig& cfg, std::ostream& out)
{
    const Family f = parse_family(cfg.family);
    const auto filter = cascade(f, cfg.level);
    const int L = static_cast<int>(base_filter_length(f));
    emit(cfg.out, out, [&](std::ostream& os) {
        os.precision(17);
        os << "# schema_version=" << schema_version << " family=" << family_name(f) << " level=" << cfg.level
           << " L_j=" << filter.length() << '\n';
        os << "lambda,H_jL,empirical_gain\n";
        for (int i = 0; i < cfg.points; ++i) {
            const double lambda = std::numbers::pi * i / (cfg.points - 1);
            os << lambda << ',' << squared_gain_level(cfg.level, L, lambda) << ','
               << empirical_squared_gain(filter.coefficients, lambda) << '\n';
        }
    });
    return kOk;
}

inline int run_simulate(const RunConfig& cfg, std::ostream& out)
{
    const auto mf = load_model(cfg.model);
    const CirculantSampler sampler(mf.model, mf.scheme, cfg.sim_maxlag);
    const auto path = sampler.sample(cfg.seed);
    const std::size_t n = path.n();
    write_atomically(cfg.out, [&](std::ostream& os) {
        os.precision(17);
        os << "# schema_version=" << schema_version << " seed=" << cfg.seed << " tau=" << mf.scheme.tau
           << " n=" << n << '\n';
        os << "k,r1,r2,miss1,miss2\n";
        for (std::size_t k = 0; k < n; ++k)
            os << k << ',' << path.returns1[k] << ',' << path.returns2[k] << ',' << (path.mask1[k + 1] ? 1 : 0)
               << ',' << (path.mask2[k + 1] ? 1 : 0) << '\n';
    });
    auto ticks_of = [&](const std::vector<double>& r, const std::vector<bool>& mask) {
        TickSeries t;
        double level = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            if (!mask[k]) {
                t.timestamps.push_back(static_cast<double>(k) * mf.scheme.tau);
                t.prices.push_back(100.0 * std::exp(level));
            }
            if (k < n) level += r[k];
        }
        return t;
    };
    if (!cfg.ticks1.empty())
        write_atomically(cfg.ticks1, [&](std::ostream& os) { write_tick_csv(os, ticks_of(path.returns1, path.mask1)); });
    if (!cfg.ticks2.empty())
        write_atomically(cfg.ticks2, [&](std::ostream& os) { write_tick_csv(os, ticks_of(path.returns2, path.mask2)); });
    (void)out;
    return kOk;
}

inline int run_estimate(const RunConfig& cfg, std::ostream& out)
{
    const PriceScale scale = cfg.scale == "log" ? PriceScale::log_price : PriceScale::raw_price;
    const auto t1 = read_csv(cfg.in1, scale);
    const auto t2 = read_csv(cfg.in2, scale);
    const double t0 = cfg.t0.value_or(std::max(t1.timestamps.front(), t2.timestamps.front()));
    long n = 0;
    if (cfg.n) {
        n = *cfg.n;
    } else {
        const double end = std::min(t1.timestamps.back(), t2.timestamps.back());
        n = static_cast<long>(std::floor((end - t0) / cfg.tau + 1e-9));
        if (n < 1) throw DataError("the two tick files do not overlap by at least one grid step");
    }
    const Family f = parse_family(cfg.family);
    try {
        check_levels_feasible(std::vector<Family>{f}, cfg.levels, static_cast<std::size_t>(n), cfg.maxlag);
    } catch (const DataError& e) {
        throw UsageError(e.what());
    }
    const auto r1 = align_to_grid(t1, t0, cfg.tau, static_cast<std::size_t>(n));
    const auto r2 = align_to_grid(t2, t0, cfg.tau, static_cast<std::size_t>(n));
    const auto grid = LagGrid::symmetric(cfg.maxlag);
    const std::vector<Family> families{f};
    const auto results = estimate_all_levels(r1, r2, families, cfg.levels, grid);
    const auto hry = hry_lag(r1, r2, grid, cfg.tau);

    nlohmann::json report{{"schema_version", schema_version},
                          {"family", std::string(family_name(f))},
                          {"tau", cfg.tau},
                          {"t0", t0},
                          {"n", n},
                          {"maxlag", cfg.maxlag},
                          {"hry", estimate_json(hry)}};
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& lv : results.front().levels) {
        nlohmann::json entry = estimate_json(lv.estimate);
        entry["j"] = lv.estimate.level;
        entry["normalization_divisor"] = lv.curve.divisor;
        nlohmann::json curve = nlohmann::json::array();
        for (std::size_t i = 0; i < lv.curve.lags.size(); ++i)
            curve.push_back({{"l", lv.curve.lags[i]}, {"rho", lv.curve.rho[i]}, {"rho_norm", lv.curve.rho_normalized[i]}});
        entry["curve"] = std::move(curve);
        levels.push_back(std::move(entry));
    }
    report["levels"] = std::move(levels);
    emit(cfg.out, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
    return kOk;
}

inline MCConfig mc_config_from_json(const nlohmann::json& j, const std::string& base_dir)
{
    try {
        if (!j.contains("model")) throw DataError("mc config is missing \"model\"");
        ModelFile mf;
        if (j.at("model").is_string()) {
            std::filesystem::path p = j.at("model").get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            mf = load_model(p.string());
        } else {
            mf = model_from_json(j.at("model"));
        }
        if (j.contains("n")) mf.scheme.n = j.at("n").get<std::size_t>();
        if (j.contains("pi1")) mf.scheme.pi1 = j.at("pi1").get<double>();
        if (j.contains("pi2")) mf.scheme.pi2 = j.at("pi2").get<double>();
        MCConfig c{mf.model, mf.scheme};
        if (j.contains("families")) {
            c.families.clear();
            for (const auto& f : j.at("families")) c.families.push_back(parse_family(f.get<std::string>()));
        }
        c.j_max = j.value("j_max", c.j_max);
        c.lmax = j.value("lmax", c.lmax);
        c.replications = j.value("replications", c.replications);
        c.master_seed = j.value("seed", c.master_seed);
        c.include_hry = j.value("hry", true);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed mc config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
}

inline int run_mc_command(const RunConfig& cfg, std::ostream& out)
{
    const auto base = std::filesystem::absolute(cfg.config).parent_path().string();
    MCConfig c = mc_config_from_json(read_json_file(cfg.config), base);
    if (cfg.reps) c.replications = *cfg.reps;
    if (cfg.seed_override) c.master_seed = *cfg.seed_override;
    c.threads = cfg.threads;
    try {
        check_levels_feasible(c.families, c.j_max, c.scheme.n, c.lmax);
    } catch (const DataError& e) {
        throw UsageError(e.what());
    }
    const auto summary = run_mc(c);
    write_atomically(cfg.out, [&](std::ostream& os) { write_summary_csv(os, summary); });
    (void)out;
    if (!summary.valid)
        throw NumericError("Monte Carlo summary invalid: " + std::to_string(summary.failures) + " of " +
                           std::to_string(summary.replications) + " replications failed");
    return kOk;
}

inline int run_model_check(const RunConfig& cfg, std::ostream& out)
{
    const auto mf = load_model(cfg.model);
    const auto& model = mf.model;
    check_admissible(model);
    if (cfg.delta) check_lags_within(model, *cfg.delta);

    // sweep (0, Nyquist] in physical frequency
    const double nyquist = std::numbers::pi / model.tau;
    double sup_abs = 0.0, hermitian_err = 0.0;
    constexpr int sweep = 4096;
    for (int i = 1; i <= sweep; ++i) {
        const double lambda = nyquist * i / sweep;
        const auto f = cross_spectral_density(model, lambda);
        sup_abs = std::max(sup_abs, std::abs(f));
        hermitian_err = std::max(hermitian_err, std::abs(cross_spectral_density(model, -lambda) - std::conj(f)));
    }
    if (sup_abs > 1.0 + 1e-12) throw DataError("inadmissible model: sup|f| exceeds 1");
    const CirculantSampler sampler(model, mf.scheme);
    const auto& d = sampler.diagnostics();

    double max_abs_R = 0.0;
    for (const auto& b : model.levels) max_abs_R = std::max(max_abs_R, std::abs(b.R));
    nlohmann::json report{{"schema_version", schema_version},
                          {"admissible", true},
                          {"J", model.J},
                          {"tau", model.tau},
                          {"n", mf.scheme.n},
                          {"max_abs_R", max_abs_R},
                          {"sup_abs_f", sup_abs},
                          {"hermitian_max_error", hermitian_err},
                          {"embedding",
                           {{"circulant_length", sampler.circulant_length()},
                            {"maxlag", sampler.tables().maxlag},
                            {"min_eigenvalue_over_tau", d.min_eigenvalue / model.tau},
                            {"max_eigenvalue_over_tau", d.max_eigenvalue / model.tau},
                            {"clipped", d.clipped}}}};
    emit(cfg.out, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
    return kOk;
}

}  // namespace detail

/// Dispatches a parsed configuration. Exit codes: 0 ok, 1 usage, 2 data,
/// 3 numeric/embedding.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    if (cfg.help) {
        out << cfg.help_text;
        return kOk;
    }
    try {
        if (cfg.subcommand == "gain") return detail::run_gain(cfg, out);
        if (cfg.subcommand == "simulate") return detail::run_simulate(cfg, out);
        if (cfg.subcommand == "estimate") return detail::run_estimate(cfg, out);
        if (cfg.subcommand == "mc") return detail::run_mc_command(cfg, out);
        if (cfg.subcommand == "model-check") return detail::run_model_check(cfg, out);
        throw UsageError("unknown subcommand '" + cfg.subcommand + "'");
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
}

/// parse_args + run, mapping usage errors to exit code 1.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    RunConfig cfg;
    try {
        cfg = parse_args(argc, argv);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
        return kUsage;
    }
    return run(cfg, out, err);
}

}  // namespace leadlag::cli
