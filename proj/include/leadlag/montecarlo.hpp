// Replicated simulate -> previous-tick returns -> estimate runs, summarized
// per (family, level) by the median and median absolute deviation of the
// lag estimates in grid units.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "leadlag/errors.hpp"
#include "leadlag/estimator.hpp"
#include "leadlag/ingest.hpp"
#include "leadlag/model.hpp"
#include "leadlag/model_io.hpp"
#include "leadlag/parallel.hpp"
#include "leadlag/rng.hpp"
#include "leadlag/simulate.hpp"

namespace leadlag {

struct MCConfig {
    SpectralModel model;
    ObservationScheme scheme;
    std::vector<Family> families{all_families.begin(), all_families.end()};
    int j_max = 8;
    int lmax = 60;  // grid |l| <= lmax
    std::size_t replications = 200;
    std::uint64_t master_seed = 7;
    unsigned threads = default_thread_count();
    bool include_hry = true;
};

struct ReplicationResult {
    bool ok = false;
    std::string error;
    std::vector<std::vector<int>> lags;  // [family][j - 1], grid units
    int hry_lag = 0;
};

struct MedianMad {
    int median = 0;
    int mad = 0;
};

/// Lower median (index (n-1)/2 of the sorted values) and the lower median of
/// the absolute deviations from it.
inline MedianMad median_mad(std::vector<int> values)
{
    if (values.empty()) throw std::invalid_argument("median of an empty sample");
    const auto mid = (values.size() - 1) / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
    const int med = values[mid];
    for (int& v : values) v = std::abs(v - med);
    std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
    return {med, values[mid]};
}

struct MCSummary {
    struct Cell {
        int median = 0;
        int mad = 0;
        std::size_t count = 0;
    };
    std::vector<Family> families;
    int j_max = 0;
    int lmax = 0;
    std::vector<std::vector<Cell>> cells;  // [family][j - 1]
    bool has_hry = false;
    Cell hry;
    std::size_t replications = 0;
    std::size_t failures = 0;
    bool valid = false;  // failures <= 5% of replications
    double pi1 = 0, pi2 = 0;

    const Cell& cell(Family f, int level) const
    {
        for (std::size_t i = 0; i < families.size(); ++i)
            if (families[i] == f) return cells[i].at(static_cast<std::size_t>(level - 1));
        throw std::out_of_range("family not in summary");
    }
};

inline MCSummary summarize(const std::vector<ReplicationResult>& results, const std::vector<Family>& families,
                           int j_max, bool include_hry = true)
{
    if (results.empty()) throw std::invalid_argument("summarize needs at least one replication");
    MCSummary s;
    s.families = families;
    s.j_max = j_max;
    s.replications = results.size();
    s.has_hry = include_hry;
    std::vector<const ReplicationResult*> ok;
    for (const auto& r : results) {
        if (r.ok) ok.push_back(&r);
        else ++s.failures;
    }
    s.valid = !ok.empty() && static_cast<double>(s.failures) <= 0.05 * static_cast<double>(results.size());
    s.cells.assign(families.size(), std::vector<MCSummary::Cell>(static_cast<std::size_t>(j_max)));
    if (ok.empty()) return s;
    for (std::size_t f = 0; f < families.size(); ++f) {
        for (int j = 0; j < j_max; ++j) {
            std::vector<int> v;
            v.reserve(ok.size());
            for (const auto* r : ok) v.push_back(r->lags[f][static_cast<std::size_t>(j)]);
            const auto mm = median_mad(v);
            s.cells[f][static_cast<std::size_t>(j)] = {mm.median, mm.mad, v.size()};
        }
    }
    if (include_hry) {
        std::vector<int> v;
        for (const auto* r : ok) v.push_back(r->hry_lag);
        const auto mm = median_mad(v);
        s.hry = {mm.median, mm.mad, v.size()};
    }
    return s;
}

inline void validate(const MCConfig& c)
{
    if (c.replications < 1) throw DataError("Monte Carlo needs at least one replication");
    if (c.lmax < 0) throw DataError("grid half-width must be >= 0");
    if (c.families.empty()) throw DataError("Monte Carlo needs at least one wavelet family");
    validate(c.scheme);
    check_same_tau(c.model, c.scheme);
    check_admissible(c.model);
    check_levels_feasible(c.families, c.j_max, c.scheme.n, c.lmax);
}

/// One replication with an already factorized sampler.
inline ReplicationResult run_replication(const MCConfig& config, const CirculantSampler& sampler,
                                         std::uint64_t seed)
{
    ReplicationResult r;
    try {
        const auto path = sampler.sample(seed);
        const auto [ret1, ret2] = returns_from_sample(path, config.scheme.tau);
        const auto grid = LagGrid::symmetric(config.lmax);
        const auto all = estimate_all_levels(ret1, ret2, config.families, config.j_max, grid);
        for (const auto& fl : all) {
            std::vector<int> lags;
            for (const auto& lv : fl.levels) lags.push_back(lv.estimate.lag);
            r.lags.push_back(std::move(lags));
        }
        if (config.include_hry) r.hry_lag = hry_lag(ret1, ret2, grid, config.scheme.tau).lag;
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    return r;
}

/// Replication i uses seed derive_seed(master_seed, i); results are merged by
/// index so the summary does not depend on the thread count.
inline std::vector<ReplicationResult> run_replications(const MCConfig& config)
{
    validate(config);
    const CirculantSampler sampler(config.model, config.scheme);
    std::vector<ReplicationResult> results(config.replications);
    parallel_for(config.replications, config.threads, [&](std::size_t i) {
        results[i] = run_replication(config, sampler, derive_seed(config.master_seed, i));
    });
    return results;
}

inline MCSummary run_mc(const MCConfig& config)
{
    auto s = summarize(run_replications(config), config.families, config.j_max, config.include_hry);
    s.lmax = config.lmax;
    s.pi1 = config.scheme.pi1;
    s.pi2 = config.scheme.pi2;
    return s;
}

/// Rows (family, statistic) x columns j1..j_max; the HRY row repeats its
/// single-scale value in every column.
inline void write_summary_csv(std::ostream& out, const MCSummary& s)
{
    out << "# schema_version=" << schema_version << " pi1=" << s.pi1 << " pi2=" << s.pi2
        << " replications=" << s.replications << " failures=" << s.failures
        << " valid=" << (s.valid ? "true" : "false") << '\n';
    out << "family,statistic";
    for (int j = 1; j <= s.j_max; ++j) out << ",j" << j;
    out << '\n';
    auto row = [&](std::string_view label, const char* stat, auto value_of) {
        out << label << ',' << stat;
        for (int j = 1; j <= s.j_max; ++j) out << ',' << value_of(j);
        out << '\n';
    };
    if (s.has_hry) {
        row("HRY", "median", [&](int) { return s.hry.median; });
        row("HRY", "mad", [&](int) { return s.hry.mad; });
    }
    for (std::size_t f = 0; f < s.families.size(); ++f) {
        const auto label = family_label(s.families[f]);
        row(label, "median", [&](int j) { return s.cells[f][static_cast<std::size_t>(j - 1)].median; });
        row(label, "mad", [&](int j) { return s.cells[f][static_cast<std::size_t>(j - 1)].mad; });
    }
}

}  // namespace leadlag
