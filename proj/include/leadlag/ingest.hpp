// Tick data -> grid-aligned returns with previous-tick interpolation.
#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "leadlag/errors.hpp"
#include "leadlag/model.hpp"
#include "leadlag/simulate.hpp"

namespace leadlag {

enum class PriceScale { raw_price, log_price };

struct TickSeries {
    std::vector<double> timestamps;  // seconds, nondecreasing
    std::vector<double> prices;
    PriceScale scale = PriceScale::raw_price;

    std::size_t size() const { return timestamps.size(); }
};

/// Previous-tick interpolated returns on the grid t0 + k tau, k = 0..n.
///   returns[k]  = value(k + 1) - value(k), k = 0..n-1
///   observed[k] = a tick arrived in (t0 + (k-1) tau, t0 + k tau]; observed[0] = true
struct AlignedReturns {
    double t0 = 0.0;
    double tau = 1.0;
    std::size_t n = 0;
    std::vector<double> returns;
    std::vector<bool> observed;
};

namespace detail {

inline void check_ticks(const TickSeries& ticks)
{
    if (ticks.timestamps.size() != ticks.prices.size())
        throw DataError("tick series has mismatched timestamp/price lengths");
    if (ticks.timestamps.empty()) throw DataError("no ticks");
    for (std::size_t i = 1; i < ticks.size(); ++i)
        if (ticks.timestamps[i] < ticks.timestamps[i - 1])
            throw DataError("timestamps decrease at row " + std::to_string(i + 1));
    if (ticks.scale == PriceScale::raw_price)
        for (std::size_t i = 0; i < ticks.size(); ++i)
            if (!(ticks.prices[i] > 0))
                throw DataError("non-positive price at row " + std::to_string(i + 1));
}

}  // namespace detail

/// Grid times are t0 + k tau; a tick at t counts for grid point k when
/// t <= t0 + k tau + 1e-9 tau, which absorbs rounding in k * tau. When
/// several ticks share a slot the last one wins.
inline AlignedReturns align_to_grid(const TickSeries& ticks, double t0, double tau, std::size_t n)
{
    detail::check_ticks(ticks);
    if (n == 0) throw DataError("grid needs n >= 1");
    if (!(tau > 0)) throw DataError("grid tau must be positive");
    const double slack = 1e-9 * tau;
    if (ticks.timestamps.front() > t0 + slack)
        throw DataError("no tick at or before the grid origin t0 = " + std::to_string(t0));

    auto value_of = [&](std::size_t i) {
        return ticks.scale == PriceScale::raw_price ? std::log(ticks.prices[i]) : ticks.prices[i];
    };

    AlignedReturns out{t0, tau, n, std::vector<double>(n), std::vector<bool>(n + 1, false)};
    std::size_t next = 0;  // first tick not yet consumed
    std::size_t last = 0;  // most recent tick at or before the current grid point
    std::vector<double> values(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double grid = t0 + static_cast<double>(k) * tau + slack;
        bool arrived = false;
        while (next < ticks.size() && ticks.timestamps[next] <= grid) {
            last = next++;
            arrived = true;
        }
        values[k] = value_of(last);
        out.observed[k] = (k == 0) || arrived;
    }
    for (std::size_t k = 0; k < n; ++k) out.returns[k] = values[k + 1] - values[k];
    return out;
}

/// Builds levels X_k = sum_{i<k} r_i, drops the masked grid points and
/// re-derives the previous-tick returns. Both outputs use t0 = 0.
inline std::pair<AlignedReturns, AlignedReturns> returns_from_sample(const PathSample& path, double tau)
{
    const std::size_t n = path.returns1.size();
    if (path.returns2.size() != n || path.mask1.size() != n + 1 || path.mask2.size() != n + 1)
        throw DataError("path sample has inconsistent lengths");
    if (n == 0) throw DataError("path sample is empty");
    auto one = [&](const std::vector<double>& r, const std::vector<bool>& mask) {
        TickSeries ticks;
        ticks.scale = PriceScale::log_price;
        double level = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == 0 || !mask[k]) {
                ticks.timestamps.push_back(static_cast<double>(k) * tau);
                ticks.prices.push_back(level);
            }
            if (k < n) level += r[k];
        }
        return align_to_grid(ticks, 0.0, tau, n);
    };
    return {one(path.returns1, path.mask1), one(path.returns2, path.mask2)};
}

/// CSV with header `timestamp,price`; blank lines and lines starting with
/// '#' are skipped. Row numbers in errors count data rows from 1.
inline TickSeries parse_tick_csv(std::istream& in, PriceScale scale = PriceScale::raw_price)
{
    TickSeries ticks;
    ticks.scale = scale;
    std::string line;
    bool header_seen = false;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            header_seen = true;
            std::string h;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) h.push_back(static_cast<char>(std::tolower(c)));
            if (h != "timestamp,price")
                throw DataError("expected CSV header 'timestamp,price', got '" + line + "'");
            continue;
        }
        ++row;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError("row " + std::to_string(row) + ": expected two columns");
        double t = 0.0, p = 0.0;
        try {
            std::size_t used = 0;
            t = std::stod(line.substr(0, comma), &used);
            p = std::stod(line.substr(comma + 1), &used);
        } catch (const std::exception&) {
            throw DataError("row " + std::to_string(row) + ": cannot parse '" + line + "'");
        }
        if (!ticks.timestamps.empty() && t < ticks.timestamps.back())
            throw DataError("timestamps decrease at row " + std::to_string(row));
        if (scale == PriceScale::raw_price && !(p > 0))
            throw DataError("non-positive price at row " + std::to_string(row));
        ticks.timestamps.push_back(t);
        ticks.prices.push_back(p);
    }
    if (ticks.timestamps.empty()) throw DataError("no ticks");
    return ticks;
}

inline TickSeries read_csv(const std::string& path, PriceScale scale = PriceScale::raw_price)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot read file: " + path);
    try {
        return parse_tick_csv(in, scale);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void write_tick_csv(std::ostream& out, const TickSeries& ticks)
{
    out.precision(17);
    out << "timestamp,price\n";
    for (std::size_t i = 0; i < ticks.size(); ++i) out << ticks.timestamps[i] << ',' << ticks.prices[i] << '\n';
}

/// One row per return; `observed` flags whether the return's right endpoint
/// (grid point k + 1) carried a fresh tick.
inline void write_aligned_csv(std::ostream& out, const AlignedReturns& r)
{
    out.precision(17);
    out << "k,return,observed\n";
    for (std::size_t k = 0; k < r.n; ++k)
        out << k << ',' << r.returns[k] << ',' << (r.observed[k + 1] ? 1 : 0) << '\n';
}

}  // namespace leadlag
