// Scale-by-scale wavelet cross-covariance and lag estimation.
//
// For level j with filter (h_{j,p}) of length L_j the coefficients are
//   W_{jk} = sum_p h_{j,p} r_{k-p},  k = L_j - 1 .. n - 1   (no wrap-around)
// and the cross-covariance at grid lag l >= 0 is
//   rho(l) = tau^{-1} / (n - l - L_j + 1) * sum_{k=L_j-1}^{n-l-1} W1_k W2_{k+l},
// mirrored for l < 0. The lag estimate maximizes |rho| over the grid.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "leadlag/errors.hpp"
#include "leadlag/filters.hpp"
#include "leadlag/ingest.hpp"

namespace leadlag {

struct WaveletCoeffs {
    int level = 0;
    std::size_t filter_length = 0;  // L_j
    std::size_t n = 0;              // length of the return series
    std::vector<double> values;     // values[i] = W_{j, L_j - 1 + i}

    /// W_{jk} for L_j - 1 <= k <= n - 1.
    double at(std::size_t k) const { return values.at(k - (filter_length - 1)); }
};

/// Integer lags l with |l| <= max_abs, in increasing order.
struct LagGrid {
    std::vector<int> lags;

    static LagGrid symmetric(int max_abs)
    {
        if (max_abs < 0) throw std::invalid_argument("lag grid half-width must be >= 0");
        LagGrid g;
        for (int l = -max_abs; l <= max_abs; ++l) g.lags.push_back(l);
        return g;
    }

    /// {l : |l tau| < delta}
    static LagGrid from_window(double delta, double tau)
    {
        if (!(delta > 0) || !(tau > 0)) throw std::invalid_argument("grid needs delta > 0 and tau > 0");
        int m = static_cast<int>(std::floor(delta / tau));
        if (static_cast<double>(m) * tau >= delta) --m;
        return symmetric(std::max(m, 0));
    }

    int max_abs() const { return lags.empty() ? 0 : std::max(-lags.front(), lags.back()); }
};

struct CrossCovCurve {
    int level = 0;
    std::vector<int> lags;
    std::vector<double> rho;
    std::vector<double> rho_normalized;
    double divisor = 0.0;  // tau^{-1} / (n - L_j + 1) * sqrt(sum W1^2 * sum W2^2)
};

struct LagEstimate {
    int level = 0;             // 0 for the single-scale baseline
    int lag = 0;               // grid units
    double theta_seconds = 0;  // lag * tau
    double peak = 0;           // |rho| at the argmax
    double runner_up_gap = 0;  // peak minus the second largest |rho|
    bool degenerate = false;   // peak == 0 (all-zero curve)
    bool tie = false;          // another lag attains the same |rho|; tie-break applied
};

inline WaveletCoeffs modwt(std::span<const double> returns, const LevelFilter& filter)
{
    const std::size_t n = returns.size();
    const std::size_t len = filter.length();
    if (len == 0) throw std::invalid_argument("empty filter");
    if (n < len)
        throw DataError("series shorter than filter (n = " + std::to_string(n) +
                        ", L_j = " + std::to_string(len) + ")");
    WaveletCoeffs w{filter.level, len, n, std::vector<double>(n - len + 1, 0.0)};
    const auto& h = filter.coefficients;
    const std::size_t count = w.values.size();
    double* out = w.values.data();
    for (std::size_t p = 0; p < len; ++p) {
        const double hp = h[p];
        const double* src = returns.data() + (len - 1 - p);
        for (std::size_t i = 0; i < count; ++i) out[i] += hp * src[i];
    }
    return w;
}

inline WaveletCoeffs modwt(const AlignedReturns& returns, const LevelFilter& filter)
{
    return modwt(std::span<const double>(returns.returns), filter);
}

namespace detail {

inline double dot(const double* a, const double* b, std::size_t count)
{
    // four fixed lanes: deterministic and independent of scheduling
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < count; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

inline void check_pair(const WaveletCoeffs& w1, const WaveletCoeffs& w2)
{
    if (w1.level != w2.level || w1.filter_length != w2.filter_length || w1.n != w2.n)
        throw std::invalid_argument("cross_cov needs coefficients of the same level and length");
}

}  // namespace detail

inline double cross_cov(const WaveletCoeffs& w1, const WaveletCoeffs& w2, int lag, double tau)
{
    detail::check_pair(w1, w2);
    const long count = static_cast<long>(w1.n) - std::abs(lag) - static_cast<long>(w1.filter_length) + 1;
    if (count <= 0)
        throw DataError("lag " + std::to_string(lag) + " leaves no overlapping coefficients (n = " +
                        std::to_string(w1.n) + ", L_j = " + std::to_string(w1.filter_length) + ")");
    const auto c = static_cast<std::size_t>(count);
    const auto shift = static_cast<std::size_t>(std::abs(lag));
    const double sum = lag >= 0 ? detail::dot(w1.values.data(), w2.values.data() + shift, c)
                                : detail::dot(w1.values.data() + shift, w2.values.data(), c);
    return sum / (tau * static_cast<double>(count));
}

/// rho over the grid and its normalization by the full-sample energies.
inline CrossCovCurve cross_cov_curve(const WaveletCoeffs& w1, const WaveletCoeffs& w2, const LagGrid& grid,
                                     double tau)
{
    detail::check_pair(w1, w2);
    CrossCovCurve curve;
    curve.level = w1.level;
    curve.lags = grid.lags;
    curve.rho.reserve(grid.lags.size());
    for (int l : grid.lags) curve.rho.push_back(cross_cov(w1, w2, l, tau));
    const double e1 = detail::dot(w1.values.data(), w1.values.data(), w1.values.size());
    const double e2 = detail::dot(w2.values.data(), w2.values.data(), w2.values.size());
    curve.divisor = std::sqrt(e1 * e2) / (tau * static_cast<double>(w1.values.size()));
    curve.rho_normalized.reserve(curve.rho.size());
    for (double r : curve.rho) curve.rho_normalized.push_back(curve.divisor > 0 ? r / curve.divisor : 0.0);
    return curve;
}

/// argmax |value| with ties broken by smaller |lag|, then by the negative lag.
inline LagEstimate argmax_lag(std::span<const int> lags, std::span<const double> values, double tau, int level)
{
    if (lags.empty() || lags.size() != values.size())
        throw std::invalid_argument("argmax_lag needs a nonempty grid with one value per lag");
    auto preferred = [&](std::size_t a, std::size_t b) {
        const double va = std::abs(values[a]), vb = std::abs(values[b]);
        if (va != vb) return va > vb;
        if (std::abs(lags[a]) != std::abs(lags[b])) return std::abs(lags[a]) < std::abs(lags[b]);
        return lags[a] < lags[b];
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < lags.size(); ++i)
        if (preferred(i, best)) best = i;
    double second = 0.0;
    bool tie = false;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (i == best) continue;
        const double v = std::abs(values[i]);
        second = std::max(second, v);
        if (v == std::abs(values[best])) tie = true;
    }
    LagEstimate e;
    e.level = level;
    e.lag = lags[best];
    e.theta_seconds = static_cast<double>(e.lag) * tau;
    e.peak = std::abs(values[best]);
    e.runner_up_gap = lags.size() > 1 ? e.peak - second : e.peak;
    e.degenerate = e.peak == 0.0;
    e.tie = tie;
    return e;
}

inline LagEstimate estimate_lag(const CrossCovCurve& curve, double tau)
{
    return argmax_lag(curve.lags, curve.rho, tau, curve.level);
}

/// Single-scale baseline: argmax over the grid of |sum_k r1[k] r2[k+l]|
/// on the previous-tick returns. On a common equally spaced grid this is the
/// shifted-covariance contrast of the Hoffmann-Rosenbaum-Yoshida estimator.
inline std::vector<double> hry_contrast(const AlignedReturns& ret1, const AlignedReturns& ret2, const LagGrid& grid)
{
    if (ret1.n != ret2.n || ret1.returns.size() != ret2.returns.size())
        throw DataError("return series have different lengths");
    const long n = static_cast<long>(ret1.returns.size());
    std::vector<double> c;
    c.reserve(grid.lags.size());
    for (int l : grid.lags) {
        const long count = n - std::abs(l);
        if (count <= 0) throw DataError("lag " + std::to_string(l) + " exceeds the series length");
        const auto shift = static_cast<std::size_t>(std::abs(l));
        c.push_back(l >= 0 ? detail::dot(ret1.returns.data(), ret2.returns.data() + shift, static_cast<std::size_t>(count))
                           : detail::dot(ret1.returns.data() + shift, ret2.returns.data(), static_cast<std::size_t>(count)));
    }
    return c;
}

inline LagEstimate hry_lag(const AlignedReturns& ret1, const AlignedReturns& ret2, const LagGrid& grid, double tau)
{
    const auto c = hry_contrast(ret1, ret2, grid);
    return argmax_lag(grid.lags, c, tau, 0);
}

struct LevelResult {
    CrossCovCurve curve;
    LagEstimate estimate;
};

struct FamilyLevels {
    Family family;
    std::vector<LevelResult> levels;  // j = 1..j_max
};

/// Largest level j whose filter leaves at least one coefficient pair at every
/// grid lag: L_j <= n - max|l|. Returns 0 when even level 1 does not fit.
inline int max_feasible_level(Family family, std::size_t n, int max_abs_lag)
{
    const std::size_t L = base_filter_length(family);
    int j = 0;
    while (j < 30) {
        const std::size_t lj = level_filter_length(L, j + 1);
        if (static_cast<long>(lj) > static_cast<long>(n) - max_abs_lag) break;
        ++j;
    }
    return j;
}

inline void check_levels_feasible(std::span<const Family> families, int j_max, std::size_t n, int max_abs_lag)
{
    if (j_max < 1) throw DataError("number of levels must be >= 1");
    for (Family f : families) {
        const int feasible = max_feasible_level(f, n, max_abs_lag);
        if (j_max > feasible)
            throw DataError(std::to_string(j_max) + " levels are infeasible for " + std::string(family_name(f)) +
                            " with n = " + std::to_string(n) + " and max |lag| = " +
                            std::to_string(max_abs_lag) + "; the largest feasible level is " +
                            std::to_string(feasible));
    }
}

inline std::vector<FamilyLevels> estimate_all_levels(const AlignedReturns& ret1, const AlignedReturns& ret2,
                                                     std::span<const Family> families, int j_max,
                                                     const LagGrid& grid)
{
    if (ret1.n != ret2.n) throw DataError("return series have different lengths");
    if (std::abs(ret1.tau - ret2.tau) > 1e-12 * ret1.tau) throw DataError("return series have different tau");
    check_levels_feasible(families, j_max, ret1.n, grid.max_abs());
    std::vector<FamilyLevels> out;
    out.reserve(families.size());
    for (Family f : families) {
        const auto base = base_filter(f);
        FamilyLevels fl{f, {}};
        LevelFilter filter{1, base.wavelet};
        for (int j = 1; j <= j_max; ++j) {
            if (j > 1) filter = cascade(base, j);
            const auto w1 = modwt(ret1, filter);
            const auto w2 = modwt(ret2, filter);
            auto curve = cross_cov_curve(w1, w2, grid, ret1.tau);
            auto est = estimate_lag(curve, ret1.tau);
            fl.levels.push_back({std::move(curve), est});
        }
        out.push_back(std::move(fl));
    }
    return out;
}

}  // namespace leadlag
