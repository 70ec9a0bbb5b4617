// Multi-scale cross-spectral Brownian model and the closed-form/numeric
// theory quantities attached to it.
//
// A SpectralModel assigns to each dyadic band m = 1..J+1 a correlation R_m
// and a lag theta_m (seconds). Band m occupies the angular frequencies
// 2^{-m} pi / tau < |lambda| <= 2^{-m+1} pi / tau, so m = 1 is the finest
// band just below the Nyquist frequency of the sampling interval tau.
#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "leadlag/errors.hpp"

namespace leadlag {

struct ScaleParams {
    double R = 0.0;      // band correlation, |R| <= 1
    double theta = 0.0;  // lag in seconds
};

struct SpectralModel {
    int J = 0;       // finest dyadic level; the model has J + 1 bands
    double tau = 0;  // sampling interval tau_J in seconds
    std::vector<ScaleParams> levels;  // levels[m - 1] holds band m, m = 1..J+1

    static SpectralModel zeros(int J, double tau)
    {
        if (J < 0) throw DataError("model J must be non-negative");
        if (!(tau > 0)) throw DataError("model tau must be positive");
        return {J, tau, std::vector<ScaleParams>(static_cast<std::size_t>(J) + 1)};
    }

    /// Canonical dyadic sampling interval 2^{-J-1}.
    static double dyadic_tau(int J) { return std::ldexp(1.0, -J - 1); }

    int band_count() const { return static_cast<int>(levels.size()); }
    const ScaleParams& band(int m) const { return levels.at(static_cast<std::size_t>(m - 1)); }
    ScaleParams& band(int m) { return levels.at(static_cast<std::size_t>(m - 1)); }
};

struct ObservationScheme {
    double tau = 1.0;  // seconds
    std::size_t n = 1;  // number of increments
    double pi1 = 0.0;   // missing probability, series 1
    double pi2 = 0.0;   // missing probability, series 2
};

inline void validate(const ObservationScheme& s)
{
    if (!(s.tau > 0)) throw DataError("observation tau must be positive");
    if (s.n < 1) throw DataError("observation scheme needs n >= 1");
    for (double p : {s.pi1, s.pi2})
        if (!(p >= 0.0 && p < 1.0)) throw DataError("missing probabilities must lie in [0, 1)");
}

/// Throws DataError when some |R_m| > 1. Because the bands are disjoint this
/// is exactly the requirement sup|f| <= 1 for the model to exist with
/// Brownian marginals.
inline void check_admissible(const SpectralModel& model)
{
    for (int m = 1; m <= model.band_count(); ++m) {
        const double R = model.band(m).R;
        if (!(std::abs(R) <= 1.0))
            throw DataError("inadmissible model: |R_" + std::to_string(m) + "| = " +
                            std::to_string(std::abs(R)) +
                            " > 1 violates the admissibility bound sup|f| <= 1");
    }
}

/// Throws DataError when some |theta_m| >= delta (lags must lie strictly
/// inside the search window).
inline void check_lags_within(const SpectralModel& model, double delta)
{
    for (int m = 1; m <= model.band_count(); ++m)
        if (!(std::abs(model.band(m).theta) < delta))
            throw DataError("|theta_" + std::to_string(m) + "| is not below the grid half-width " +
                            std::to_string(delta));
}

// ---------------------------------------------------------------------------
// Littlewood-Paley kernel

/// sin(pi s) / (pi s), equal to 1 at s = 0.
inline double lp_scaling(double s)
{
    if (s == 0.0) return 1.0;
    const double x = std::numbers::pi * s;
    return std::sin(x) / x;
}

/// 2 phi(2s) - phi(s); Fourier transform is the indicator of pi < |lambda| <= 2 pi.
inline double lp_wavelet(double s) { return 2.0 * lp_scaling(2.0 * s) - lp_scaling(s); }

// ---------------------------------------------------------------------------
// Cross-spectrum and increment covariance

/// f(lambda) = sum_m R_m exp(-i theta_m lambda) 1{lambda in band m}.
inline std::complex<double> cross_spectral_density(const SpectralModel& model, double lambda)
{
    const double w = std::abs(lambda) * model.tau / std::numbers::pi;  // normalized, Nyquist = 1
    if (w == 0.0 || w > 1.0) return {0.0, 0.0};
    // band m: 2^{-m} < w <= 2^{-m+1}
    int exponent = 0;
    const double mant = std::frexp(w, &exponent);  // w = mant * 2^exponent, mant in [0.5, 1)
    int m = 1 - exponent;
    if (mant == 0.5) m += 1;  // exact power of two sits at the top of the coarser band
    if (m < 1 || m > model.band_count()) return {0.0, 0.0};
    const auto& b = model.band(m);
    return b.R * std::polar(1.0, -b.theta * lambda);
}

/// Approximate E[Delta_k B^1 Delta_{k+l} B^2] for unit-volatility increments:
///   tau * sum_m R_m 2^{-m} psi(2^{-m} (l - theta_m / tau)).
inline double increment_cross_cov(const SpectralModel& model, double lag)
{
    double acc = 0.0;
    for (int m = 1; m <= model.band_count(); ++m) {
        const auto& b = model.band(m);
        if (b.R == 0.0) continue;
        const double scale = std::ldexp(1.0, -m);
        acc += b.R * scale * lp_wavelet(scale * (lag - b.theta / model.tau));
    }
    return model.tau * acc;
}

// ---------------------------------------------------------------------------
// Theory kernels

/// D(lambda) = (1/2pi) |(e^{-i lambda} - 1)/lambda|^2 = (2/pi) sin^2(lambda/2) / lambda^2.
inline double discretization_kernel(double lambda)
{
    if (std::abs(lambda) < 1e-8) return 1.0 / (2.0 * std::numbers::pi);
    const double s = std::sin(lambda / 2);
    return (2.0 / std::numbers::pi) * s * s / (lambda * lambda);
}

/// Pi(lambda) = (1-pi1)(1-pi2) / ((1 - pi1 e^{i lambda})(1 - pi2 e^{-i lambda})).
inline std::complex<double> interpolation_kernel(double lambda, double pi1, double pi2)
{
    const std::complex<double> num{(1.0 - pi1) * (1.0 - pi2), 0.0};
    const auto den = (1.0 - pi1 * std::polar(1.0, lambda)) * (1.0 - pi2 * std::polar(1.0, -lambda));
    return num / den;
}

namespace quad {

/// Adaptive 15-point Gauss-Kronrod on [a, b].
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 20)
{
    if (a == b) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, rel_tol,
                                                                         &err);
}

}  // namespace quad

/// Volatility weight
///   theta >= 0:  (1/(T - theta)) int_0^{(t-theta)_+} s1(s) s2(s + theta) ds
///   theta <  0:  (1/(T + theta)) int_0^{(t+theta)_+} s1(s - theta) s2(s) ds
inline double sigma_weight(double theta, const std::function<double(double)>& sigma1,
                           const std::function<double(double)>& sigma2, double t, double T)
{
    if (!(std::abs(theta) < T)) throw std::invalid_argument("sigma_weight needs |theta| < T");
    if (theta >= 0) {
        const double upper = std::max(t - theta, 0.0);
        const double integral =
            quad::integrate([&](double s) { return sigma1(s) * sigma2(s + theta); }, 0.0, upper);
        return integral / (T - theta);
    }
    const double upper = std::max(t + theta, 0.0);
    const double integral =
        quad::integrate([&](double s) { return sigma1(s - theta) * sigma2(s); }, 0.0, upper);
    return integral / (T + theta);
}

/// Limit of the level-j cross-covariance estimator at offset b (grid units)
/// from the true lag:
///   2^j * Sigma * R * int_{band j} D(lambda) Pi(lambda) e^{i b lambda} d lambda,
/// band j = {2^{-j} pi < |lambda| <= 2^{-j+1} pi}. The imaginary part cancels
/// by hermitian symmetry; NumericError if it does not.
inline double limit_constant(int level, double b, double pi1, double pi2, double R, double sigma_value)
{
    if (level < 1) throw std::invalid_argument("limit_constant needs level >= 1");
    if (std::abs(b) > 0.5)
        warn("limit_constant: |b| = " + std::to_string(std::abs(b)) +
             " > 1/2 is outside the range where the limit is known to be nonzero");
    if (R == 0.0 || sigma_value == 0.0) return 0.0;
    const double lo = std::ldexp(std::numbers::pi, -level);
    const double hi = 2.0 * lo;
    auto integrand = [&](double lambda) {
        return discretization_kernel(lambda) * interpolation_kernel(lambda, pi1, pi2) *
               std::polar(1.0, b * lambda);
    };
    double re = 0.0, im = 0.0;
    for (double sign : {1.0, -1.0}) {
        const double a = sign > 0 ? lo : -hi;
        const double c = sign > 0 ? hi : -lo;
        re += quad::integrate([&](double x) { return integrand(x).real(); }, a, c);
        im += quad::integrate([&](double x) { return integrand(x).imag(); }, a, c);
    }
    if (std::abs(im) > 1e-9)
        throw NumericError("limit_constant: imaginary part " + std::to_string(im) + " did not cancel");
    return std::ldexp(1.0, level) * sigma_value * R * re;
}

}  // namespace leadlag
