// Synthetic bivariate increment paths for a SpectralModel, generated by
// multivariate circulant embedding, plus Bernoulli missingness masks.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "leadlag/errors.hpp"
#include "leadlag/model.hpp"
#include "leadlag/rng.hpp"

namespace leadlag {

struct PathSample {
    std::vector<double> returns1;  // Delta_k B^1, k = 0..n-1
    std::vector<double> returns2;
    std::vector<bool> mask1;  // true = missing at grid point k, k = 0..n
    std::vector<bool> mask2;
    std::uint64_t seed = 0;

    std::size_t n() const { return returns1.size(); }
};

/// Covariances of the stationary increment pair (x_k, y_k):
///   auto1[l] = E[x_k x_{k+l}], auto2[l] = E[y_k y_{k+l}]  for 0 <= l <= maxlag,
///   cross[l + maxlag] = E[x_k y_{k+l}]                    for |l| <= maxlag,
/// and zero beyond maxlag.
struct CovarianceTables {
    std::size_t maxlag = 0;
    std::vector<double> auto1;
    std::vector<double> auto2;
    std::vector<double> cross;

    double cross_at(long l) const
    {
        const long ml = static_cast<long>(maxlag);
        if (l < -ml || l > ml) return 0.0;
        return cross[static_cast<std::size_t>(l + ml)];
    }
    double auto_at(const std::vector<double>& table, long l) const
    {
        const auto a = static_cast<std::size_t>(std::labs(l));
        return a <= maxlag ? table[a] : 0.0;
    }
};

inline constexpr std::size_t kMaxLagCap = 4096;

/// Smallest truncation lag beyond which every kernel term of
/// increment_cross_cov is below 1e-6 * tau, capped at 4096 and at n - 1.
/// Uses |psi(x)| <= 3 / (pi |x|), which makes the bound scale-free.
inline std::size_t default_maxlag(const SpectralModel& model, std::size_t n)
{
    double needed = 0.0;
    for (const auto& b : model.levels) {
        if (b.R == 0.0) continue;
        needed = std::max(needed, std::abs(b.theta / model.tau) +
                                      3.0 * std::abs(b.R) / (std::numbers::pi * 1e-6));
    }
    const std::size_t cap = std::min<std::size_t>(kMaxLagCap, n > 0 ? n - 1 : 0);
    if (needed >= static_cast<double>(cap)) return cap;
    return static_cast<std::size_t>(std::ceil(needed));
}

inline void check_same_tau(const SpectralModel& model, const ObservationScheme& scheme)
{
    if (std::abs(model.tau - scheme.tau) > 1e-12 * std::abs(model.tau))
        throw DataError("model tau and observation tau differ");
}

inline CovarianceTables target_covariance_tables(const SpectralModel& model,
                                                 const ObservationScheme& scheme, std::size_t maxlag)
{
    validate(scheme);
    check_same_tau(model, scheme);
    if (maxlag >= scheme.n)
        throw DataError("maxlag " + std::to_string(maxlag) + " must be below n = " +
                        std::to_string(scheme.n));
    CovarianceTables t;
    t.maxlag = maxlag;
    t.auto1.assign(maxlag + 1, 0.0);
    t.auto2.assign(maxlag + 1, 0.0);
    t.auto1[0] = scheme.tau;  // unit-volatility Brownian increments are white
    t.auto2[0] = scheme.tau;
    t.cross.resize(2 * maxlag + 1);
    const long ml = static_cast<long>(maxlag);
    for (long l = -ml; l <= ml; ++l)
        t.cross[static_cast<std::size_t>(l + ml)] = increment_cross_cov(model, static_cast<double>(l));
    return t;
}

struct EmbeddingDiagnostics {
    double min_eigenvalue = 0.0;  // before clipping
    double max_eigenvalue = 0.0;
    std::size_t clipped = 0;       // eigenvalues in [-1e-8 tau, 0) set to zero
    double clipped_magnitude = 0;  // largest |eigenvalue| that was clipped
};

inline std::size_t next_pow2(std::size_t x)
{
    std::size_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

/// Factorizes the circulant embedding of a CovarianceTables once; each call
/// to draw() then costs one length-M FFT per series.
class CirculantSampler {
public:
    CirculantSampler(const SpectralModel& model, const ObservationScheme& scheme,
                     std::optional<std::size_t> maxlag = std::nullopt)
        : scheme_(scheme)
    {
        validate(scheme);
        check_admissible(model);
        tables_ = target_covariance_tables(model, scheme, maxlag.value_or(default_maxlag(model, scheme.n)));
        factorize();
    }

    CirculantSampler(const CovarianceTables& tables, const ObservationScheme& scheme)
        : scheme_(scheme), tables_(tables)
    {
        validate(scheme);
        if (tables_.maxlag >= scheme.n) throw DataError("maxlag must be below n");
        factorize();
    }

    std::size_t circulant_length() const { return m_; }
    const CovarianceTables& tables() const { return tables_; }
    const EmbeddingDiagnostics& diagnostics() const { return diag_; }
    const ObservationScheme& scheme() const { return scheme_; }

    /// Increments only (no masks), from the Gaussian stream of `seed`.
    std::pair<std::vector<double>, std::vector<double>> draw(std::uint64_t seed) const
    {
        auto gen = make_stream(seed, kGaussianStream);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<std::complex<double>> v1(m_), v2(m_);
        for (std::size_t k = 0; k < m_; ++k) {
            const double a = normal(gen), b = normal(gen), c = normal(gen), d = normal(gen);
            const std::complex<double> z1{a, b}, z2{c, d};
            const auto& f = factor_[k];
            v1[k] = f[0] * z1 + f[1] * z2;
            v2[k] = f[2] * z1 + f[3] * z2;
        }
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> y1, y2;
        fft.fwd(y1, v1);
        fft.fwd(y2, v2);
        const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
        std::pair<std::vector<double>, std::vector<double>> out;
        out.first.resize(scheme_.n);
        out.second.resize(scheme_.n);
        for (std::size_t k = 0; k < scheme_.n; ++k) {
            out.first[k] = scale * y1[k].real();
            out.second[k] = scale * y2[k].real();
        }
        return out;
    }

    PathSample sample(std::uint64_t seed) const;

private:
    void factorize()
    {
        const std::size_t n = scheme_.n;
        const std::size_t ml = tables_.maxlag;
        m_ = next_pow2(2 * (n + ml));
        // first rows of the three circulant blocks
        std::vector<std::complex<double>> c11(m_, 0.0), c22(m_, 0.0), c12(m_, 0.0);
        for (std::size_t l = 0; l <= ml; ++l) {
            c11[l] = tables_.auto1[l];
            c22[l] = tables_.auto2[l];
            c12[l] = tables_.cross_at(static_cast<long>(l));
            if (l > 0) {
                c11[m_ - l] = tables_.auto1[l];
                c22[m_ - l] = tables_.auto2[l];
                c12[m_ - l] = tables_.cross_at(-static_cast<long>(l));
            }
        }
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> s11, s22, s12;
        fft.fwd(s11, c11);
        fft.fwd(s22, c22);
        fft.fwd(s12, c12);

        const double hard_floor = -1e-8 * scheme_.tau;
        factor_.resize(m_);
        diag_ = {};
        diag_.min_eigenvalue = std::numeric_limits<double>::infinity();
        diag_.max_eigenvalue = -std::numeric_limits<double>::infinity();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver;
        for (std::size_t k = 0; k < m_; ++k) {
            Eigen::Matrix2cd s;
            s << s11[k].real(), s12[k], std::conj(s12[k]), s22[k].real();
            solver.compute(s);
            Eigen::Vector2d ev = solver.eigenvalues();
            for (int i = 0; i < 2; ++i) {
                diag_.min_eigenvalue = std::min(diag_.min_eigenvalue, ev[i]);
                diag_.max_eigenvalue = std::max(diag_.max_eigenvalue, ev[i]);
                if (ev[i] < hard_floor) {
                    std::ostringstream msg;
                    msg << "circulant embedding is not positive semi-definite: eigenvalue " << ev[i]
                        << " at frequency index " << k << " (tolerance " << hard_floor << ")";
                    throw NumericError(msg.str());
                }
                if (ev[i] < 0.0) {
                    ++diag_.clipped;
                    diag_.clipped_magnitude = std::max(diag_.clipped_magnitude, -ev[i]);
                    ev[i] = 0.0;
                }
            }
            const Eigen::Matrix2cd a = solver.eigenvectors() * ev.cwiseSqrt().asDiagonal();
            factor_[k] = {a(0, 0), a(0, 1), a(1, 0), a(1, 1)};
        }
        if (diag_.clipped > 0) {
            std::ostringstream msg;
            msg << "circulant embedding: clipped " << diag_.clipped
                << " slightly negative eigenvalues (largest magnitude " << diag_.clipped_magnitude
                << ", i.e. " << diag_.clipped_magnitude / scheme_.tau << " tau)";
            warn(msg.str());
        }
    }

    ObservationScheme scheme_;
    CovarianceTables tables_;
    std::size_t m_ = 0;
    std::vector<std::array<std::complex<double>, 4>> factor_;  // row-major 2x2 per frequency
    EmbeddingDiagnostics diag_;
};

/// Independent Bernoulli(pi_nu) missingness at grid points 1..n; point 0 is
/// always observed. The two series draw from separate streams of `seed`.
inline std::pair<std::vector<bool>, std::vector<bool>> apply_missing(const ObservationScheme& scheme,
                                                                     std::uint64_t seed)
{
    validate(scheme);
    auto draw_mask = [&](double pi, std::uint64_t stream) {
        std::vector<bool> mask(scheme.n + 1, false);
        if (pi == 0.0) return mask;
        auto gen = make_stream(seed, stream);
        std::bernoulli_distribution missing(pi);
        for (std::size_t k = 1; k <= scheme.n; ++k) mask[k] = missing(gen);
        return mask;
    };
    return {draw_mask(scheme.pi1, kMaskStream1), draw_mask(scheme.pi2, kMaskStream2)};
}

inline PathSample CirculantSampler::sample(std::uint64_t seed) const
{
    auto [r1, r2] = draw(seed);
    auto [m1, m2] = apply_missing(scheme_, seed);
    return {std::move(r1), std::move(r2), std::move(m1), std::move(m2), seed};
}

inline PathSample circulant_embed_sample(const SpectralModel& model, const ObservationScheme& scheme,
                                         std::uint64_t seed)
{
    return CirculantSampler(model, scheme).sample(seed);
}

}  // namespace leadlag
