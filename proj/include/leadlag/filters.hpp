// Daubechies wavelet/scaling filters, their level-j cascades and the
// closed-form squared gain functions used to validate them.
//
// Conventions: (h_p) is the wavelet (high-pass) filter and (g_p) the scaling
// (low-pass) filter, linked by g_p = (-1)^{p+1} h_{L-p-1}. All filters have
// unit energy. Squared gains are normalized so that H_L + G_L = 2.
#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace leadlag {

enum class Family { Haar, LA8, LA20 };

inline constexpr std::array<Family, 3> all_families{Family::Haar, Family::LA8, Family::LA20};

inline std::string_view family_name(Family f)
{
    switch (f) {
    case Family::Haar: return "haar";
    case Family::LA8: return "la8";
    case Family::LA20: return "la20";
    }
    return "?";
}

/// Display label used in tables ("Haar", "LA(8)", "LA(20)").
inline std::string_view family_label(Family f)
{
    switch (f) {
    case Family::Haar: return "Haar";
    case Family::LA8: return "LA(8)";
    case Family::LA20: return "LA(20)";
    }
    return "?";
}

/// Case-insensitive; accepts "haar", "la8", "la20", "la(8)", "la(20)".
inline Family parse_family(std::string_view text)
{
    std::string s;
    for (char c : text) {
        if (c == '(' || c == ')') continue;
        s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (s == "haar") return Family::Haar;
    if (s == "la8") return Family::LA8;
    if (s == "la20") return Family::LA20;
    throw std::invalid_argument("unknown wavelet family '" + std::string(text) +
                                "' (expected haar, la8 or la20)");
}

struct BaseFilterPair {
    Family family;
    std::vector<double> wavelet;  // h_p
    std::vector<double> scaling;  // g_p

    std::size_t length() const { return wavelet.size(); }
};

struct LevelFilter {
    int level = 1;
    std::vector<double> coefficients;  // h_{j,p}, p = 0 .. L_j - 1

    std::size_t length() const { return coefficients.size(); }
};

/// L_j = (2^j - 1)(L - 1) + 1
constexpr std::size_t level_filter_length(std::size_t base_length, int level)
{
    return ((std::size_t{1} << level) - 1) * (base_length - 1) + 1;
}

constexpr std::size_t base_filter_length(Family f)
{
    switch (f) {
    case Family::Haar: return 2;
    case Family::LA8: return 8;
    case Family::LA20: return 20;
    }
    return 0;
}

namespace detail {

// Least-asymmetric scaling filters, Percival-Walden orientation. Regenerate
// with tools/gen_la_filters.py; the gain tests reject any corrupted entry.
inline constexpr std::array<double, 8> la8_scaling{
    -0.075765714789502213, -0.029635527646002492, 0.49761866763277499,
    0.80373875180513208,   0.29785779560530605,   -0.099219543576633533,
    -0.012603967262031304, 0.032223100604051468};

inline constexpr std::array<double, 20> la20_scaling{
    0.00077015980911445982,  0.000095632670722852731, -0.0086412992770221503,
    -0.0014653825813046105,  0.045927239231091509,    0.011609893903711318,
    -0.15949427888491061,    -0.070880535783231572,   0.47169066693844291,
    0.76951003702109794,     0.38382676106707633,     -0.035536740473819586,
    -0.031990056882428114,   0.049994972077375156,    0.0057649120335811497,
    -0.020354939812311111,   -0.0008043589320164513,  0.0045931735853117919,
    0.000057036083618495007, -0.00045932942100465204};

// inverse of g_p = (-1)^{p+1} h_{L-p-1}:  h_p = (-1)^p g_{L-1-p}
inline std::vector<double> wavelet_from_scaling(std::span<const double> g)
{
    const std::size_t L = g.size();
    std::vector<double> h(L);
    for (std::size_t p = 0; p < L; ++p) h[p] = (p % 2 == 0 ? 1.0 : -1.0) * g[L - 1 - p];
    return h;
}

}  // namespace detail

/// g_p = (-1)^{p+1} h_{L-p-1}
inline std::vector<double> scaling_from_wavelet(std::span<const double> h)
{
    const std::size_t L = h.size();
    if (L == 0 || L % 2 != 0)
        throw std::invalid_argument("quadrature mirror filter needs an even, nonzero length (got " +
                                    std::to_string(L) + ")");
    std::vector<double> g(L);
    for (std::size_t p = 0; p < L; ++p) g[p] = (p % 2 == 0 ? -1.0 : 1.0) * h[L - p - 1];
    return g;
}

inline BaseFilterPair base_filter(Family family)
{
    std::vector<double> g;
    switch (family) {
    case Family::Haar: g = {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}; break;
    case Family::LA8: g.assign(detail::la8_scaling.begin(), detail::la8_scaling.end()); break;
    case Family::LA20: g.assign(detail::la20_scaling.begin(), detail::la20_scaling.end()); break;
    }
    auto h = detail::wavelet_from_scaling(g);
    return {family, std::move(h), std::move(g)};
}

/// Level-j wavelet filter by the pyramid recursion
///   h_1 = h,   h_j = g * (h_{j-1} upsampled by 2).
inline LevelFilter cascade(const BaseFilterPair& base, int level)
{
    if (level < 1) throw std::invalid_argument("cascade level must be >= 1");
    std::vector<double> current = base.wavelet;
    const auto& g = base.scaling;
    for (int j = 2; j <= level; ++j) {
        const std::size_t up_len = 2 * current.size() - 1;
        std::vector<double> next(up_len + g.size() - 1, 0.0);
        for (std::size_t q = 0; q < current.size(); ++q)
            for (std::size_t p = 0; p < g.size(); ++p) next[2 * q + p] += g[p] * current[q];
        current = std::move(next);
    }
    return {level, std::move(current)};
}

inline LevelFilter cascade(Family family, int level) { return cascade(base_filter(family), level); }

/// H_L(lambda) = 2 sin^L(lambda/2) sum_{p<L/2} C(L/2-1+p, p) cos^{2p}(lambda/2)
inline double squared_gain_H(int L, double lambda)
{
    if (L < 2 || L % 2 != 0) throw std::invalid_argument("squared_gain_H needs an even L >= 2");
    const int half = L / 2;
    const double s = std::sin(lambda / 2);
    const double c2 = std::cos(lambda / 2) * std::cos(lambda / 2);
    double sum = 0.0, binom = 1.0, c2p = 1.0;
    for (int p = 0; p < half; ++p) {
        sum += binom * c2p;
        // C(half + p, p + 1) from C(half - 1 + p, p)
        binom = binom * (half + p) / (p + 1);
        c2p *= c2;
    }
    return 2.0 * std::pow(s, L) * sum;
}

/// G_L(lambda) = H_L(lambda - pi)
inline double squared_gain_G(int L, double lambda) { return squared_gain_H(L, lambda - std::numbers::pi); }

/// H_{j,L}(lambda) = H_L(2^{j-1} lambda) prod_{i=0}^{j-2} G_L(2^i lambda)
inline double squared_gain_level(int level, int L, double lambda)
{
    if (level < 1) throw std::invalid_argument("squared_gain_level needs level >= 1");
    double value = squared_gain_H(L, std::ldexp(lambda, level - 1));
    for (int i = 0; i <= level - 2; ++i) value *= squared_gain_G(L, std::ldexp(lambda, i));
    return value;
}

/// |sum_p c_p e^{-i lambda p}|^2 evaluated directly from the coefficients.
inline double empirical_squared_gain(std::span<const double> coeffs, double lambda)
{
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t p = 0; p < coeffs.size(); ++p)
        acc += coeffs[p] * std::polar(1.0, -lambda * static_cast<double>(p));
    return std::norm(acc);
}

}  // namespace leadlag
