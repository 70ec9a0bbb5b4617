// JSON model files:
//   {"J": 13, "tau": 6.103515625e-05, "n": 15000, "pi1": 0, "pi2": 0,
//    "levels": [{"j": 1, "R": 0.3, "theta_over_tau": -1}, ...]}
// "tau" defaults to 2^{-J-1}; each level gives either "theta_over_tau"
// (grid units) or "theta_seconds". Unlisted levels have R = 0, theta = 0.
#pragma once

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>

#include "leadlag/errors.hpp"
#include "leadlag/model.hpp"

namespace leadlag {

inline constexpr int schema_version = 1;

struct ModelFile {
    SpectralModel model;
    ObservationScheme scheme;
};

inline ModelFile model_from_json(const nlohmann::json& j)
{
    try {
        if (!j.contains("J")) throw DataError("model JSON is missing \"J\"");
        const int J = j.at("J").get<int>();
        const double tau = j.contains("tau") ? j.at("tau").get<double>() : SpectralModel::dyadic_tau(J);
        ModelFile out{SpectralModel::zeros(J, tau), {}};
        if (j.contains("levels")) {
            for (const auto& lv : j.at("levels")) {
                const int m = lv.at("j").get<int>();
                if (m < 1 || m > J + 1)
                    throw DataError("model level j = " + std::to_string(m) + " outside 1.." +
                                    std::to_string(J + 1));
                auto& band = out.model.band(m);
                band.R = lv.value("R", 0.0);
                if (lv.contains("theta_over_tau") && lv.contains("theta_seconds"))
                    throw DataError("level " + std::to_string(m) +
                                    " gives both theta_over_tau and theta_seconds");
                if (lv.contains("theta_over_tau"))
                    band.theta = lv.at("theta_over_tau").get<double>() * tau;
                else
                    band.theta = lv.value("theta_seconds", 0.0);
            }
        }
        out.scheme.tau = tau;
        out.scheme.n = j.value("n", std::size_t{1});
        out.scheme.pi1 = j.value("pi1", 0.0);
        out.scheme.pi2 = j.value("pi2", 0.0);
        validate(out.scheme);
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model JSON: ") + e.what());
    }
}

inline nlohmann::json model_to_json(const SpectralModel& model, const ObservationScheme& scheme)
{
    nlohmann::json levels = nlohmann::json::array();
    for (int m = 1; m <= model.band_count(); ++m) {
        const auto& b = model.band(m);
        levels.push_back({{"j", m}, {"R", b.R}, {"theta_seconds", b.theta}});
    }
    return {{"schema_version", schema_version}, {"J", model.J},     {"tau", model.tau},
            {"n", scheme.n},                    {"pi1", scheme.pi1}, {"pi2", scheme.pi2},
            {"levels", levels}};
}

inline nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot read file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("invalid JSON in " + path + ": " + e.what());
    }
}

inline ModelFile load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

/// The eight-band model of the simulation study: J = 13,
/// n = 15000, eight active bands with lags (-1,-1,-2,-2,-3,-5,-7,-10) tau.
inline ModelFile benchmark_model(double pi = 0.0, std::size_t n = 15000)
{
    constexpr int J = 13;
    const double tau = SpectralModel::dyadic_tau(J);
    ModelFile out{SpectralModel::zeros(J, tau), {tau, n, pi, pi}};
    const double R[] = {0.3, 0.5, 0.7, 0.5, 0.5, 0.5, 0.5, 0.5};
    const double lag[] = {-1, -1, -2, -2, -3, -5, -7, -10};
    for (int m = 1; m <= 8; ++m) out.model.band(m) = {R[m - 1], lag[m - 1] * tau};
    return out;
}

}  // namespace leadlag
