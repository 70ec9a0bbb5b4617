// Error types shared by every leadlag module.
#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace leadlag {

/// Bad or inconsistent input data (malformed files, inadmissible models,
/// series too short for a filter).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure could not produce a valid result (e.g. a circulant
/// embedding that is not positive semi-definite).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline std::function<void(const std::string&)>& warning_sink()
{
    static std::function<void(const std::string&)> sink = [](const std::string& msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return sink;
}
inline std::mutex& warning_mutex()
{
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Replace the warning handler (default: print to stderr). Returns the old one.
inline std::function<void(const std::string&)> set_warning_handler(
    std::function<void(const std::string&)> handler)
{
    std::lock_guard lock(detail::warning_mutex());
    return std::exchange(detail::warning_sink(), std::move(handler));
}

inline void warn(const std::string& msg)
{
    std::lock_guard lock(detail::warning_mutex());
    if (detail::warning_sink()) detail::warning_sink()(msg);
}

}  // namespace leadlag
