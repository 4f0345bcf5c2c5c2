#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace jumplab {

inline constexpr const char* kVersion = "0.1.0";

class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Thrown when the sum-norm optimizer exhausts its budget without meeting its
// stopping rule; carries the best upper bound found so far.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& msg, double best_value)
        : std::runtime_error(msg), best_upper_bound(best_value) {}
    double best_upper_bound;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key_, const std::string& msg)
        : std::runtime_error(msg), key(std::move(key_)) {}
    std::string key;
};

// Summation with a fixed pairwise reduction shape: the result depends only on
// the contents and order of `v`, never on chunking or thread count.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline bool rel_close(double a, double b, double tol) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) <= tol * scale;
}

// Smallest power of two >= max |v|. Dividing by it is exact, so estimators
// that factor this scale out commute bitwise with power-of-two rescalings of
// their input (libm's pow does not).
inline double pow2_ceil_scale(std::span<const double> values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    if (m == 0.0 || !std::isfinite(m)) return 1.0;
    int e = 0;
    std::frexp(m, &e);
    if (e > 1000) e = 1000;
    if (e < -1000) e = -1000;
    return std::ldexp(1.0, e);
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw InvalidInput(std::string(what) + " must be finite");
}

inline void require_exponent_ge1(double e, const char* what) {
    if (!(e >= 1.0) || !std::isfinite(e))
        throw InvalidInput(std::string(what) + " must lie in [1, inf)");
}

inline void require_exponent_open(double e, const char* what) {
    if (!(e > 1.0) || !std::isfinite(e))
        throw InvalidInput(std::string(what) + " must lie in (1, inf)");
}

}  // namespace jumplab
