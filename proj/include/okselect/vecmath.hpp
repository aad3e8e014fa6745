#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "okselect/errors.hpp"

namespace okselect {

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidInput("dot: dimension mismatch (" + std::to_string(a.size()) +
                           " vs " + std::to_string(b.size()) + ")");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidInput("squared_distance: dimension mismatch (" +
                           std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double squared_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

inline bool all_finite(std::span<const double> a) {
    for (double v : a) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace okselect
