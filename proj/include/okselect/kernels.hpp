#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "okselect/errors.hpp"
#include "okselect/vecmath.hpp"

namespace okselect {

enum class KernelFamily { gaussian };

// One arm of the kernel grid. Gaussian widths satisfy kappa(x,x) = 1.
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    double width = 1.0;  // Gaussian sigma
    int id = 0;          // arm index
};

inline double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                          std::span<const double> v) {
    if (x.size() != v.size()) {
        throw InvalidInput("kernel_eval: dimension mismatch (" + std::to_string(x.size()) +
                           " vs " + std::to_string(v.size()) + ")");
    }
    switch (spec.family) {
        case KernelFamily::gaussian:
            return std::exp(-squared_distance(x, v) / (2.0 * spec.width * spec.width));
    }
    throw Unsupported("kernel_eval: unknown kernel family");
}

inline std::vector<KernelSpec> width_grid(const std::vector<double>& widths) {
    std::vector<KernelSpec> specs;
    specs.reserve(widths.size());
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (!(widths[i] > 0.0)) throw InvalidInput("width_grid: widths must be positive");
        specs.push_back(KernelSpec{KernelFamily::gaussian, widths[i], static_cast<int>(i)});
    }
    return specs;
}

// sigma = 2^-2, ..., 2^3
inline std::vector<double> default_widths() { return {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}; }

}  // namespace okselect
