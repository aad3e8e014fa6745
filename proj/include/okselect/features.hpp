#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "okselect/kernels.hpp"

namespace okselect {

// Monte-Carlo feature map for a shift-invariant kernel: D frequencies drawn
// from the kernel's spectral density plus uniform phases, with
//   phi(x, omega_j) = sqrt(2) * cos(omega_j . x + b_j)
// so that E[z(x) . z(v)] = kappa(x, v) and |phi| <= feature_bound = sqrt(2).
struct FeatureMap {
    KernelSpec kernel;
    int dimension = 0;                 // D
    int input_dim = 0;                 // d
    std::vector<double> frequencies;   // D x d, row-major
    std::vector<double> phases;        // D, in [0, 2*pi)
    double feature_bound = 0.0;        // B
    std::uint64_t seed = 0;

    std::span<const double> frequency(int j) const {
        return {frequencies.data() + static_cast<std::size_t>(j) * input_dim,
                static_cast<std::size_t>(input_dim)};
    }
};

FeatureMap sample_feature_map(const KernelSpec& spec, int dimension, int input_dim,
                              std::uint64_t seed);

// Writes z(x) into out (size D); entries are bounded by feature_bound / sqrt(D).
void feature_vector(const FeatureMap& map, std::span<const double> x,
                    std::span<double> out);

std::vector<double> feature_vector(const FeatureMap& map, std::span<const double> x);

}  // namespace okselect
