#include "okselect/features.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "okselect/errors.hpp"

namespace okselect {

FeatureMap sample_feature_map(const KernelSpec& spec, int dimension, int input_dim,
                              std::uint64_t seed) {
    if (dimension < 1) throw InvalidInput("sample_feature_map: dimension must be >= 1");
    if (input_dim < 1) throw InvalidInput("sample_feature_map: input_dim must be >= 1");
    if (spec.family != KernelFamily::gaussian) {
        throw Unsupported("sample_feature_map: only the Gaussian family is supported");
    }

    FeatureMap map;
    map.kernel = spec;
    map.dimension = dimension;
    map.input_dim = input_dim;
    map.feature_bound = std::numbers::sqrt2;
    map.seed = seed;
    map.frequencies.resize(static_cast<std::size_t>(dimension) * input_dim);
    map.phases.resize(dimension);

    // Spectral density of the Gaussian kernel: N(0, sigma^-2 I).
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> freq(0.0, 1.0 / spec.width);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (double& w : map.frequencies) w = freq(rng);
    for (double& b : map.phases) b = phase(rng);
    return map;
}

void feature_vector(const FeatureMap& map, std::span<const double> x,
                    std::span<double> out) {
    if (static_cast<int>(x.size()) != map.input_dim) {
        throw InvalidInput("feature_vector: input dimension mismatch (" +
                           std::to_string(x.size()) + " vs " +
                           std::to_string(map.input_dim) + ")");
    }
    if (static_cast<int>(out.size()) != map.dimension) {
        throw InvalidInput("feature_vector: output size must equal the map dimension");
    }
    const double scale = std::numbers::sqrt2 / std::sqrt(static_cast<double>(map.dimension));
    for (int j = 0; j < map.dimension; ++j) {
        const auto w = map.frequency(j);
        double t = map.phases[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < x.size(); ++k) t += w[k] * x[k];
        out[static_cast<std::size_t>(j)] = scale * std::cos(t);
    }
}

std::vector<double> feature_vector(const FeatureMap& map, std::span<const double> x) {
    std::vector<double> out(static_cast<std::size_t>(map.dimension));
    feature_vector(map, x, out);
    return out;
}

}  // namespace okselect
