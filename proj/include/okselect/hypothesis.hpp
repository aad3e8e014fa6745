#pragma once

#include <memory>
#include <span>
#include <vector>

#include "okselect/features.hpp"
#include "okselect/kernels.hpp"
#include "okselect/losses.hpp"

namespace okselect {

// Kernel expansion f = sum_j coeff_j * kappa(point_j, .) constrained to the
// ball {f : ||f|| <= radius}. The squared norm is tracked incrementally; the
// ball projection is exact radial scaling.
class RkhsHypothesis {
public:
    RkhsHypothesis(KernelSpec kernel, int input_dim, double radius);

    double predict(std::span<const double> x) const;

    // Gradient step under importance weight inv_prob, then ball projection.
    // A zero derivative leaves the hypothesis unchanged (no support growth).
    void ogd_step(std::span<const double> x, double label, const LossFunction& loss,
                  double stepsize, double inv_prob);

    // Same step with the prediction at x already known (saves one O(s) pass).
    void ogd_step_at(double prediction, std::span<const double> x, double label,
                     const LossFunction& loss, double stepsize, double inv_prob);

    std::size_t support_size() const { return coefficients_.size(); }
    double sq_norm() const { return sq_norm_; }
    double radius() const { return radius_; }
    const KernelSpec& kernel() const { return kernel_; }
    std::span<const double> support_point(std::size_t j) const;
    double coefficient(std::size_t j) const { return coefficients_[j]; }

    // O(s^2) recomputation of ||f||^2 from the Gram quadratic form.
    double sq_norm_exact() const;

private:
    void project_to_ball();

    KernelSpec kernel_;
    int input_dim_;
    double radius_;
    double sq_norm_ = 0.0;
    std::vector<double> points_;        // flat, support_size x input_dim
    std::vector<double> coefficients_;
};

// Linear model w . z(x) over an explicit feature map, constrained to the box
// {w : ||w||_inf <= radius / sqrt(D)} (which implies ||w||_2 <= radius).
class RfHypothesis {
public:
    RfHypothesis(std::shared_ptr<const FeatureMap> map, double radius);

    double predict(std::span<const double> x) const;
    double predict_with_features(std::span<const double> z) const;

    void ogd_step(std::span<const double> x, double label, const LossFunction& loss,
                  double stepsize, double inv_prob);

    // Step with z(x) and the prediction precomputed.
    void ogd_step_at(double prediction, std::span<const double> z, double label,
                     const LossFunction& loss, double stepsize, double inv_prob);

    const FeatureMap& map() const { return *map_; }
    std::span<const double> weights() const { return weights_; }
    double radius() const { return radius_; }
    double weight_cap() const { return cap_; }

private:
    std::shared_ptr<const FeatureMap> map_;
    double radius_;
    double cap_;  // radius / sqrt(D)
    std::vector<double> weights_;
};

}  // namespace okselect
