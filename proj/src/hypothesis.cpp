#include "okselect/hypothesis.hpp"

#include <algorithm>
#include <cmath>

#include "okselect/errors.hpp"
#include "okselect/vecmath.hpp"

namespace okselect {

RkhsHypothesis::RkhsHypothesis(KernelSpec kernel, int input_dim, double radius)
    : kernel_(kernel), input_dim_(input_dim), radius_(radius) {
    if (input_dim < 1) throw InvalidInput("RkhsHypothesis: input_dim must be >= 1");
    if (!(radius > 0.0)) throw InvalidInput("RkhsHypothesis: radius must be positive");
}

std::span<const double> RkhsHypothesis::support_point(std::size_t j) const {
    return {points_.data() + j * static_cast<std::size_t>(input_dim_),
            static_cast<std::size_t>(input_dim_)};
}

double RkhsHypothesis::predict(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim_) {
        throw InvalidInput("RkhsHypothesis::predict: dimension mismatch");
    }
    // hot path: inlined Gaussian evaluation over the flat support storage
    const double inv_two_sq = 1.0 / (2.0 * kernel_.width * kernel_.width);
    const std::size_t d = static_cast<std::size_t>(input_dim_);
    const double* point = points_.data();
    double s = 0.0;
    for (std::size_t j = 0; j < coefficients_.size(); ++j, point += d) {
        double dist = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = point[k] - x[k];
            dist += diff * diff;
        }
        s += coefficients_[j] * std::exp(-dist * inv_two_sq);
    }
    return s;
}

void RkhsHypothesis::ogd_step(std::span<const double> x, double label,
                              const LossFunction& loss, double stepsize,
                              double inv_prob) {
    ogd_step_at(predict(x), x, label, loss, stepsize, inv_prob);
}

void RkhsHypothesis::ogd_step_at(double prediction, std::span<const double> x,
                                 double label, const LossFunction& loss,
                                 double stepsize, double inv_prob) {
    if (!(stepsize > 0.0)) throw InvalidInput("ogd_step: stepsize must be positive");
    if (!(inv_prob >= 1.0)) throw InvalidInput("ogd_step: inv_prob must be >= 1");
    const double deriv = loss_derivative(loss, prediction, label);
    if (deriv == 0.0) return;

    const double coeff = -stepsize * inv_prob * deriv;
    const double kxx = kernel_eval(kernel_, x, x);
    // ||f + c*kappa(x,.)||^2 = ||f||^2 + 2c*f(x) + c^2*kappa(x,x)
    sq_norm_ += 2.0 * coeff * prediction + coeff * coeff * kxx;
    if (!std::isfinite(sq_norm_) || !std::isfinite(coeff)) {
        throw NumericalError("ogd_step: non-finite update (coeff=" + std::to_string(coeff) +
                             ", sq_norm=" + std::to_string(sq_norm_) + ")");
    }
    points_.insert(points_.end(), x.begin(), x.end());
    coefficients_.push_back(coeff);
    project_to_ball();
}

void RkhsHypothesis::project_to_ball() {
    const double r2 = radius_ * radius_;
    if (sq_norm_ <= r2) return;
    const double scale = radius_ / std::sqrt(sq_norm_);
    for (double& c : coefficients_) c *= scale;
    sq_norm_ = r2;
}

double RkhsHypothesis::sq_norm_exact() const {
    double s = 0.0;
    for (std::size_t i = 0; i < coefficients_.size(); ++i) {
        for (std::size_t j = 0; j < coefficients_.size(); ++j) {
            s += coefficients_[i] * coefficients_[j] *
                 kernel_eval(kernel_, support_point(i), support_point(j));
        }
    }
    return s;
}

RfHypothesis::RfHypothesis(std::shared_ptr<const FeatureMap> map, double radius)
    : map_(std::move(map)), radius_(radius) {
    if (!map_) throw InvalidInput("RfHypothesis: null feature map");
    if (!(radius > 0.0)) throw InvalidInput("RfHypothesis: radius must be positive");
    cap_ = radius_ / std::sqrt(static_cast<double>(map_->dimension));
    weights_.assign(static_cast<std::size_t>(map_->dimension), 0.0);
}

double RfHypothesis::predict(std::span<const double> x) const {
    return predict_with_features(feature_vector(*map_, x));
}

double RfHypothesis::predict_with_features(std::span<const double> z) const {
    return dot(weights_, z);
}

void RfHypothesis::ogd_step(std::span<const double> x, double label,
                            const LossFunction& loss, double stepsize,
                            double inv_prob) {
    const auto z = feature_vector(*map_, x);
    ogd_step_at(predict_with_features(z), z, label, loss, stepsize, inv_prob);
}

void RfHypothesis::ogd_step_at(double prediction, std::span<const double> z,
                               double label, const LossFunction& loss,
                               double stepsize, double inv_prob) {
    if (!(stepsize > 0.0)) throw InvalidInput("ogd_step: stepsize must be positive");
    if (!(inv_prob >= 1.0)) throw InvalidInput("ogd_step: inv_prob must be >= 1");
    if (z.size() != weights_.size()) {
        throw InvalidInput("ogd_step: feature vector size mismatch");
    }
    const double deriv = loss_derivative(loss, prediction, label);
    if (deriv == 0.0) return;

    const double scale = -stepsize * inv_prob * deriv;
    if (!std::isfinite(scale)) {
        throw NumericalError("ogd_step: non-finite gradient scale");
    }
    // Coordinate-wise box projection: w_j = min{1, cap/|w_j|} * w_j.
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        weights_[j] = std::clamp(weights_[j] + scale * z[j], -cap_, cap_);
    }
}

}  // namespace okselect
