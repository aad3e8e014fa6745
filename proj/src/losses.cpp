#include "okselect/losses.hpp"

#include <cmath>

#include "okselect/errors.hpp"

namespace okselect {

namespace {

// ln(1 + exp(u)) without overflow for large |u|.
double softplus(double u) {
    if (u > 0.0) return u + std::log1p(std::exp(-u));
    return std::log1p(std::exp(u));
}

// 1 / (1 + exp(u)) evaluated stably.
double inv_one_plus_exp(double u) {
    if (u > 0.0) {
        const double e = std::exp(-u);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(u));
}

void check_inputs(double prediction, double label) {
    if (!std::isfinite(prediction)) throw InvalidInput("loss: non-finite prediction");
    if (!std::isfinite(label)) throw InvalidInput("loss: non-finite label");
}

}  // namespace

bool loss_is_smooth(LossKind kind) {
    switch (kind) {
        case LossKind::logistic:
        case LossKind::square:
        case LossKind::squared_hinge:
            return true;
        case LossKind::absolute:
        case LossKind::hinge:
            return false;
    }
    return false;
}

bool loss_is_classification(LossKind kind) {
    switch (kind) {
        case LossKind::logistic:
        case LossKind::squared_hinge:
        case LossKind::hinge:
            return true;
        case LossKind::square:
        case LossKind::absolute:
            return false;
    }
    return false;
}

const char* loss_name(LossKind kind) {
    switch (kind) {
        case LossKind::logistic: return "logistic";
        case LossKind::square: return "square";
        case LossKind::squared_hinge: return "squared_hinge";
        case LossKind::absolute: return "absolute";
        case LossKind::hinge: return "hinge";
    }
    return "?";
}

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "logistic") return LossKind::logistic;
    if (name == "square") return LossKind::square;
    if (name == "squared_hinge") return LossKind::squared_hinge;
    if (name == "absolute") return LossKind::absolute;
    if (name == "hinge") return LossKind::hinge;
    throw InvalidInput("unknown loss kind: " + name);
}

LossFunction make_loss(LossKind kind, double radius, double feature_bound) {
    if (!(radius > 0.0) || !(feature_bound > 0.0)) {
        throw InvalidInput("make_loss: radius and feature_bound must be positive");
    }
    const double a = radius * feature_bound;  // bound on |f(x)|
    LossFunction loss;
    loss.kind = kind;
    switch (kind) {
        case LossKind::logistic:
            loss.nu = 1;
            loss.c0 = 1.0;
            loss.ell_max = softplus(a);
            loss.g_scalar = 1.0;
            break;
        case LossKind::square:
            loss.nu = 2;
            loss.c0 = 4.0;
            loss.ell_max = (a + 1.0) * (a + 1.0);
            loss.g_scalar = 2.0 * (a + 1.0);
            break;
        case LossKind::squared_hinge:
            loss.nu = 2;
            loss.c0 = 4.0;
            loss.ell_max = (1.0 + a) * (1.0 + a);
            loss.g_scalar = 2.0 * (1.0 + a);
            break;
        case LossKind::absolute:
            loss.nu = 0;
            loss.c0 = 0.0;
            loss.ell_max = a + 1.0;
            loss.g_scalar = 1.0;
            break;
        case LossKind::hinge:
            loss.nu = 0;
            loss.c0 = 0.0;
            loss.ell_max = 1.0 + a;
            loss.g_scalar = 1.0;
            break;
    }
    loss.g_rkhs = loss.g_scalar * feature_bound;
    return loss;
}

double loss_value(const LossFunction& loss, double prediction, double label) {
    check_inputs(prediction, label);
    switch (loss.kind) {
        case LossKind::logistic:
            return softplus(-label * prediction);
        case LossKind::square: {
            const double r = prediction - label;
            return r * r;
        }
        case LossKind::squared_hinge: {
            const double m = 1.0 - label * prediction;
            return m > 0.0 ? m * m : 0.0;
        }
        case LossKind::absolute:
            return std::abs(prediction - label);
        case LossKind::hinge: {
            const double m = 1.0 - label * prediction;
            return m > 0.0 ? m : 0.0;
        }
    }
    throw Unsupported("loss_value: unknown kind");
}

double loss_derivative(const LossFunction& loss, double prediction, double label) {
    check_inputs(prediction, label);
    switch (loss.kind) {
        case LossKind::logistic:
            return -label * inv_one_plus_exp(label * prediction);
        case LossKind::square:
            return 2.0 * (prediction - label);
        case LossKind::squared_hinge: {
            const double m = 1.0 - label * prediction;
            return m > 0.0 ? -2.0 * label * m : 0.0;
        }
        case LossKind::absolute:
            // subgradient 0 at the kink
            if (prediction > label) return 1.0;
            if (prediction < label) return -1.0;
            return 0.0;
        case LossKind::hinge: {
            // subgradient 0 at the hinge point
            const double m = 1.0 - label * prediction;
            return m > 0.0 ? -label : 0.0;
        }
    }
    throw Unsupported("loss_derivative: unknown kind");
}

bool smoothness_check(const LossFunction& loss,
                      std::span<const std::pair<double, double>> samples) {
    if (!loss_is_smooth(loss.kind)) {
        throw Unsupported(std::string("smoothness_check: ") + loss_name(loss.kind) +
                          " is not smooth");
    }
    for (const auto& [a, y] : samples) {
        const double value = loss_value(loss, a, y);
        const double deriv = std::abs(loss_derivative(loss, a, y));
        const double lhs = loss.nu == 1 ? deriv : deriv * deriv;
        if (lhs > loss.c0 * value + 1e-12) return false;
    }
    return true;
}

}  // namespace okselect
