#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace okselect {

enum class LossKind { logistic, square, squared_hinge, absolute, hinge };

// A loss together with the constants the selection schedules need:
//   nu, c0     smoothness order and constant, |l'(a,y)|^nu <= c0 * l(a,y)
//   ell_max    upper bound on loss values over the restricted hypothesis class
//   g_scalar   upper bound on |l'(a,y)| over the same class
//   g_rkhs     upper bound on the hypothesis-space gradient norm |l'| * B
// nu == 0 marks a non-smooth (Lipschitz-only) loss.
struct LossFunction {
    LossKind kind = LossKind::square;
    int nu = 2;
    double c0 = 4.0;
    double ell_max = 1.0;
    double g_scalar = 1.0;
    double g_rkhs = 1.0;
};

// Builds a LossFunction whose constants are valid for predictions bounded by
// radius * feature_bound (|f(x)| <= U * B). feature_bound is 1 for kernel
// hypotheses with kappa(x,x) <= 1 and B_i for random-feature hypotheses.
LossFunction make_loss(LossKind kind, double radius, double feature_bound = 1.0);

bool loss_is_smooth(LossKind kind);
bool loss_is_classification(LossKind kind);
const char* loss_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& name);

double loss_value(const LossFunction& loss, double prediction, double label);
double loss_derivative(const LossFunction& loss, double prediction, double label);

// True iff |l'|^nu <= c0 * l on every sample. Only defined for smooth kinds.
bool smoothness_check(const LossFunction& loss,
                      std::span<const std::pair<double, double>> samples);

}  // namespace okselect
