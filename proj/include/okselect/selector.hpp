#pragma once

#include <string>
#include <vector>

#include "okselect/losses.hpp"

namespace okselect {

// Importance-weighted loss estimate for one round: only the selected arm's
// entry is nonzero.
struct LossEstimate {
    int arm = 0;
    double raw_loss = 0.0;
    std::vector<double> estimate;  // size K, zero except at `arm`
};

LossEstimate make_estimate(int num_arms, int arm, double raw_loss, double estimated);

// Shared state of the bandit level. OKS and the adaptive variant use
// exponential weights over cum_est_losses; the mirror-descent variant keeps
// per-arm learning rates and thresholds.
struct SelectorState {
    int arms = 0;
    std::vector<double> q;                // exploitation distribution
    std::vector<double> p;                // sampling distribution
    std::vector<double> cum_est_losses;   // sum over rounds of estimates per arm
    double eta_global = 0.0;              // eta (fixed) or current eta_t
    std::vector<double> eta_per_arm;      // per-arm learning rates (mirror descent)
    std::vector<double> rho;              // per-arm inverse-probability thresholds
    double upsilon = 1.0;                 // learning-rate raise factor
    double delta = 0.0;                   // exploration mix in [0,1]
    double tilde_c = 0.0;                 // cumulative sum of all estimates
    double sum_q_c2 = 0.0;                // sum over rounds of sum_i q_i * est_i^2
    std::vector<double> delta_arm;        // per-arm cumulative estimate (stepsize stat)
    long horizon = 0;                     // T

    void check_distributions() const;  // throws StateCorruption when p/q invalid
};

struct OksParameters {
    double delta = 0.0;
    double lambda = 0.0;
    double eta = 0.0;
    bool delta_clipped = false;
};

struct OksppSchedules {
    double delta_t = 0.0;
    double eta_t = 0.0;
    std::vector<double> lambda;  // per arm
};

enum class IoksVariant { theorem, experiment };

struct IoksParameters {
    double delta = 0.0;
    double eta_init = 0.0;
    double upsilon = 1.0;
};

SelectorState make_selector_state(int num_arms, long horizon);

// Pre-sizes the mirror-descent fields (eta_per_arm = eta_init, rho = 2K).
SelectorState make_ioks_state(int num_arms, long horizon, const IoksParameters& params);

// Inverse-CDF sample from p: smallest index i with sum_{j<=i} p_j > draw.
int sample_arm(const SelectorState& state, double rng_draw);

// p = (1 - delta) * q + (delta / K) * 1
std::vector<double> mix_exploration(const std::vector<double>& q, double delta);

// delta = (G/ell_max)^{2/3} K^{1/3} T^{-1/3} (clipped into (0,1)),
// lambda = sqrt(delta / (K T G^2)), eta = sqrt(2 (1-delta) ln K) / sqrt(K T ell_max^2).
OksParameters oks_parameters(int num_arms, long horizon, double g, double ell_max);

// Exponential-weights update with the fixed eta/delta held in the state.
void oks_update(SelectorState& state, const LossEstimate& estimate);

// Adaptive schedules computed from the cumulative statistics in the state.
// For nu=2 losses the G entering delta_t and lambda is 1.
OksppSchedules okspp_schedules(const SelectorState& state, const LossFunction& loss,
                               double radius, int num_arms);

// Accumulates the round's statistics, then applies the exponential-weights
// update with the current eta_t over the full cumulative estimates and mixes
// with the current delta_t. q_snapshot is the (unmixed) q used to weight the
// squared-estimate sum.
void okspp_update(SelectorState& state, const LossEstimate& estimate,
                  const std::vector<double>& q_snapshot, const LossFunction& loss,
                  double radius);

// Clipped importance-weighted estimate: divide by p_I, or by
// p_I + max_i eta_i when p_I falls below the largest learning rate.
LossEstimate ioks_estimate(double c_norm, const std::vector<double>& p, int arm,
                           const std::vector<double>& eta_per_arm);

// Solves q_next_i = (q_i^{-7/8} + eta_i (est_i - mu*))^{-8/7} with mu* the
// root of sum_i q_next_i(mu) = 1, found by bisection.
std::vector<double> ioks_solve(const std::vector<double>& q,
                               const LossEstimate& estimate,
                               const std::vector<double>& eta_per_arm);

// Raises eta_i by upsilon and doubles the threshold whenever an arm's inverse
// probability under p_next crosses rho_i.
void ioks_lr_schedule(SelectorState& state, const std::vector<double>& p_next);

// delta = T^{-3/4}, upsilon = e^{2/(3 ln T)},
// eta_init = 3 ell_max K^{3/8} / (2 U G1 sqrt(T ln T))   (theorem)
//          = 8 ell_max K^{3/8} / (U G1 sqrt(T ln T))     (experiment)
IoksParameters ioks_parameters(int num_arms, long horizon, double radius, double g1,
                               double ell_max, IoksVariant variant);

}  // namespace okselect
