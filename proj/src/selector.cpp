#include "okselect/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "okselect/errors.hpp"

namespace okselect {

namespace {

constexpr double kSimplexTol = 1e-8;

// q_i proportional to exp(-eta * cum_i), normalized in log-space.
std::vector<double> exp_weights(const std::vector<double>& cum, double eta) {
    const std::size_t n = cum.size();
    double min_cum = cum[0];
    for (double c : cum) min_cum = std::min(min_cum, c);
    std::vector<double> q(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = std::max(std::exp(-eta * (cum[i] - min_cum)), 1e-300);
        total += q[i];
    }
    for (double& v : q) v /= total;
    return q;
}

}  // namespace

void SelectorState::check_distributions() const {
    double sp = 0.0;
    double sq = 0.0;
    for (int i = 0; i < arms; ++i) {
        if (p[static_cast<std::size_t>(i)] < -1e-12 || q[static_cast<std::size_t>(i)] < -1e-12 ||
            !std::isfinite(p[static_cast<std::size_t>(i)])) {
            throw StateCorruption("selector state: negative or non-finite probability");
        }
        sp += p[static_cast<std::size_t>(i)];
        sq += q[static_cast<std::size_t>(i)];
    }
    if (std::abs(sp - 1.0) > kSimplexTol || std::abs(sq - 1.0) > kSimplexTol) {
        throw StateCorruption("selector state: distribution does not sum to 1");
    }
}

LossEstimate make_estimate(int num_arms, int arm, double raw_loss, double estimated) {
    if (arm < 0 || arm >= num_arms) throw InvalidInput("make_estimate: arm out of range");
    LossEstimate est;
    est.arm = arm;
    est.raw_loss = raw_loss;
    est.estimate.assign(static_cast<std::size_t>(num_arms), 0.0);
    est.estimate[static_cast<std::size_t>(arm)] = estimated;
    return est;
}

SelectorState make_selector_state(int num_arms, long horizon) {
    if (num_arms < 1) throw InvalidInput("selector: need at least one arm");
    SelectorState s;
    s.arms = num_arms;
    s.horizon = horizon;
    s.q.assign(static_cast<std::size_t>(num_arms), 1.0 / num_arms);
    s.p = s.q;
    s.cum_est_losses.assign(static_cast<std::size_t>(num_arms), 0.0);
    s.delta_arm.assign(static_cast<std::size_t>(num_arms), 0.0);
    return s;
}

SelectorState make_ioks_state(int num_arms, long horizon, const IoksParameters& params) {
    SelectorState s = make_selector_state(num_arms, horizon);
    s.delta = params.delta;
    s.upsilon = params.upsilon;
    s.eta_per_arm.assign(static_cast<std::size_t>(num_arms), params.eta_init);
    s.rho.assign(static_cast<std::size_t>(num_arms), 2.0 * num_arms);
    s.p = mix_exploration(s.q, s.delta);
    return s;
}

int sample_arm(const SelectorState& state, double rng_draw) {
    state.check_distributions();
    double cum = 0.0;
    for (int i = 0; i < state.arms; ++i) {
        cum += state.p[static_cast<std::size_t>(i)];
        if (cum > rng_draw) return i;
    }
    return state.arms - 1;  // guard against cumulative rounding
}

std::vector<double> mix_exploration(const std::vector<double>& q, double delta) {
    if (delta < 0.0 || delta > 1.0) throw InvalidInput("mix_exploration: delta outside [0,1]");
    std::vector<double> p(q.size());
    const double uniform = delta / static_cast<double>(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) p[i] = (1.0 - delta) * q[i] + uniform;
    return p;
}

OksParameters oks_parameters(int num_arms, long horizon, double g, double ell_max) {
    if (horizon < 1) throw InvalidInput("oks_parameters: horizon must be >= 1");
    if (!(g > 0.0) || !(ell_max > 0.0)) {
        throw InvalidInput("oks_parameters: G and ell_max must be positive");
    }
    const double k = static_cast<double>(num_arms);
    const double t = static_cast<double>(horizon);
    OksParameters out;
    out.delta = std::pow(g / ell_max, 2.0 / 3.0) * std::cbrt(k) / std::cbrt(t);
    if (out.delta >= 1.0) {
        out.delta = 0.99;
        out.delta_clipped = true;
    }
    out.lambda = std::sqrt(out.delta / (k * t * g * g));
    out.eta = std::sqrt(2.0 * (1.0 - out.delta) * std::log(k)) /
              std::sqrt(k * t * ell_max * ell_max);
    return out;
}

void oks_update(SelectorState& state, const LossEstimate& estimate) {
    state.cum_est_losses[static_cast<std::size_t>(estimate.arm)] +=
        estimate.estimate[static_cast<std::size_t>(estimate.arm)];
    state.q = exp_weights(state.cum_est_losses, state.eta_global);
    state.p = mix_exploration(state.q, state.delta);
}

OksppSchedules okspp_schedules(const SelectorState& state, const LossFunction& loss,
                               double radius, int num_arms) {
    const double g = loss.nu == 2 ? 1.0 : loss.g_scalar;
    const double c0 = loss.c0;
    const double k = static_cast<double>(num_arms);
    const double u = radius;
    const double gc = g * c0;

    OksppSchedules out;
    const double head = std::cbrt(gc) * std::pow(u * k, 2.0 / 3.0);
    out.delta_t = head / (2.0 * std::max(head, 2.0 * std::cbrt(state.tilde_c)));
    out.eta_t = std::sqrt(2.0 * std::log(k)) / std::sqrt(1.0 + state.sum_q_c2);

    const double cap = std::pow(std::max(gc * u * u * k * k, 8.0 * state.tilde_c), -1.0 / 6.0);
    const double numer = std::pow(u, 4.0 / 3.0) * cap;
    const double denom_base = std::sqrt(4.0 / 3.0) * std::pow(k, 1.0 / 6.0) * std::cbrt(gc);
    out.lambda.resize(static_cast<std::size_t>(num_arms));
    for (int i = 0; i < num_arms; ++i) {
        out.lambda[static_cast<std::size_t>(i)] =
            numer / (denom_base * std::sqrt(1.0 + state.delta_arm[static_cast<std::size_t>(i)]));
    }
    return out;
}

void okspp_update(SelectorState& state, const LossEstimate& estimate,
                  const std::vector<double>& q_snapshot, const LossFunction& loss,
                  double radius) {
    const auto arm = static_cast<std::size_t>(estimate.arm);
    const double est = estimate.estimate[arm];
    state.cum_est_losses[arm] += est;
    state.tilde_c += est;
    state.delta_arm[arm] += est;
    state.sum_q_c2 += q_snapshot[arm] * est * est;

    const OksppSchedules sched = okspp_schedules(state, loss, radius, state.arms);
    state.eta_global = sched.eta_t;
    state.delta = sched.delta_t;
    state.q = exp_weights(state.cum_est_losses, state.eta_global);
    state.p = mix_exploration(state.q, state.delta);
}

LossEstimate ioks_estimate(double c_norm, const std::vector<double>& p, int arm,
                           const std::vector<double>& eta_per_arm) {
    if (c_norm < 0.0 || c_norm > 1.0 || !std::isfinite(c_norm)) {
        throw InvalidInput("ioks_estimate: normalized loss outside [0,1]: " +
                           std::to_string(c_norm));
    }
    const double eta_max = *std::max_element(eta_per_arm.begin(), eta_per_arm.end());
    const double p_arm = p[static_cast<std::size_t>(arm)];
    const double denom = p_arm >= eta_max ? p_arm : p_arm + eta_max;
    return make_estimate(static_cast<int>(p.size()), arm, c_norm, c_norm / denom);
}

std::vector<double> ioks_solve(const std::vector<double>& q,
                               const LossEstimate& estimate,
                               const std::vector<double>& eta_per_arm) {
    constexpr double kExp = 7.0 / 8.0;
    constexpr double kInvExp = 8.0 / 7.0;
    constexpr double kTol = 1e-10;
    const std::size_t n = q.size();

    std::vector<double> base(n);  // q_i^{-7/8} + eta_i * est_i
    for (std::size_t i = 0; i < n; ++i) {
        if (!(q[i] > 0.0)) throw InvalidInput("ioks_solve: q entries must be positive");
        base[i] = std::pow(q[i], -kExp) + eta_per_arm[i] * estimate.estimate[i];
    }

    const auto mass = [&](double mu) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double b = base[i] - eta_per_arm[i] * mu;
            s += std::pow(b, -kInvExp);
        }
        return s;
    };

    // The normalizer is strictly increasing in mu on the feasible interval.
    // All estimates are >= 0, so the mass at mu = 0 is at most 1.
    double lo = 0.0;
    if (std::abs(mass(lo) - 1.0) <= kTol) {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(base[i], -kInvExp);
        return out;
    }

    // Upper bound: largest mu keeping every base positive, backed off until
    // the mass exceeds 1.
    double mu_sup = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mu_sup = std::min(mu_sup, base[i] / eta_per_arm[i]);
    double eps = mu_sup * 0.5;
    double hi = mu_sup - eps;
    int guard = 0;
    while (mass(hi) <= 1.0) {
        eps *= 0.5;
        hi = mu_sup - eps;
        if (++guard > 200) {
            throw NumericalError("ioks_solve: failed to bracket the normalizer root "
                                 "(mu_sup=" + std::to_string(mu_sup) + ")");
        }
    }

    double mid = lo;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double m = mass(mid);
        if (std::abs(m - 1.0) <= kTol) break;
        if (m < 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    std::vector<double> out(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::pow(base[i] - eta_per_arm[i] * mid, -kInvExp);
        total += out[i];
    }
    if (std::abs(total - 1.0) > 1e-8) {
        throw NumericalError("ioks_solve: normalizer did not converge, mass=" +
                             std::to_string(total));
    }
    return out;
}

void ioks_lr_schedule(SelectorState& state, const std::vector<double>& p_next) {
    for (int i = 0; i < state.arms; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const double inv_p = 1.0 / p_next[idx];
        if (inv_p > state.rho[idx]) {
            state.rho[idx] = 2.0 * inv_p;
            state.eta_per_arm[idx] *= state.upsilon;
        }
    }
}

IoksParameters ioks_parameters(int num_arms, long horizon, double radius, double g1,
                               double ell_max, IoksVariant variant) {
    if (horizon < 2) throw InvalidInput("ioks_parameters: horizon must be >= 2");
    if (!(radius > 0.0) || !(g1 > 0.0) || !(ell_max > 0.0)) {
        throw InvalidInput("ioks_parameters: constants must be positive");
    }
    const double t = static_cast<double>(horizon);
    const double k = static_cast<double>(num_arms);
    IoksParameters out;
    out.delta = std::pow(t, -0.75);
    out.upsilon = std::exp(2.0 / (3.0 * std::log(t)));
    const double denom = radius * g1 * std::sqrt(t * std::log(t));
    const double scale = variant == IoksVariant::theorem ? 1.5 : 8.0;
    out.eta_init = scale * ell_max * std::pow(k, 3.0 / 8.0) / denom;
    return out;
}

}  // namespace okselect
