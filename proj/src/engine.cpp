#include "okselect/engine.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "okselect/errors.hpp"
#include "okselect/vecmath.hpp"

namespace okselect {

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "oks") return Algorithm::oks;
    if (name == "okspp" || name == "oks++") return Algorithm::okspp;
    if (name == "ioks") return Algorithm::ioks;
    if (name == "rf-oks") return Algorithm::rf_oks;
    if (name == "rf-okspp" || name == "rf-oks++") return Algorithm::rf_okspp;
    if (name == "rf-ioks") return Algorithm::rf_ioks;
    throw InvalidInput("unknown algorithm: " + name);
}

const char* algorithm_name(Algorithm algo) {
    switch (algo) {
        case Algorithm::oks: return "oks";
        case Algorithm::okspp: return "okspp";
        case Algorithm::ioks: return "ioks";
        case Algorithm::rf_oks: return "rf-oks";
        case Algorithm::rf_okspp: return "rf-okspp";
        case Algorithm::rf_ioks: return "rf-ioks";
    }
    return "?";
}

bool algorithm_uses_features(Algorithm algo) {
    return algo == Algorithm::rf_oks || algo == Algorithm::rf_okspp ||
           algo == Algorithm::rf_ioks;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 over the combined value
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

namespace {

enum class SelectorKind { exp_weights, adaptive, mirror_descent };

SelectorKind selector_kind(Algorithm algo) {
    switch (algo) {
        case Algorithm::oks:
        case Algorithm::rf_oks:
            return SelectorKind::exp_weights;
        case Algorithm::okspp:
        case Algorithm::rf_okspp:
            return SelectorKind::adaptive;
        case Algorithm::ioks:
        case Algorithm::rf_ioks:
            return SelectorKind::mirror_descent;
    }
    return SelectorKind::adaptive;
}

}  // namespace

OnlineRun::OnlineRun(EngineConfig config) : config_(std::move(config)) {
    if (config_.kernels.empty()) throw InvalidInput("engine: need at least one kernel arm");
    if (config_.input_dim < 1) throw InvalidInput("engine: input_dim must be >= 1");
    if (config_.horizon < 1) throw InvalidInput("engine: horizon must be >= 1");

    const int num_arms = static_cast<int>(config_.kernels.size());
    const bool rf = algorithm_uses_features(config_.algo);
    const double feature_bound = rf ? std::numbers::sqrt2 : 1.0;
    loss_ = make_loss(config_.loss_kind, config_.radius, feature_bound);

    switch (selector_kind(config_.algo)) {
        case SelectorKind::exp_weights:
            selector_ = make_selector_state(num_arms, config_.horizon);
            selector_.eta_global = config_.oks.eta;
            selector_.delta = config_.oks.delta;
            selector_.p = mix_exploration(selector_.q, selector_.delta);
            break;
        case SelectorKind::adaptive:
            selector_ = make_selector_state(num_arms, config_.horizon);
            break;
        case SelectorKind::mirror_descent:
            selector_ = make_ioks_state(num_arms, config_.horizon, config_.ioks);
            break;
    }

    if (rf) {
        if (config_.features < 1) throw InvalidInput("engine: features must be >= 1");
        maps_.reserve(static_cast<std::size_t>(num_arms));
        rf_arms_.reserve(static_cast<std::size_t>(num_arms));
        for (int i = 0; i < num_arms; ++i) {
            auto map = std::make_shared<const FeatureMap>(
                sample_feature_map(config_.kernels[static_cast<std::size_t>(i)],
                                   config_.features, config_.input_dim,
                                   derive_seed(config_.seed, 0x10000ULL + i)));
            maps_.push_back(map);
            rf_arms_.emplace_back(map, config_.radius);
        }
        scratch_z_.resize(static_cast<std::size_t>(config_.features));
    } else {
        rkhs_arms_.reserve(static_cast<std::size_t>(num_arms));
        for (int i = 0; i < num_arms; ++i) {
            rkhs_arms_.emplace_back(config_.kernels[static_cast<std::size_t>(i)],
                                    config_.input_dim, config_.radius);
        }
    }
    cum_sq_grad_.assign(static_cast<std::size_t>(num_arms), 0.0);
    rng_.seed(derive_seed(config_.seed, 0));
}

void OnlineRun::update_hypothesis(int arm, double prediction, std::span<const double> x,
                                  std::span<const double> z, double y, double stepsize,
                                  double inv_prob) {
    if (algorithm_uses_features(config_.algo)) {
        rf_arms_[static_cast<std::size_t>(arm)].ogd_step_at(prediction, z, y, loss_,
                                                            stepsize, inv_prob);
    } else {
        rkhs_arms_[static_cast<std::size_t>(arm)].ogd_step_at(prediction, x, y, loss_,
                                                              stepsize, inv_prob);
    }
}

TrialRecord OnlineRun::step(std::span<const double> x, double y) {
    const auto start = std::chrono::steady_clock::now();
    ++round_;
    const int num_arms = selector_.arms;
    const bool rf = algorithm_uses_features(config_.algo);

    const double draw = unit_(rng_);
    const int arm = sample_arm(selector_, draw);
    const double p_arm = selector_.p[static_cast<std::size_t>(arm)];
    const double inv_prob = 1.0 / p_arm;

    double prediction;
    std::span<const double> z;
    if (rf) {
        feature_vector(*maps_[static_cast<std::size_t>(arm)], x, scratch_z_);
        z = scratch_z_;
        prediction = rf_arms_[static_cast<std::size_t>(arm)].predict_with_features(z);
    } else {
        prediction = rkhs_arms_[static_cast<std::size_t>(arm)].predict(x);
    }

    const double lval = loss_value(loss_, prediction, y);
    bool mistake = false;
    if (config_.classification) {
        const double sign = prediction >= 0.0 ? 1.0 : -1.0;  // sign(0) := +1
        mistake = sign != y;
    }

    switch (selector_kind(config_.algo)) {
        case SelectorKind::exp_weights: {
            update_hypothesis(arm, prediction, x, z, y, config_.oks.lambda, inv_prob);
            const auto est = make_estimate(num_arms, arm, lval, lval * inv_prob);
            oks_update(selector_, est);
            break;
        }
        case SelectorKind::adaptive: {
            // Statistics through the current round drive all three schedules,
            // so accumulate before computing the stepsize.
            const auto est = make_estimate(num_arms, arm, lval, lval * inv_prob);
            const std::vector<double> q_snapshot = selector_.q;
            okspp_update(selector_, est, q_snapshot, loss_, config_.radius);
            const auto sched = okspp_schedules(selector_, loss_, config_.radius, num_arms);
            update_hypothesis(arm, prediction, x, z, y,
                              sched.lambda[static_cast<std::size_t>(arm)], inv_prob);
            break;
        }
        case SelectorKind::mirror_descent: {
            const double deriv = loss_derivative(loss_, prediction, y);
            const double norm_factor =
                rf ? squared_norm(z)
                   : kernel_eval(config_.kernels[static_cast<std::size_t>(arm)], x, x);
            cum_sq_grad_[static_cast<std::size_t>(arm)] +=
                deriv * deriv * inv_prob * inv_prob * norm_factor;
            const double stepsize =
                config_.radius /
                (std::numbers::sqrt2 *
                 std::sqrt(1.0 + cum_sq_grad_[static_cast<std::size_t>(arm)]));
            update_hypothesis(arm, prediction, x, z, y, stepsize, inv_prob);

            const double c_norm = std::min(lval / loss_.ell_max, 1.0);
            const auto est = ioks_estimate(c_norm, selector_.p, arm, selector_.eta_per_arm);
            selector_.cum_est_losses[static_cast<std::size_t>(arm)] +=
                est.estimate[static_cast<std::size_t>(arm)];
            selector_.q = ioks_solve(selector_.q, est, selector_.eta_per_arm);
            selector_.p = mix_exploration(selector_.q, selector_.delta);
            ioks_lr_schedule(selector_, selector_.p);
            break;
        }
    }

    TrialRecord rec;
    rec.round = round_;
    rec.arm = arm;
    rec.prediction = prediction;
    rec.label = y;
    rec.loss = lval;
    rec.mistake = mistake;
    if (config_.record_p) rec.p_snapshot = selector_.p;
    rec.nanos = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - start)
            .count());
    records_.push_back(rec);
    return rec;
}

RunSummary OnlineRun::run_stream(const StreamView& stream) {
    if (stream.rows < 1) throw InvalidInput("run_stream: empty stream");
    if (stream.rows > config_.horizon) {
        throw InvalidInput("run_stream: stream longer than the configured horizon");
    }
    const auto start = std::chrono::steady_clock::now();
    RunSummary summary;
    summary.arm_counts.assign(static_cast<std::size_t>(selector_.arms), 0);
    long mistakes = 0;
    for (long t = 0; t < stream.rows; ++t) {
        TrialRecord rec;
        try {
            rec = step(stream.row(t), stream.label(t));
        } catch (const std::exception& e) {
            throw RunError(t + 1, e.what());
        }
        summary.cumulative_loss += rec.loss;
        mistakes += rec.mistake ? 1 : 0;
        ++summary.arm_counts[static_cast<std::size_t>(rec.arm)];
    }
    summary.rounds = stream.rows;
    summary.average_loss = summary.cumulative_loss / static_cast<double>(stream.rows);
    summary.mistake_rate = static_cast<double>(mistakes) / static_cast<double>(stream.rows);
    summary.final_q = selector_.q;
    summary.final_p = selector_.p;
    summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
    return summary;
}

double offline_oracle(const StreamView& stream, const KernelSpec& spec,
                      const LossFunction& loss, double radius, int epochs) {
    if (stream.rows < 1) throw InvalidInput("offline_oracle: empty stream");
    if (epochs < 1) throw InvalidInput("offline_oracle: epochs must be >= 1");
    const long rows = stream.rows;
    std::vector<double> coeff(static_cast<std::size_t>(rows), 0.0);
    double sq_norm = 0.0;
    const double r2 = radius * radius;

    const auto predict = [&](long t) {
        double s = 0.0;
        const auto xt = stream.row(t);
        for (long j = 0; j < rows; ++j) {
            const double c = coeff[static_cast<std::size_t>(j)];
            if (c == 0.0) continue;
            s += c * kernel_eval(spec, stream.row(j), xt);
        }
        return s;
    };

    for (int epoch = 1; epoch <= epochs; ++epoch) {
        const double stepsize =
            radius / std::sqrt(static_cast<double>(epoch) * static_cast<double>(rows));
        for (long t = 0; t < rows; ++t) {
            const double fx = predict(t);
            const double deriv = loss_derivative(loss, fx, stream.label(t));
            if (deriv == 0.0) continue;
            const double c = -stepsize * deriv;
            sq_norm += 2.0 * c * fx + c * c;  // kappa(x,x) = 1
            coeff[static_cast<std::size_t>(t)] += c;
            if (sq_norm > r2) {
                const double scale = radius / std::sqrt(sq_norm);
                for (double& a : coeff) a *= scale;
                sq_norm = r2;
            }
        }
    }

    double total = 0.0;
    for (long t = 0; t < rows; ++t) total += loss_value(loss, predict(t), stream.label(t));
    return total;
}

}  // namespace okselect
