#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "okselect/hypothesis.hpp"
#include "okselect/kernels.hpp"
#include "okselect/losses.hpp"
#include "okselect/selector.hpp"

namespace okselect {

enum class Algorithm { oks, okspp, ioks, rf_oks, rf_okspp, rf_ioks };

Algorithm algorithm_from_name(const std::string& name);
const char* algorithm_name(Algorithm algo);
bool algorithm_uses_features(Algorithm algo);

// Non-owning view of an example stream, optionally reordered.
struct StreamView {
    const double* features = nullptr;  // rows x dim, row-major
    const double* labels = nullptr;
    long rows = 0;
    int dim = 0;
    const long* order = nullptr;  // optional permutation of [0, rows)

    std::span<const double> row(long t) const {
        const long r = order ? order[t] : t;
        return {features + static_cast<std::size_t>(r) * dim, static_cast<std::size_t>(dim)};
    }
    double label(long t) const { return labels[order ? order[t] : t]; }
};

struct TrialRecord {
    long round = 0;  // 1-based
    int arm = 0;
    double prediction = 0.0;  // raw hypothesis output
    double label = 0.0;
    double loss = 0.0;
    bool mistake = false;
    std::vector<double> p_snapshot;  // filled when the run records distributions
    std::uint64_t nanos = 0;
};

struct RunSummary {
    long rounds = 0;
    double cumulative_loss = 0.0;
    double average_loss = 0.0;  // AL
    double mistake_rate = 0.0;  // AMR
    std::vector<long> arm_counts;
    double seconds = 0.0;
    std::vector<double> final_q;
    std::vector<double> final_p;
};

struct RunError : std::runtime_error {
    long round;
    RunError(long round_index, const std::string& what)
        : std::runtime_error("round " + std::to_string(round_index) + ": " + what),
          round(round_index) {}
};

struct EngineConfig {
    Algorithm algo = Algorithm::okspp;
    LossKind loss_kind = LossKind::square;
    double radius = 1.0;  // U
    std::vector<KernelSpec> kernels;
    int input_dim = 0;
    long horizon = 0;  // T
    bool classification = false;
    int features = 400;  // D per arm for the rf variants
    std::uint64_t seed = 1;
    bool record_p = false;
    OksParameters oks;    // resolved before the run (oks / rf_oks)
    IoksParameters ioks;  // resolved before the run (ioks / rf_ioks)
};

// One online run: selector + per-arm hypotheses. Exactly one hypothesis is
// updated per round (bandit feedback).
class OnlineRun {
public:
    explicit OnlineRun(EngineConfig config);

    TrialRecord step(std::span<const double> x, double y);
    RunSummary run_stream(const StreamView& stream);

    const SelectorState& selector() const { return selector_; }
    const LossFunction& loss() const { return loss_; }
    const std::vector<TrialRecord>& records() const { return records_; }
    const RkhsHypothesis& rkhs_arm(int i) const { return rkhs_arms_.at(static_cast<std::size_t>(i)); }
    const RfHypothesis& rf_arm(int i) const { return rf_arms_.at(static_cast<std::size_t>(i)); }
    const EngineConfig& config() const { return config_; }
    long rounds() const { return round_; }

private:
    int select_arm();
    void update_hypothesis(int arm, double prediction, std::span<const double> x,
                           std::span<const double> z, double y, double stepsize,
                           double inv_prob);

    EngineConfig config_;
    LossFunction loss_;
    SelectorState selector_;
    std::vector<RkhsHypothesis> rkhs_arms_;
    std::vector<RfHypothesis> rf_arms_;
    std::vector<std::shared_ptr<const FeatureMap>> maps_;
    std::vector<double> cum_sq_grad_;  // per-arm sum of estimator norms (ioks stepsize)
    std::vector<double> scratch_z_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::vector<TrialRecord> records_;
    long round_ = 0;
};

// Approximate minimal cumulative loss in the arm's radius-U ball: multi-epoch
// projected gradient descent over the full stream with stepsize U/sqrt(e*T),
// then one evaluation pass. The result upper-bounds the true minimum.
double offline_oracle(const StreamView& stream, const KernelSpec& spec,
                      const LossFunction& loss, double radius, int epochs);

// Deterministic per-(run, purpose) seed derivation.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace okselect
