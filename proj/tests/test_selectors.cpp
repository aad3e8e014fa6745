#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "okselect/errors.hpp"
#include "okselect/selector.hpp"
#include "support/test_util.hpp"

using namespace okselect;

namespace {

double sum(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

SelectorState uniform_state(int num_arms, long horizon = 1000) {
    return make_selector_state(num_arms, horizon);
}

}  // namespace

TEST_CASE("sample_arm follows the inverse CDF") {
    SelectorState s = uniform_state(3);
    s.p = {1.0, 0.0, 0.0};
    s.q = s.p;
    for (const double draw : {0.0, 0.3, 0.999}) CHECK(sample_arm(s, draw) == 0);

    SelectorState u = uniform_state(6);
    CHECK(sample_arm(u, 0.5) == 3);  // fourth arm: cdf passes 0.5 at index 3
    CHECK(sample_arm(u, 0.0) == 0);
    CHECK(sample_arm(u, 0.999999) == 5);
}

TEST_CASE("sample_arm frequencies match p") {
    SelectorState s = uniform_state(4);
    s.q = {0.1, 0.2, 0.3, 0.4};
    s.p = s.q;
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<long> counts(4, 0);
    const long draws = 1000000;
    for (long i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(sample_arm(s, unit(rng)))];
    for (int i = 0; i < 4; ++i) {
        const double freq = static_cast<double>(counts[static_cast<std::size_t>(i)]) / draws;
        CHECK(std::abs(freq - s.p[static_cast<std::size_t>(i)]) < 0.01);
    }
}

TEST_CASE("sample_arm rejects corrupted distributions") {
    SelectorState s = uniform_state(3);
    s.p = {0.5, 0.2, 0.2};  // mass 0.9
    CHECK_THROWS_AS(sample_arm(s, 0.5), StateCorruption);
    s.p = {1.2, -0.2, 0.0};
    CHECK_THROWS_AS(sample_arm(s, 0.5), StateCorruption);
}

TEST_CASE("mix_exploration blends toward uniform") {
    const std::vector<double> q{1.0, 0.0};
    const auto p = mix_exploration(q, 0.5);
    CHECK(p[0] == doctest::Approx(0.75));
    CHECK(p[1] == doctest::Approx(0.25));

    const std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
    const auto same = mix_exploration(uniform, 0.7);
    for (double v : same) CHECK(v == doctest::Approx(0.25));

    const auto identity = mix_exploration(q, 0.0);
    CHECK(identity == q);
    CHECK_THROWS_AS(mix_exploration(q, 1.5), InvalidInput);
}

TEST_CASE("oks parameter schedule") {
    const OksParameters tuned = oks_parameters(6, 6000, 1.0, 1.0);
    CHECK(tuned.delta == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(!tuned.delta_clipped);
    // lambda^2 * K T G^2 = delta exactly
    CHECK(tuned.lambda * tuned.lambda * 6.0 * 6000.0 == doctest::Approx(tuned.delta));
    CHECK(tuned.eta ==
          doctest::Approx(std::sqrt(2.0 * 0.9 * std::log(6.0)) / std::sqrt(6.0 * 6000.0)));

    const OksParameters tiny = oks_parameters(8, 8, 1.0, 1.0);
    CHECK(tiny.delta == doctest::Approx(0.99));
    CHECK(tiny.delta_clipped);
}

TEST_CASE("oks update multiplies the chosen weight") {
    SelectorState s = uniform_state(2);
    s.eta_global = 1.0;
    s.delta = 0.0;

    // zero estimate leaves q unchanged
    oks_update(s, make_estimate(2, 0, 0.0, 0.0));
    CHECK(s.q[0] == doctest::Approx(0.5));

    // w = (e^-1, 1) after one unit estimate on arm 0
    oks_update(s, make_estimate(2, 0, 1.0, 1.0));
    const double e1 = std::exp(-1.0);
    CHECK(s.q[0] == doctest::Approx(e1 / (1.0 + e1)).epsilon(1e-12));
    CHECK(s.q[1] == doctest::Approx(1.0 / (1.0 + e1)).epsilon(1e-12));
    CHECK(sum(s.q) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oks probabilities stay above the exploration floor") {
    SelectorState s = uniform_state(4);
    s.eta_global = 0.5;
    s.delta = 0.2;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> loss(0.0, 1.0);
    std::uniform_int_distribution<int> arm(0, 3);
    for (int t = 0; t < 500; ++t) {
        const int i = arm(rng);
        const double c = loss(rng);
        oks_update(s, make_estimate(4, i, c, c / s.p[static_cast<std::size_t>(i)]));
        CHECK(sum(s.p) == doctest::Approx(1.0).epsilon(1e-10));
        for (double v : s.p) CHECK(v >= 0.2 / 4.0 - 1e-12);
    }
}

TEST_CASE("adaptive schedules at the initial state") {
    SelectorState s = uniform_state(6);
    LossFunction loss = make_loss(LossKind::logistic, 15.0);
    const auto sched = okspp_schedules(s, loss, 15.0, 6);
    CHECK(sched.delta_t == doctest::Approx(0.5));                      // no losses yet
    CHECK(sched.eta_t == doctest::Approx(std::sqrt(2.0 * std::log(6.0))));
    // lambda_0 = U^{4/3} (G C0 U^2 K^2)^{-1/6} / (sqrt(4/3) K^{1/6} (G C0)^{1/3})
    const double expect0 = std::pow(15.0, 4.0 / 3.0) *
                           std::pow(1.0 * 15.0 * 15.0 * 36.0, -1.0 / 6.0) /
                           (std::sqrt(4.0 / 3.0) * std::pow(6.0, 1.0 / 6.0));
    for (double l : sched.lambda) CHECK(l == doctest::Approx(expect0).epsilon(1e-12));
}

TEST_CASE("adaptive exploration rate never exceeds one half") {
    SelectorState s = uniform_state(3);
    LossFunction loss = make_loss(LossKind::square, 1.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        const int arm = sample_arm(s, unit(rng));
        const double c = unit(rng) * 4.0;
        const auto q_snap = s.q;
        okspp_update(s, make_estimate(3, arm, c, c / s.p[static_cast<std::size_t>(arm)]),
                     q_snap, loss, 1.0);
        CHECK(s.delta <= 0.5 + 1e-15);
        CHECK(s.delta > 0.0);
        CHECK(sum(s.q) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(sum(s.p) == doctest::Approx(1.0).epsilon(1e-10));
    }
    // bookkeeping identity: tilde_c accumulates exactly the fed estimates
    CHECK(s.tilde_c == doctest::Approx(sum(s.cum_est_losses)).epsilon(1e-12));
    // nu = 2: per-arm stepsizes shrink with the arm's own observed mass
    const auto sched = okspp_schedules(s, loss, 1.0, 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(sched.lambda[static_cast<std::size_t>(i)] ==
              doctest::Approx(std::pow(1.0, 4.0 / 3.0) *
                              std::pow(std::max(4.0 * 9.0, 8.0 * s.tilde_c), -1.0 / 6.0) /
                              (std::sqrt(4.0 / 3.0) * std::pow(3.0, 1.0 / 6.0) *
                               std::cbrt(4.0) *
                               std::sqrt(1.0 + s.delta_arm[static_cast<std::size_t>(i)]))));
    }
}

TEST_CASE("adaptive weights follow the cumulative-estimate exponential form") {
    SelectorState s = uniform_state(2);
    LossFunction loss = make_loss(LossKind::square, 1.0);
    const auto q_snap = s.q;
    okspp_update(s, make_estimate(2, 0, 1.0, 2.0), q_snap, loss, 1.0);
    // eta_t = sqrt(2 ln 2) / sqrt(1 + q_0 * 4); weights exp(-eta * (2, 0))
    const double eta = std::sqrt(2.0 * std::log(2.0)) / std::sqrt(1.0 + 0.5 * 4.0);
    CHECK(s.eta_global == doctest::Approx(eta).epsilon(1e-12));
    const double w0 = std::exp(-eta * 2.0);
    CHECK(s.q[0] == doctest::Approx(w0 / (w0 + 1.0)).epsilon(1e-12));
    CHECK(s.q[1] == doctest::Approx(1.0 / (w0 + 1.0)).epsilon(1e-12));

    // equal cumulative estimates give the uniform distribution
    SelectorState t = uniform_state(3);
    t.cum_est_losses = {5.0, 5.0, 5.0};
    t.eta_global = 0.7;
    t.delta = 0.0;
    oks_update(t, make_estimate(3, 1, 0.0, 0.0));
    for (double v : t.q) CHECK(v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("clipped estimator branches") {
    const std::vector<double> eta{0.1, 0.05};

    const auto standard = ioks_estimate(0.3, {0.5, 0.5}, 0, eta);
    CHECK(standard.estimate[0] == doctest::Approx(0.6));
    CHECK(standard.estimate[1] == 0.0);

    const auto clipped = ioks_estimate(0.3, {0.05, 0.95}, 0, eta);
    CHECK(clipped.estimate[0] == doctest::Approx(0.3 / 0.15).epsilon(1e-12));

    const auto zero = ioks_estimate(0.0, {0.5, 0.5}, 1, eta);
    CHECK(zero.estimate[0] == 0.0);
    CHECK(zero.estimate[1] == 0.0);

    // the boundary p = max eta uses the standard branch (tie goes to >=)
    const auto boundary = ioks_estimate(0.2, {0.1, 0.9}, 0, eta);
    CHECK(boundary.estimate[0] == doctest::Approx(2.0));

    CHECK_THROWS_AS(ioks_estimate(1.5, {0.5, 0.5}, 0, eta), InvalidInput);
    CHECK_THROWS_AS(ioks_estimate(-0.1, {0.5, 0.5}, 0, eta), InvalidInput);
}

TEST_CASE("estimator is unbiased on the standard branch and biased down when clipped") {
    // standard branch: min_i p_i >= max_i eta
    const std::vector<double> p{0.4, 0.35, 0.25};
    const std::vector<double> eta{0.2, 0.1, 0.15};
    const std::vector<double> costs{0.9, 0.4, 0.7};
    for (int i = 0; i < 3; ++i) {
        double expectation = 0.0;
        for (int drawn = 0; drawn < 3; ++drawn) {
            const auto est = ioks_estimate(costs[static_cast<std::size_t>(drawn)], p, drawn, eta);
            expectation += p[static_cast<std::size_t>(drawn)] *
                           est.estimate[static_cast<std::size_t>(i)];
        }
        CHECK(expectation == doctest::Approx(costs[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }

    // clipped branch: choosing an arm whose probability sits below max eta
    const std::vector<double> p2{0.05, 0.95};
    const std::vector<double> eta2{0.3, 0.3};
    for (int i = 0; i < 2; ++i) {
        double expectation = 0.0;
        for (int drawn = 0; drawn < 2; ++drawn) {
            const auto est = ioks_estimate(costs[static_cast<std::size_t>(drawn)], p2, drawn, eta2);
            expectation += p2[static_cast<std::size_t>(drawn)] *
                           est.estimate[static_cast<std::size_t>(i)];
        }
        CHECK(expectation <= costs[static_cast<std::size_t>(i)] + 1e-12);
    }
}

TEST_CASE("mirror-descent solve reproduces q on zero estimates") {
    const std::vector<double> q{0.3, 0.45, 0.25};
    const std::vector<double> eta{0.1, 0.1, 0.1};
    const auto q_next = ioks_solve(q, make_estimate(3, 1, 0.0, 0.0), eta);
    for (int i = 0; i < 3; ++i) {
        CHECK(q_next[static_cast<std::size_t>(i)] ==
              doctest::Approx(q[static_cast<std::size_t>(i)]).epsilon(1e-9));
    }
    CHECK(std::abs(sum(q_next) - 1.0) <= 1e-10);
}

TEST_CASE("mirror-descent solve agrees with the independent bisection oracle") {
    {
        const std::vector<double> q{0.5, 0.5};
        const std::vector<double> eta{1.0, 1.0};
        const auto mine = ioks_solve(q, make_estimate(2, 0, 1.0, 1.0), eta);
        const auto oracle = oktest::omd_update_oracle(q, {1.0, 0.0}, eta);
        CHECK(mine[0] == doctest::Approx(oracle[0]).epsilon(1e-8));
        CHECK(mine[1] == doctest::Approx(oracle[1]).epsilon(1e-8));
        CHECK(std::abs(sum(mine) - 1.0) <= 1e-10);
        // the hit arm loses mass, the other gains
        CHECK(mine[0] < 0.5);
        CHECK(mine[1] > 0.5);
    }

    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick_k(2, 6);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = pick_k(rng);
        std::vector<double> q(static_cast<std::size_t>(k));
        double total = 0.0;
        for (double& v : q) {
            v = 0.05 + unit(rng);
            total += v;
        }
        for (double& v : q) v /= total;
        std::vector<double> eta(static_cast<std::size_t>(k));
        for (double& v : eta) v = 0.01 + unit(rng);
        const int arm = static_cast<int>(unit(rng) * k) % k;
        const double est = unit(rng) * 20.0;

        const auto mine = ioks_solve(q, make_estimate(k, arm, est, est), eta);
        std::vector<double> cost(static_cast<std::size_t>(k), 0.0);
        cost[static_cast<std::size_t>(arm)] = est;
        const auto oracle = oktest::omd_update_oracle(q, cost, eta);
        CHECK(std::abs(sum(mine) - 1.0) <= 1e-10);
        for (int i = 0; i < k; ++i) {
            CHECK(mine[static_cast<std::size_t>(i)] > 0.0);
            CHECK(mine[static_cast<std::size_t>(i)] ==
                  doctest::Approx(oracle[static_cast<std::size_t>(i)]).epsilon(1e-7));
        }
    }
}

TEST_CASE("mirror-descent solve is equivariant under arm relabeling") {
    const std::vector<double> q{0.2, 0.5, 0.3};
    const std::vector<double> eta{0.3, 0.2, 0.4};
    const auto out = ioks_solve(q, make_estimate(3, 1, 2.0, 2.0), eta);

    // permute arms with the cycle (0 1 2) and check the outputs follow
    const std::vector<double> qp{0.3, 0.2, 0.5};
    const std::vector<double> etap{0.4, 0.3, 0.2};
    const auto outp = ioks_solve(qp, make_estimate(3, 2, 2.0, 2.0), etap);
    CHECK(outp[0] == doctest::Approx(out[2]).epsilon(1e-9));
    CHECK(outp[1] == doctest::Approx(out[0]).epsilon(1e-9));
    CHECK(outp[2] == doctest::Approx(out[1]).epsilon(1e-9));
}

TEST_CASE("raising one arm's estimate shifts mass away from it only") {
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> q{0.25, 0.25, 0.25, 0.25};
        std::vector<double> eta(4);
        for (double& v : eta) v = 0.05 + unit(rng);
        const double low = unit(rng);
        const double high = low + 0.5 + unit(rng);
        const auto ql = ioks_solve(q, make_estimate(4, 2, low, low), eta);
        const auto qh = ioks_solve(q, make_estimate(4, 2, high, high), eta);
        CHECK(qh[2] <= ql[2] + 1e-12);
        for (int i = 0; i < 4; ++i) {
            if (i == 2) continue;
            CHECK(qh[static_cast<std::size_t>(i)] >= ql[static_cast<std::size_t>(i)] - 1e-12);
        }
    }
}

TEST_CASE("learning-rate schedule raises eta only when the threshold is crossed") {
    IoksParameters params = ioks_parameters(4, 10000, 1.0, 1.0, 1.0, IoksVariant::theorem);
    SelectorState s = make_ioks_state(4, 10000, params);
    CHECK(s.rho[0] == doctest::Approx(8.0));  // 2K

    const auto eta0 = s.eta_per_arm;
    ioks_lr_schedule(s, s.p);  // uniform p: 1/p = 4 < 8, nothing moves
    CHECK(s.eta_per_arm == eta0);

    std::vector<double> shifted{0.05, 0.3167, 0.3167, 0.3166};
    ioks_lr_schedule(s, shifted);  // arm 0: 1/p = 20 > 8
    CHECK(s.rho[0] == doctest::Approx(40.0));
    CHECK(s.eta_per_arm[0] == doctest::Approx(eta0[0] * params.upsilon));
    CHECK(s.eta_per_arm[1] == eta0[1]);
    CHECK(s.rho[1] == doctest::Approx(8.0));
}

TEST_CASE("parameter formulas for the mirror-descent variant") {
    const IoksParameters p = ioks_parameters(6, 10000, 15.0, 1.0, 1.0, IoksVariant::theorem);
    CHECK(p.delta == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(p.upsilon > 1.0);
    CHECK(p.upsilon == doctest::Approx(std::exp(2.0 / (3.0 * std::log(10000.0)))));

    const IoksParameters exp_v =
        ioks_parameters(6, 10000, 15.0, 1.0, 1.0, IoksVariant::experiment);
    CHECK(p.eta_init / exp_v.eta_init == doctest::Approx(0.1875));
    for (long t : {2L, 10L, 100000L}) {
        CHECK(ioks_parameters(3, t, 1.0, 1.0, 1.0, IoksVariant::theorem).upsilon > 1.0);
    }
}

TEST_CASE("learning-rate raises per arm stay within the doubling bound") {
    const int num_arms = 2;
    const long rounds = 5000;
    const auto result = oktest::simulate_separation(oktest::SimAlgo::ioks, num_arms, rounds,
                                                    1000, okselect::SeparationStream{}, 7);
    const double delta = std::pow(static_cast<double>(rounds), -0.75);
    const double bound = std::log2(num_arms / delta) + 1.0;
    CHECK(static_cast<double>(result.raises_max) <= bound);
    // state invariants after a long composite run
    result.final_state.check_distributions();
    for (int i = 0; i < num_arms; ++i) {
        CHECK(result.final_state.p[static_cast<std::size_t>(i)] >= delta / num_arms - 1e-15);
    }
}
