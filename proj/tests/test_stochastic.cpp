#include <doctest.h>

#include <cmath>

#include "ctput/fluid.hpp"
#include "ctput/stochastic.hpp"
#include "oracles.hpp"

using namespace ctput;

namespace {
const CompoundParams kDefaults;
}

TEST_CASE("round loss probability: one packet per round means probability p") {
    for (double p : {1e-1, 1e-2, 1e-3}) {
        CHECK(round_loss_probability(1.0, p) == doctest::Approx(p).epsilon(1e-15));
        CHECK(round_loss_probability(1.9, p) == doctest::Approx(p).epsilon(1e-15));
    }
    CHECK(round_loss_probability(100.0, 1e-2) ==
          doctest::Approx(1.0 - std::pow(0.99, 100)).epsilon(1e-13));
}

TEST_CASE("step_window: forced branches") {
    ChainState s{10.0, 0};
    // u = 1 - eps can never fall below the loss probability for p small.
    CHECK(!step_window(s, 1e-6, 0.999999999, kDefaults));
    CHECK(s.w == 11.0);  // increment clamps at 1 below w = 16
    CHECK(s.round == 1);

    s = {10.0, 0};
    CHECK(step_window(s, 1e-6, 0.0, kDefaults));
    CHECK(s.w == 5.0);

    // Reduction floors at window 1.
    s = {1.0, 0};
    CHECK(step_window(s, 0.5, 0.0, kDefaults));
    CHECK(s.w == 1.0);
}

TEST_CASE("step_window: ten loss-free rounds from the floor") {
    ChainState s{1.0, 0};
    for (int i = 0; i < 10; ++i) step_window(s, 1e-3, 0.9999999, kDefaults);
    CHECK(s.w == 11.0);
    CHECK(s.round == 10);
}

TEST_CASE("expected drift: frozen closed-form value") {
    CHECK(expected_drift(100.0, 0.01, kDefaults) ==
          doctest::Approx(-30.251513066704197).epsilon(1e-13));
}

TEST_CASE("expected drift matches Monte-Carlo over one step") {
    const double j = 100.0, p = 0.01;
    const int n = 1000000;
    CounterRng rng(2024, 50);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        ChainState s{j, 0};
        step_window(s, p, rng, kDefaults);
        const double dw = s.w - j;
        sum += dw;
        sumsq += dw * dw;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sumsq - sum * sum / n) / (n - 1));
    const double target = expected_drift(j, p, kDefaults);
    CHECK(std::fabs(mean - target) < 3.0 * sd / std::sqrt(double(n)));
}

TEST_CASE("drift turns negative beyond a finite window for every p") {
    for (double p : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double scan_to = 10.0 * fixed_point(p, kDefaults);
        const int hi = int(std::ceil(scan_to));
        int first_bad_after = -1;  // largest j with drift >= -eps
        for (int j = 1; j <= hi; ++j)
            if (expected_drift(double(j), p, kDefaults) >= -0.1) first_bad_after = j;
        CHECK(first_bad_after < hi);  // a valid threshold J(p) exists inside the scan
    }
}

TEST_CASE("simulate_chain: identical seed and stream reproduce bit-identical output") {
    const ChainRun a = simulate_chain(1e-3, 100000, 10000, 42, 7, kDefaults);
    const ChainRun b = simulate_chain(1e-3, 100000, 10000, 42, 7, kDefaults);
    CHECK(a.estimate.mean_window == b.estimate.mean_window);
    CHECK(a.estimate.ci_halfwidth == b.estimate.ci_halfwidth);
    CHECK(a.estimate.goodput == b.estimate.goodput);
    CHECK(a.estimate.n_losses == b.estimate.n_losses);
    CHECK(a.interloss.mean_packets == b.interloss.mean_packets);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].v == b.samples[i].v);
        CHECK(a.samples[i].g == b.samples[i].g);
    }

    const ChainRun c = simulate_chain(1e-3, 100000, 10000, 42, 8, kDefaults);
    CHECK(c.estimate.mean_window != a.estimate.mean_window);
}

TEST_CASE("simulate_chain rejects warmup-dominated runs") {
    CHECK_THROWS_AS(simulate_chain(1e-3, 1000, 101, 1, 0, kDefaults), std::invalid_argument);
    CHECK_NOTHROW(simulate_chain(1e-3, 1010, 101, 1, 0, kDefaults));
    CHECK_THROWS_AS(simulate_chain(1.5, 1000, 10, 1, 0, kDefaults), std::invalid_argument);
}

TEST_CASE("simulate_chain: embedded samples are valid loss epochs") {
    const ChainRun run = simulate_chain(1e-2, 200000, 20000, 11, 0, kDefaults);
    REQUIRE(!run.samples.empty());
    // Post-warmup losses are anchored by an earlier loss except possibly
    // the very first one.
    CHECK(run.samples.size() >= run.estimate.n_losses - 1);
    CHECK(run.samples.size() <= run.estimate.n_losses);
    for (const EmbeddedSample& s : run.samples) {
        CHECK(s.v >= 1.0);
        CHECK(s.g >= 1);
    }
}

TEST_CASE("simulate_chain: packets between losses average 1/p") {
    const ChainRun run = simulate_chain(1e-3, 400000, 40000, 5, 0, kDefaults);
    REQUIRE(run.interloss.n_intervals > 1000);
    CHECK(std::fabs(run.interloss.mean_packets - 1000.0) < 2.0 * run.interloss.ci_halfwidth);

    const ChainRun run2 = simulate_chain(1e-2, 400000, 40000, 5, 1, kDefaults);
    CHECK(std::fabs(run2.interloss.mean_packets - 100.0) < 2.0 * run2.interloss.ci_halfwidth);
}

TEST_CASE("simulate_chain: goodput invariant and sane mean at p = 1e-3") {
    const ChainRun run = simulate_chain(1e-3, 400000, 40000, 5, 0, kDefaults);
    CHECK(run.estimate.goodput ==
          doctest::Approx((1.0 - 1e-3) * run.estimate.mean_window / kDefaults.rtt)
              .epsilon(1e-15));
    CHECK(run.estimate.mean_window > 55.0);
    CHECK(run.estimate.mean_window < 72.0);
}

TEST_CASE("simulate_replicas merges deterministically") {
    const ChainRun a = simulate_replicas(1e-3, 100000, 10000, 42, 4, kDefaults);
    const ChainRun b = simulate_replicas(1e-3, 100000, 10000, 42, 4, kDefaults);
    CHECK(a.estimate.mean_window == b.estimate.mean_window);
    CHECK(a.estimate.ci_halfwidth == b.estimate.ci_halfwidth);
    CHECK(a.estimate.n_rounds == 4 * 90000);
    // Merged CI shrinks roughly like 1/sqrt(replicas).
    const ChainRun single = simulate_chain(1e-3, 100000, 10000, 42, 0, kDefaults, false);
    CHECK(a.estimate.ci_halfwidth < single.estimate.ci_halfwidth);
}

TEST_CASE("rounds_to_first_loss: deterministic and at least one round") {
    CounterRng rng(9, 0);
    for (int i = 0; i < 100; ++i) CHECK(rounds_to_first_loss(100.0, 1e-3, rng, kDefaults) >= 1);
    CounterRng r1(9, 1), r2(9, 1);
    CHECK(rounds_to_first_loss(100.0, 1e-3, r1, kDefaults) ==
          rounds_to_first_loss(100.0, 1e-3, r2, kDefaults));
}

TEST_CASE("default truncation bound: power of two past 16x the fixed point") {
    for (double p : {1e-2, 1e-3, 1e-4}) {
        const uint32_t w = default_w_max(p, kDefaults);
        CHECK((w & (w - 1)) == 0);
        CHECK(double(w) >= 16.0 * fixed_point(p, kDefaults));
        CHECK(double(w) < 32.0 * fixed_point(p, kDefaults));
    }
    CHECK(default_w_max(1e-2, kDefaults) == 128);
}

TEST_CASE("stationary solver: distribution structure at p = 1e-2") {
    const StationaryDist dist = stationary_auto(1e-2, kDefaults);
    double sum = 0.0;
    for (uint32_t j = 1; j <= dist.w_max; ++j) {
        CHECK(dist.probs[j] >= 0.0);
        sum += dist.probs[j];
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
    CHECK(dist.tail_mass < 1e-6);
    CHECK(dist.mean > 12.47);  // 4% band around the chain-model value 12.99
    CHECK(dist.mean < 13.51);
}

TEST_CASE("stationary solver agrees with simulation at p = 1e-3") {
    const StationaryDist dist = stationary_auto(1e-3, kDefaults);
    const ChainRun run = simulate_replicas(1e-3, 400000, 40000, 77, 4, kDefaults);
    // Combined tolerance: Monte-Carlo noise plus the systematic ~2.6%
    // integerization gap (the floored decrease map loses about half a
    // packet per loss relative to the real-valued chain).
    const double tol = 3.0 * run.estimate.ci_halfwidth + 0.03 * dist.mean;
    CHECK(std::fabs(dist.mean - run.estimate.mean_window) < tol);
    CHECK(dist.mean < run.estimate.mean_window);  // the bias has a known sign
}

TEST_CASE("stationary solver rejects tiny truncation") {
    CHECK_THROWS_AS(stationary_solver(1e-2, 2, kDefaults), std::invalid_argument);
}

TEST_CASE("goodput: frozen values and edges") {
    CHECK(goodput(407.25, 1e-4, kDefaults) == doctest::Approx(4072.09275).epsilon(1e-12));
    CHECK(goodput(10.0, 0.0, kDefaults) == doctest::Approx(100.0).epsilon(1e-15));  // mean/rtt
    CHECK(goodput(fluid_avg_window(1e-3, kDefaults), 1e-3, kDefaults) ==
          doctest::Approx(640.60).epsilon(1e-4));
    CHECK(goodput(fluid_avg_window(5e-5, kDefaults), 5e-5, kDefaults) ==
          doctest::Approx(7044.12).epsilon(1e-4));
    CHECK_THROWS_AS(goodput(1.0, 1.0, kDefaults), std::invalid_argument);
    CHECK_THROWS_AS(goodput(1.0, -0.1, kDefaults), std::invalid_argument);
}
