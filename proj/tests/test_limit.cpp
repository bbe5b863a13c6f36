#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ctput/limit.hpp"
#include "oracles.hpp"

using namespace ctput;

namespace {
const CompoundParams kDefaults;

// Two-sample Kolmogorov-Smirnov distance.
double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}
}  // namespace

TEST_CASE("log ccdf: frozen values") {
    CHECK(gbar_log_ccdf(1.0, 0.0, kDefaults) == 0.0);
    CHECK(gbar_log_ccdf(0.0, 0.0, kDefaults) == 0.0);
    CHECK(gbar_log_ccdf(1.0, 1.0, kDefaults) ==
          doctest::Approx(-1.06448383331298828125).epsilon(1e-14));
    // At x = 0 only the quintic term survives (for k = 3/4 its
    // coefficient is x-free).
    CHECK(gbar_log_ccdf(0.0, 1.0, kDefaults) ==
          doctest::Approx(-1.9073486328125e-7).epsilon(1e-14));
}

TEST_CASE("log ccdf equals the binomial closed form at k = 3/4") {
    CounterRng rng(31, 0);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double x = 100.0 * rng.next_double();
        const double y = 20.0 * rng.next_open01();
        const double poly = gbar_log_ccdf(x, y, kDefaults);
        const double closed = oracles::gbar_log_ccdf_binomial(x, y, kDefaults.alpha);
        worst = std::max(worst, oracles::rel_err(poly, closed));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("law coefficients are nonnegative and the hazard is positive") {
    for (double x : {0.0, 0.3, 1.0, 10.0, 80.0}) {
        const GbarLaw law = gbar_law(x, kDefaults);
        for (double c : law.c) CHECK(c >= 0.0);
        CHECK(law.c[4] > 0.0);  // quintic term survives even at x = 0
        double prev = 0.0;
        for (double y = 0.25; y < 8.0; y += 0.25) {
            const double q = -law.log_ccdf(y);
            CHECK(q > prev);
            prev = q;
        }
    }
}

TEST_CASE("sampler: inverse-transform residual below 1e-12") {
    CounterRng rng(32, 0);
    for (int i = 0; i < 5000; ++i) {
        const double x = 10.0 * rng.next_double();
        const double u = rng.next_open01();
        const GbarLaw law = gbar_law(x, kDefaults);
        const double y = sample_gbar(law, u);
        CHECK(y >= 0.0);
        CHECK(std::fabs(law.log_ccdf(y) - std::log(u)) < 1e-12);
    }
}

TEST_CASE("sampler: frozen inversions") {
    // Inverse of the frozen log-ccdf value at (x,y) = (1,1).
    CHECK(sample_gbar(1.0, std::exp(-1.06448383331298828125), kDefaults) ==
          doctest::Approx(1.0).epsilon(1e-9));
    // Pure quintic at x = 0.
    CHECK(sample_gbar(0.0, std::exp(-1.9073486328125e-7), kDefaults) ==
          doctest::Approx(1.0).epsilon(1e-9));
    // u near 1 maps to y near 0.
    CHECK(sample_gbar(1.0, 1.0 - 1e-12, kDefaults) < 1e-9);
}

TEST_CASE("sampler rejects u outside the open unit interval") {
    CHECK_THROWS_AS(sample_gbar(1.0, 0.0, kDefaults), std::invalid_argument);
    CHECK_THROWS_AS(sample_gbar(1.0, 1.0, kDefaults), std::invalid_argument);
    CHECK_THROWS_AS(sample_gbar(1.0, -0.5, kDefaults), std::invalid_argument);
}

TEST_CASE("law at x = 0 is only sampleable when the quintic term survives") {
    CompoundParams low_k = kDefaults;
    low_k.k = 0.7;  // negative power of zero
    CHECK_THROWS_AS(gbar_law(0.0, low_k), std::invalid_argument);
    CompoundParams high_k = kDefaults;
    high_k.k = 0.8;  // every coefficient vanishes at x = 0
    CHECK_THROWS_AS(sample_gbar(0.0, 0.5, high_k), std::invalid_argument);
    CHECK_NOTHROW(sample_gbar(0.5, 0.5, low_k));
    CHECK_NOTHROW(sample_gbar(0.5, 0.5, high_k));
}

TEST_CASE("sampler is pointwise nonincreasing in the start window") {
    // Larger windows lose sooner: with a shared uniform the inverse
    // transform preserves the stochastic ordering pointwise.
    for (double u : {0.05, 0.3, 0.7, 0.95}) {
        double prev = sample_gbar(0.0, u, kDefaults);
        for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
            const double y = sample_gbar(x, u, kDefaults);
            CHECK(y <= prev + 1e-12);
            prev = y;
        }
    }
}

TEST_CASE("step_vbar: identities and frozen value") {
    for (double v : {0.2, 1.0, 3.7}) {
        CHECK(step_vbar(v, 0.0, kDefaults) ==
              doctest::Approx((1.0 - kDefaults.beta) * v).epsilon(1e-12));
    }
    CHECK(step_vbar(1.0, 1.0, kDefaults) ==
          doctest::Approx(0.565491199493408203125).epsilon(1e-14));
    // Zero start: 0.5 * (alpha(1-k)g)^4 at defaults.
    for (double g : {0.5, 1.0, 4.0}) {
        const double want = 0.5 * std::pow(0.03125 * g, 4.0);
        CHECK(step_vbar(0.0, g, kDefaults) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("chain with a stubbed constant sampler averages to that constant") {
    const GbarSampler fixed = [](double, double) { return 0.5; };
    CounterRng rng(33, 0);
    const VbarPath path = run_vbar_chain(5000, 0.7, rng, kDefaults, &fixed);
    double sum = 0.0;
    for (double g : path.g) sum += g;
    CHECK(sum / double(path.g.size()) == 0.5);
}

TEST_CASE("mean scaled inter-loss time: determinism and the stationary level") {
    const GbarEstimate a = estimate_mean_gbar(10000, 100, 0.0, 7, 0, kDefaults);
    const GbarEstimate b = estimate_mean_gbar(10000, 100, 0.0, 7, 0, kDefaults);
    CHECK(a.mean_g == b.mean_g);
    CHECK(a.ci_halfwidth == b.ci_halfwidth);
    // Stationary mean of the scaled chain is 3.801 +/- 0.001 (checked by
    // 2e6-sample runs, an independent reimplementation, and a
    // deterministic discretized-kernel solve); n = 10^4 runs scatter
    // around it with sd about 0.007.
    CHECK(a.mean_g > 3.77);
    CHECK(a.mean_g < 3.84);
    CHECK(a.ci_halfwidth > 0.0);
    CHECK_THROWS_AS(estimate_mean_gbar(100, 100, 0.0, 7, 0, kDefaults), std::invalid_argument);
}

TEST_CASE("mean estimate is insensitive to the initial condition") {
    const GbarEstimate e0 = estimate_mean_gbar(10000, 100, 0.0, 7, 0, kDefaults);
    const GbarEstimate e1 = estimate_mean_gbar(10000, 100, 0.1, 7, 1, kDefaults);
    const GbarEstimate e2 = estimate_mean_gbar(10000, 100, 2.0, 7, 2, kDefaults);
    CHECK(std::fabs(e0.mean_g - e1.mean_g) < e0.ci_halfwidth + e1.ci_halfwidth);
    CHECK(std::fabs(e0.mean_g - e2.mean_g) < e0.ci_halfwidth + e2.ci_halfwidth);
    CHECK(std::fabs(e1.mean_g - e2.mean_g) < e1.ci_halfwidth + e2.ci_halfwidth);
}

TEST_CASE("running mean stabilizes within a few hundred steps") {
    CounterRng rng(7, 0);
    const VbarPath path = run_vbar_chain(10000, 0.0, rng, kDefaults);
    double sum = 0.0, mean_1k = 0.0;
    for (size_t i = 0; i < path.g.size(); ++i) {
        sum += path.g[i];
        if (i + 1 == 1000) mean_1k = sum / 1000.0;
    }
    const double mean_10k = sum / 10000.0;
    CHECK(std::fabs(mean_1k - mean_10k) / mean_10k < 0.05);
}

TEST_CASE("reciprocal of the mean sits near the fluid coefficient") {
    const GbarEstimate est = estimate_mean_gbar(10000, 100, 0.0, 7, 0, kDefaults);
    // The chain's limit coefficient is 0.2631 +/- 0.0005; the fluid
    // sawtooth coefficient 0.25528 sits 3.05% below it (the gap is the
    // systematic fluid-vs-random difference, not estimator noise).
    CHECK(1.0 / est.mean_g == doctest::Approx(0.2631).epsilon(0.004));
    CHECK(oracles::rel_err(1.0 / est.mean_g, 0.25528453268560012) < 0.05);
}

TEST_CASE("stationary window samples: nonnegative, seed-stable law") {
    const auto a = stationary_vbar_samples(100000, 100, 0.0, 101, 0, kDefaults);
    const auto b = stationary_vbar_samples(100000, 100, 2.0, 202, 0, kDefaults);
    REQUIRE(a.size() == 100000 - 100);
    for (double v : a) CHECK(v >= 0.0);
    // Unique invariant law: independent seeds and different starts give
    // matching empirical distributions.
    CHECK(two_sample_ks(a, b) < 0.02);
    double ma = 0.0, mb = 0.0;
    for (double v : a) ma += v;
    for (double v : b) mb += v;
    CHECK(std::fabs(ma - mb) / a.size() < 0.01);
}

TEST_CASE("transformed chain is dominated by the zero-start comparison chain") {
    // Shared uniforms couple the two chains; the inverse transform keeps
    // every draw from the x-law below the draw from the zero law.
    const double e = 1.0 - kDefaults.k;
    const GbarLaw zero_law = gbar_law(0.0, kDefaults);
    const double contraction = std::pow(1.0 - kDefaults.beta, e);
    const double gain = kDefaults.alpha * e;
    CounterRng rng(41, 0);
    double v = 2.0;
    double x = std::pow(v, e);
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.next_open01();
        const double gv = sample_gbar(gbar_law(v, kDefaults), u);
        const double g0 = sample_gbar(zero_law, u);
        v = step_vbar(v, gv, kDefaults);
        x = contraction * (x + gain * g0);
        CHECK(std::pow(v, e) <= x + 1e-12);
    }
}

TEST_CASE("closed-form approximation: frozen values and the power law") {
    CHECK(approx_avg_window(1e-3, 3.9002, kDefaults) ==
          doctest::Approx(64.404041626316089).epsilon(1e-12));
    CHECK(approx_avg_window(1e-4, 3.9002, kDefaults) ==
          doctest::Approx(406.36203078332226).epsilon(1e-12));
    CHECK(approx_avg_window(1e-4, 3.9002, kDefaults) /
              approx_avg_window(1e-3, 3.9002, kDefaults) ==
          doctest::Approx(std::pow(10.0, 0.8)).epsilon(1e-12));
    CHECK(approx_goodput(1e-3, 3.9002, kDefaults) ==
          doctest::Approx((1.0 - 1e-3) * 64.404041626316089 / 0.1).epsilon(1e-12));
    CHECK_THROWS_AS(approx_avg_window(0.0, 3.9, kDefaults), std::invalid_argument);
    CHECK_THROWS_AS(approx_avg_window(1e-3, 0.0, kDefaults), std::invalid_argument);
}
