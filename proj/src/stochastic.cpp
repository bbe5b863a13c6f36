#include "ctput/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "ctput/fluid.hpp"

namespace ctput {

namespace {

constexpr int kBatches = 32;
constexpr double kZ95 = 1.96;

// Mean and 95% halfwidth from per-batch means.
void batch_ci(const double* batch_sums, const uint64_t* batch_lens, int n_batches, double* mean,
              double* halfwidth) {
    double total = 0.0, rounds = 0.0;
    for (int b = 0; b < n_batches; ++b) {
        total += batch_sums[b];
        rounds += double(batch_lens[b]);
    }
    *mean = total / rounds;
    double var = 0.0;
    for (int b = 0; b < n_batches; ++b) {
        const double bm = batch_sums[b] / double(batch_lens[b]);
        var += (bm - *mean) * (bm - *mean);
    }
    var /= double(n_batches - 1);
    *halfwidth = kZ95 * std::sqrt(var / double(n_batches));
}

// Position of the first lost packet within a round of m packets, given
// that the round is lossy: truncated geometric on {1..m}.
uint64_t first_loss_position(double u, double p_loss, double log1mp, uint64_t m) {
    const double j = std::ceil(std::log1p(-u * p_loss) / log1mp);
    if (!(j >= 1.0)) return 1;
    if (j >= double(m)) return m;
    return uint64_t(j);
}

}  // namespace

double goodput(double mean_window, double p, const CompoundParams& prm) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("goodput: p must lie in [0,1)");
    return (1.0 - p) * mean_window / prm.rtt;
}

ChainRun simulate_chain(double p, uint64_t n_rounds, uint64_t warmup_rounds, uint64_t seed,
                        uint64_t stream, const CompoundParams& prm, bool keep_samples) {
    require_loss_rate(p);
    prm.validate();
    if (warmup_rounds > n_rounds / 10)
        throw std::invalid_argument("simulate_chain: n_rounds must be >= 10*warmup_rounds");
    const uint64_t n_eff = n_rounds - warmup_rounds;
    if (n_eff < kBatches)
        throw std::invalid_argument("simulate_chain: too few post-warmup rounds");

    CounterRng rng(seed, stream);
    ChainState state;

    const double log1mp = std::log1p(-p);
    const uint64_t batch_len = n_eff / kBatches;
    double batch_sums[kBatches] = {};
    uint64_t batch_lens[kBatches] = {};

    ChainRun run;
    uint64_t losses = 0;
    uint64_t rounds_since_loss = 0;
    // Inter-loss packet accounting: packets of complete loss-free rounds
    // plus the first-loss position inside the lossy round. The count is
    // exactly geometric(p); the first interval has no anchoring loss and
    // is discarded.
    bool interval_open = false;
    double interval_packets = 0.0;
    double il_sum = 0.0, il_sq = 0.0;
    uint64_t il_n = 0;

    for (uint64_t round = 0; round < n_rounds; ++round) {
        const bool counted = round >= warmup_rounds;
        const uint64_t m = uint64_t(state.w);
        const double p_loss = -std::expm1(double(m) * log1mp);
        const double w_before = state.w;
        const bool loss = rng.next_double() < p_loss;
        ++rounds_since_loss;

        if (counted) {
            const uint64_t b = std::min<uint64_t>((round - warmup_rounds) / batch_len, kBatches - 1);
            batch_sums[b] += w_before;
            ++batch_lens[b];
        }

        if (loss) {
            const double u_pos = rng.next_double();
            if (interval_open) {
                interval_packets += double(first_loss_position(u_pos, p_loss, log1mp, m));
                il_sum += interval_packets;
                il_sq += interval_packets * interval_packets;
                ++il_n;
            }
            state.w = std::max(1.0, (1.0 - prm.beta) * state.w);
            ++state.round;
            if (counted) {
                ++losses;
                // The very first loss has no anchoring predecessor, so it
                // yields no embedded (v, g) sample.
                if (keep_samples && interval_open)
                    run.samples.push_back({state.w, rounds_since_loss});
            }
            interval_open = true;
            interval_packets = 0.0;
            rounds_since_loss = 0;
        } else {
            state.w += aggregate_increment(state.w, prm);
            ++state.round;
            if (interval_open) interval_packets += double(m);
        }
    }

    batch_ci(batch_sums, batch_lens, kBatches, &run.estimate.mean_window,
             &run.estimate.ci_halfwidth);
    run.estimate.goodput = goodput(run.estimate.mean_window, p, prm);
    run.estimate.n_rounds = n_eff;
    run.estimate.n_losses = losses;

    if (il_n >= 2) {
        run.interloss.mean_packets = il_sum / double(il_n);
        const double var =
            (il_sq - il_sum * il_sum / double(il_n)) / double(il_n - 1);
        run.interloss.ci_halfwidth = kZ95 * std::sqrt(std::max(0.0, var) / double(il_n));
    }
    run.interloss.n_intervals = il_n;
    return run;
}

ChainRun simulate_replicas(double p, uint64_t n_rounds, uint64_t warmup_rounds, uint64_t seed,
                           uint32_t n_replicas, const CompoundParams& prm, uint64_t base_stream) {
    if (n_replicas == 0) throw std::invalid_argument("simulate_replicas: need >= 1 replica");
    std::vector<ChainRun> runs(n_replicas);
    std::vector<std::thread> workers;
    workers.reserve(n_replicas);
    std::vector<std::exception_ptr> errors(n_replicas);
    for (uint32_t r = 0; r < n_replicas; ++r) {
        workers.emplace_back([&, r] {
            try {
                runs[r] = simulate_chain(p, n_rounds, warmup_rounds, seed, base_stream + r, prm,
                                         /*keep_samples=*/false);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    // Equal-length replicas: plain average of means; independent CIs
    // combine in quadrature.
    ChainRun merged;
    double ci_sq = 0.0;
    double il_mean_weighted = 0.0, il_ci_sq = 0.0;
    for (const ChainRun& run : runs) {
        merged.estimate.mean_window += run.estimate.mean_window;
        ci_sq += run.estimate.ci_halfwidth * run.estimate.ci_halfwidth;
        merged.estimate.n_rounds += run.estimate.n_rounds;
        merged.estimate.n_losses += run.estimate.n_losses;
        merged.interloss.n_intervals += run.interloss.n_intervals;
        il_mean_weighted += run.interloss.mean_packets * double(run.interloss.n_intervals);
        il_ci_sq += run.interloss.ci_halfwidth * run.interloss.ci_halfwidth;
    }
    merged.estimate.mean_window /= double(n_replicas);
    merged.estimate.ci_halfwidth = std::sqrt(ci_sq) / double(n_replicas);
    merged.estimate.goodput = goodput(merged.estimate.mean_window, p, prm);
    if (merged.interloss.n_intervals > 0)
        merged.interloss.mean_packets = il_mean_weighted / double(merged.interloss.n_intervals);
    merged.interloss.ci_halfwidth = std::sqrt(il_ci_sq) / double(n_replicas);
    return merged;
}

uint64_t rounds_to_first_loss(double w0, double p, CounterRng& rng, const CompoundParams& prm) {
    require_loss_rate(p);
    if (!(w0 >= 1.0)) throw std::invalid_argument("rounds_to_first_loss: w0 must be >= 1");
    ChainState s{w0, 0};
    uint64_t g = 0;
    while (true) {
        ++g;
        if (step_window(s, p, rng, prm)) return g;
    }
}

uint32_t default_w_max(double p, const CompoundParams& prm) {
    const double target = 16.0 * fixed_point(p, prm);
    uint32_t w = 2;
    while (double(w) < target && w < (1u << 30)) w <<= 1;
    return w;
}

StationaryDist stationary_solver(double p, uint32_t w_max, const CompoundParams& prm) {
    require_loss_rate(p);
    prm.validate();
    if (w_max < 4) throw std::invalid_argument("stationary_solver: w_max too small");

    // Integerized chain: from window j the round is loss-free with
    // probability (1-p)^j and the window grows by the rounded increment;
    // otherwise it drops to floor((1-beta)*j), floored at 1.
    std::vector<uint32_t> up(w_max + 1), down(w_max + 1);
    std::vector<double> p_up(w_max + 1);
    const double log1mp = std::log1p(-p);
    for (uint32_t j = 1; j <= w_max; ++j) {
        const double inc = std::nearbyint(aggregate_increment(double(j), prm));
        up[j] = std::min<uint64_t>(w_max, j + uint64_t(inc));
        down[j] = std::max<uint32_t>(1, uint32_t((1.0 - prm.beta) * double(j)));
        p_up[j] = std::exp(double(j) * log1mp);
    }

    std::vector<double> pi(w_max + 1, 0.0), next(w_max + 1, 0.0);
    pi[1] = 1.0;

    constexpr double kTol = 1e-12;
    constexpr uint64_t kMaxIter = 200000;
    double residual = 0.0;
    uint64_t iter = 0;
    for (; iter < kMaxIter; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (uint32_t j = 1; j <= w_max; ++j) {
            const double mass = pi[j];
            if (mass == 0.0) continue;
            next[up[j]] += mass * p_up[j];
            next[down[j]] += mass * (1.0 - p_up[j]);
        }
        residual = 0.0;
        for (uint32_t j = 1; j <= w_max; ++j) residual += std::fabs(next[j] - pi[j]);
        pi.swap(next);
        if (residual < kTol) break;
    }
    if (residual >= kTol) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "stationary_solver: no convergence after %llu sweeps (L1 residual %.3e)",
                      static_cast<unsigned long long>(kMaxIter), residual);
        throw ConvergenceError(msg);
    }

    StationaryDist dist;
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& v : pi) v /= total;
    dist.mean = 0.0;
    for (uint32_t j = 1; j <= w_max; ++j) dist.mean += double(j) * pi[j];
    dist.probs = std::move(pi);
    dist.w_max = w_max;
    dist.tail_mass = dist.probs[w_max];
    dist.iterations = iter + 1;
    dist.residual = residual;
    return dist;
}

StationaryDist stationary_auto(double p, const CompoundParams& prm, uint32_t max_w_max) {
    uint32_t w_max = default_w_max(p, prm);
    while (true) {
        StationaryDist dist = stationary_solver(p, w_max, prm);
        if (dist.tail_mass < 1e-6) return dist;
        if (w_max >= max_w_max)
            throw ConvergenceError("stationary_auto: tail-mass guard not met at max w_max");
        w_max <<= 1;
    }
}

}  // namespace ctput
