#ifndef CTPUT_STOCHASTIC_HPP
#define CTPUT_STOCHASTIC_HPP

// Finite-p random-loss model: the per-RTT window chain, the embedded
// loss-epoch chain, Monte-Carlo estimators, and a truncated-state
// stationary-distribution solver.

#include <cstdint>
#include <vector>

#include "ctput/core.hpp"
#include "ctput/rng.hpp"

namespace ctput {

struct ChainState {
    double w = 1.0;      // real-valued window, >= 1
    uint64_t round = 0;  // RTT index
};

// Window just after a loss and the number of rounds since the previous
// loss.
struct EmbeddedSample {
    double v = 0.0;
    uint64_t g = 0;
};

struct SimEstimate {
    double mean_window = 0.0;   // packets
    double goodput = 0.0;       // packets/second, (1-p)*mean/rtt
    double ci_halfwidth = 0.0;  // 95%, batch means
    uint64_t n_rounds = 0;      // rounds contributing to the estimate
    uint64_t n_losses = 0;
};

// Packets counted from just after one lost packet to the next one; the
// count is exactly geometric with mean 1/p.
struct InterlossStats {
    double mean_packets = 0.0;
    double ci_halfwidth = 0.0;  // 95%
    uint64_t n_intervals = 0;
};

struct ChainRun {
    SimEstimate estimate;
    InterlossStats interloss;
    std::vector<EmbeddedSample> samples;  // post-warmup loss epochs
};

struct StationaryDist {
    std::vector<double> probs;  // index = integer window, probs[0] unused
    uint32_t w_max = 0;
    double mean = 0.0;
    double tail_mass = 0.0;  // probability of the truncation state
    uint64_t iterations = 0;
    double residual = 0.0;  // final L1 change per sweep
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Chance that at least one of the floor(w) packets of a round is lost.
inline double round_loss_probability(double w, double p) {
    return -std::expm1(std::floor(w) * std::log1p(-p));
}

// Expected one-step window change from integer window j (closed form).
inline double expected_drift(double j, double p, const CompoundParams& prm) {
    const double survive = std::pow(1.0 - p, j);
    return -prm.beta * j * (1.0 - survive) + aggregate_increment(j, prm) * survive;
}

// One round of the window chain driven by a uniform draw: loss with
// probability 1-(1-p)^floor(w), reduction floored at window 1.
inline bool step_window(ChainState& s, double p, double u, const CompoundParams& prm) {
    const bool loss = u < round_loss_probability(s.w, p);
    if (loss)
        s.w = std::max(1.0, (1.0 - prm.beta) * s.w);
    else
        s.w += aggregate_increment(s.w, prm);
    ++s.round;
    return loss;
}

inline bool step_window(ChainState& s, double p, CounterRng& rng, const CompoundParams& prm) {
    return step_window(s, p, rng.next_double(), prm);
}

double goodput(double mean_window, double p, const CompoundParams& prm);

// Single replica; deterministic given (seed, stream).
ChainRun simulate_chain(double p, uint64_t n_rounds, uint64_t warmup_rounds, uint64_t seed,
                        uint64_t stream, const CompoundParams& prm, bool keep_samples = true);

// n_replicas independent replicas on streams base_stream..base_stream+n-1,
// run in parallel and merged by replica index (bit-reproducible).
ChainRun simulate_replicas(double p, uint64_t n_rounds, uint64_t warmup_rounds, uint64_t seed,
                           uint32_t n_replicas, const CompoundParams& prm,
                           uint64_t base_stream = 0);

// Rounds until the first lossy round starting from window w0 (fresh
// post-loss state); >= 1.
uint64_t rounds_to_first_loss(double w0, double p, CounterRng& rng, const CompoundParams& prm);

// Default truncation bound: 16x the fluid fixed point, rounded up to a
// power of two.
uint32_t default_w_max(double p, const CompoundParams& prm);

// Stationary vector of the integerized chain by power iteration.
// Throws ConvergenceError if the L1 residual does not reach 1e-12.
StationaryDist stationary_solver(double p, uint32_t w_max, const CompoundParams& prm);

// Retry with doubled w_max until the tail-mass guard (< 1e-6) holds.
StationaryDist stationary_auto(double p, const CompoundParams& prm,
                               uint32_t max_w_max = 1u << 22);

}  // namespace ctput

#endif
