#ifndef CTPUT_LIMIT_HPP
#define CTPUT_LIMIT_HPP

// Small-p limit machinery: the law of the scaled inter-loss time for a
// scaled post-loss window x, an exact inverse-transform sampler for it,
// the scaled post-loss window chain, and the closed-form throughput
// approximation built from the chain's stationary mean.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ctput/core.hpp"
#include "ctput/rng.hpp"

namespace ctput {

// -log ccdf of the scaled inter-loss time is a quintic in y with
// nonnegative coefficients determined by the scaled start window x:
//   c1 = x
//   c2 = 2a x^k          a = alpha (1-k)
//   c3 = 2a^2 x^{2k-1}
//   c4 = a^3 x^{3k-2}
//   c5 = a^4 x^{4k-3} / 5
struct GbarLaw {
    double x = 0.0;
    std::array<double, 5> c{};  // c[i] multiplies y^{i+1}

    double log_ccdf(double y) const {
        return -(((((c[4] * y + c[3]) * y + c[2]) * y + c[1]) * y + c[0]) * y);
    }
    double hazard(double y) const {
        return ((((5.0 * c[4] * y + 4.0 * c[3]) * y + 3.0 * c[2]) * y + 2.0 * c[1]) * y + c[0]);
    }
};

GbarLaw gbar_law(double x, const CompoundParams& prm);

double gbar_log_ccdf(double x, double y, const CompoundParams& prm);

// Unique y >= 0 with log_ccdf(y) = log(u), by bracketing plus
// safeguarded Newton; the log-residual is below 1e-12. u must be
// strictly inside (0,1).
double sample_gbar(const GbarLaw& law, double u);
double sample_gbar(double x, double u, const CompoundParams& prm);

// Scaled post-loss window after an inter-loss time of g (scaled units).
double step_vbar(double v, double g, const CompoundParams& prm);

struct GbarEstimate {
    double mean_g = 0.0;
    double ci_halfwidth = 0.0;  // 95%, batch means
    uint64_t n_samples = 0;
    uint64_t burn_in = 0;
};

// Sampler hook so tests can substitute a degenerate law.
using GbarSampler = std::function<double(double v, double u)>;

struct VbarPath {
    std::vector<double> g;  // g[i] drawn from the law at v[i]
    std::vector<double> v;  // v[i] = state before drawing g[i]; size n
};

VbarPath run_vbar_chain(uint64_t n, double v0, CounterRng& rng, const CompoundParams& prm,
                        const GbarSampler* sampler_override = nullptr);

// Stationary mean of the scaled inter-loss time: iterate the chain and
// average the post-burn-in draws.
GbarEstimate estimate_mean_gbar(uint64_t n, uint64_t burn_in, double v0, uint64_t seed,
                                uint64_t stream, const CompoundParams& prm);

// Post-burn-in states of the scaled window chain.
std::vector<double> stationary_vbar_samples(uint64_t n, uint64_t burn_in, double v0,
                                            uint64_t seed, uint64_t stream,
                                            const CompoundParams& prm);

// Closed-form small-p response: window = p^{-1/(2-k)} / mean_g.
double approx_avg_window(double p, double mean_g, const CompoundParams& prm);
double approx_goodput(double p, double mean_g, const CompoundParams& prm);

}  // namespace ctput

#endif
