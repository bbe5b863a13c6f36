#include "ctput/limit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace ctput {

GbarLaw gbar_law(double x, const CompoundParams& prm) {
    if (!(x >= 0.0)) throw std::invalid_argument("gbar_law: x must be >= 0");
    const double k = prm.k;
    const double a = prm.alpha * (1.0 - k);
    GbarLaw law;
    law.x = x;
    law.c[0] = x;
    law.c[1] = 2.0 * a * std::pow(x, k);
    law.c[2] = 2.0 * a * a * std::pow(x, 2.0 * k - 1.0);
    law.c[3] = a * a * a * std::pow(x, 3.0 * k - 2.0);
    law.c[4] = a * a * a * a * std::pow(x, 4.0 * k - 3.0) / 5.0;
    // x = 0 meets a negative power when k < 3/4 (the x-free quintic term
    // only survives at k = 3/4 exactly, where 0^0 = 1).
    for (double c : law.c)
        if (!std::isfinite(c))
            throw std::invalid_argument("gbar_law: x = 0 needs k >= 3/4");
    return law;
}

double gbar_log_ccdf(double x, double y, const CompoundParams& prm) {
    if (!(y >= 0.0)) throw std::invalid_argument("gbar_log_ccdf: y must be >= 0");
    return gbar_law(x, prm).log_ccdf(y);
}

double sample_gbar(const GbarLaw& law, double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("sample_gbar: u must lie in (0,1)");
    if (law.c[0] == 0.0 && law.c[1] == 0.0 && law.c[2] == 0.0 && law.c[3] == 0.0 &&
        law.c[4] == 0.0)
        throw std::invalid_argument("sample_gbar: degenerate law (all coefficients zero)");

    // Solve q(y) = t for the strictly increasing quintic q = -log ccdf.
    const double t = -std::log(u);
    double lo = 0.0, q_lo = 0.0;
    double hi = 1.0, q_hi = -law.log_ccdf(hi);
    while (q_hi < t) {
        lo = hi;
        q_lo = q_hi;
        hi *= 2.0;
        q_hi = -law.log_ccdf(hi);
        if (hi > 1e30) throw std::runtime_error("sample_gbar: bracket growth failed");
    }

    double y = (q_hi > q_lo) ? lo + (hi - lo) * (t - q_lo) / (q_hi - q_lo) : 0.5 * (lo + hi);
    constexpr double kTol = 1e-12;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = -law.log_ccdf(y) - t;
        if (std::fabs(f) < kTol) return y;
        if (f > 0.0)
            hi = y;
        else
            lo = y;
        const double fp = law.hazard(y);
        double step = y - f / fp;
        if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);  // bisection safeguard
        if (step == y) return y;  // interval exhausted at roundoff
        y = step;
    }
    return y;
}

double sample_gbar(double x, double u, const CompoundParams& prm) {
    return sample_gbar(gbar_law(x, prm), u);
}

double step_vbar(double v, double g, const CompoundParams& prm) {
    if (!(v >= 0.0)) throw std::invalid_argument("step_vbar: v must be >= 0");
    if (!(g >= 0.0)) throw std::invalid_argument("step_vbar: g must be >= 0");
    const double e = 1.0 - prm.k;
    return (1.0 - prm.beta) * std::pow(std::pow(v, e) + prm.alpha * e * g, 1.0 / e);
}

VbarPath run_vbar_chain(uint64_t n, double v0, CounterRng& rng, const CompoundParams& prm,
                        const GbarSampler* sampler_override) {
    if (!(v0 >= 0.0)) throw std::invalid_argument("run_vbar_chain: v0 must be >= 0");
    VbarPath path;
    path.g.reserve(n);
    path.v.reserve(n);
    double v = v0;
    for (uint64_t i = 0; i < n; ++i) {
        const double u = rng.next_open01();
        const double g =
            sampler_override ? (*sampler_override)(v, u) : sample_gbar(gbar_law(v, prm), u);
        path.v.push_back(v);
        path.g.push_back(g);
        v = step_vbar(v, g, prm);
    }
    return path;
}

GbarEstimate estimate_mean_gbar(uint64_t n, uint64_t burn_in, double v0, uint64_t seed,
                                uint64_t stream, const CompoundParams& prm) {
    if (n <= burn_in) throw std::invalid_argument("estimate_mean_gbar: need n > burn_in");
    CounterRng rng(seed, stream);
    const VbarPath path = run_vbar_chain(n, v0, rng, prm);

    const uint64_t n_eff = n - burn_in;
    constexpr int kBatches = 32;
    const int n_batches = n_eff >= 2 * kBatches ? kBatches : 2;
    const uint64_t batch_len = n_eff / uint64_t(n_batches);

    GbarEstimate est;
    est.n_samples = n;
    est.burn_in = burn_in;
    double sum = 0.0;
    std::vector<double> batch_sum(size_t(n_batches), 0.0);
    std::vector<uint64_t> batch_n(size_t(n_batches), 0);
    for (uint64_t i = burn_in; i < n; ++i) {
        sum += path.g[i];
        const auto b = std::min<uint64_t>((i - burn_in) / batch_len, uint64_t(n_batches) - 1);
        batch_sum[b] += path.g[i];
        ++batch_n[b];
    }
    est.mean_g = sum / double(n_eff);
    double var = 0.0;
    for (int b = 0; b < n_batches; ++b) {
        const double bm = batch_sum[size_t(b)] / double(batch_n[size_t(b)]);
        var += (bm - est.mean_g) * (bm - est.mean_g);
    }
    var /= double(n_batches - 1);
    est.ci_halfwidth = 1.96 * std::sqrt(var / double(n_batches));
    return est;
}

std::vector<double> stationary_vbar_samples(uint64_t n, uint64_t burn_in, double v0,
                                            uint64_t seed, uint64_t stream,
                                            const CompoundParams& prm) {
    if (n <= burn_in) throw std::invalid_argument("stationary_vbar_samples: need n > burn_in");
    CounterRng rng(seed, stream);
    const VbarPath path = run_vbar_chain(n, v0, rng, prm);
    return std::vector<double>(path.v.begin() + ptrdiff_t(burn_in), path.v.end());
}

double approx_avg_window(double p, double mean_g, const CompoundParams& prm) {
    require_loss_rate(p);
    if (!(mean_g > 0.0)) throw std::invalid_argument("approx_avg_window: mean_g must be > 0");
    return std::pow(p, -1.0 / (2.0 - prm.k)) / mean_g;
}

double approx_goodput(double p, double mean_g, const CompoundParams& prm) {
    return (1.0 - p) * approx_avg_window(p, mean_g, prm) / prm.rtt;
}

}  // namespace ctput
