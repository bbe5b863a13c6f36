#ifndef CTPUT_CORE_HPP
#define CTPUT_CORE_HPP

// Compound TCP protocol constants, the per-RTT window update, and the
// asymptotic scaling maps shared by the fluid, chain and limit models.

#include <cmath>
#include <stdexcept>

namespace ctput {

struct CompoundParams {
    double alpha = 0.125;  // window gain
    double beta = 0.5;     // multiplicative decrease fraction
    double k = 0.75;       // window exponent
    double gamma = 30.0;   // queuing threshold, packets
    double zeta = 0.5;     // queue-drain gain
    double rtt = 0.1;      // round-trip time, seconds

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
        if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
        if (!(k > 0.0 && k < 1.0)) throw std::invalid_argument("k must lie in (0,1)");
        if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
        if (!(zeta >= 0.0)) throw std::invalid_argument("zeta must be >= 0");
        if (!(rtt > 0.0)) throw std::invalid_argument("rtt must be > 0");
    }

    // Exponents of the small-p scalings: windows shrink by p^{1/(2-k)},
    // inter-loss times by p^{(1-k)/(2-k)}.
    double window_scale_exponent() const { return 1.0 / (2.0 - k); }
    double time_scale_exponent() const { return (1.0 - k) / (2.0 - k); }
};

// Window split into delay-based and loss-based components; the total
// window is always their sum.
struct CompoundState {
    double d = 0.0;  // delay-based component, packets
    double l = 1.0;  // loss-based component, packets

    double w() const { return d + l; }
};

inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

inline void require_loss_rate(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("loss rate must lie in (0,1)");
}

// One RTT of the Compound update. With no loss the delay component grows
// by (alpha*W^k - 1)^+ while the queue estimate stays under gamma and
// drains by zeta*Q otherwise; the loss component grows by one packet per
// RTT. A detected loss scales both components by (1-beta). The loss
// branch may push l below 1; the floor at a total window of 1 is applied
// by the chain model, not here.
inline CompoundState compound_update(const CompoundState& s, double q_next, bool loss,
                                     const CompoundParams& prm) {
    if (loss) return {(1.0 - prm.beta) * s.d, (1.0 - prm.beta) * s.l};
    if (q_next >= prm.gamma) return {positive_part(s.d - prm.zeta * q_next), s.l + 1.0};
    return {s.d + positive_part(prm.alpha * std::pow(s.w(), prm.k) - 1.0), s.l + 1.0};
}

// Total-window per-RTT increase with no loss and no queuing: the delay
// and loss components together add max(1, alpha*w^k) packets.
inline double aggregate_increment(double w, const CompoundParams& prm) {
    return std::max(1.0, prm.alpha * std::pow(w, prm.k));
}

inline double scale_window(double w, double p, double k) {
    require_loss_rate(p);
    return std::pow(p, 1.0 / (2.0 - k)) * w;
}

inline double unscale_window(double x, double p, double k) {
    require_loss_rate(p);
    return x / std::pow(p, 1.0 / (2.0 - k));
}

// g is measured in rounds (multiples of the RTT).
inline double scale_time(double g, double p, double k) {
    require_loss_rate(p);
    return std::pow(p, (1.0 - k) / (2.0 - k)) * g;
}

inline double unscale_time(double y, double p, double k) {
    require_loss_rate(p);
    return y / std::pow(p, (1.0 - k) / (2.0 - k));
}

}  // namespace ctput

#endif
