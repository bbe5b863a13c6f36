#include "ctput/fluid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace ctput {

double window_at(double x0, double t, const CompoundParams& prm) {
    if (!(x0 > 0.0)) throw std::invalid_argument("window_at: x0 must be > 0");
    if (!(t >= 0.0)) throw std::invalid_argument("window_at: t must be >= 0");
    const double e = 1.0 - prm.k;
    return std::pow(std::pow(x0, e) + prm.alpha * e * t / prm.rtt, 1.0 / e);
}

FluidCycle cycle(double x, double p, const CompoundParams& prm) {
    if (!(x > 0.0)) throw std::invalid_argument("cycle: x must be > 0");
    require_loss_rate(p);
    const double e2 = 2.0 - prm.k;
    const double e1 = 1.0 - prm.k;
    FluidCycle c;
    c.x_start = x;
    c.x_end = std::pow(std::pow(x, e2) + prm.alpha * e2 / p, 1.0 / e2);
    c.tau = prm.rtt * (std::pow(c.x_end, e1) - std::pow(x, e1)) / (prm.alpha * e1);
    c.packets = 1.0 / p;
    return c;
}

double fixed_point(double p, const CompoundParams& prm) {
    require_loss_rate(p);
    const double e2 = 2.0 - prm.k;
    const double s = std::pow(1.0 - prm.beta, e2);
    return std::pow(prm.alpha * e2 * s / (p * (1.0 - s)), 1.0 / e2);
}

double period(double p, const CompoundParams& prm) {
    const double e1 = 1.0 - prm.k;
    const double s = std::pow(1.0 - prm.beta, e1);
    return (1.0 - s) * prm.rtt / (prm.alpha * e1 * s) * std::pow(fixed_point(p, prm), e1);
}

double fluid_avg_window(double p, const CompoundParams& prm) {
    require_loss_rate(p);
    const double e1 = 1.0 - prm.k;
    const double e2 = 2.0 - prm.k;
    const double r = e1 / e2;
    const double num =
        e1 * std::pow(prm.alpha / p, 1.0 / e2) * std::pow(1.0 - std::pow(1.0 - prm.beta, e2), r);
    const double den = (1.0 - std::pow(1.0 - prm.beta, e1)) * std::pow(e2, r);
    return num / den;
}

FluidTrajectory simulate_fluid(double x0, double p, unsigned n_cycles, double sample_dt,
                               const CompoundParams& prm) {
    if (!(x0 >= 1.0)) throw std::invalid_argument("simulate_fluid: x0 must be >= 1");
    require_loss_rate(p);

    FluidTrajectory traj;
    traj.drop_epoch_windows.reserve(n_cycles + 1);
    traj.drop_epoch_windows.push_back(x0);

    double x = x0;
    double t = 0.0;
    double next_grid = 0.0;
    traj.samples.emplace_back(0.0, x0);
    if (sample_dt > 0.0) next_grid = sample_dt;

    for (unsigned i = 0; i < n_cycles; ++i) {
        const FluidCycle c = cycle(x, p, prm);
        const double t_drop = t + c.tau;
        if (sample_dt > 0.0) {
            while (next_grid < t_drop) {
                traj.samples.emplace_back(next_grid, window_at(x, next_grid - t, prm));
                next_grid += sample_dt;
            }
        }
        const double x_post = (1.0 - prm.beta) * c.x_end;
        traj.samples.emplace_back(t_drop, c.x_end);
        traj.samples.emplace_back(t_drop, x_post);
        traj.drop_epoch_windows.push_back(x_post);
        x = x_post;
        t = t_drop;
    }
    return traj;
}

void write_trajectory_csv(const FluidTrajectory& traj, std::ostream& os) {
    os << "t_seconds,window_packets\n";
    char line[80];
    for (const auto& [t, w] : traj.samples) {
        std::snprintf(line, sizeof line, "%.12g,%.12g\n", t, w);
        os << line;
    }
}

void write_trajectory_csv(const FluidTrajectory& traj, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_trajectory_csv(traj, os);
}

}  // namespace ctput
