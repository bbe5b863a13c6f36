#ifndef CTPUT_FLUID_HPP
#define CTPUT_FLUID_HPP

// Deterministic-loss fluid model: closed-form trajectory between drops,
// the drop-cycle map, its fixed point and period, and the fluid response
// function for the average window.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ctput/core.hpp"

namespace ctput {

// One loss cycle: the window grows from x_start to x_end over tau
// seconds while exactly 1/p packets are transmitted, then drops.
struct FluidCycle {
    double x_start = 0.0;
    double x_end = 0.0;
    double tau = 0.0;      // seconds
    double packets = 0.0;  // always 1/p
};

struct FluidTrajectory {
    // Window right after each drop; entry 0 is the initial window.
    std::vector<double> drop_epoch_windows;
    // Optional (time-seconds, window) plot samples. Drop epochs appear
    // as duplicated rows (pre-drop then post-drop) to keep the sawtooth
    // exact.
    std::vector<std::pair<double, double>> samples;
};

// Loss-free fluid window t seconds after starting from x0.
double window_at(double x0, double t, const CompoundParams& prm);

// Grow from x until 1/p packets have been sent.
FluidCycle cycle(double x, double p, const CompoundParams& prm);

// Post-drop window at which one cycle reproduces itself.
double fixed_point(double p, const CompoundParams& prm);

// Cycle duration at the fixed point, seconds.
double period(double p, const CompoundParams& prm);

// Closed-form time-average window of the periodic sawtooth.
double fluid_avg_window(double p, const CompoundParams& prm);

// Iterate the drop map x <- (1-beta)*cycle(x).x_end for n_cycles.
// sample_dt > 0 additionally records plot samples on a global time grid.
FluidTrajectory simulate_fluid(double x0, double p, unsigned n_cycles, double sample_dt,
                               const CompoundParams& prm);

void write_trajectory_csv(const FluidTrajectory& traj, std::ostream& os);
void write_trajectory_csv(const FluidTrajectory& traj, const std::string& path);

}  // namespace ctput

#endif
