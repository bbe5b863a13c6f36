#include "compound_tput.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "ctput/config.hpp"
#include "ctput/fluid.hpp"
#include "ctput/harness.hpp"
#include "ctput/limit.hpp"
#include "ctput/stochastic.hpp"

namespace {

thread_local std::string g_last_error;

ct_status fail(ct_status status, const char* msg) {
    g_last_error = msg ? msg : "";
    return status;
}

// Translate C++ failures into status codes at the boundary.
template <typename Fn>
ct_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(CT_ERR_INVALID_ARGUMENT, e.what());
    } catch (const ctput::ConfigError& e) {
        return fail(CT_ERR_CONFIG, e.what());
    } catch (const ctput::ConvergenceError& e) {
        return fail(CT_ERR_NO_CONVERGENCE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CT_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CT_ERR_INTERNAL, e.what());
    }
}

ctput::CompoundParams to_cpp(const ct_params& p) {
    return {p.alpha, p.beta, p.k, p.gamma_thresh, p.zeta, p.rtt};
}

ct_status require(bool ok, const char* what) {
    return ok ? CT_OK : fail(CT_ERR_INVALID_ARGUMENT, what);
}

}  // namespace

struct ct_trajectory {
    ctput::FluidTrajectory traj;
};
struct ct_stationary {
    ctput::StationaryDist dist;
};
struct ct_config {
    ctput::ExperimentConfig cfg;
};
struct ct_table {
    ctput::TableResult table;
};

extern "C" {

const char* ct_status_str(ct_status status) {
    switch (status) {
        case CT_OK: return "ok";
        case CT_ERR_INVALID_ARGUMENT: return "invalid argument";
        case CT_ERR_CONFIG: return "configuration error";
        case CT_ERR_NO_CONVERGENCE: return "no convergence";
        case CT_ERR_IO: return "i/o error";
        case CT_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* ct_last_error(void) { return g_last_error.c_str(); }

const char* ct_version(void) { return "0.1.0"; }

void ct_params_default(ct_params* out) {
    if (!out) return;
    const ctput::CompoundParams d;
    *out = {d.alpha, d.beta, d.k, d.gamma, d.zeta, d.rtt};
}

/* ------------------------------------------------------------------ */

ct_status ct_compound_update(const ct_params* params, double d, double l, double q_next,
                             int loss, double* d_out, double* l_out) {
    if (ct_status s = require(params && d_out && l_out, "null pointer argument")) return s;
    return guarded([&] {
        const ctput::CompoundParams prm = to_cpp(*params);
        prm.validate();
        if (!(d >= 0.0)) throw std::invalid_argument("d must be >= 0");
        if (!(q_next >= 0.0)) throw std::invalid_argument("q_next must be >= 0");
        const ctput::CompoundState next =
            ctput::compound_update({d, l}, q_next, loss != 0, prm);
        *d_out = next.d;
        *l_out = next.l;
        return CT_OK;
    });
}

ct_status ct_aggregate_increment(const ct_params* params, double w, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        if (!(w >= 1.0)) throw std::invalid_argument("w must be >= 1");
        *out = ctput::aggregate_increment(w, to_cpp(*params));
        return CT_OK;
    });
}

ct_status ct_scale_window(double w, double p, double k, double* out) {
    if (ct_status s = require(out != nullptr, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::scale_window(w, p, k);
        return CT_OK;
    });
}

ct_status ct_scale_time(double g_rounds, double p, double k, double* out) {
    if (ct_status s = require(out != nullptr, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::scale_time(g_rounds, p, k);
        return CT_OK;
    });
}

/* ------------------------------------------------------------------ */

ct_status ct_fluid_window_at(const ct_params* params, double x0, double t_seconds, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::window_at(x0, t_seconds, to_cpp(*params));
        return CT_OK;
    });
}

ct_status ct_fluid_cycle_map(const ct_params* params, double x, double p, ct_fluid_cycle* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        const ctput::FluidCycle c = ctput::cycle(x, p, to_cpp(*params));
        *out = {c.x_start, c.x_end, c.tau, c.packets};
        return CT_OK;
    });
}

ct_status ct_fluid_fixed_point(const ct_params* params, double p, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::fixed_point(p, to_cpp(*params));
        return CT_OK;
    });
}

ct_status ct_fluid_period(const ct_params* params, double p, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::period(p, to_cpp(*params));
        return CT_OK;
    });
}

ct_status ct_fluid_avg_window(const ct_params* params, double p, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::fluid_avg_window(p, to_cpp(*params));
        return CT_OK;
    });
}

ct_status ct_fluid_simulate(const ct_params* params, double x0, double p, uint32_t n_cycles,
                            double sample_dt, ct_trajectory** out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        auto traj = std::make_unique<ct_trajectory>();
        traj->traj = ctput::simulate_fluid(x0, p, n_cycles, sample_dt, to_cpp(*params));
        *out = traj.release();
        return CT_OK;
    });
}

size_t ct_trajectory_drop_count(const ct_trajectory* traj) {
    return traj ? traj->traj.drop_epoch_windows.size() : 0;
}

ct_status ct_trajectory_drop_window(const ct_trajectory* traj, size_t i, double* out) {
    if (ct_status s = require(traj && out, "null pointer argument")) return s;
    if (i >= traj->traj.drop_epoch_windows.size())
        return fail(CT_ERR_INVALID_ARGUMENT, "drop index out of range");
    *out = traj->traj.drop_epoch_windows[i];
    return CT_OK;
}

size_t ct_trajectory_sample_count(const ct_trajectory* traj) {
    return traj ? traj->traj.samples.size() : 0;
}

ct_status ct_trajectory_sample(const ct_trajectory* traj, size_t i, double* t_out,
                               double* w_out) {
    if (ct_status s = require(traj && t_out && w_out, "null pointer argument")) return s;
    if (i >= traj->traj.samples.size())
        return fail(CT_ERR_INVALID_ARGUMENT, "sample index out of range");
    *t_out = traj->traj.samples[i].first;
    *w_out = traj->traj.samples[i].second;
    return CT_OK;
}

ct_status ct_trajectory_write_csv(const ct_trajectory* traj, const char* path) {
    if (ct_status s = require(traj && path, "null pointer argument")) return s;
    try {
        ctput::write_trajectory_csv(traj->traj, std::string(path));
        return CT_OK;
    } catch (const std::exception& e) {
        return fail(CT_ERR_IO, e.what());
    }
}

void ct_trajectory_free(ct_trajectory* traj) { delete traj; }

/* ------------------------------------------------------------------ */

ct_status ct_simulate_chain(const ct_params* params, double p, uint64_t n_rounds,
                            uint64_t warmup_rounds, uint64_t seed, uint32_t n_replicas,
                            ct_sim_estimate* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        if (warmup_rounds == 0) warmup_rounds = n_rounds / 10;
        const ctput::ChainRun run = ctput::simulate_replicas(p, n_rounds, warmup_rounds, seed,
                                                             n_replicas, to_cpp(*params));
        *out = {run.estimate.mean_window,     run.estimate.goodput,
                run.estimate.ci_halfwidth,    run.estimate.n_rounds,
                run.estimate.n_losses,        run.interloss.mean_packets,
                run.interloss.ci_halfwidth,   run.interloss.n_intervals};
        return CT_OK;
    });
}

ct_status ct_goodput(const ct_params* params, double mean_window, double p, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::goodput(mean_window, p, to_cpp(*params));
        return CT_OK;
    });
}

ct_status ct_stationary_solve(const ct_params* params, double p, uint32_t w_max,
                              ct_stationary** out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        auto dist = std::make_unique<ct_stationary>();
        dist->dist = w_max == 0 ? ctput::stationary_auto(p, to_cpp(*params))
                                : ctput::stationary_solver(p, w_max, to_cpp(*params));
        *out = dist.release();
        return CT_OK;
    });
}

ct_status ct_stationary_mean(const ct_stationary* dist, double* out) {
    if (ct_status s = require(dist && out, "null pointer argument")) return s;
    *out = dist->dist.mean;
    return CT_OK;
}

ct_status ct_stationary_tail_mass(const ct_stationary* dist, double* out) {
    if (ct_status s = require(dist && out, "null pointer argument")) return s;
    *out = dist->dist.tail_mass;
    return CT_OK;
}

uint32_t ct_stationary_w_max(const ct_stationary* dist) { return dist ? dist->dist.w_max : 0; }

uint64_t ct_stationary_iterations(const ct_stationary* dist) {
    return dist ? dist->dist.iterations : 0;
}

ct_status ct_stationary_prob(const ct_stationary* dist, uint32_t window, double* out) {
    if (ct_status s = require(dist && out, "null pointer argument")) return s;
    if (window < 1 || window > dist->dist.w_max)
        return fail(CT_ERR_INVALID_ARGUMENT, "window out of range");
    *out = dist->dist.probs[window];
    return CT_OK;
}

void ct_stationary_free(ct_stationary* dist) { delete dist; }

/* ------------------------------------------------------------------ */

ct_status ct_gbar_log_ccdf(const ct_params* params, double x, double y, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::gbar_log_ccdf(x, y, to_cpp(*params));
        return CT_OK;
    });
}

ct_status ct_sample_gbar(const ct_params* params, double x, double u, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::sample_gbar(x, u, to_cpp(*params));
        return CT_OK;
    });
}

ct_status ct_step_vbar(const ct_params* params, double v, double g, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::step_vbar(v, g, to_cpp(*params));
        return CT_OK;
    });
}

ct_status ct_estimate_mean_gbar(const ct_params* params, uint64_t n, uint64_t burn_in, double v0,
                                uint64_t seed, ct_gbar_estimate* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        const ctput::GbarEstimate est =
            ctput::estimate_mean_gbar(n, burn_in, v0, seed, /*stream=*/0, to_cpp(*params));
        *out = {est.mean_g, est.ci_halfwidth, est.n_samples, est.burn_in};
        return CT_OK;
    });
}

ct_status ct_approx_avg_window(const ct_params* params, double p, double mean_g, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::approx_avg_window(p, mean_g, to_cpp(*params));
        return CT_OK;
    });
}

ct_status ct_approx_goodput(const ct_params* params, double p, double mean_g, double* out) {
    if (ct_status s = require(params && out, "null pointer argument")) return s;
    return guarded([&] {
        *out = ctput::approx_goodput(p, mean_g, to_cpp(*params));
        return CT_OK;
    });
}

/* ------------------------------------------------------------------ */

ct_status ct_config_create(ct_config** out) {
    if (ct_status s = require(out != nullptr, "null pointer argument")) return s;
    return guarded([&] {
        *out = new ct_config{ctput::default_config()};
        return CT_OK;
    });
}

ct_status ct_config_load_file(const char* path, ct_config** out) {
    if (ct_status s = require(path && out, "null pointer argument")) return s;
    return guarded([&] {
        auto cfg = std::make_unique<ct_config>();
        cfg->cfg = ctput::load_config_file(path);
        *out = cfg.release();
        return CT_OK;
    });
}

ct_status ct_config_parse_json(const char* json_text, ct_config** out) {
    if (ct_status s = require(json_text && out, "null pointer argument")) return s;
    return guarded([&] {
        auto cfg = std::make_unique<ct_config>();
        cfg->cfg = ctput::parse_config_json(json_text);
        *out = cfg.release();
        return CT_OK;
    });
}

ct_status ct_config_emit_json(const ct_config* cfg, char** out) {
    if (ct_status s = require(cfg && out, "null pointer argument")) return s;
    return guarded([&] {
        const std::string text = ctput::emit_config_json(cfg->cfg);
        char* buf = static_cast<char*>(::operator new(text.size() + 1));
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out = buf;
        return CT_OK;
    });
}

void ct_string_free(char* s) { ::operator delete(s); }

ct_status ct_config_set_seed(ct_config* cfg, uint64_t seed) {
    if (ct_status s = require(cfg != nullptr, "null pointer argument")) return s;
    cfg->cfg.seed = seed;
    cfg->cfg.seed_set = true;
    return CT_OK;
}

ct_status ct_config_set_out_dir(ct_config* cfg, const char* out_dir) {
    if (ct_status s = require(cfg && out_dir, "null pointer argument")) return s;
    cfg->cfg.out_dir = out_dir;
    return CT_OK;
}

ct_status ct_config_set_format(ct_config* cfg, const char* format) {
    if (ct_status s = require(cfg && format, "null pointer argument")) return s;
    if (std::string(format) != "csv" && std::string(format) != "md")
        return fail(CT_ERR_CONFIG, "format must be \"csv\" or \"md\"");
    cfg->cfg.format = format;
    return CT_OK;
}

ct_status ct_config_get_params(const ct_config* cfg, ct_params* out) {
    if (ct_status s = require(cfg && out, "null pointer argument")) return s;
    const ctput::CompoundParams& p = cfg->cfg.params;
    *out = {p.alpha, p.beta, p.k, p.gamma, p.zeta, p.rtt};
    return CT_OK;
}

uint64_t ct_config_seed(const ct_config* cfg) { return cfg ? cfg->cfg.seed : 0; }

int ct_config_seed_is_set(const ct_config* cfg) { return cfg && cfg->cfg.seed_set ? 1 : 0; }

ct_status ct_config_get_sim(const ct_config* cfg, uint64_t* n_rounds, uint64_t* warmup_rounds,
                            uint32_t* n_replicas) {
    if (ct_status s = require(cfg != nullptr, "null pointer argument")) return s;
    if (n_rounds) *n_rounds = cfg->cfg.sim.n_rounds;
    if (warmup_rounds) *warmup_rounds = cfg->cfg.sim.warmup_rounds;
    if (n_replicas) *n_replicas = cfg->cfg.sim.n_replicas;
    return CT_OK;
}

ct_status ct_config_get_limit(const ct_config* cfg, uint64_t* n, uint64_t* burn_in, double* v0) {
    if (ct_status s = require(cfg != nullptr, "null pointer argument")) return s;
    if (n) *n = cfg->cfg.limit.n;
    if (burn_in) *burn_in = cfg->cfg.limit.burn_in;
    if (v0) *v0 = cfg->cfg.limit.v0;
    return CT_OK;
}

ct_status ct_config_get_out_dir(const ct_config* cfg, char* buf, size_t buflen) {
    if (ct_status s = require(cfg && buf && buflen > 0, "null pointer argument")) return s;
    const std::string& dir = cfg->cfg.out_dir;
    if (dir.size() + 1 > buflen) return fail(CT_ERR_INVALID_ARGUMENT, "buffer too small");
    std::memcpy(buf, dir.c_str(), dir.size() + 1);
    return CT_OK;
}

ct_status ct_config_get_format(const ct_config* cfg, char* buf, size_t buflen) {
    if (ct_status s = require(cfg && buf && buflen > 0, "null pointer argument")) return s;
    const std::string& format = cfg->cfg.format;
    if (format.size() + 1 > buflen) return fail(CT_ERR_INVALID_ARGUMENT, "buffer too small");
    std::memcpy(buf, format.c_str(), format.size() + 1);
    return CT_OK;
}

void ct_config_free(ct_config* cfg) { delete cfg; }

/* ------------------------------------------------------------------ */

ct_status ct_run_tables(const ct_config* cfg, ct_table** out) {
    if (ct_status s = require(cfg && out, "null pointer argument")) return s;
    return guarded([&] {
        auto table = std::make_unique<ct_table>();
        table->table = ctput::run_tables(cfg->cfg);
        *out = table.release();
        return CT_OK;
    });
}

int ct_table_all_ok(const ct_table* table) { return table && table->table.all_ok ? 1 : 0; }

size_t ct_table_row_count(const ct_table* table) { return table ? table->table.rows.size() : 0; }

ct_status ct_table_row_p(const ct_table* table, size_t row, double* out) {
    if (ct_status s = require(table && out, "null pointer argument")) return s;
    if (row >= table->table.rows.size()) return fail(CT_ERR_INVALID_ARGUMENT, "row out of range");
    *out = table->table.rows[row].p;
    return CT_OK;
}

ct_status ct_table_cell(const ct_table* table, size_t row, ct_model model, ct_result_cell* out) {
    if (ct_status s = require(table && out, "null pointer argument")) return s;
    if (row >= table->table.rows.size()) return fail(CT_ERR_INVALID_ARGUMENT, "row out of range");
    if (model < 0 || model >= ctput::kNumModels)
        return fail(CT_ERR_INVALID_ARGUMENT, "bad model");
    const auto& cell = table->table.rows[row].cells[size_t(model)];
    if (!cell) {
        *out = {0, 0, 0.0, 0.0, 0.0};
        return CT_OK;
    }
    *out = {1, cell->ok ? 1 : 0, cell->mean_window, cell->goodput, cell->ci_halfwidth};
    return CT_OK;
}

ct_status ct_table_cell_note(const ct_table* table, size_t row, ct_model model, char* buf,
                             size_t buflen) {
    if (ct_status s = require(table && buf && buflen > 0, "null pointer argument")) return s;
    if (row >= table->table.rows.size()) return fail(CT_ERR_INVALID_ARGUMENT, "row out of range");
    if (model < 0 || model >= ctput::kNumModels)
        return fail(CT_ERR_INVALID_ARGUMENT, "bad model");
    const auto& cell = table->table.rows[row].cells[size_t(model)];
    const std::string& note = cell ? cell->note : std::string();
    const size_t n = std::min(note.size(), buflen - 1);
    std::memcpy(buf, note.data(), n);
    buf[n] = '\0';
    return CT_OK;
}

ct_status ct_table_write_csv(const ct_table* table, const char* path) {
    if (ct_status s = require(table && path, "null pointer argument")) return s;
    try {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error(std::string("cannot open for writing: ") + path);
        os << ctput::tables_csv(table->table);
        return CT_OK;
    } catch (const std::exception& e) {
        return fail(CT_ERR_IO, e.what());
    }
}

ct_status ct_table_write_markdown(const ct_table* table, const char* path) {
    if (ct_status s = require(table && path, "null pointer argument")) return s;
    try {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error(std::string("cannot open for writing: ") + path);
        os << ctput::tables_markdown(table->table);
        return CT_OK;
    } catch (const std::exception& e) {
        return fail(CT_ERR_IO, e.what());
    }
}

void ct_table_free(ct_table* table) { delete table; }

ct_status ct_run_figures(const ct_config* cfg, const char* out_dir) {
    if (ct_status s = require(cfg != nullptr, "null pointer argument")) return s;
    return guarded([&] {
        ctput::ExperimentConfig c = cfg->cfg;
        if (out_dir) c.out_dir = out_dir;
        ctput::run_figures(c);
        return CT_OK;
    });
}

}  // extern "C"
