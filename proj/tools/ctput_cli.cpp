// Command-line front end for the Compound TCP throughput models. Talks
// to the shared library exclusively through the public C interface.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compound_tput.h"

namespace {

struct ConfigDeleter {
    void operator()(ct_config* c) const { ct_config_free(c); }
};
using ConfigPtr = std::unique_ptr<ct_config, ConfigDeleter>;

[[noreturn]] void die(const char* what, ct_status status) {
    std::fprintf(stderr, "error: %s: %s (%s)\n", what, ct_last_error(), ct_status_str(status));
    std::exit(1);
}

void check(ct_status status, const char* what) {
    if (status != CT_OK) die(what, status);
}

// Global options shared by every subcommand.
struct GlobalOpts {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::string out_dir;
    std::string format;
};

// Load the config file (or defaults) and apply CLI overrides. The seed
// falls back to COMPOUND_TPUT_SEED when neither flag nor file set one.
ConfigPtr make_config(const GlobalOpts& g) {
    ct_config* raw = nullptr;
    if (!g.config_path.empty())
        check(ct_config_load_file(g.config_path.c_str(), &raw), "loading config");
    else
        check(ct_config_create(&raw), "creating config");
    ConfigPtr cfg(raw);
    if (g.seed) {
        check(ct_config_set_seed(cfg.get(), *g.seed), "setting seed");
    } else if (!ct_config_seed_is_set(cfg.get())) {
        if (const char* env = std::getenv("COMPOUND_TPUT_SEED")) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (!end || *end != '\0' || end == env) {
                std::fprintf(stderr, "error: COMPOUND_TPUT_SEED is not a valid integer\n");
                std::exit(1);
            }
            check(ct_config_set_seed(cfg.get(), v), "setting seed from environment");
        }
    }
    if (!g.out_dir.empty()) check(ct_config_set_out_dir(cfg.get(), g.out_dir.c_str()), "out dir");
    if (!g.format.empty()) check(ct_config_set_format(cfg.get(), g.format.c_str()), "format");
    return cfg;
}

ct_params params_of(const ConfigPtr& cfg) {
    ct_params prm;
    check(ct_config_get_params(cfg.get(), &prm), "reading params");
    return prm;
}

int run_fluid(const GlobalOpts& g, double p, double x0, unsigned cycles, double sample_dt,
              const std::string& traj_out) {
    ConfigPtr cfg = make_config(g);
    const ct_params prm = params_of(cfg);
    double xstar = 0, tau = 0, mean = 0, gput = 0;
    check(ct_fluid_fixed_point(&prm, p, &xstar), "fixed point");
    check(ct_fluid_period(&prm, p, &tau), "period");
    check(ct_fluid_avg_window(&prm, p, &mean), "average window");
    check(ct_goodput(&prm, mean, p, &gput), "goodput");
    std::printf("p:            %g\n", p);
    std::printf("fixed_point:  %.6f packets\n", xstar);
    std::printf("period:       %.6f s\n", tau);
    std::printf("mean_window:  %.6f packets\n", mean);
    std::printf("goodput:      %.6f packets/s\n", gput);
    if (!traj_out.empty()) {
        ct_trajectory* traj = nullptr;
        check(ct_fluid_simulate(&prm, x0, p, cycles, sample_dt, &traj), "trajectory");
        const ct_status s = ct_trajectory_write_csv(traj, traj_out.c_str());
        double last = 0;
        ct_trajectory_drop_window(traj, ct_trajectory_drop_count(traj) - 1, &last);
        ct_trajectory_free(traj);
        check(s, "writing trajectory");
        std::printf("trajectory:   %s (%u cycles from x0=%g, final drop window %.6f)\n",
                    traj_out.c_str(), cycles, x0, last);
    }
    return 0;
}

int run_simulate(const GlobalOpts& g, double p, uint64_t rounds, uint64_t warmup,
                 uint32_t replicas) {
    ConfigPtr cfg = make_config(g);
    const ct_params prm = params_of(cfg);
    if (rounds == 0) {
        uint64_t w = 0;
        uint32_t r = 0;
        check(ct_config_get_sim(cfg.get(), &rounds, &w, &r), "sim settings");
        if (warmup == 0) warmup = w;
        if (replicas == 0) replicas = r;
    }
    if (replicas == 0) replicas = 1;
    ct_sim_estimate est;
    check(ct_simulate_chain(&prm, p, rounds, warmup, ct_config_seed(cfg.get()), replicas, &est),
          "simulation");
    std::printf("p:                 %g\n", p);
    std::printf("mean_window:       %.6f +/- %.6f packets (95%%)\n", est.mean_window,
                est.ci_halfwidth);
    std::printf("goodput:           %.6f packets/s\n", est.goodput);
    std::printf("rounds x replicas: %" PRIu64 " (losses %" PRIu64 ")\n", est.n_rounds,
                est.n_losses);
    std::printf("interloss_packets: %.3f +/- %.3f (expect %.1f)\n", est.mean_interloss_packets,
                est.interloss_ci, 1.0 / p);
    return 0;
}

int run_stationary(const GlobalOpts& g, double p, uint32_t w_max) {
    ConfigPtr cfg = make_config(g);
    const ct_params prm = params_of(cfg);
    ct_stationary* dist = nullptr;
    check(ct_stationary_solve(&prm, p, w_max, &dist), "stationary solve");
    double mean = 0, tail = 0, gput = 0;
    ct_stationary_mean(dist, &mean);
    ct_stationary_tail_mass(dist, &tail);
    check(ct_goodput(&prm, mean, p, &gput), "goodput");
    std::printf("p:           %g\n", p);
    std::printf("mean_window: %.6f packets\n", mean);
    std::printf("goodput:     %.6f packets/s\n", gput);
    std::printf("w_max:       %u (tail mass %.3e, %" PRIu64 " sweeps)\n",
                ct_stationary_w_max(dist), tail, ct_stationary_iterations(dist));
    ct_stationary_free(dist);
    return 0;
}

int run_limit(const GlobalOpts& g, std::optional<uint64_t> n_flag,
              std::optional<uint64_t> burn_flag, std::optional<double> v0_flag,
              const std::vector<double>& p_eval) {
    ConfigPtr cfg = make_config(g);
    const ct_params prm = params_of(cfg);
    uint64_t n = 0, burn_in = 0;
    double v0 = 0.0;
    check(ct_config_get_limit(cfg.get(), &n, &burn_in, &v0), "limit settings");
    if (n_flag) n = *n_flag;
    if (burn_flag) burn_in = *burn_flag;
    if (v0_flag) v0 = *v0_flag;
    ct_gbar_estimate est;
    check(ct_estimate_mean_gbar(&prm, n, burn_in, v0, ct_config_seed(cfg.get()), &est),
          "limit-chain estimate");
    std::printf("samples:      %" PRIu64 " (burn-in %" PRIu64 ", v0 %g)\n", est.n_samples,
                est.burn_in, v0);
    std::printf("mean_g:       %.6f +/- %.6f (95%%)\n", est.mean_g, est.ci_halfwidth);
    std::printf("coefficient:  %.6f (window = coeff * p^(-1/(2-k)))\n", 1.0 / est.mean_g);
    for (double p : p_eval) {
        double mean = 0, gput = 0;
        check(ct_approx_avg_window(&prm, p, est.mean_g, &mean), "approx window");
        check(ct_approx_goodput(&prm, p, est.mean_g, &gput), "approx goodput");
        std::printf("p=%-8g mean_window=%.4f goodput=%.4f\n", p, mean, gput);
    }
    return 0;
}

int run_tables_cmd(const GlobalOpts& g) {
    ConfigPtr cfg = make_config(g);
    ct_table* table = nullptr;
    check(ct_run_tables(cfg.get(), &table), "running tables");

    char out_dir[4096];
    check(ct_config_get_out_dir(cfg.get(), out_dir, sizeof out_dir), "out dir");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const std::string csv = std::string(out_dir) + "/tables.csv";
    check(ct_table_write_csv(table, csv.c_str()), "writing tables.csv");
    std::printf("wrote %s\n", csv.c_str());

    char format[16];
    check(ct_config_get_format(cfg.get(), format, sizeof format), "format");
    if (std::string(format) == "md") {
        const std::string md = std::string(out_dir) + "/tables.md";
        check(ct_table_write_markdown(table, md.c_str()), "writing tables.md");
        std::printf("wrote %s\n", md.c_str());
    }

    static const char* kModelNames[] = {"fluid", "sim", "stationary", "approx"};
    for (size_t row = 0; row < ct_table_row_count(table); ++row) {
        double p = 0;
        ct_table_row_p(table, row, &p);
        for (int m = 0; m < 4; ++m) {
            ct_result_cell cell;
            ct_table_cell(table, row, ct_model(m), &cell);
            if (!cell.present) continue;
            if (cell.ok) {
                std::printf("p=%-8g %-10s window=%10.4f goodput=%12.4f", p, kModelNames[m],
                            cell.mean_window, cell.goodput);
                if (cell.ci_halfwidth > 0) std::printf(" ci=%.4f", cell.ci_halfwidth);
                std::printf("\n");
            } else {
                char note[256];
                ct_table_cell_note(table, row, ct_model(m), note, sizeof note);
                std::printf("p=%-8g %-10s %s\n", p, kModelNames[m], note);
            }
        }
    }
    const int ok = ct_table_all_ok(table);
    ct_table_free(table);
    if (!ok) {
        std::fprintf(stderr, "error: one or more cells failed\n");
        return 1;
    }
    return 0;
}

int run_figures_cmd(const GlobalOpts& g) {
    ConfigPtr cfg = make_config(g);
    check(ct_run_figures(cfg.get(), nullptr), "running figures");
    char out_dir[4096];
    check(ct_config_get_out_dir(cfg.get(), out_dir, sizeof out_dir), "out dir");
    std::printf("wrote %s/fluid_trajectory_x0_10.csv\n", out_dir);
    std::printf("wrote %s/fluid_trajectory_x0_100.csv\n", out_dir);
    std::printf("wrote %s/gbar_running_mean.csv\n", out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compound TCP throughput models (fluid, window chain, small-p limit)"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    uint64_t seed_flag = 0;
    app.add_option("--config", g.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed_flag, "RNG seed (overrides config)");
    app.add_option("--out-dir", g.out_dir, "output directory (overrides config)");
    app.add_option("--format", g.format, "table format: csv or md")
        ->check(CLI::IsMember({"csv", "md"}));

    auto* fluid = app.add_subcommand("fluid", "deterministic-loss fluid model");
    double f_p = 1e-3, f_x0 = 10.0, f_dt = 0.1;
    unsigned f_cycles = 200;
    std::string f_traj;
    fluid->add_option("--p", f_p, "loss rate")->required();
    fluid->add_option("--x0", f_x0, "trajectory initial window");
    fluid->add_option("--cycles", f_cycles, "trajectory cycles");
    fluid->add_option("--sample-dt", f_dt, "trajectory sample spacing, seconds");
    fluid->add_option("--traj-out", f_traj, "write sawtooth trajectory CSV here");

    auto* sim = app.add_subcommand("simulate", "Monte-Carlo window-chain simulation");
    double s_p = 1e-3;
    uint64_t s_rounds = 0, s_warmup = 0;
    uint32_t s_replicas = 0;
    sim->add_option("--p", s_p, "loss rate")->required();
    sim->add_option("--rounds", s_rounds, "rounds per replica (default from config)");
    sim->add_option("--warmup", s_warmup, "warmup rounds (default 10% of rounds)");
    sim->add_option("--replicas", s_replicas, "parallel replicas (default from config)");

    auto* stat = app.add_subcommand("stationary", "truncated-state stationary solver");
    double st_p = 1e-2;
    uint32_t st_wmax = 0;
    stat->add_option("--p", st_p, "loss rate")->required();
    stat->add_option("--wmax", st_wmax, "truncation bound (0 = auto)");

    auto* limit = app.add_subcommand("limit", "small-p limit-chain estimate");
    uint64_t l_n = 0, l_burn = 0;
    double l_v0 = 0.0;
    std::vector<double> l_eval;
    auto* l_n_opt = limit->add_option("--n", l_n, "chain length (default from config)");
    auto* l_burn_opt = limit->add_option("--burn-in", l_burn, "burn-in samples");
    auto* l_v0_opt = limit->add_option("--v0", l_v0, "initial scaled window");
    limit->add_option("--eval-p", l_eval, "loss rates to evaluate the approximation at");

    auto* tables = app.add_subcommand("tables", "run every (p, model) cell and emit tables");
    auto* figures = app.add_subcommand("figures", "emit sawtooth and running-mean figure data");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0) g.seed = seed_flag;

    if (fluid->parsed()) return run_fluid(g, f_p, f_x0, f_cycles, f_dt, f_traj);
    if (sim->parsed()) return run_simulate(g, s_p, s_rounds, s_warmup, s_replicas);
    if (stat->parsed()) return run_stationary(g, st_p, st_wmax);
    if (limit->parsed()) {
        std::optional<uint64_t> n_flag, burn_flag;
        std::optional<double> v0_flag;
        if (l_n_opt->count()) n_flag = l_n;
        if (l_burn_opt->count()) burn_flag = l_burn;
        if (l_v0_opt->count()) v0_flag = l_v0;
        return run_limit(g, n_flag, burn_flag, v0_flag, l_eval);
    }
    if (tables->parsed()) return run_tables_cmd(g);
    if (figures->parsed()) return run_figures_cmd(g);
    return 0;
}
