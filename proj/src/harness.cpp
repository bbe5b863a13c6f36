#include "ctput/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctput/fluid.hpp"

namespace ctput {

namespace {

std::string sanitize_note(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ResultCell failed_cell(const std::exception& e) {
    ResultCell cell;
    cell.ok = false;
    cell.note = sanitize_note(std::string("FAILED: ") + e.what());
    return cell;
}

ResultCell fluid_cell(double p, const CompoundParams& prm) {
    ResultCell cell;
    cell.mean_window = fluid_avg_window(p, prm);
    cell.goodput = goodput(cell.mean_window, p, prm);
    cell.ok = true;
    return cell;
}

ResultCell sim_cell(double p, const ExperimentConfig& cfg, uint64_t stream_base) {
    const uint64_t warmup = cfg.sim.effective_warmup();
    const ChainRun run = simulate_replicas(p, cfg.sim.n_rounds, warmup, cfg.seed,
                                           cfg.sim.n_replicas, cfg.params, stream_base);
    ResultCell cell;
    cell.mean_window = run.estimate.mean_window;
    cell.goodput = run.estimate.goodput;
    cell.ci_halfwidth = run.estimate.ci_halfwidth;
    cell.note = "replicas=" + std::to_string(cfg.sim.n_replicas) +
                ";rounds=" + std::to_string(cfg.sim.n_rounds) +
                ";warmup=" + std::to_string(warmup);
    cell.ok = true;
    return cell;
}

ResultCell stationary_cell(double p, const CompoundParams& prm) {
    const StationaryDist dist = stationary_auto(p, prm);
    ResultCell cell;
    cell.mean_window = dist.mean;
    cell.goodput = goodput(dist.mean, p, prm);
    cell.note = "w_max=" + std::to_string(dist.w_max) + ";tail_mass=" +
                fmt("%.3e", dist.tail_mass) + ";sweeps=" + std::to_string(dist.iterations);
    cell.ok = true;
    return cell;
}

ResultCell approx_cell(double p, const GbarEstimate& gbar, const CompoundParams& prm) {
    ResultCell cell;
    cell.mean_window = approx_avg_window(p, gbar.mean_g, prm);
    cell.goodput = approx_goodput(p, gbar.mean_g, prm);
    cell.note = "mean_g=" + fmt("%.6f", gbar.mean_g) + ";coeff=" + fmt("%.6f", 1.0 / gbar.mean_g);
    cell.ok = true;
    return cell;
}

}  // namespace

TableResult run_tables(const ExperimentConfig& cfg) {
    validate_config(cfg);
    TableResult table;

    std::optional<std::string> gbar_error;
    if (cfg.has_model(Model::Approx)) {
        try {
            table.gbar = estimate_mean_gbar(cfg.limit.n, cfg.limit.burn_in, cfg.limit.v0,
                                            cfg.seed, streams::kMeanGbar, cfg.params);
        } catch (const std::exception& e) {
            gbar_error = e.what();
        }
    }

    for (size_t i = 0; i < cfg.p_list.size(); ++i) {
        const double p = cfg.p_list[i];
        ResultRow row;
        row.p = p;

        for (Model m : cfg.models) {
            ResultCell cell;
            try {
                switch (m) {
                    case Model::Fluid: cell = fluid_cell(p, cfg.params); break;
                    case Model::Sim:
                        cell = sim_cell(p, cfg, streams::kSimCellBase + i * streams::kReplicaSpan);
                        break;
                    case Model::Stationary: cell = stationary_cell(p, cfg.params); break;
                    case Model::Approx:
                        if (gbar_error)
                            throw std::runtime_error("mean_g estimate failed: " + *gbar_error);
                        cell = approx_cell(p, *table.gbar, cfg.params);
                        break;
                }
            } catch (const std::exception& e) {
                cell = failed_cell(e);
            }
            if (!cell.ok) table.all_ok = false;
            row.cells[size_t(m)] = cell;
        }

        for (const auto& ref : cfg.reference)
            if (ref.p == p) row.reference = ref;

        // Relative window error of each model against the baseline column.
        const auto& base = row.cells[size_t(cfg.baseline)];
        if (base && base->ok) {
            for (int m = 0; m < kNumModels; ++m) {
                auto& cell = row.cells[size_t(m)];
                if (cell && cell->ok && Model(m) != cfg.baseline)
                    cell->rel_err = (cell->mean_window - base->mean_window) / base->mean_window;
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string tables_csv(const TableResult& table) {
    std::ostringstream os;
    os << "p,model,mean_window_packets,goodput_pkts_per_sec,ci_halfwidth,notes\n";
    char buf[256];
    for (const auto& row : table.rows) {
        for (int m = 0; m < kNumModels; ++m) {
            const auto& cell = row.cells[size_t(m)];
            if (!cell) continue;
            if (cell->ok) {
                std::snprintf(buf, sizeof buf, "%.6g,%s,%.4f,%.4f,%.4f,", row.p,
                              model_name(Model(m)), cell->mean_window, cell->goodput,
                              cell->ci_halfwidth);
                os << buf;
                std::string note = cell->note;
                if (!std::isnan(cell->rel_err)) {
                    if (!note.empty()) note += ';';
                    note += "rel_err=" + fmt("%+.4f%%", 100.0 * cell->rel_err);
                }
                os << note << "\n";
            } else {
                std::snprintf(buf, sizeof buf, "%.6g,%s,,,,", row.p, model_name(Model(m)));
                os << buf << cell->note << "\n";
            }
        }
        if (row.reference) {
            std::snprintf(buf, sizeof buf, "%.6g,reference,%.4f,%.4f,,user-supplied\n", row.p,
                          row.reference->window, row.reference->goodput);
            os << buf;
        }
    }
    return os.str();
}

namespace {

void markdown_table(std::ostringstream& os, const TableResult& table, bool window,
                    bool any_reference) {
    os << (window ? "### Average window size (packets)\n\n"
                  : "### Goodput (packets/second)\n\n");
    std::vector<std::string> headers = {"p"};
    if (any_reference) headers.push_back("reference");
    for (int m = 0; m < kNumModels; ++m) headers.emplace_back(model_name(Model(m)));

    std::vector<std::vector<std::string>> grid;
    for (const auto& row : table.rows) {
        std::vector<std::string> line;
        line.push_back(fmt("%.6g", row.p));
        if (any_reference) {
            if (row.reference)
                line.push_back(fmt("%.2f", window ? row.reference->window
                                                  : row.reference->goodput));
            else
                line.emplace_back("");
        }
        for (int m = 0; m < kNumModels; ++m) {
            const auto& cell = row.cells[size_t(m)];
            if (!cell)
                line.emplace_back("");
            else if (!cell->ok)
                line.emplace_back("failed");
            else
                line.push_back(fmt("%.2f", window ? cell->mean_window : cell->goodput));
        }
        grid.push_back(std::move(line));
    }

    std::vector<size_t> width(headers.size());
    for (size_t c = 0; c < headers.size(); ++c) {
        width[c] = headers[c].size();
        for (const auto& line : grid) width[c] = std::max(width[c], line[c].size());
    }
    auto emit_row = [&](const std::vector<std::string>& line) {
        os << "|";
        for (size_t c = 0; c < line.size(); ++c) {
            os << ' ' << line[c] << std::string(width[c] - line[c].size(), ' ') << " |";
        }
        os << "\n";
    };
    emit_row(headers);
    os << "|";
    for (size_t c = 0; c < headers.size(); ++c) os << std::string(width[c] + 2, '-') << "|";
    os << "\n";
    for (const auto& line : grid) emit_row(line);
    os << "\n";
}

}  // namespace

std::string tables_markdown(const TableResult& table) {
    bool any_reference = false;
    for (const auto& row : table.rows) any_reference |= row.reference.has_value();
    std::ostringstream os;
    markdown_table(os, table, /*window=*/true, any_reference);
    markdown_table(os, table, /*window=*/false, any_reference);
    if (table.gbar)
        os << "mean scaled inter-loss time: " << fmt("%.6f", table.gbar->mean_g) << " (ci "
           << fmt("%.6f", table.gbar->ci_halfwidth) << ", coefficient "
           << fmt("%.6f", 1.0 / table.gbar->mean_g) << ")\n";
    return os.str();
}

namespace {

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << text;
}

}  // namespace

std::vector<std::string> write_tables(const TableResult& table, const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::string> paths;
    const std::string csv_path = (std::filesystem::path(cfg.out_dir) / "tables.csv").string();
    write_text_file(csv_path, tables_csv(table));
    paths.push_back(csv_path);
    if (cfg.format == "md") {
        const std::string md_path = (std::filesystem::path(cfg.out_dir) / "tables.md").string();
        write_text_file(md_path, tables_markdown(table));
        paths.push_back(md_path);
    }
    return paths;
}

std::vector<std::string> run_figures(const ExperimentConfig& cfg) {
    validate_config(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::string> paths;

    // Sawtooth convergence from below and above the fixed point.
    const double p_fig = 1e-3;
    for (double x0 : {10.0, 100.0}) {
        const FluidTrajectory traj =
            simulate_fluid(x0, p_fig, /*n_cycles=*/200, /*sample_dt=*/cfg.params.rtt, cfg.params);
        const std::string name = "fluid_trajectory_x0_" + std::to_string(int(x0)) + ".csv";
        const std::string path = (std::filesystem::path(cfg.out_dir) / name).string();
        write_trajectory_csv(traj, path);
        paths.push_back(path);
    }

    // Running mean of the scaled inter-loss time for three initial
    // conditions of the scaled window chain.
    std::ostringstream os;
    os << "n,running_mean_g,v0\n";
    const double v0s[] = {0.0, 0.1, 2.0};
    char buf[96];
    for (size_t idx = 0; idx < 3; ++idx) {
        CounterRng rng(cfg.seed, streams::kFigureTraceBase + idx);
        const VbarPath path = run_vbar_chain(cfg.limit.n, v0s[idx], rng, cfg.params);
        double sum = 0.0;
        for (size_t i = 0; i < path.g.size(); ++i) {
            sum += path.g[i];
            std::snprintf(buf, sizeof buf, "%zu,%.8f,%.1f\n", i + 1, sum / double(i + 1),
                          v0s[idx]);
            os << buf;
        }
    }
    const std::string gbar_path =
        (std::filesystem::path(cfg.out_dir) / "gbar_running_mean.csv").string();
    write_text_file(gbar_path, os.str());
    paths.push_back(gbar_path);
    return paths;
}

}  // namespace ctput
