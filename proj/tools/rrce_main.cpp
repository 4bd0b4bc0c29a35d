// SPDX-License-Identifier: Apache-2.0
// Command-line front end: rrce {design|estimate|sweep|identities} [flags]
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rrce/app.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reduced-rank channel estimation for single-carrier massive MIMO"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<long long> mc_trials;
    std::string axis;
    std::string grid;
    std::string beam;
    std::string estimator;
    std::optional<long long> dim;
    bool export_pattern = false;

    auto add_common = [&](CLI::App* a) {
        a->add_option("--config", config_path, "JSON run configuration");
        a->add_option("--out", out_dir, "Output directory");
        a->add_option("--seed", seed, "Random seed");
        a->add_option("--threads", threads, "Worker threads (0 = all cores)");
        a->add_option("--mc-trials", mc_trials, "Monte Carlo trials per point (0 = analytic only)");
        a->add_option("--axis", axis, "Sweep axis: dimension, snr_db, inr_db, separation_deg");
        a->add_option("--grid", grid, "Sweep grid: comma list or start:stop[:step]");
        a->add_option("--beam", beam, "Beam kind(s): geb, dft (comma separated)");
        a->add_option("--estimator", estimator, "Estimator name(s), comma separated");
        a->add_option("--dim", dim, "Pre-beamformer dimension D");
        a->add_flag("--export-pattern", export_pattern, "Write the beam-pattern CSV (design)");
    };
    add_common(&app);
    std::vector<CLI::App*> subs;
    for (const char* name : {"design", "estimate", "sweep", "identities"}) {
        CLI::App* s = app.add_subcommand(name, std::string("Run the ") + name + " command");
        add_common(s);
        subs.push_back(s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rrce::kExitConfig;
    }

    try {
        rrce::RunConfig cfg = config_path.empty() ? rrce::parse_config_text("")
                                                  : rrce::parse_config_file(config_path);
        for (CLI::App* s : subs) {
            if (s->parsed()) {
                cfg.command = rrce::parse_command(s->get_name());
            }
        }
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed) cfg.scenario.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (mc_trials) {
            cfg.mc_trials = static_cast<rrce::Index>(*mc_trials);
            cfg.sweep.mc_trials = cfg.mc_trials;
        }
        if (!axis.empty()) {
            const rrce::SweepAxis a = rrce::parse_axis(axis);
            if (a != cfg.sweep.axis && grid.empty()) {
                cfg.sweep.grid = rrce::default_grid(a);
            }
            cfg.sweep.axis = a;
        }
        if (!grid.empty()) cfg.sweep.grid = rrce::parse_grid(grid);
        if (!beam.empty()) {
            const auto beams = split_list(beam);
            cfg.sweep.beams = beams;
            cfg.estimate.beams = beams;
            cfg.design.beam = beams.front();
        }
        if (!estimator.empty()) {
            const auto ests = split_list(estimator);
            cfg.sweep.estimators = ests;
            cfg.estimate.estimators = ests;
        }
        if (dim) {
            cfg.sweep.dim = static_cast<rrce::Index>(*dim);
            cfg.design.dim = static_cast<rrce::Index>(*dim);
            cfg.estimate.dim = static_cast<rrce::Index>(*dim);
        }
        if (export_pattern) cfg.design.export_pattern = true;
        cfg.validate();
        return rrce::run(cfg, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return rrce::exit_code_for(e);
    }
}
