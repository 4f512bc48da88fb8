// smibctl: command-line front end.  All behavior lives in the library; this
// file only parses flags, loads the configuration and maps exceptions to
// exit codes (1 bad input, 2 design failure, 3 divergence, 4 acceptance).

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smib/acceptance.h"
#include "smib/config.h"
#include "smib/csvplot.h"
#include "smib/errors.h"
#include "smib/scenarios.h"
#include "smib/sim.h"

namespace {

smib::Config load(const std::string& path) {
    return path.empty() ? smib::default_config() : smib::load_config(path);
}

int cmd_run(const std::string& config_path, smib::ScenarioOptions opt,
            const std::string& scenario, bool all, int jobs) {
    if (all == !scenario.empty()) {
        std::cerr << "choose exactly one of --scenario <name> or --all\n";
        return 1;
    }
    const smib::Config cfg = load(config_path);
    if (all) {
        const auto results = smib::run_all_scenarios(cfg, opt, jobs);
        int worst = 0;
        for (const auto& r : results) {
            if (r.ok) {
                std::cout << "ok    " << r.name << "\n";
            } else {
                std::cout << "FAIL  " << r.name << "  (" << r.error << ")\n";
                worst = std::max(worst, r.exit_code);
            }
        }
        return worst;
    }
    const smib::ScenarioResult res = smib::run_scenario(cfg, scenario, opt);
    for (const auto& a : res.artifacts) std::cout << a << "\n";
    if (!res.ok) {
        std::cerr << scenario << ": " << res.error << "\n";
        return res.exit_code;
    }
    return 0;
}

int cmd_plot(const std::string& csv, std::vector<std::string> channels,
             std::string out_dir) {
    const smib::Trajectory tr = smib::read_trajectory_csv(csv);
    if (channels.empty()) channels = tr.channel_names();
    if (out_dir.empty()) {
        const auto parent = std::filesystem::path(csv).parent_path();
        out_dir = parent.empty() ? "." : parent.string();
    }
    for (const auto& name : channels) {
        std::vector<double> col;
        try {
            col = tr.channel(name);
        } catch (const smib::invalid_parameter&) {
            std::cerr << "unknown channel '" << name << "'; channels:";
            for (const auto& n : tr.channel_names()) std::cerr << " " << n;
            std::cerr << "\n";
            return 1;
        }
        const smib::PlotSeries series{name, tr.t, col};
        const std::string path = out_dir + "/" + name + ".svg";
        smib::atomic_write_text(path,
                                smib::render_svg_plot(name, "t [s]", name, {series}));
        std::cout << path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SMIB power-system dynamics and control workbench"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one scenario or the whole registry");
    std::string r_config, r_out = "out", r_scenario, r_integrator;
    double r_dt = 0;
    std::uint64_t r_seed = 0;
    bool r_all = false, r_nolim = false;
    int r_jobs = 0;
    run->add_option("--config", r_config, "parameter/operating-point override file");
    run->add_option("--out", r_out, "artifact root directory")->capture_default_str();
    run->add_option("--scenario", r_scenario, "scenario name (see `run` with a bad name)");
    run->add_flag("--all", r_all, "run every registered scenario");
    run->add_option("--integrator", r_integrator, "integration scheme")
        ->check(CLI::IsMember({"rk4", "rk45"}));
    run->add_option("--dt", r_dt, "fixed rk4 step [s]")->check(CLI::PositiveNumber);
    run->add_option("--seed", r_seed, "seed for the placement reduction");
    run->add_flag("--no-limits", r_nolim, "disable actuator limits everywhere");
    run->add_option("--jobs", r_jobs, "worker threads for --all (0 = hardware)");

    auto* verify = app.add_subcommand("verify", "run the acceptance regression gate");
    std::string v_config;
    verify->add_option("--config", v_config, "parameter/operating-point override file");

    auto* plot = app.add_subcommand("plot", "render trajectory channels as SVG");
    std::string p_csv, p_out;
    std::vector<std::string> p_channels;
    plot->add_option("csv", p_csv, "trajectory.csv produced by run")->required();
    plot->add_option("--channels", p_channels, "channel names (default: all)");
    plot->add_option("--out", p_out, "output directory (default: alongside the csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed()) {
            smib::ScenarioOptions opt;
            opt.out_dir = r_out;
            opt.seed = r_seed;
            opt.no_limits = r_nolim;
            if (!r_integrator.empty())
                opt.integrator = r_integrator == "rk4" ? smib::SimOptions::Method::rk4
                                                       : smib::SimOptions::Method::rk45;
            if (run->count("--dt")) opt.dt = r_dt;
            return cmd_run(r_config, opt, r_scenario, r_all, r_jobs);
        }
        if (verify->parsed()) {
            const bool ok = smib::run_acceptance(load(v_config), std::cout);
            return ok ? 0 : 4;
        }
        if (plot->parsed()) return cmd_plot(p_csv, p_channels, p_out);
    } catch (const smib::design_failure& e) {
        std::cerr << "design failure: " << e.what() << "\n";
        return 2;
    } catch (const smib::sim_divergence& e) {
        std::cerr << "simulation divergence: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
