#pragma once
// Bundled scenario registry: each named scenario wires a plant, a controller
// and an operating point, runs it, and writes its artifacts
// (trajectory.csv, metrics.txt, statespace.csv / gains.txt where produced)
// under <out>/<name>/.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smib/config.h"
#include "smib/sim.h"

namespace smib {

struct ScenarioOptions {
    std::string out_dir = "out";
    std::optional<SimOptions::Method> integrator;  // CLI override
    std::optional<double> dt;                      // rk4 step override
    std::uint64_t seed = 0;                        // placement seed
    bool no_limits = false;                        // force actuator limits off
};

struct ScenarioResult {
    std::string name;
    bool ok = true;
    int exit_code = 0;          // 0 ok, 2 design failure, 3 divergence
    std::string error;
    std::vector<std::string> artifacts;
    Metrics metrics;
    Trajectory trajectory;      // the primary trajectory, kept for callers
};

// registered names, in presentation order, with one-line descriptions
std::vector<std::string> scenario_names();
std::string scenario_description(const std::string& name);
bool scenario_exists(const std::string& name);

// Run one scenario.  Unknown names and design-stage breakdowns throw
// (invalid_parameter / design_failure); simulation divergence is captured in
// the result (ok = false, exit_code = 3) after the partial artifacts are
// written, so callers can still inspect what was produced.
ScenarioResult run_scenario(const Config& cfg, const std::string& name,
                            const ScenarioOptions& opt);

// run every scenario in a small work pool (outputs go to distinct
// directories); failures are captured per result instead of thrown
std::vector<ScenarioResult> run_all_scenarios(const Config& cfg,
                                              const ScenarioOptions& opt,
                                              int jobs = 0);

}  // namespace smib
