// Command-line driver: run one scenario to completion and emit density
// frames (CSV + PGM), the fixed-point convergence log, per-step metrics,
// and a run manifest.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfgcrowd/errors.hpp"
#include "mfgcrowd/io.hpp"
#include "mfgcrowd/mfg_engine.hpp"
#include "mfgcrowd/scenario.hpp"

namespace fs = std::filesystem;
using namespace mfgcrowd;

namespace {

// Exit codes. 0 = success, 2 = usage, 3 = bad configuration, 4 = CFL
// failure, 5 = internal error.
constexpr int kUsageError = 2;
constexpr int kConfigError = 3;
constexpr int kCflError = 4;
constexpr int kInternalError = 5;

std::string frame_name(int step, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06d.%s", step, ext);
    return buf;
}

int run(const Scenario& scenario, const fs::path& out_dir, const std::set<int>& frame_steps) {
    fs::create_directories(out_dir);
    const Grid g = make_grid(scenario);

    nlohmann::ordered_json manifest;
    manifest["scenario"] = nlohmann::ordered_json::parse(serialize_config(scenario));
    manifest["engine"] = {{"tol", effective_tol(scenario)},
                          {"max_iters", scenario.solver.max_iters},
                          {"fictitious_play", scenario.solver.fictitious_play},
                          {"stagnation_window", scenario.solver.stagnation_window},
                          {"fp_rule", "uniform"},
                          {"theta_steps", static_cast<int>(std::llround(scenario.theta / g.dt))}};
    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
    outputs.push_back("manifest.json");
    outputs.push_back("convergence.csv");
    outputs.push_back("metrics.csv");
    for (int step : frame_steps) {
        outputs.push_back(frame_name(step, "csv"));
        outputs.push_back(frame_name(step, "pgm"));
    }
    manifest["outputs"] = outputs;

    // The manifest goes out before any frame so a crashed run still leaves
    // its intent on disk.
    {
        std::ofstream mf(out_dir / "manifest.json");
        mf << manifest.dump(2) << "\n";
    }

    const auto t_start = std::chrono::steady_clock::now();
    const SimulationResult result = run_simulation(scenario);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    double scale = 0.0;
    for (const auto& slice : result.density_history.slices) {
        for (double v : slice.values()) scale = std::max(scale, v);
    }
    if (scale <= 0.0) scale = 1.0;

    for (int step : frame_steps) {
        const DensityField& slice = result.density_history.slice(step);
        write_density_csv(slice, g, g.time_at(step), out_dir / frame_name(step, "csv"));
        write_pgm(slice, out_dir / frame_name(step, "pgm"), scale);
    }
    write_convergence_log(result.convergence, out_dir / "convergence.csv");
    write_metrics_csv(result, g, out_dir / "metrics.csv");

    manifest["pgm_scale"] = scale;
    manifest["duration_seconds"] = seconds;
    {
        std::ofstream mf(out_dir / "manifest.json");
        mf << manifest.dump(2) << "\n";
    }

    int not_converged = 0;
    for (const auto& rec : result.convergence) {
        if (rec.verdict != Verdict::Converged) ++not_converged;
    }
    std::cout << "done: " << g.nT << " steps, " << not_converged
              << " without fixed-point convergence, final mass "
              << format_double(total_mass(result.density_history.slices.back(), g)) << ", "
              << seconds << " s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"macroscopic crowd simulator with a sliding prediction window"};
    app.get_formatter()->column_width(34);

    std::string scenario_name;
    std::string config_path;
    std::string out_dir = "out";
    std::string fp_flag;
    std::vector<double> frame_times;
    int every = 0;
    double theta_override = -1.0;
    double tol_override = 0.0;
    int max_iters_override = 0;
    unsigned seed = 0;

    auto* opt_scenario = app.add_option("--scenario", scenario_name, "builtin scenario name")
                             ->check(CLI::IsMember({"test1", "test2", "test3", "test4", "test5"}));
    auto* opt_config = app.add_option("--config", config_path, "scenario JSON file");
    opt_scenario->excludes(opt_config);
    auto* opt_theta = app.add_option("--theta", theta_override, "override the prediction horizon");
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--frames", frame_times, "times to dump frames at (snapped to grid)")
        ->delimiter(',');
    app.add_option("--every", every, "dump a frame every N steps");
    app.add_option("--fictitious-play", fp_flag, "on|off")
        ->check(CLI::IsMember({"on", "off"}));
    auto* opt_tol = app.add_option("--tol", tol_override, "fixed-point tolerance override");
    auto* opt_iters =
        app.add_option("--max-iters", max_iters_override, "fixed-point iteration budget override");
    app.add_option("--seed", seed, "reserved; the scheme is deterministic")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    if (scenario_name.empty() && config_path.empty()) {
        std::cerr << "error: one of --scenario or --config is required\n";
        return kUsageError;
    }

    try {
        Scenario scenario = scenario_name.empty() ? parse_config_file(config_path)
                                                  : builtin_scenario(scenario_name);
        if (opt_theta->count()) scenario.theta = theta_override;
        if (opt_tol->count()) scenario.solver.tol = tol_override;
        if (opt_iters->count()) scenario.solver.max_iters = max_iters_override;
        if (fp_flag == "on") scenario.solver.fictitious_play = true;
        if (fp_flag == "off") scenario.solver.fictitious_play = false;
        validate(scenario);

        const Grid g = make_grid(scenario);
        std::set<int> frame_steps;
        for (double t : frame_times) {
            const int step = std::clamp(static_cast<int>(std::llround(t / g.dt)), 0, g.nT);
            frame_steps.insert(step);
        }
        if (every > 0) {
            for (int n = 0; n <= g.nT; n += every) frame_steps.insert(n);
            frame_steps.insert(g.nT);
        }
        if (frame_steps.empty() && frame_times.empty() && every == 0) {
            const int stride = std::max(1, g.nT / 10);
            for (int n = 0; n <= g.nT; n += stride) frame_steps.insert(n);
            frame_steps.insert(g.nT);
        }
        return run(scenario, out_dir, frame_steps);
    } catch (const CflError& e) {
        std::cerr << "CFL error: " << e.what() << "\n";
        return kCflError;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternalError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
}
