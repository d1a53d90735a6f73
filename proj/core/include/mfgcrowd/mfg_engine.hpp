#pragma once

#include <span>
#include <string>
#include <vector>

#include "mfgcrowd/fields.hpp"
#include "mfgcrowd/fokker_planck.hpp"
#include "mfgcrowd/hjb.hpp"
#include "mfgcrowd/scenario.hpp"

namespace mfgcrowd {

struct WindowSolveOptions {
    int max_iters = 50;
    double tol = 1e-4;
    bool use_fictitious_play = false;
    int stagnation_window = 5;
};

enum class Verdict { Converged, Stabilized, Exhausted };
const char* to_string(Verdict v);

/// Fixed-point diagnostics of one outer step's window solve.
struct ConvergenceRecord {
    int outer_step = 0;
    std::vector<double> iterates;  ///< E_1, E_2, ...
    Verdict verdict = Verdict::Converged;
};

/// Everything the solvers need, derived once from a Scenario.
struct EngineSetup {
    Grid grid;
    ControlSet controls;
    SensoryStencilSet stencils;
    InteractionParams params;
    CostSpec costs;
    TargetSchedule schedule;  ///< empty in finite-horizon mode
    double sigma = 0.0;
    int theta_steps = 0;
    WindowSolveOptions opts;

    bool minimum_time() const { return costs.mode == ProblemMode::MinimumTime; }
};

EngineSetup make_engine_setup(const Scenario& s);

struct SimulationResult {
    SpaceTimeDensity density_history;
    ControlField control_history;
    std::vector<ConvergenceRecord> convergence;
    std::vector<StepReport> step_reports;          ///< one per outer step
    std::vector<double> evacuated_over_time;       ///< cumulative, indices 0..nT
    std::vector<std::string> exit_labels;          ///< minimum-time mode
    std::vector<std::vector<double>> evacuated_per_exit;  ///< [exit][0..nT], cumulative
};

/// Ancillary forward prediction: advances rho_s for min(theta_steps, nT-s)
/// steps with the iterate's synthesized controls, under the exits believed
/// at time s. Returns the predicted slices (possibly empty).
std::vector<DensityField> predict_forward(const DensityField& rho_s, const ControlField& alpha,
                                          int s_index, int theta_steps, const EngineSetup& ctx);

/// Assembles the density seen by planners at step s: acquired history up to
/// s, the prediction after it, and the last predicted slice frozen to the
/// final time.
SpaceTimeDensity build_rho_theta(std::span<const DensityField> history,
                                 std::span<const DensityField> prediction, const Grid& g);

struct WindowSolve {
    ControlField alpha;
    ConvergenceRecord record;
};

/// The forward-backward fixed point at outer step s: alternate HJB sweep
/// (optionally on the fictitious-play average) and forward prediction until
/// the L1 distance between density iterates converges, stabilizes, or the
/// iteration budget runs out. Iterate 0 freezes rho(.,s) to the horizon.
WindowSolve solve_window_mfg(std::span<const DensityField> history, int s_index,
                             const EngineSetup& ctx);

/// Full algorithm: at each outer step solve the window MFG, keep only the
/// current-time slice of the synthesized control, advance the main density
/// one step, and absorb mass on active exits.
SimulationResult run_simulation(const Scenario& scenario);

}  // namespace mfgcrowd
