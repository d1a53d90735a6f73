#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mfgcrowd/fields.hpp"
#include "mfgcrowd/hjb.hpp"
#include "mfgcrowd/interaction.hpp"

namespace mfgcrowd {

/// One uniform-density block of the initial condition.
struct RhoBlock {
    Rect rect;
    double mass = 0.0;
    bool operator==(const RhoBlock&) const = default;
};

/// An exit segment on one side of the domain, active during [t0, t1).
/// `lo`/`hi` span the segment along the side (x1 for top/bottom, x2 for
/// left/right).
struct ExitSpec {
    double t0 = 0.0;
    double t1 = 0.0;
    std::string side;  // "left" | "right" | "bottom" | "top"
    double lo = 0.0;
    double hi = 0.0;
    std::string label;
    bool operator==(const ExitSpec&) const = default;
};

struct SolverOptions {
    double tol = -1.0;  ///< <0 means "auto": 1e-4 * initial mass
    int max_iters = 50;
    bool fictitious_play = false;
    int stagnation_window = 5;
    bool operator==(const SolverOptions&) const = default;
};

/// Complete declarative description of one simulation.
struct Scenario {
    std::string name = "custom";

    // grid
    Vec2 domain_size{1.0, 1.0};
    int n1 = 50, n2 = 50;
    double T = 1.0;
    int nT = 200;

    // model
    double sigma = 0.0;
    double theta = 0.0;            ///< prediction horizon
    double forecast_horizon = 0.0; ///< exit-switch forecast horizon (Theta)
    InteractionParams interaction;
    int control_count = 32;

    // costs
    ProblemMode mode = ProblemMode::FiniteHorizon;
    RunningCost running;
    TerminalCost terminal;

    // initial density and exits
    std::vector<RhoBlock> rho0;
    std::vector<ExitSpec> exits;

    SolverOptions solver;

    double total_mass() const;
    double dt() const { return T / nT; }
    bool operator==(const Scenario&) const = default;
};

/// The paper-style built-in configurations test1..test5.
/// Throws ConfigError for unknown names.
Scenario builtin_scenario(std::string_view name);

/// Parses and validates a JSON scenario document (comments allowed).
/// Error messages name the offending field path.
Scenario parse_config(const std::string& text);
Scenario parse_config_file(const std::filesystem::path& path);

/// Canonical JSON serialization; parse_config(serialize_config(s)) == s.
std::string serialize_config(const Scenario& s);

/// Checks every scenario invariant; throws ConfigError naming the field.
void validate(const Scenario& s);

// Derived objects used by the engine.
Grid make_grid(const Scenario& s);
CostSpec cost_spec(const Scenario& s);
TargetSchedule target_schedule(const Scenario& s, const Grid& g);
DensityField initial_density(const Scenario& s, const Grid& g);

/// Effective fixed-point tolerance: explicit value or 1e-4 * initial mass.
double effective_tol(const Scenario& s);

/// A-priori velocity bound: max control speed (1) plus the sharp repulsion
/// bound c_rep * max(rho0) * pi * (R - R0).
double a_priori_vmax(const Scenario& s);

}  // namespace mfgcrowd
