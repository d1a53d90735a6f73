#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfgcrowd/fields.hpp"
#include "mfgcrowd/interaction.hpp"

namespace mfgcrowd {

/// Discrete admissible control set: K unit vectors on the circle,
/// a_k = (cos(2 pi k / K), sin(2 pi k / K)) for k = 1..K.
class ControlSet {
  public:
    static ControlSet unit_circle(int K);

    int size() const { return static_cast<int>(dirs_.size()); }
    Vec2 direction(int k) const { return dirs_[k - 1]; }  ///< k is 1-based
    std::span<const Vec2> directions() const { return dirs_; }

  private:
    std::vector<Vec2> dirs_;
};

enum class ProblemMode { FiniteHorizon, MinimumTime };

struct RunningCost {
    enum class Kind { Constant, LinearX1, LinearRho };
    Kind kind = Kind::Constant;
    double c0 = 0.0;  ///< Constant value, or offset of the linear-in-x1 family
    double c1 = 0.0;  ///< slope of the linear-in-x1 family
    double c = 0.0;   ///< factor of the linear-in-density family

    double eval(Vec2 x, double rho) const {
        switch (kind) {
            case Kind::Constant: return c0;
            case Kind::LinearX1: return c0 + c1 * x.x;
            case Kind::LinearRho: return c * rho;
        }
        return 0.0;
    }
    bool depends_on_density() const { return kind == Kind::LinearRho; }
    bool operator==(const RunningCost&) const = default;
};

struct TerminalCost {
    enum class Kind { DistanceTo, Constant };
    Kind kind = Kind::DistanceTo;
    Vec2 center;
    double value = 0.0;

    double eval(Vec2 x) const {
        return kind == Kind::DistanceTo ? norm(x - center) : value;
    }
    bool operator==(const TerminalCost&) const = default;
};

struct CostSpec {
    ProblemMode mode = ProblemMode::FiniteHorizon;
    RunningCost running;
    TerminalCost terminal;
};

/// One target segment: the boundary cells acting as exit during [t0, t1).
struct TargetSegment {
    double t0 = 0.0;
    double t1 = 0.0;
    std::string label;
    std::vector<Cell> cells;
};

/// Piecewise-constant-in-time exit geometry, plus the forecast horizon that
/// controls when agents learn of a scheduled switch.
struct TargetSchedule {
    std::vector<TargetSegment> segments;
    double forecast_horizon = 0.0;  ///< how far in advance a switch is known

    bool empty() const { return segments.empty(); }
    double end_time() const;

    /// Whether a segment is active at time t. Segments own [t0, t1); the
    /// schedule's final instant belongs to the segments ending there.
    bool is_active(const TargetSegment& seg, double t) const;

    /// Union of the cells of every segment active at time t.
    std::vector<Cell> active_cells(double t) const;

    /// Earliest time a segment ends before the schedule does (the switch),
    /// or nullopt for a static target.
    std::optional<double> first_switch_time() const;

    /// The schedule as believed by agents planning at outer time s: before
    /// switch_time - forecast_horizon they extrapolate the currently active
    /// exits to all times; afterwards they know the true schedule.
    TargetSchedule believed_from(double s) const;
};

/// Wall mask with the given cells open.
WallMask wall_mask_for(const Grid& g, std::span<const Cell> open_cells);

/// Explicit-Euler foot of the characteristic from cell (i,j) under control
/// direction a (the k-th entry of the stencil set): center + dt * V, with V
/// wall-projected and the result clamped into the interpolation hull.
Vec2 characteristic_foot(int i, int j, Vec2 a, int k, const DensityField& rho_slice,
                         const SensoryStencilSet& st, const InteractionParams& p,
                         const WallMask& walls, const Grid& g);

/// Finite saturation constant standing in for +infinity on walls.
double finite_horizon_wall_value(const TerminalCost& terminal, const Grid& g);
double minimum_time_wall_value(const Grid& g);

/// Backward semi-Lagrangian sweep for the finite-horizon problem.
/// phi(nT) = g at cell centers; each backward step minimizes the
/// interpolated next slice at the K characteristic feet plus dt * running
/// cost, with explicit 5-point diffusion and boundary cells saturated at
/// the wall value. If alpha_out is given it receives the synthesized
/// control for every slice (identical to synthesize_control).
ValueField sl_backward_sweep(const SpaceTimeDensity& rho_theta, const CostSpec& costs,
                             const ControlSet& controls, const Grid& g,
                             const SensoryStencilSet& st, const InteractionParams& p,
                             double sigma, ControlField* alpha_out = nullptr);

/// Backward sweep for the minimum-time problem: unit running cost, no
/// diffusion, value 0 pinned on the believed-active target cells and the
/// wall value on the rest of the boundary. `believed_at` is the outer time
/// at which beliefs are formed (drives the forecast logic).
ValueField minimum_time_sweep(const SpaceTimeDensity& rho_theta, const TargetSchedule& schedule,
                              double believed_at, const ControlSet& controls, const Grid& g,
                              const SensoryStencilSet& st, const InteractionParams& p,
                              ControlField* alpha_out = nullptr);

/// Optimal control per cell per slice: the argmin over the K candidate
/// values, ties broken by the lowest control index. Pass the schedule and
/// belief time in minimum-time mode so feet see the right exits.
ControlField synthesize_control(const ValueField& phi, const SpaceTimeDensity& rho_theta,
                                const CostSpec& costs, const ControlSet& controls, const Grid& g,
                                const SensoryStencilSet& st, const InteractionParams& p,
                                const TargetSchedule* schedule = nullptr,
                                double believed_at = 0.0);

}  // namespace mfgcrowd
