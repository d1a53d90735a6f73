#pragma once

#include <cstdint>
#include <span>

#include "mfgcrowd/fields.hpp"
#include "mfgcrowd/interaction.hpp"

namespace mfgcrowd {

/// Conservation audit of a single push-forward step.
struct StepReport {
    double mass_before = 0.0;
    double mass_after = 0.0;
    double mass_evacuated = 0.0;
    double max_speed_seen = 0.0;
};

/// Scatter weights distributing one cell's mass over its 3x3 neighborhood,
/// indexed w[di+1][dj+1]. Convex combination (sums to 1) under CFL.
struct GammaWeights {
    double w[3][3] = {};
};

/// Overlap weights for a one-step displacement x_disp = dt*V.
/// Throws CflError when |x_disp| exceeds one cell in either component.
GammaWeights gamma_weights(Vec2 x_disp, const Grid& g);

struct PushForwardResult {
    DensityField density;
    StepReport report;
};

/// Advances a density slice one time step: per-cell velocity from the
/// synthesized control plus repulsion, wall projection, mass scatter by
/// gamma weights, then explicit 5-point diffusion with zero-flux walls.
///
/// `alpha` holds 1-based indices into `directions` for every cell.
/// Throws CflError if any displacement exceeds a cell, InternalError if the
/// scheme produces a negative density beyond rounding.
PushForwardResult push_forward_step(const DensityField& rho,
                                    std::span<const std::uint16_t> alpha,
                                    std::span<const Vec2> directions, const Grid& g,
                                    const SensoryStencilSet& st, const InteractionParams& p,
                                    const WallMask& walls, double sigma);

/// Removes the density sitting on target cells (mass leaving through an
/// exit) and returns the evacuated mass.
double absorb_target_mass(DensityField& rho, std::span<const Cell> target_cells, const Grid& g);

}  // namespace mfgcrowd
