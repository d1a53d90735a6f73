#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfgcrowd/fields.hpp"
#include "mfgcrowd/geometry.hpp"
#include "mfgcrowd/grid.hpp"

namespace mfgcrowd {

/// Repulsion model parameters: strength and annulus radii of the sensory
/// region ahead of the walking direction.
struct InteractionParams {
    double c_rep = 0.0;
    double r0 = 0.0;
    double r = 0.0;

    bool active() const { return c_rep > 0.0; }
    bool operator==(const InteractionParams&) const = default;
};

/// One cell offset in a sensory stencil, with the premultiplied midpoint
/// kernel -(zeta-y)/|zeta-y|^2 * dx1*dx2 baked in (strength applied later).
struct StencilEntry {
    int di = 0;
    int dj = 0;
    Vec2 kernel;
};

/// Per-direction cell stencils discretizing the half-annulus sensory region.
/// Cells are classified by their center offset: R0 <= |offset| <= R and
/// offset . a > 0 strictly. Immutable after build.
class SensoryStencilSet {
  public:
    SensoryStencilSet() = default;

    static SensoryStencilSet build(const Grid& g, const InteractionParams& p,
                                   std::span<const Vec2> directions);

    int control_count() const { return static_cast<int>(per_control_.size()); }
    /// k is 1-based, matching control indices.
    std::span<const StencilEntry> for_control(int k) const { return per_control_[k - 1]; }
    int max_radius_cells() const { return max_radius_cells_; }

  private:
    std::vector<std::vector<StencilEntry>> per_control_;
    int max_radius_cells_ = 0;
};

/// Midpoint-rule repulsion velocity at cell (i,j) for control direction k.
/// Out-of-grid stencil neighbors contribute zero.
Vec2 interaction_velocity(const DensityField& rho, int i, int j, int k,
                          const SensoryStencilSet& st, const InteractionParams& p);

/// V = a + V_int.
constexpr Vec2 total_velocity(Vec2 a, Vec2 v_int) { return a + v_int; }

/// Marks which boundary cells are open (active exits); everything else on
/// the boundary is an impermeable wall.
struct WallMask {
    int n1 = 0, n2 = 0;
    std::vector<std::uint8_t> open;

    static WallMask closed(const Grid& g) {
        return {g.n1, g.n2, std::vector<std::uint8_t>(static_cast<size_t>(g.n1) * g.n2, 0)};
    }
    bool is_open(int i, int j) const { return open[static_cast<size_t>(j) * n1 + i] != 0; }
    void set_open(int i, int j) { open[static_cast<size_t>(j) * n1 + i] = 1; }
};

/// Zeroes outward-pointing velocity components at boundary cells, unless the
/// cell is an open exit. Components are treated independently, so corners
/// lose both. Idempotent.
Vec2 project_boundary_velocity(Vec2 v, int i, int j, const Grid& g, const WallMask& walls);

/// Cells within a Chebyshev radius of any positive-density cell. Cells
/// outside the mask see zero repulsion, which solvers use to skip stencil
/// sums.
std::vector<std::uint8_t> support_mask(const DensityField& rho, int radius_cells);

}  // namespace mfgcrowd
