#include "mfgcrowd/interaction.hpp"

#include <algorithm>
#include <cmath>

namespace mfgcrowd {

SensoryStencilSet SensoryStencilSet::build(const Grid& g, const InteractionParams& p,
                                           std::span<const Vec2> directions) {
    SensoryStencilSet set;
    set.per_control_.resize(directions.size());
    const int rad_i = static_cast<int>(std::ceil(p.r / g.dx1));
    const int rad_j = static_cast<int>(std::ceil(p.r / g.dx2));
    set.max_radius_cells_ = std::max(rad_i, rad_j);
    const double cell_area = g.dx1 * g.dx2;
    for (size_t k = 0; k < directions.size(); ++k) {
        const Vec2 a = directions[k];
        auto& entries = set.per_control_[k];
        for (int dj = -rad_j; dj <= rad_j; ++dj) {
            for (int di = -rad_i; di <= rad_i; ++di) {
                const Vec2 off{di * g.dx1, dj * g.dx2};
                const double d2 = norm2(off);
                const double d = std::sqrt(d2);
                if (d < p.r0 || d > p.r) continue;
                if (!(dot(off, a) > 0.0)) continue;
                entries.push_back({di, dj, Vec2{-off.x / d2 * cell_area, -off.y / d2 * cell_area}});
            }
        }
    }
    return set;
}

Vec2 interaction_velocity(const DensityField& rho, int i, int j, int k,
                          const SensoryStencilSet& st, const InteractionParams& p) {
    double vx = 0.0, vy = 0.0;
    for (const StencilEntry& e : st.for_control(k)) {
        const int ci = i + e.di;
        const int cj = j + e.dj;
        if (ci < 0 || ci >= rho.n1() || cj < 0 || cj >= rho.n2()) continue;
        const double r = rho.at(ci, cj);
        vx += e.kernel.x * r;
        vy += e.kernel.y * r;
    }
    return {p.c_rep * vx, p.c_rep * vy};
}

Vec2 project_boundary_velocity(Vec2 v, int i, int j, const Grid& g, const WallMask& walls) {
    const bool open = walls.is_open(i, j);
    if (open) return v;
    if (i == 0 && v.x < 0.0) v.x = 0.0;
    if (i == g.n1 - 1 && v.x > 0.0) v.x = 0.0;
    if (j == 0 && v.y < 0.0) v.y = 0.0;
    if (j == g.n2 - 1 && v.y > 0.0) v.y = 0.0;
    return v;
}

std::vector<std::uint8_t> support_mask(const DensityField& rho, int radius_cells) {
    const int n1 = rho.n1(), n2 = rho.n2();
    std::vector<std::uint8_t> row_hit(static_cast<size_t>(n1) * n2, 0);
    // Two separable dilation passes (x then y).
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            if (rho.at(i, j) > 0.0) {
                const int lo = std::max(0, i - radius_cells);
                const int hi = std::min(n1 - 1, i + radius_cells);
                for (int m = lo; m <= hi; ++m) row_hit[static_cast<size_t>(j) * n1 + m] = 1;
            }
        }
    }
    std::vector<std::uint8_t> mask(static_cast<size_t>(n1) * n2, 0);
    for (int j = 0; j < n2; ++j) {
        const int lo = std::max(0, j - radius_cells);
        const int hi = std::min(n2 - 1, j + radius_cells);
        for (int i = 0; i < n1; ++i) {
            for (int m = lo; m <= hi; ++m) {
                if (row_hit[static_cast<size_t>(m) * n1 + i]) {
                    mask[static_cast<size_t>(j) * n1 + i] = 1;
                    break;
                }
            }
        }
    }
    return mask;
}

}  // namespace mfgcrowd
