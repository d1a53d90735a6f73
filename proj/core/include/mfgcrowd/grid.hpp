#pragma once

#include <span>

#include "mfgcrowd/geometry.hpp"

namespace mfgcrowd {

/// Uniform space-time discretization of a rectangular domain.
///
/// Scalar fields carry one value per cell, attached to the cell center
/// (x1_i, x2_j) = origin + ((i+1/2)dx1, (j+1/2)dx2). Immutable after
/// construction; all queries are pure.
struct Grid {
    int n1 = 0;          ///< cell count along x1
    int n2 = 0;          ///< cell count along x2
    double dx1 = 0.0;    ///< cell size along x1
    double dx2 = 0.0;    ///< cell size along x2
    double dt = 0.0;     ///< time step
    int nT = 0;          ///< number of time steps (nT+1 grid times)
    Vec2 origin;         ///< lower-left corner of the domain

    int cells() const { return n1 * n2; }
    bool in_bounds(int i, int j) const { return i >= 0 && i < n1 && j >= 0 && j < n2; }
    int index(int i, int j) const { return j * n1 + i; }

    Vec2 center(int i, int j) const {
        return {origin.x + (i + 0.5) * dx1, origin.y + (j + 0.5) * dx2};
    }
    double time_at(int n) const { return n * dt; }
    double final_time() const { return nT * dt; }

    Vec2 domain_lo() const { return origin; }
    Vec2 domain_hi() const { return {origin.x + n1 * dx1, origin.y + n2 * dx2}; }

    /// Clamps a point into the convex hull of cell-center nodes.
    Vec2 clamp_to_nodes(Vec2 p) const {
        const Vec2 lo = center(0, 0);
        const Vec2 hi = center(n1 - 1, n2 - 1);
        if (p.x < lo.x) p.x = lo.x;
        if (p.x > hi.x) p.x = hi.x;
        if (p.y < lo.y) p.y = lo.y;
        if (p.y > hi.y) p.y = hi.y;
        return p;
    }
};

/// Builds the grid from domain side lengths and counts.
/// Throws ConfigError on non-positive sizes or counts.
Grid build_grid(Vec2 domain_size, int n1, int n2, double T, int nT, Vec2 origin = {0.0, 0.0});

/// Bilinear interpolation of a cell-centered scalar slice at point p.
/// The slice is indexed j*n1 + i. Points outside the node hull are clamped
/// to it first, so boundary queries degrade to constant extrapolation.
/// Exact (to rounding) on fields of the form a + b x1 + c x2 + d x1 x2;
/// the nested-lerp form is exact on constants for any weights.
inline double bilinear_interpolate(std::span<const double> slice, const Grid& g, Vec2 p) {
    p = g.clamp_to_nodes(p);
    // Node coordinates: node (i,j) sits at origin + ((i+1/2)dx1, (j+1/2)dx2).
    const double u = (p.x - g.origin.x) / g.dx1 - 0.5;
    const double v = (p.y - g.origin.y) / g.dx2 - 0.5;
    int i0 = static_cast<int>(u);
    int j0 = static_cast<int>(v);
    if (i0 > g.n1 - 2) i0 = g.n1 - 2;
    if (j0 > g.n2 - 2) j0 = g.n2 - 2;
    if (i0 < 0) i0 = 0;
    if (j0 < 0) j0 = 0;
    const double fx = u - i0;
    const double fy = v - j0;
    const int i1 = g.n1 == 1 ? i0 : i0 + 1;
    const int j1 = g.n2 == 1 ? j0 : j0 + 1;
    const double f00 = slice[g.index(i0, j0)];
    const double f10 = slice[g.index(i1, j0)];
    const double f01 = slice[g.index(i0, j1)];
    const double f11 = slice[g.index(i1, j1)];
    const double a = f00 + fx * (f10 - f00);
    const double b = f01 + fx * (f11 - f01);
    return a + fy * (b - a);
}

struct CflReport {
    bool pass = false;
    double ratio = 0.0;  ///< dt*vmax / min(dx1,dx2)
    double limit = 0.0;  ///< min(dx1,dx2)
};

/// Checks dt*vmax <= min(dx1,dx2). A report, not a guard: callers decide
/// whether failure is fatal.
CflReport check_cfl(const Grid& g, double vmax);

}  // namespace mfgcrowd
