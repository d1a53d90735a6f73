#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

using mfgcrowd::Cell;
using mfgcrowd::ControlSet;
using mfgcrowd::CostSpec;
using mfgcrowd::DensityField;
using mfgcrowd::Grid;
using mfgcrowd::ProblemMode;
using mfgcrowd::TerminalCost;
using mfgcrowd::ValueField;
using mfgcrowd::Vec2;

OracleGrid OracleGrid::make(Vec2 domain, int n1, int n2, double T, int nT) {
    if (n1 > 25 || n2 > 25 || nT > 60) {
        throw std::invalid_argument("oracle: instance exceeds the 25x25x60 cap");
    }
    return {mfgcrowd::build_grid(domain, n1, n2, T, nT)};
}

namespace {

// Weight-sum bilinear interpolation on cell centers, clamped to the node
// hull. Deliberately a different formulation from the production code.
double interp4(const std::vector<double>& vals, const Grid& g, double px, double py) {
    const double x0 = g.origin.x + 0.5 * g.dx1;
    const double y0 = g.origin.y + 0.5 * g.dx2;
    double gx = (px - x0) / g.dx1;
    double gy = (py - y0) / g.dx2;
    gx = std::clamp(gx, 0.0, static_cast<double>(g.n1 - 1));
    gy = std::clamp(gy, 0.0, static_cast<double>(g.n2 - 1));
    int ia = std::min(static_cast<int>(gx), g.n1 - 2);
    int ja = std::min(static_cast<int>(gy), g.n2 - 2);
    const double tx = gx - ia;
    const double ty = gy - ja;
    const double w00 = (1.0 - tx) * (1.0 - ty);
    const double w10 = tx * (1.0 - ty);
    const double w01 = (1.0 - tx) * ty;
    const double w11 = tx * ty;
    return w00 * vals[static_cast<size_t>(ja) * g.n1 + ia] +
           w10 * vals[static_cast<size_t>(ja) * g.n1 + ia + 1] +
           w01 * vals[static_cast<size_t>(ja + 1) * g.n1 + ia] +
           w11 * vals[static_cast<size_t>(ja + 1) * g.n1 + ia + 1];
}

bool on_ring(const Grid& g, int i, int j) {
    return i == 0 || j == 0 || i == g.n1 - 1 || j == g.n2 - 1;
}

}  // namespace

ValueField brute_force_value(const CostSpec& costs, const ControlSet& controls,
                             const VelocityFn& velocity, const OracleGrid& og, double sigma,
                             const DensityField* frozen_rho,
                             std::span<const Cell> static_target) {
    const Grid& g = og.g;
    const bool min_time = costs.mode == ProblemMode::MinimumTime;
    if (min_time && static_target.empty()) {
        throw std::invalid_argument("oracle: minimum time needs target cells");
    }

    double wall;
    if (min_time) {
        wall = 10.0 * g.final_time();
    } else {
        double gmax = 0.0;
        if (costs.terminal.kind == TerminalCost::Kind::Constant) {
            gmax = costs.terminal.value;
        } else {
            const Vec2 lo = g.domain_lo(), hi = g.domain_hi();
            gmax = std::max({costs.terminal.eval(lo), costs.terminal.eval({hi.x, lo.y}),
                             costs.terminal.eval({lo.x, hi.y}), costs.terminal.eval(hi)});
        }
        wall = 10.0 * (g.final_time() + gmax);
    }

    ValueField phi(g.nT + 1, g.n1, g.n2, wall);

    auto pin = [&](std::vector<double>& slice) {
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i)
                if (on_ring(g, i, j)) slice[static_cast<size_t>(j) * g.n1 + i] = wall;
        for (const Cell& c : static_target) slice[static_cast<size_t>(c.j) * g.n1 + c.i] = 0.0;
    };

    std::vector<double> next(g.cells()), cur(g.cells());
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            next[static_cast<size_t>(j) * g.n1 + i] =
                min_time ? wall : costs.terminal.eval(g.center(i, j));
        }
    }
    pin(next);
    std::copy(next.begin(), next.end(), phi.slice(g.nT).begin());

    const int K = controls.size();
    std::vector<double> candidates(K);
    for (int n = g.nT; n >= 1; --n) {
        for (int j = 0; j < g.n2; ++j) {
            for (int i = 0; i < g.n1; ++i) {
                const size_t idx = static_cast<size_t>(j) * g.n1 + i;
                if (on_ring(g, i, j)) {
                    cur[idx] = wall;
                    continue;
                }
                const Vec2 xc = g.center(i, j);
                for (int k = 1; k <= K; ++k) {
                    Vec2 v = velocity(i, j, n, k);
                    // Interior cells of a ring-walled grid never touch the
                    // boundary, so no projection is needed here; feet are
                    // clamped by the interpolation itself.
                    candidates[k - 1] = interp4(next, g, xc.x + g.dt * v.x, xc.y + g.dt * v.y);
                }
                double val = *std::min_element(candidates.begin(), candidates.end());
                if (min_time) {
                    val += g.dt;
                } else {
                    const double rho_here = frozen_rho ? frozen_rho->at(i, j) : 0.0;
                    val += g.dt * costs.running.eval(xc, rho_here);
                    if (sigma > 0.0) {
                        const double c0 = next[idx];
                        const double l = i - 1 >= 1 ? next[idx - 1] : c0;
                        const double r = i + 1 <= g.n1 - 2 ? next[idx + 1] : c0;
                        const double d = j - 1 >= 1 ? next[idx - g.n1] : c0;
                        const double u = j + 1 <= g.n2 - 2 ? next[idx + g.n1] : c0;
                        val += sigma * g.dt / (g.dx1 * g.dx2) * (l + r + d + u - 4.0 * c0);
                    }
                }
                cur[idx] = std::min(val, wall);
            }
        }
        pin(cur);
        std::copy(cur.begin(), cur.end(), phi.slice(n - 1).begin());
        std::swap(cur, next);
    }
    return phi;
}

std::vector<double> fast_sweep_distance(std::span<const Cell> targets, const OracleGrid& og) {
    const Grid& g = og.g;
    if (targets.empty()) throw std::invalid_argument("oracle: empty target set");
    const double inf = 1e30;
    std::vector<double> u(g.cells(), inf);
    std::vector<std::uint8_t> fixed(g.cells(), 0);
    for (const Cell& c : targets) {
        u[static_cast<size_t>(c.j) * g.n1 + c.i] = 0.0;
        fixed[static_cast<size_t>(c.j) * g.n1 + c.i] = 1;
    }
    const double hx = g.dx1, hy = g.dx2;

    auto update = [&](int i, int j) {
        const size_t idx = static_cast<size_t>(j) * g.n1 + i;
        if (fixed[idx]) return 0.0;
        const double a1 = i > 0 ? u[idx - 1] : inf;
        const double a2 = i < g.n1 - 1 ? u[idx + 1] : inf;
        const double b1 = j > 0 ? u[idx - g.n1] : inf;
        const double b2 = j < g.n2 - 1 ? u[idx + g.n1] : inf;
        const double a = std::min(a1, a2);
        const double b = std::min(b1, b2);
        if (a >= inf && b >= inf) return 0.0;
        double cand = std::min(a + hx, b + hy);
        if (a < inf && b < inf) {
            // Two-sided Godunov update for |grad u| = 1 with anisotropic h.
            const double ca = 1.0 / (hx * hx), cb = 1.0 / (hy * hy);
            const double s = ca + cb;
            const double m = (ca * a + cb * b) / s;
            const double q = (ca * a * a + cb * b * b - 1.0) / s;
            const double disc = m * m - q;
            if (disc >= 0.0) {
                const double two_sided = m + std::sqrt(disc);
                if (two_sided >= std::max(a, b)) cand = std::min(cand, two_sided);
            }
        }
        if (cand < u[idx] - 1e-14) {
            u[idx] = cand;
            return u[idx] > 0 ? 1.0 : 0.0;
        }
        return 0.0;
    };

    for (int pass = 0; pass < 100; ++pass) {
        double changed = 0.0;
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) changed += update(i, j);
        for (int j = 0; j < g.n2; ++j)
            for (int i = g.n1 - 1; i >= 0; --i) changed += update(i, j);
        for (int j = g.n2 - 1; j >= 0; --j)
            for (int i = g.n1 - 1; i >= 0; --i) changed += update(i, j);
        for (int j = g.n2 - 1; j >= 0; --j)
            for (int i = 0; i < g.n1; ++i) changed += update(i, j);
        if (changed == 0.0) break;
    }
    return u;
}

}  // namespace oracle
