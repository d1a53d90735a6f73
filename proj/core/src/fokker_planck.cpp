#include "mfgcrowd/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfgcrowd/errors.hpp"

namespace mfgcrowd {

GammaWeights gamma_weights(Vec2 x_disp, const Grid& g) {
    const double eps = 1e-12;
    if (std::abs(x_disp.x) > g.dx1 * (1.0 + eps) || std::abs(x_disp.y) > g.dx2 * (1.0 + eps)) {
        throw CflError("push-forward: displacement (" + std::to_string(x_disp.x) + ", " +
                       std::to_string(x_disp.y) + ") exceeds one cell; CFL violated");
    }
    const double xp = std::max(x_disp.x, 0.0), xm = std::max(-x_disp.x, 0.0);
    const double yp = std::max(x_disp.y, 0.0), ym = std::max(-x_disp.y, 0.0);
    // Per-axis fractions: mass moved to the neighbor against/along the axis,
    // remainder stays. Clamp the stay fraction against rounding at |X| = dx.
    const double w1[3] = {xm / g.dx1, std::max(0.0, 1.0 - std::abs(x_disp.x) / g.dx1), xp / g.dx1};
    const double w2[3] = {ym / g.dx2, std::max(0.0, 1.0 - std::abs(x_disp.y) / g.dx2), yp / g.dx2};
    GammaWeights w;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) w.w[a][b] = w1[a] * w2[b];
    return w;
}

PushForwardResult push_forward_step(const DensityField& rho,
                                    std::span<const std::uint16_t> alpha,
                                    std::span<const Vec2> directions, const Grid& g,
                                    const SensoryStencilSet& st, const InteractionParams& p,
                                    const WallMask& walls, double sigma) {
    PushForwardResult out{DensityField(g.n1, g.n2), {}};
    DensityField& next = out.density;
    StepReport& rep = out.report;
    rep.mass_before = total_mass(rho, g);

    double rho_max = 0.0;
    // Scatter: each occupied cell distributes its mass over the 3x3
    // neighborhood. Fixed loop order keeps the accumulation deterministic.
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const double m = rho.at(i, j);
            if (m == 0.0) continue;
            rho_max = std::max(rho_max, m);
            const int k = alpha[g.index(i, j)];
            Vec2 v = directions[k - 1];
            if (p.active()) {
                v = total_velocity(v, interaction_velocity(rho, i, j, k, st, p));
            }
            v = project_boundary_velocity(v, i, j, g, walls);
            rep.max_speed_seen = std::max(rep.max_speed_seen, norm(v));
            const GammaWeights w = gamma_weights(v * g.dt, g);
            for (int b = 0; b < 3; ++b) {
                for (int a = 0; a < 3; ++a) {
                    const double wm = w.w[a][b];
                    if (wm == 0.0) continue;
                    const int ti = i + a - 1;
                    const int tj = j + b - 1;
                    if (ti < 0 || ti >= g.n1 || tj < 0 || tj >= g.n2) continue;
                    next.at(ti, tj) += m * wm;
                }
            }
        }
    }

    if (sigma > 0.0) {
        const double nu = sigma * g.dt / (g.dx1 * g.dx2);
        for (int j = 0; j < g.n2; ++j) {
            for (int i = 0; i < g.n1; ++i) {
                const double c = rho.at(i, j);
                // Zero-flux walls: a missing neighbor contributes the center
                // value, so boundary cells exchange nothing with the outside.
                const double l = i > 0 ? rho.at(i - 1, j) : c;
                const double r = i < g.n1 - 1 ? rho.at(i + 1, j) : c;
                const double d = j > 0 ? rho.at(i, j - 1) : c;
                const double u = j < g.n2 - 1 ? rho.at(i, j + 1) : c;
                next.at(i, j) += nu * (l + r + d + u - 4.0 * c);
            }
        }
    }

    const double neg_tol = 1e-14 * std::max(1.0, rho_max);
    for (double& v : next.values()) {
        if (v < 0.0) {
            if (v < -neg_tol) {
                throw InternalError("push-forward produced negative density " +
                                    std::to_string(v));
            }
            v = 0.0;
        }
    }

    rep.mass_after = total_mass(next, g);
    return out;
}

double absorb_target_mass(DensityField& rho, std::span<const Cell> target_cells, const Grid& g) {
    double sum = 0.0;
    for (const Cell& c : target_cells) {
        sum += rho.at(c.i, c.j);
        rho.at(c.i, c.j) = 0.0;
    }
    return sum * g.dx1 * g.dx2;
}

}  // namespace mfgcrowd
