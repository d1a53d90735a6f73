#include "mfgcrowd/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mfgcrowd/errors.hpp"

namespace mfgcrowd {

ControlSet ControlSet::unit_circle(int K) {
    if (K < 2) {
        throw ConfigError("model.K: control set needs at least 2 directions");
    }
    ControlSet cs;
    cs.dirs_.resize(K);
    for (int k = 1; k <= K; ++k) {
        const double ang = 2.0 * std::numbers::pi * k / K;
        cs.dirs_[k - 1] = {std::cos(ang), std::sin(ang)};
    }
    return cs;
}

double TargetSchedule::end_time() const {
    double e = 0.0;
    for (const auto& s : segments) e = std::max(e, s.t1);
    return e;
}

bool TargetSchedule::is_active(const TargetSegment& seg, double t) const {
    // The tolerance absorbs grid-time rounding.
    const double end = end_time();
    const double eps = 1e-9 * std::max(1.0, end);
    const bool last = seg.t1 >= end - eps;
    return t >= seg.t0 - eps && (t < seg.t1 - eps || (last && t <= seg.t1 + eps));
}

std::vector<Cell> TargetSchedule::active_cells(double t) const {
    std::vector<Cell> out;
    for (const auto& s : segments) {
        if (is_active(s, t)) out.insert(out.end(), s.cells.begin(), s.cells.end());
    }
    return out;
}

std::optional<double> TargetSchedule::first_switch_time() const {
    const double end = end_time();
    const double eps = 1e-9 * std::max(1.0, end);
    std::optional<double> sw;
    for (const auto& s : segments) {
        if (s.t1 < end - eps) sw = sw ? std::min(*sw, s.t1) : s.t1;
    }
    return sw;
}

TargetSchedule TargetSchedule::believed_from(double s) const {
    const auto sw = first_switch_time();
    if (!sw) return *this;
    const double eps = 1e-9 * std::max(1.0, end_time());
    if (s >= *sw - forecast_horizon - eps) return *this;
    // Too early to know about the switch: the exits currently active are
    // believed to stay put for the whole horizon.
    TargetSchedule believed;
    believed.forecast_horizon = forecast_horizon;
    TargetSegment seg;
    seg.t0 = 0.0;
    seg.t1 = end_time();
    seg.label = "believed";
    seg.cells = active_cells(s);
    believed.segments.push_back(std::move(seg));
    return believed;
}

WallMask wall_mask_for(const Grid& g, std::span<const Cell> open_cells) {
    WallMask m = WallMask::closed(g);
    for (const Cell& c : open_cells) m.set_open(c.i, c.j);
    return m;
}

Vec2 characteristic_foot(int i, int j, Vec2 a, int k, const DensityField& rho_slice,
                         const SensoryStencilSet& st, const InteractionParams& p,
                         const WallMask& walls, const Grid& g) {
    Vec2 v = a;
    if (p.active()) {
        v = total_velocity(v, interaction_velocity(rho_slice, i, j, k, st, p));
    }
    v = project_boundary_velocity(v, i, j, g, walls);
    const Vec2 c = g.center(i, j);
    return g.clamp_to_nodes({c.x + g.dt * v.x, c.y + g.dt * v.y});
}

double finite_horizon_wall_value(const TerminalCost& terminal, const Grid& g) {
    double max_g = 0.0;
    if (terminal.kind == TerminalCost::Kind::Constant) {
        max_g = terminal.value;
    } else {
        const Vec2 lo = g.domain_lo();
        const Vec2 hi = g.domain_hi();
        for (Vec2 corner : {lo, Vec2{hi.x, lo.y}, Vec2{lo.x, hi.y}, hi}) {
            max_g = std::max(max_g, terminal.eval(corner));
        }
    }
    return 10.0 * (g.final_time() + max_g);
}

double minimum_time_wall_value(const Grid& g) { return 10.0 * g.final_time(); }

namespace {

bool is_edge(const Grid& g, int i, int j) {
    return i == 0 || i == g.n1 - 1 || j == 0 || j == g.n2 - 1;
}

// Repulsion velocities of one density slice for every (cell, control)
// pair. Sweeps reuse one table across identical consecutive slices, which
// covers the frozen tail of rho_theta.
struct VintTable {
    std::vector<std::uint8_t> mask;  // cells with any density in reach
    std::vector<Vec2> v;             // cells * K, valid where mask is set
};

VintTable build_vint_table(const DensityField& rho, const SensoryStencilSet& st,
                           const InteractionParams& p, const Grid& g, int K) {
    VintTable t;
    t.mask = support_mask(rho, st.max_radius_cells());
    t.v.assign(static_cast<size_t>(g.cells()) * K, Vec2{});
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const size_t idx = static_cast<size_t>(j) * g.n1 + i;
            if (!t.mask[idx]) continue;
            for (int k = 1; k <= K; ++k) {
                t.v[idx * K + k - 1] = interaction_velocity(rho, i, j, k, st, p);
            }
        }
    }
    return t;
}

// Keeps the table of the most recently seen slice; consecutive slices that
// compare equal (the frozen region, or a crowd at rest) share it.
class VintCache {
  public:
    VintCache(const SensoryStencilSet& st, const InteractionParams& p, const Grid& g, int K)
        : st_(st), p_(p), g_(g), K_(K) {}

    const VintTable* table_for(const DensityField& rho) {
        if (!p_.active()) return nullptr;
        if (last_ && (last_ == &rho || *last_ == rho)) {
            last_ = &rho;
            return &table_;
        }
        table_ = build_vint_table(rho, st_, p_, g_, K_);
        last_ = &rho;
        return &table_;
    }

  private:
    const SensoryStencilSet& st_;
    const InteractionParams& p_;
    const Grid& g_;
    int K_;
    const DensityField* last_ = nullptr;
    VintTable table_;
};

// Candidate evaluation shared by the sweeps and synthesize_control so both
// run identical arithmetic. For every cell: the smallest interpolated next
// value over the K characteristic feet, and its argmin with ties broken by
// the lowest control index. The running cost is control-independent for
// every supported family, so it never affects the argmin and is added by
// the caller.
struct SliceEval {
    const Grid& g;
    std::span<const Vec2> dirs;
    const WallMask& walls;
    const VintTable* vint;  // null when repulsion is off

    void run(std::span<const double> phi, std::span<double> best_val,
             std::span<std::uint16_t> best_k) const {
        const int K = static_cast<int>(dirs.size());
#pragma omp parallel for schedule(static)
        for (int j = 0; j < g.n2; ++j) {
            const bool j_edge = (j == 0 || j == g.n2 - 1);
            for (int i = 0; i < g.n1; ++i) {
                const size_t idx = static_cast<size_t>(j) * g.n1 + i;
                const bool edge = j_edge || i == 0 || i == g.n1 - 1;
                const Vec2* vrow = vint && vint->mask[idx] ? &vint->v[idx * K] : nullptr;
                const Vec2 c = g.center(i, j);
                double best = std::numeric_limits<double>::infinity();
                int bk = 1;
                for (int k = 1; k <= K; ++k) {
                    Vec2 v = dirs[k - 1];
                    if (vrow) v = total_velocity(v, vrow[k - 1]);
                    if (edge) v = project_boundary_velocity(v, i, j, g, walls);
                    const Vec2 foot =
                        g.clamp_to_nodes({c.x + g.dt * v.x, c.y + g.dt * v.y});
                    const double cand = bilinear_interpolate(phi, g, foot);
                    if (cand < best) {
                        best = cand;
                        bk = k;
                    }
                }
                if (!best_val.empty()) best_val[idx] = best;
                best_k[idx] = static_cast<std::uint16_t>(bk);
            }
        }
    }
};

void check_finite(std::span<const double> slice, int n) {
    for (double v : slice) {
        if (!std::isfinite(v)) {
            throw InternalError("hjb: non-finite value in slice " + std::to_string(n));
        }
    }
}

struct BackwardConfig {
    double wall_value = 0.0;
    double sigma = 0.0;                        // diffusion (finite horizon only)
    const CostSpec* costs = nullptr;           // finite horizon
    const TargetSchedule* believed = nullptr;  // minimum time
};

ValueField backward_sweep_impl(const SpaceTimeDensity& rho_theta, const ControlSet& controls,
                               const Grid& g, const SensoryStencilSet& st,
                               const InteractionParams& p, const BackwardConfig& cfg,
                               ControlField* alpha_out) {
    if (rho_theta.size() != g.nT + 1) {
        throw InternalError("hjb: rho_theta must have nT+1 slices");
    }
    const bool min_time = cfg.believed != nullptr;
    const double wall = cfg.wall_value;
    ValueField phi(g.nT + 1, g.n1, g.n2, wall);
    if (alpha_out) *alpha_out = ControlField(g.nT + 1, g.n1, g.n2);

    const WallMask closed = WallMask::closed(g);
    auto mask_at = [&](int n) {
        return min_time ? wall_mask_for(g, cfg.believed->active_cells(g.time_at(n))) : closed;
    };
    auto pin_slice = [&](std::span<double> s, int n) {
        for (int j = 0; j < g.n2; ++j) {
            for (int i = 0; i < g.n1; ++i) {
                if (is_edge(g, i, j)) s[g.index(i, j)] = wall;
            }
        }
        if (min_time) {
            for (const Cell& c : cfg.believed->active_cells(g.time_at(n))) {
                s[g.index(c.i, c.j)] = 0.0;
            }
        }
    };

    // Terminal slice.
    {
        auto s = phi.slice(g.nT);
        if (min_time) {
            std::fill(s.begin(), s.end(), wall);
        } else {
            for (int j = 0; j < g.n2; ++j) {
                for (int i = 0; i < g.n1; ++i) {
                    s[g.index(i, j)] = cfg.costs->terminal.eval(g.center(i, j));
                }
            }
        }
        pin_slice(s, g.nT);
        check_finite(s, g.nT);
    }

    std::vector<double> best_val(static_cast<size_t>(g.cells()));
    std::vector<std::uint16_t> best_k(static_cast<size_t>(g.cells()));
    const double nu = cfg.sigma > 0.0 ? cfg.sigma * g.dt / (g.dx1 * g.dx2) : 0.0;
    VintCache vint(st, p, g, controls.size());

    for (int n = g.nT; n >= 1; --n) {
        const DensityField& rho_n = rho_theta.slice(n);
        const WallMask walls = mask_at(n);
        const auto phi_n = phi.slice(n);
        SliceEval{g, controls.directions(), walls, vint.table_for(rho_n)}.run(phi_n, best_val,
                                                                              best_k);
        if (alpha_out) {
            auto a = alpha_out->slice(n);
            std::copy(best_k.begin(), best_k.end(), a.begin());
        }

        auto prev = phi.slice(n - 1);
        for (int j = 1; j < g.n2 - 1; ++j) {
            for (int i = 1; i < g.n1 - 1; ++i) {
                const int idx = g.index(i, j);
                double val = best_val[idx];
                if (!min_time) {
                    const double rho_here =
                        cfg.costs->running.depends_on_density() ? rho_n.at(i, j) : 0.0;
                    val += g.dt * cfg.costs->running.eval(g.center(i, j), rho_here);
                    if (nu > 0.0) {
                        const double c0 = phi_n[idx];
                        const double l = i - 1 >= 1 ? phi_n[idx - 1] : c0;
                        const double r = i + 1 <= g.n1 - 2 ? phi_n[idx + 1] : c0;
                        const double d = j - 1 >= 1 ? phi_n[idx - g.n1] : c0;
                        const double u = j + 1 <= g.n2 - 2 ? phi_n[idx + g.n1] : c0;
                        val += nu * (l + r + d + u - 4.0 * c0);
                    }
                } else {
                    val += g.dt;  // unit running cost
                }
                prev[idx] = std::min(val, wall);
            }
        }
        pin_slice(prev, n - 1);
        check_finite(prev, n - 1);
    }

    if (alpha_out) {
        const DensityField& rho_0 = rho_theta.slice(0);
        const WallMask walls = mask_at(0);
        SliceEval{g, controls.directions(), walls, vint.table_for(rho_0)}.run(
            phi.slice(0), {}, alpha_out->slice(0));
    }
    return phi;
}

}  // namespace

ValueField sl_backward_sweep(const SpaceTimeDensity& rho_theta, const CostSpec& costs,
                             const ControlSet& controls, const Grid& g,
                             const SensoryStencilSet& st, const InteractionParams& p,
                             double sigma, ControlField* alpha_out) {
    BackwardConfig cfg;
    cfg.wall_value = finite_horizon_wall_value(costs.terminal, g);
    cfg.sigma = sigma;
    cfg.costs = &costs;
    return backward_sweep_impl(rho_theta, controls, g, st, p, cfg, alpha_out);
}

ValueField minimum_time_sweep(const SpaceTimeDensity& rho_theta, const TargetSchedule& schedule,
                              double believed_at, const ControlSet& controls, const Grid& g,
                              const SensoryStencilSet& st, const InteractionParams& p,
                              ControlField* alpha_out) {
    const TargetSchedule believed = schedule.believed_from(believed_at);
    for (int n = 0; n <= g.nT; ++n) {
        if (believed.active_cells(g.time_at(n)).empty()) {
            throw ConfigError("target: no exit active at t=" + std::to_string(g.time_at(n)));
        }
    }
    BackwardConfig cfg;
    cfg.wall_value = minimum_time_wall_value(g);
    cfg.believed = &believed;
    return backward_sweep_impl(rho_theta, controls, g, st, p, cfg, alpha_out);
}

ControlField synthesize_control(const ValueField& phi, const SpaceTimeDensity& rho_theta,
                                const CostSpec& costs, const ControlSet& controls, const Grid& g,
                                const SensoryStencilSet& st, const InteractionParams& p,
                                const TargetSchedule* schedule, double believed_at) {
    if (phi.slices() != g.nT + 1 || rho_theta.size() != g.nT + 1) {
        throw InternalError("synthesize_control: slice count mismatch");
    }
    const bool min_time = costs.mode == ProblemMode::MinimumTime;
    if (min_time && schedule == nullptr) {
        throw InternalError("synthesize_control: minimum-time mode needs a schedule");
    }
    TargetSchedule believed;
    if (min_time) believed = schedule->believed_from(believed_at);

    ControlField cf(g.nT + 1, g.n1, g.n2);
    const WallMask closed = WallMask::closed(g);
    VintCache vint(st, p, g, controls.size());
    for (int n = 0; n <= g.nT; ++n) {
        const DensityField& rho_n = rho_theta.slice(n);
        const WallMask walls =
            min_time ? wall_mask_for(g, believed.active_cells(g.time_at(n))) : closed;
        SliceEval{g, controls.directions(), walls, vint.table_for(rho_n)}.run(phi.slice(n), {},
                                                                              cf.slice(n));
    }
    return cf;
}

}  // namespace mfgcrowd
