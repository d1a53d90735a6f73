#include "mfgcrowd/mfg_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfgcrowd/errors.hpp"

namespace mfgcrowd {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "converged";
        case Verdict::Stabilized: return "stabilized";
        case Verdict::Exhausted: return "exhausted";
    }
    return "?";
}

EngineSetup make_engine_setup(const Scenario& s) {
    EngineSetup ctx;
    ctx.grid = make_grid(s);
    ctx.controls = ControlSet::unit_circle(s.control_count);
    ctx.params = s.interaction;
    ctx.stencils = SensoryStencilSet::build(ctx.grid, ctx.params, ctx.controls.directions());
    ctx.costs = cost_spec(s);
    if (s.mode == ProblemMode::MinimumTime) {
        ctx.schedule = target_schedule(s, ctx.grid);
    }
    ctx.sigma = s.sigma;
    ctx.theta_steps = static_cast<int>(std::llround(s.theta / ctx.grid.dt));
    ctx.theta_steps = std::clamp(ctx.theta_steps, 0, ctx.grid.nT);
    ctx.opts.max_iters = s.solver.max_iters;
    ctx.opts.tol = effective_tol(s);
    ctx.opts.use_fictitious_play = s.solver.fictitious_play;
    ctx.opts.stagnation_window = s.solver.stagnation_window;
    return ctx;
}

std::vector<DensityField> predict_forward(const DensityField& rho_s, const ControlField& alpha,
                                          int s_index, int theta_steps, const EngineSetup& ctx) {
    const Grid& g = ctx.grid;
    if (theta_steps < 0) {
        throw InternalError("predict_forward: negative theta_steps");
    }
    const int steps = std::min(theta_steps, g.nT - s_index);
    std::vector<DensityField> out;
    out.reserve(steps);
    if (steps == 0) return out;

    const bool mt = ctx.minimum_time();
    const TargetSchedule believed =
        mt ? ctx.schedule.believed_from(g.time_at(s_index)) : TargetSchedule{};
    const WallMask closed = WallMask::closed(g);

    DensityField cur = rho_s;
    for (int m = 0; m < steps; ++m) {
        const int n = s_index + m;
        const WallMask walls =
            mt ? wall_mask_for(g, believed.active_cells(g.time_at(n))) : closed;
        auto step = push_forward_step(cur, alpha.slice(n), ctx.controls.directions(), g,
                                      ctx.stencils, ctx.params, walls, ctx.sigma);
        cur = std::move(step.density);
        if (mt) {
            const auto active = believed.active_cells(g.time_at(n + 1));
            absorb_target_mass(cur, active, g);
        }
        out.push_back(cur);
    }
    return out;
}

SpaceTimeDensity build_rho_theta(std::span<const DensityField> history,
                                 std::span<const DensityField> prediction, const Grid& g) {
    if (history.empty()) {
        throw InternalError("build_rho_theta: history must cover slice 0");
    }
    const int have = static_cast<int>(history.size() + prediction.size());
    if (have > g.nT + 1) {
        throw InternalError("build_rho_theta: more slices than grid times");
    }
    SpaceTimeDensity out;
    out.slices.reserve(g.nT + 1);
    out.slices.insert(out.slices.end(), history.begin(), history.end());
    out.slices.insert(out.slices.end(), prediction.begin(), prediction.end());
    const DensityField& frozen = out.slices.back();
    while (static_cast<int>(out.slices.size()) < g.nT + 1) {
        out.slices.push_back(frozen);
    }
    return out;
}

WindowSolve solve_window_mfg(std::span<const DensityField> history, int s_index,
                             const EngineSetup& ctx) {
    const Grid& g = ctx.grid;
    if (static_cast<int>(history.size()) != s_index + 1) {
        throw InternalError("solve_window_mfg: history must cover slices 0..s");
    }
    const double t_s = g.time_at(s_index);
    const int window = std::min(ctx.theta_steps, g.nT - s_index);

    ConvergenceRecord rec;
    rec.outer_step = s_index;

    // Iterate 0: freeze the current density to the horizon.
    SpaceTimeDensity rho_prev = build_rho_theta(history, {}, g);
    SpaceTimeDensity fp_avg;
    int fp_count = 0;
    if (ctx.opts.use_fictitious_play) {
        fp_avg = rho_prev;
        fp_count = 1;
    }

    ControlField alpha;
    rec.verdict = Verdict::Exhausted;
    for (int k = 1; k <= ctx.opts.max_iters; ++k) {
        const SpaceTimeDensity& hjb_input = ctx.opts.use_fictitious_play ? fp_avg : rho_prev;
        if (ctx.minimum_time()) {
            minimum_time_sweep(hjb_input, ctx.schedule, t_s, ctx.controls, g, ctx.stencils,
                               ctx.params, &alpha);
        } else {
            sl_backward_sweep(hjb_input, ctx.costs, ctx.controls, g, ctx.stencils, ctx.params,
                              ctx.sigma, &alpha);
        }
        auto prediction = predict_forward(history.back(), alpha, s_index, window, ctx);
        SpaceTimeDensity rho_k = build_rho_theta(history, prediction, g);
        const double ek = l1_distance(rho_k, rho_prev, g);
        rec.iterates.push_back(ek);

        if (ek <= ctx.opts.tol) {
            rec.verdict = Verdict::Converged;
            break;
        }
        const int w = ctx.opts.stagnation_window;
        if (static_cast<int>(rec.iterates.size()) >= w) {
            const auto tail = std::span(rec.iterates).last(w);
            const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
            if (*hi - *lo < ctx.opts.tol) {
                rec.verdict = Verdict::Stabilized;
                break;
            }
        }
        if (ctx.opts.use_fictitious_play) {
            accumulate_average(fp_avg, rho_k, fp_count);
            ++fp_count;
        }
        rho_prev = std::move(rho_k);
    }
    return {std::move(alpha), std::move(rec)};
}

SimulationResult run_simulation(const Scenario& scenario) {
    validate(scenario);
    const EngineSetup ctx = make_engine_setup(scenario);
    const Grid& g = ctx.grid;

    const double vmax = a_priori_vmax(scenario);
    const CflReport cfl = check_cfl(g, vmax);
    if (!cfl.pass) {
        throw CflError("CFL check failed before time-marching: dt*vmax = " +
                       std::to_string(g.dt * vmax) + " > min(dx) = " + std::to_string(cfl.limit));
    }

    const bool mt = ctx.minimum_time();
    const auto& segments = ctx.schedule.segments;

    SimulationResult res;
    res.density_history.slices.reserve(g.nT + 1);
    res.density_history.slices.push_back(initial_density(scenario, g));
    res.control_history = ControlField(g.nT + 1, g.n1, g.n2);
    res.evacuated_over_time.assign(g.nT + 1, 0.0);
    if (mt) {
        for (const auto& seg : segments) res.exit_labels.push_back(seg.label);
        res.evacuated_per_exit.assign(segments.size(),
                                      std::vector<double>(g.nT + 1, 0.0));
    }

    // Removes exit-cell mass from `rho` at grid time index n and folds it
    // into the cumulative series. Returns the mass removed.
    auto absorb_exits = [&](DensityField& rho, int n) {
        double removed = 0.0;
        const double t = g.time_at(n);
        for (size_t e = 0; e < segments.size(); ++e) {
            if (!ctx.schedule.is_active(segments[e], t)) continue;
            const double m = absorb_target_mass(rho, segments[e].cells, g);
            res.evacuated_per_exit[e][n] += m;
            removed += m;
        }
        res.evacuated_over_time[n] += removed;
        return removed;
    };

    if (mt) {
        absorb_exits(res.density_history.slice(0), 0);
    }

    const WallMask closed = WallMask::closed(g);
    for (int n = 0; n < g.nT; ++n) {
        WindowSolve ws = solve_window_mfg(res.density_history.slices, n, ctx);

        const auto a_slice = ws.alpha.slice(n);
        std::copy(a_slice.begin(), a_slice.end(), res.control_history.slice(n).begin());
        if (n == g.nT - 1) {
            const auto a_last = ws.alpha.slice(g.nT);
            std::copy(a_last.begin(), a_last.end(), res.control_history.slice(g.nT).begin());
        }

        const WallMask walls =
            mt ? wall_mask_for(g, ctx.schedule.active_cells(g.time_at(n))) : closed;
        auto step = push_forward_step(res.density_history.slices.back(), a_slice,
                                      ctx.controls.directions(), g, ctx.stencils, ctx.params,
                                      walls, ctx.sigma);
        DensityField next = std::move(step.density);
        if (mt) {
            step.report.mass_evacuated = absorb_exits(next, n + 1);
            step.report.mass_after = total_mass(next, g);
        }

        // Carry the cumulative series forward.
        res.evacuated_over_time[n + 1] += res.evacuated_over_time[n];
        for (auto& per_exit : res.evacuated_per_exit) {
            per_exit[n + 1] += per_exit[n];
        }

        res.convergence.push_back(std::move(ws.record));
        res.step_reports.push_back(step.report);
        res.density_history.slices.push_back(std::move(next));
    }
    return res;
}

}  // namespace mfgcrowd
