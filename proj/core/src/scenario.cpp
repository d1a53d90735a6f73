#include "mfgcrowd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "mfgcrowd/errors.hpp"

namespace mfgcrowd {

using json = nlohmann::ordered_json;

double Scenario::total_mass() const {
    double m = 0.0;
    for (const auto& b : rho0) m += b.mass;
    return m;
}

double effective_tol(const Scenario& s) {
    return s.solver.tol > 0.0 ? s.solver.tol : 1e-4 * s.total_mass();
}

Grid make_grid(const Scenario& s) {
    return build_grid(s.domain_size, s.n1, s.n2, s.T, s.nT);
}

CostSpec cost_spec(const Scenario& s) { return {s.mode, s.running, s.terminal}; }

TargetSchedule target_schedule(const Scenario& s, const Grid& g) {
    TargetSchedule sched;
    sched.forecast_horizon = s.forecast_horizon;
    for (size_t e = 0; e < s.exits.size(); ++e) {
        const ExitSpec& ex = s.exits[e];
        TargetSegment seg;
        seg.t0 = ex.t0;
        seg.t1 = ex.t1;
        seg.label = ex.label;
        if (ex.side == "bottom" || ex.side == "top") {
            const int j = ex.side == "bottom" ? 0 : g.n2 - 1;
            for (int i = 0; i < g.n1; ++i) {
                const double x = g.center(i, j).x;
                if (x >= ex.lo && x <= ex.hi) seg.cells.push_back({i, j});
            }
        } else {
            const int i = ex.side == "left" ? 0 : g.n1 - 1;
            for (int j = 0; j < g.n2; ++j) {
                const double y = g.center(i, j).y;
                if (y >= ex.lo && y <= ex.hi) seg.cells.push_back({i, j});
            }
        }
        if (seg.cells.empty()) {
            throw ConfigError("target.segments[" + std::to_string(e) +
                              "]: spans no boundary cell");
        }
        sched.segments.push_back(std::move(seg));
    }
    return sched;
}

DensityField initial_density(const Scenario& s, const Grid& g) {
    DensityField d(g.n1, g.n2);
    for (size_t b = 0; b < s.rho0.size(); ++b) {
        DensityField block;
        try {
            block = cell_average_init(s.rho0[b].rect, s.rho0[b].mass, g);
        } catch (const ConfigError& err) {
            throw ConfigError("rho0[" + std::to_string(b) + "]: " + err.what());
        }
        auto dst = d.values();
        const auto src = block.values();
        for (size_t m = 0; m < dst.size(); ++m) dst[m] += src[m];
    }
    return d;
}

double a_priori_vmax(const Scenario& s) {
    double v = 1.0;  // controls live on the unit circle
    if (s.interaction.active()) {
        const Grid g = make_grid(s);
        const DensityField rho = initial_density(s, g);
        double rho_max = 0.0;
        for (double x : rho.values()) rho_max = std::max(rho_max, x);
        // |V_int| <= c_rep * rho_max * integral of 1/|z| over the half
        // annulus = c_rep * rho_max * pi * (R - R0).
        v += s.interaction.c_rep * rho_max * std::numbers::pi *
             (s.interaction.r - s.interaction.r0);
    }
    return v;
}

namespace {

void fail(const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
}

}  // namespace

void validate(const Scenario& s) {
    if (s.n1 < 3 || s.n2 < 3) fail("grid.n1/n2", "need at least 3 cells per axis");
    if (!(s.domain_size.x > 0.0) || !(s.domain_size.y > 0.0)) {
        fail("grid.domain", "side lengths must be > 0");
    }
    if (!(s.T > 0.0)) fail("grid.T", "must be > 0");
    if (s.nT < 1) fail("grid.nT", "must be >= 1");
    if (s.sigma < 0.0) fail("model.sigma", "must be >= 0");
    if (s.theta < 0.0 || s.theta > s.T) fail("model.theta", "must lie in [0, T]");
    if (s.interaction.c_rep < 0.0) fail("model.c_rep", "must be >= 0");
    if (s.interaction.r0 < 0.0 || !(s.interaction.r0 < s.interaction.r)) {
        fail("model.r0/r", "need 0 <= r0 < r");
    }
    if (s.control_count < 2) fail("model.K", "need at least 2 control directions");
    const double dx1 = s.domain_size.x / s.n1;
    const double dx2 = s.domain_size.y / s.n2;
    if (s.sigma > 0.0 && 4.0 * s.sigma * s.dt() > dx1 * dx2 * (1.0 + 1e-12)) {
        fail("model.sigma", "4*sigma*dt exceeds dx1*dx2; explicit diffusion would lose "
                            "positivity");
    }
    if (s.mode == ProblemMode::MinimumTime) {
        if (s.exits.empty()) fail("target", "minimum-time mode needs at least one exit");
        if (s.sigma != 0.0) fail("model.sigma", "must be 0 in minimum-time mode");
    } else if (!s.exits.empty()) {
        fail("target", "finite-horizon mode takes no exits");
    }
    // An empty rho0 list is a legal degenerate case (zero crowd).
    for (size_t b = 0; b < s.rho0.size(); ++b) {
        const std::string path = "rho0[" + std::to_string(b) + "]";
        if (!(s.rho0[b].mass > 0.0)) fail(path + ".mass", "must be > 0");
        if (!(s.rho0[b].rect.area() > 0.0)) fail(path + ".rect", "must have positive area");
    }
    double switch_time = s.T;
    for (size_t e = 0; e < s.exits.size(); ++e) {
        const std::string path = "target.segments[" + std::to_string(e) + "]";
        const ExitSpec& ex = s.exits[e];
        if (ex.side != "left" && ex.side != "right" && ex.side != "bottom" && ex.side != "top") {
            fail(path + ".side", "must be left|right|bottom|top");
        }
        if (!(ex.lo < ex.hi)) fail(path + ".span", "need lo < hi");
        if (!(ex.t0 < ex.t1)) fail(path + ".t0/t1", "need t0 < t1");
        if (ex.t0 < 0.0 || ex.t1 > s.T * (1.0 + 1e-12)) fail(path, "interval outside [0, T]");
        if (ex.t1 < s.T * (1.0 - 1e-12)) switch_time = std::min(switch_time, ex.t1);
    }
    if (s.forecast_horizon < 0.0) fail("target.Theta", "must be >= 0");
    if (!s.exits.empty() && switch_time < s.T && s.forecast_horizon > switch_time) {
        fail("target.Theta", "cannot exceed the first switch time");
    }
    if (s.mode == ProblemMode::MinimumTime) {
        // Every instant needs an exit somewhere.
        std::vector<std::pair<double, double>> iv;
        for (const auto& ex : s.exits) iv.emplace_back(ex.t0, ex.t1);
        std::sort(iv.begin(), iv.end());
        double covered = 0.0;
        for (const auto& [t0, t1] : iv) {
            if (t0 > covered + 1e-9 * s.T) break;
            covered = std::max(covered, t1);
        }
        if (covered < s.T * (1.0 - 1e-9)) {
            fail("target.segments", "exit intervals leave part of [0, T] without any exit");
        }
    }
    if (s.solver.max_iters < 1) fail("solver.max_iters", "must be >= 1");
    if (s.solver.tol == 0.0 || (s.solver.tol < 0.0 && s.solver.tol != -1.0)) {
        fail("solver.tol", "must be > 0, or -1 for the default 1e-4 * mass");
    }
    if (s.solver.stagnation_window < 2) fail("solver.stagnation_window", "must be >= 2");
}

// ---------------------------------------------------------------------------
// Builtins

Scenario builtin_scenario(std::string_view name) {
    Scenario s;
    s.domain_size = {1.0, 1.0};
    s.n1 = s.n2 = 50;
    s.interaction.r0 = 0.01;
    s.interaction.r = 0.06;
    s.control_count = 32;

    if (name == "test1") {
        s.name = "test1";
        s.T = 0.5;
        s.nT = 600;
        s.sigma = 0.05;
        s.theta = 0.1;
        s.interaction.c_rep = 0.0;
        s.mode = ProblemMode::FiniteHorizon;
        s.running = {RunningCost::Kind::LinearRho, 0.0, 0.0, 3.0};
        s.terminal = {TerminalCost::Kind::DistanceTo, {0.5, 0.5}, 0.0};
        s.rho0 = {{Rect{{0.0, 0.0}, {0.1, 0.1}}, 1.0}};
    } else if (name == "test2") {
        s.name = "test2";
        s.T = 1.0;
        s.nT = 200;
        s.sigma = 0.0;
        s.theta = 0.25;
        s.interaction.c_rep = 6.0;
        s.mode = ProblemMode::FiniteHorizon;
        s.running = {RunningCost::Kind::LinearX1, 3.0, -2.0, 0.0};
        s.terminal = {TerminalCost::Kind::DistanceTo, {0.5, 0.5}, 0.0};
        s.rho0 = {{Rect{{0.0, 0.0}, {0.1, 0.1}}, 0.02}};
    } else if (name == "test3" || name == "test4") {
        s.name = std::string(name);
        s.T = 1.5;
        s.nT = 200;
        s.sigma = 0.0;
        s.theta = 0.15;
        s.interaction.c_rep = 8.0;
        s.mode = ProblemMode::MinimumTime;
        s.rho0 = {{Rect{{0.45, 0.1}, {0.55, 0.2}}, 0.01},
                  {Rect{{0.8, 0.45}, {0.9, 0.55}}, 0.01}};
        s.exits = {{0.0, 1.5, "bottom", 0.05, 0.25, "left"},
                   {0.0, 1.5, "bottom", 0.75, 0.95, "right"}};
    } else if (name == "test5") {
        s.name = "test5";
        s.T = 2.5;
        s.nT = 200;
        s.sigma = 0.0;
        s.theta = 0.25;
        s.forecast_horizon = 0.24;
        s.interaction.c_rep = 8.0;
        s.mode = ProblemMode::MinimumTime;
        s.rho0 = {{Rect{{0.4, 0.4}, {0.6, 0.6}}, 0.016}};
        s.exits = {{0.0, 0.48, "top", 0.4, 0.6, "top"},
                   {0.48, 2.5, "bottom", 0.4, 0.6, "bottom"}};
    } else {
        throw ConfigError("scenario: unknown builtin '" + std::string(name) +
                          "' (expected test1..test5)");
    }
    validate(s);
    return s;
}

// ---------------------------------------------------------------------------
// JSON config

namespace {

const json& member(const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing");
    return *it;
}

double num_at(const json& obj, const std::string& path, const char* key) {
    const json& v = member(obj, path, key);
    if (!v.is_number()) fail(path + "." + key, "must be a number");
    return v.get<double>();
}

int int_at(const json& obj, const std::string& path, const char* key) {
    const json& v = member(obj, path, key);
    if (!v.is_number_integer()) fail(path + "." + key, "must be an integer");
    return v.get<int>();
}

bool bool_at(const json& obj, const std::string& path, const char* key) {
    const json& v = member(obj, path, key);
    if (!v.is_boolean()) fail(path + "." + key, "must be a boolean");
    return v.get<bool>();
}

std::string str_at(const json& obj, const std::string& path, const char* key) {
    const json& v = member(obj, path, key);
    if (!v.is_string()) fail(path + "." + key, "must be a string");
    return v.get<std::string>();
}

Vec2 vec2_at(const json& obj, const std::string& path, const char* key) {
    const json& v = member(obj, path, key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(path + "." + key, "must be [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

Scenario parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");

    Scenario s;
    s.name = doc.contains("name") ? str_at(doc, "", "name") : "custom";

    const json& grid = member(doc, "config", "grid");
    s.domain_size = vec2_at(grid, "grid", "domain");
    s.n1 = int_at(grid, "grid", "n1");
    s.n2 = int_at(grid, "grid", "n2");
    s.T = num_at(grid, "grid", "T");
    s.nT = int_at(grid, "grid", "nT");

    const json& model = member(doc, "config", "model");
    s.sigma = num_at(model, "model", "sigma");
    s.theta = num_at(model, "model", "theta");
    s.interaction.c_rep = num_at(model, "model", "c_rep");
    s.interaction.r0 = num_at(model, "model", "r0");
    s.interaction.r = num_at(model, "model", "r");
    s.control_count = int_at(model, "model", "K");

    const json& costs = member(doc, "config", "costs");
    const std::string mode = str_at(costs, "costs", "mode");
    if (mode == "finite_horizon") {
        s.mode = ProblemMode::FiniteHorizon;
    } else if (mode == "minimum_time") {
        s.mode = ProblemMode::MinimumTime;
    } else {
        fail("costs.mode", "must be finite_horizon|minimum_time");
    }
    if (s.mode == ProblemMode::FiniteHorizon) {
        const json& run = member(costs, "costs", "running");
        const std::string kind = str_at(run, "costs.running", "type");
        if (kind == "constant") {
            s.running = {RunningCost::Kind::Constant, num_at(run, "costs.running", "c0"), 0.0,
                         0.0};
        } else if (kind == "linear_x1") {
            s.running = {RunningCost::Kind::LinearX1, num_at(run, "costs.running", "c0"),
                         num_at(run, "costs.running", "c1"), 0.0};
        } else if (kind == "linear_rho") {
            s.running = {RunningCost::Kind::LinearRho, 0.0, 0.0,
                         num_at(run, "costs.running", "c")};
        } else {
            fail("costs.running.type", "must be constant|linear_x1|linear_rho");
        }
        const json& term = member(costs, "costs", "terminal");
        const std::string tkind = str_at(term, "costs.terminal", "type");
        if (tkind == "distance") {
            s.terminal = {TerminalCost::Kind::DistanceTo,
                          vec2_at(term, "costs.terminal", "center"), 0.0};
        } else if (tkind == "constant") {
            s.terminal = {TerminalCost::Kind::Constant, {0.0, 0.0},
                          num_at(term, "costs.terminal", "value")};
        } else {
            fail("costs.terminal.type", "must be distance|constant");
        }
    }

    const json& rho0 = member(doc, "config", "rho0");
    if (!rho0.is_array()) fail("rho0", "must be an array of blocks");
    for (size_t b = 0; b < rho0.size(); ++b) {
        const std::string path = "rho0[" + std::to_string(b) + "]";
        const json& block = rho0[b];
        if (!block.is_object()) fail(path, "must be an object");
        const json& r = member(block, path, "rect");
        if (!r.is_array() || r.size() != 4) fail(path + ".rect", "must be [x0, y0, x1, y1]");
        RhoBlock rb;
        rb.rect = Rect{{r[0].get<double>(), r[1].get<double>()},
                       {r[2].get<double>(), r[3].get<double>()}};
        rb.mass = num_at(block, path, "mass");
        s.rho0.push_back(rb);
    }

    if (s.mode == ProblemMode::MinimumTime) {
        const json& target = member(doc, "config", "target");
        s.forecast_horizon =
            target.contains("Theta") ? num_at(target, "target", "Theta") : 0.0;
        const json& segs = member(target, "target", "segments");
        if (!segs.is_array() || segs.empty()) {
            fail("target.segments", "must be a nonempty array");
        }
        for (size_t e = 0; e < segs.size(); ++e) {
            const std::string path = "target.segments[" + std::to_string(e) + "]";
            const json& seg = segs[e];
            ExitSpec ex;
            ex.t0 = num_at(seg, path, "t0");
            ex.t1 = num_at(seg, path, "t1");
            ex.side = str_at(seg, path, "side");
            const json& span = member(seg, path, "span");
            if (!span.is_array() || span.size() != 2) fail(path + ".span", "must be [lo, hi]");
            ex.lo = span[0].get<double>();
            ex.hi = span[1].get<double>();
            ex.label = seg.contains("label") ? str_at(seg, path, "label")
                                             : "exit" + std::to_string(e);
            s.exits.push_back(std::move(ex));
        }
    } else if (doc.contains("target")) {
        fail("target", "finite-horizon mode takes no target section");
    }

    if (doc.contains("solver")) {
        const json& solver = doc["solver"];
        if (solver.contains("tol")) s.solver.tol = num_at(solver, "solver", "tol");
        if (solver.contains("max_iters")) {
            s.solver.max_iters = int_at(solver, "solver", "max_iters");
        }
        if (solver.contains("fictitious_play")) {
            s.solver.fictitious_play = bool_at(solver, "solver", "fictitious_play");
        }
        if (solver.contains("stagnation_window")) {
            s.solver.stagnation_window = int_at(solver, "solver", "stagnation_window");
        }
    }

    validate(s);
    return s;
}

Scenario parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const Scenario& s) {
    json doc;
    doc["name"] = s.name;
    doc["grid"] = {{"domain", {s.domain_size.x, s.domain_size.y}},
                   {"n1", s.n1},
                   {"n2", s.n2},
                   {"T", s.T},
                   {"nT", s.nT}};
    doc["model"] = {{"sigma", s.sigma},        {"theta", s.theta},
                    {"c_rep", s.interaction.c_rep}, {"r0", s.interaction.r0},
                    {"r", s.interaction.r},    {"K", s.control_count}};
    json costs;
    costs["mode"] = s.mode == ProblemMode::FiniteHorizon ? "finite_horizon" : "minimum_time";
    if (s.mode == ProblemMode::FiniteHorizon) {
        json run;
        switch (s.running.kind) {
            case RunningCost::Kind::Constant:
                run = {{"type", "constant"}, {"c0", s.running.c0}};
                break;
            case RunningCost::Kind::LinearX1:
                run = {{"type", "linear_x1"}, {"c0", s.running.c0}, {"c1", s.running.c1}};
                break;
            case RunningCost::Kind::LinearRho:
                run = {{"type", "linear_rho"}, {"c", s.running.c}};
                break;
        }
        costs["running"] = run;
        if (s.terminal.kind == TerminalCost::Kind::DistanceTo) {
            costs["terminal"] = {{"type", "distance"},
                                 {"center", {s.terminal.center.x, s.terminal.center.y}}};
        } else {
            costs["terminal"] = {{"type", "constant"}, {"value", s.terminal.value}};
        }
    }
    doc["costs"] = costs;
    json rho0 = json::array();
    for (const auto& b : s.rho0) {
        rho0.push_back({{"rect", {b.rect.lo.x, b.rect.lo.y, b.rect.hi.x, b.rect.hi.y}},
                        {"mass", b.mass}});
    }
    doc["rho0"] = rho0;
    if (s.mode == ProblemMode::MinimumTime) {
        json target;
        target["Theta"] = s.forecast_horizon;
        json segs = json::array();
        for (const auto& ex : s.exits) {
            segs.push_back({{"t0", ex.t0},
                            {"t1", ex.t1},
                            {"side", ex.side},
                            {"span", {ex.lo, ex.hi}},
                            {"label", ex.label}});
        }
        target["segments"] = segs;
        doc["target"] = target;
    }
    doc["solver"] = {{"tol", s.solver.tol},
                     {"max_iters", s.solver.max_iters},
                     {"fictitious_play", s.solver.fictitious_play},
                     {"stagnation_window", s.solver.stagnation_window}};
    return doc.dump(2) + "\n";
}

}  // namespace mfgcrowd
