#include "mfgcrowd/fields.hpp"

#include <cmath>
#include <cstdlib>

#include "mfgcrowd/errors.hpp"

namespace mfgcrowd {

DensityField cell_average_init(const Rect& region, double mass, const Grid& g) {
    if (!(region.area() > 0.0)) {
        throw ConfigError("rho0.region: must have positive area");
    }
    if (!(mass > 0.0)) {
        throw ConfigError("rho0.mass: must be > 0");
    }
    DensityField d(g.n1, g.n2);
    int count = 0;
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            if (region.contains(g.center(i, j))) {
                d.at(i, j) = 1.0;
                ++count;
            }
        }
    }
    if (count == 0) {
        throw ConfigError("rho0.region: intersects no cell center");
    }
    const double value = mass / (count * g.dx1 * g.dx2);
    for (double& v : d.values()) {
        if (v != 0.0) v = value;
    }
    return d;
}

double total_mass(const DensityField& d, const Grid& g) {
    double sum = 0.0;
    for (double v : d.values()) sum += v;
    return sum * g.dx1 * g.dx2;
}

double l1_distance(const SpaceTimeDensity& a, const SpaceTimeDensity& b, const Grid& g) {
    if (a.size() != b.size()) {
        throw InternalError("l1_distance: slice count mismatch");
    }
    const int n_slices = a.size();
    double total = 0.0;
    for (int n = 0; n < n_slices; ++n) {
        const auto& sa = a.slice(n);
        const auto& sb = b.slice(n);
        if (!sa.same_shape(sb)) {
            throw InternalError("l1_distance: slice shape mismatch");
        }
        double s = 0.0;
        const auto va = sa.values();
        const auto vb = sb.values();
        for (size_t m = 0; m < va.size(); ++m) s += std::abs(va[m] - vb[m]);
        const bool endpoint = (n == 0 || n == n_slices - 1) && n_slices > 1;
        total += endpoint ? 0.5 * s : s;
    }
    return total * g.dx1 * g.dx2 * g.dt;
}

void accumulate_average(SpaceTimeDensity& avg, const SpaceTimeDensity& x, int count) {
    if (avg.size() != x.size()) {
        throw InternalError("accumulate_average: slice count mismatch");
    }
    const double k = count + 1;
    for (int n = 0; n < avg.size(); ++n) {
        auto va = avg.slice(n).values();
        const auto vx = x.slice(n).values();
        for (size_t m = 0; m < va.size(); ++m) {
            va[m] = (count * va[m] + vx[m]) / k;
        }
    }
}

SpaceTimeDensity fictitious_play_average(std::span<const SpaceTimeDensity> history) {
    if (history.empty()) {
        throw InternalError("fictitious_play_average: empty history");
    }
    SpaceTimeDensity avg = history[0];
    for (size_t k = 1; k < history.size(); ++k) {
        accumulate_average(avg, history[k], static_cast<int>(k));
    }
    return avg;
}

}  // namespace mfgcrowd
