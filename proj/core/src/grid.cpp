#include "mfgcrowd/grid.hpp"

#include <algorithm>
#include <string>

#include "mfgcrowd/errors.hpp"

namespace mfgcrowd {

Grid build_grid(Vec2 domain_size, int n1, int n2, double T, int nT, Vec2 origin) {
    if (n1 < 1 || n2 < 1) {
        throw ConfigError("grid: cell counts must be >= 1, got n1=" + std::to_string(n1) +
                          " n2=" + std::to_string(n2));
    }
    if (nT < 1) {
        throw ConfigError("grid: nT must be >= 1, got " + std::to_string(nT));
    }
    if (!(domain_size.x > 0.0) || !(domain_size.y > 0.0)) {
        throw ConfigError("grid: domain side lengths must be > 0");
    }
    if (!(T > 0.0)) {
        throw ConfigError("grid: T must be > 0");
    }
    Grid g;
    g.n1 = n1;
    g.n2 = n2;
    g.dx1 = domain_size.x / n1;
    g.dx2 = domain_size.y / n2;
    g.dt = T / nT;
    g.nT = nT;
    g.origin = origin;
    return g;
}

CflReport check_cfl(const Grid& g, double vmax) {
    CflReport r;
    r.limit = std::min(g.dx1, g.dx2);
    r.ratio = g.dt * vmax / r.limit;
    r.pass = g.dt * vmax <= r.limit;
    return r;
}

}  // namespace mfgcrowd
