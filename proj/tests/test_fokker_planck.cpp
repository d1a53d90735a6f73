#include <doctest.h>

#include <cmath>
#include <random>

#include "mfgcrowd/errors.hpp"
#include "mfgcrowd/fokker_planck.hpp"
#include "test_support.hpp"

using namespace mfgcrowd;

namespace {

struct FpFixture {
    Grid g;
    InteractionParams params{0.0, 0.01, 0.06};
    std::vector<Vec2> dirs;
    SensoryStencilSet stencils;
    WallMask walls;

    FpFixture(int n, int nT, double T, std::vector<Vec2> directions)
        : g(mfgtest::unit_grid(n, nT, T)), dirs(std::move(directions)),
          stencils(SensoryStencilSet::build(g, params, dirs)), walls(WallMask::closed(g)) {}

    std::vector<std::uint16_t> uniform_alpha(std::uint16_t k = 1) const {
        return std::vector<std::uint16_t>(g.cells(), k);
    }
};

}  // namespace

TEST_CASE("gamma_weights: identity, full shift, half shift") {
    const Grid g = mfgtest::unit_grid(10, 10);  // dx = 0.1

    const GammaWeights still = gamma_weights({0.0, 0.0}, g);
    CHECK(still.w[1][1] == 1.0);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != 1 || b != 1) CHECK(still.w[a][b] == 0.0);

    const GammaWeights full = gamma_weights({g.dx1, 0.0}, g);
    CHECK(full.w[2][1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(full.w[1][1] == doctest::Approx(0.0).epsilon(1e-14));

    const GammaWeights half = gamma_weights({g.dx1 / 2, 0.0}, g);
    CHECK(half.w[1][1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(half.w[2][1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("gamma_weights: convex combination under CFL, fatal beyond") {
    const Grid g = mfgtest::unit_grid(10, 10);
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec2 x{unif(rng) * g.dx1, unif(rng) * g.dx2};
        const GammaWeights w = gamma_weights(x, g);
        double sum = 0.0;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                CHECK(w.w[a][b] >= 0.0);
                sum += w.w[a][b];
            }
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gamma_weights({1.5 * g.dx1, 0.0}, g), CflError);
    CHECK_THROWS_AS(gamma_weights({0.0, -1.5 * g.dx2}, g), CflError);
}

TEST_CASE("push_forward_step: zero velocity leaves the density unchanged") {
    FpFixture f(12, 10, 1.0, {{0.0, 0.0}});
    std::mt19937 rng(59);
    const DensityField rho = mfgtest::random_density(f.g, rng);
    const auto out = push_forward_step(rho, f.uniform_alpha(), f.dirs, f.g, f.stencils,
                                       f.params, f.walls, 0.0);
    CHECK(out.density == rho);
    CHECK(out.report.max_speed_seen == 0.0);
}

TEST_CASE("push_forward_step: unit displacement shifts one cell right") {
    FpFixture f(10, 10, 1.0, {{1.0, 0.0}});  // dt = dx = 0.1
    DensityField rho(f.g.n1, f.g.n2, 0.0);
    rho.at(4, 5) = 7.0;
    const auto out = push_forward_step(rho, f.uniform_alpha(), f.dirs, f.g, f.stencils,
                                       f.params, f.walls, 0.0);
    CHECK(out.density.at(5, 5) == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(out.density.at(4, 5) == 0.0);
    CHECK(out.report.mass_after == doctest::Approx(out.report.mass_before).epsilon(1e-14));
}

TEST_CASE("push_forward_step: uniform density is a diffusion fixed point") {
    FpFixture f(12, 100, 1.0, {{0.0, 0.0}});
    const DensityField rho(f.g.n1, f.g.n2, 3.25);
    const double sigma = 0.1;  // 4*sigma*dt < dx*dx
    const auto out = push_forward_step(rho, f.uniform_alpha(), f.dirs, f.g, f.stencils,
                                       f.params, f.walls, sigma);
    for (double v : out.density.values()) CHECK(v == doctest::Approx(3.25).epsilon(1e-13));
}

TEST_CASE("push_forward_step: conserves mass with impermeable walls") {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * 3.14159265358979);
    for (int trial = 0; trial < 5; ++trial) {
        // Random direction table, speeds at the CFL limit.
        std::vector<Vec2> dirs;
        for (int k = 0; k < 8; ++k) {
            const double a = ang(rng);
            dirs.push_back({std::cos(a), std::sin(a)});
        }
        FpFixture f(15, 20, 1.0, dirs);
        DensityField rho = mfgtest::random_density(f.g, rng);
        std::uniform_int_distribution<int> pick(1, 8);
        std::vector<std::uint16_t> alpha(f.g.cells());
        for (auto& a : alpha) a = static_cast<std::uint16_t>(pick(rng));
        double mass = total_mass(rho, f.g);
        for (int step = 0; step < 10; ++step) {
            auto out = push_forward_step(rho, alpha, f.dirs, f.g, f.stencils, f.params,
                                         f.walls, 0.0);
            rho = std::move(out.density);
            for (double v : rho.values()) CHECK(v >= 0.0);
        }
        CHECK(total_mass(rho, f.g) == doctest::Approx(mass).epsilon(1e-12));
    }
}

TEST_CASE("push_forward_step: CFL violation is fatal") {
    FpFixture f(10, 5, 1.0, {{1.0, 0.0}});  // dt = 0.2 > dx = 0.1
    DensityField rho(f.g.n1, f.g.n2, 0.0);
    rho.at(4, 5) = 1.0;
    CHECK_THROWS_AS(push_forward_step(rho, f.uniform_alpha(), f.dirs, f.g, f.stencils,
                                      f.params, f.walls, 0.0),
                    CflError);
}

TEST_CASE("push_forward_step: wall projection keeps mass inside") {
    FpFixture f(10, 10, 1.0, {{-1.0, 0.0}});
    DensityField rho(f.g.n1, f.g.n2, 0.0);
    rho.at(0, 5) = 2.0;  // pressed against the left wall, pushing left
    const auto out = push_forward_step(rho, f.uniform_alpha(), f.dirs, f.g, f.stencils,
                                       f.params, f.walls, 0.0);
    CHECK(out.density.at(0, 5) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(out.report.mass_after == doctest::Approx(out.report.mass_before).epsilon(1e-12));
}

TEST_CASE("absorb_target_mass: zeroes targets and reports the mass") {
    const Grid g = mfgtest::unit_grid(10, 1);
    DensityField rho(g.n1, g.n2, 0.0);
    const std::vector<Cell> targets = {{3, 0}, {4, 0}};

    DensityField empty = rho;
    CHECK(absorb_target_mass(empty, targets, g) == 0.0);
    CHECK(empty == rho);

    rho.at(3, 0) = 5.0;
    const double evac = absorb_target_mass(rho, targets, g);
    CHECK(evac == doctest::Approx(5.0 * g.dx1 * g.dx2).epsilon(1e-14));
    CHECK(rho.at(3, 0) == 0.0);
    CHECK(absorb_target_mass(rho, targets, g) == 0.0);  // idempotent after the first call
}
