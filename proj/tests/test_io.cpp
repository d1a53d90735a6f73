#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mfgcrowd/io.hpp"
#include "test_support.hpp"

using namespace mfgcrowd;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "mfgcrowd_io_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("write_density_csv: single-cell grid") {
    const Grid g = build_grid({1.0, 1.0}, 1, 1, 1.0, 1);
    DensityField d(1, 1, 3.5);
    const auto path = temp_file("single.csv");
    write_density_csv(d, g, 0.25, path);
    const std::string text = slurp(path);
    CHECK(text == "# t=0.25 mass=3.5\n3.5\n");
}

TEST_CASE("write_density_csv: exact round trip with header metadata") {
    const Grid g = mfgtest::unit_grid(9, 4);
    std::mt19937 rng(97);
    DensityField d = mfgtest::random_density(g, rng, 123.456);
    const auto path = temp_file("roundtrip.csv");
    write_density_csv(d, g, 0.125, path);

    double t = -1.0, mass = -1.0;
    const DensityField back = read_density_csv(path, &t, &mass);
    CHECK(back == d);
    CHECK(t == 0.125);
    CHECK(mass == total_mass(d, g));
}

TEST_CASE("write_density_csv: byte-identical rewrites") {
    const Grid g = mfgtest::unit_grid(7, 4);
    std::mt19937 rng(101);
    const DensityField d = mfgtest::random_density(g, rng);
    const auto p1 = temp_file("det1.csv");
    const auto p2 = temp_file("det2.csv");
    write_density_csv(d, g, 0.5, p1);
    write_density_csv(d, g, 0.5, p2);
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("write_pgm: scaling, clamping, and row order") {
    const Grid g = build_grid({1.0, 1.0}, 3, 2, 1.0, 1);
    DensityField d(3, 2, 0.0);
    d.at(0, 0) = 2.0;   // bottom-left: saturates at 255
    d.at(2, 1) = 0.5;   // top-right: half gray
    const auto path = temp_file("frame.pgm");
    write_pgm(d, path, 1.0);
    const std::string bytes = slurp(path);
    const std::string header = "P5\n3 2\n255\n";
    REQUIRE(bytes.size() == header.size() + 6);
    CHECK(bytes.substr(0, header.size()) == header);
    const auto* px = reinterpret_cast<const unsigned char*>(bytes.data() + header.size());
    // First written row is j = n2-1 (top of the image).
    CHECK(px[0] == 0);
    CHECK(px[2] == 128);
    CHECK(px[3] == 255);
    CHECK(px[4] == 0);

    DensityField zero(3, 2, 0.0);
    write_pgm(zero, path, 4.0);
    const std::string zbytes = slurp(path);
    for (size_t m = header.size(); m < zbytes.size(); ++m) CHECK(zbytes[m] == 0);
}

TEST_CASE("write_convergence_log: header only when empty, rows otherwise") {
    const auto path = temp_file("conv.csv");
    write_convergence_log({}, path);
    CHECK(slurp(path) == "outer_step,k,E_k,verdict\n");

    std::vector<ConvergenceRecord> recs(2);
    recs[0].outer_step = 0;
    recs[0].iterates = {0.5, 0.0};
    recs[0].verdict = Verdict::Converged;
    recs[1].outer_step = 1;
    recs[1].iterates = {0.5, 0.4, 0.45};
    recs[1].verdict = Verdict::Stabilized;
    write_convergence_log(recs, path);
    CHECK(slurp(path) ==
          "outer_step,k,E_k,verdict\n"
          "0,1,0.5,converged\n"
          "0,2,0,converged\n"
          "1,1,0.5,stabilized\n"
          "1,2,0.4,stabilized\n"
          "1,3,0.45,stabilized\n");
}

TEST_CASE("barycenter: mass-weighted mean") {
    const Grid g = mfgtest::unit_grid(10, 1);
    DensityField d(10, 10, 0.0);
    d.at(2, 3) = 1.0;
    d.at(6, 3) = 1.0;
    const Vec2 b = barycenter(d, g);
    CHECK(b.x == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(b.y == doctest::Approx(0.35).epsilon(1e-12));

    const Vec2 empty = barycenter(DensityField(10, 10, 0.0), g);
    CHECK(empty.x == doctest::Approx(0.5));
}

TEST_CASE("format_double: shortest round-trip strings") {
    CHECK(format_double(0.25) == "0.25");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");
    const double v = 1.0 / 3.0;
    CHECK(std::stod(format_double(v)) == v);
}
