#include "mfgcrowd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "mfgcrowd/errors.hpp"

namespace mfgcrowd {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view text, const std::filesystem::path& path) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{}) {
        throw ConfigError("csv: bad number '" + std::string(text) + "' in " + path.string());
    }
    return v;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw ConfigError("io: cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

void write_density_csv(const DensityField& slice, const Grid& g, double time,
                       const std::filesystem::path& path) {
    std::ostringstream buf;
    buf << "# t=" << format_double(time) << " mass=" << format_double(total_mass(slice, g))
        << "\n";
    for (int j = 0; j < slice.n2(); ++j) {
        for (int i = 0; i < slice.n1(); ++i) {
            if (i) buf << ',';
            buf << format_double(slice.at(i, j));
        }
        buf << '\n';
    }
    auto out = open_out(path, std::ios::binary);
    out << buf.str();
}

DensityField read_density_csv(const std::filesystem::path& path, double* time_out,
                              double* mass_out) {
    std::ifstream in(path);
    if (!in) throw ConfigError("csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("# t=", 0) != 0) {
        throw ConfigError("csv: missing header in " + path.string());
    }
    const auto mass_pos = line.find(" mass=");
    if (mass_pos == std::string::npos) {
        throw ConfigError("csv: malformed header in " + path.string());
    }
    if (time_out) *time_out = parse_double({line.data() + 4, mass_pos - 4}, path);
    if (mass_out) {
        *mass_out = parse_double({line.data() + mass_pos + 6, line.size() - mass_pos - 6}, path);
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        size_t pos = 0;
        while (pos <= line.size()) {
            size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            row.push_back(parse_double({line.data() + pos, comma - pos}, path));
            pos = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("csv: no data rows in " + path.string());
    const int n2 = static_cast<int>(rows.size());
    const int n1 = static_cast<int>(rows[0].size());
    DensityField d(n1, n2);
    for (int j = 0; j < n2; ++j) {
        if (static_cast<int>(rows[j].size()) != n1) {
            throw ConfigError("csv: ragged rows in " + path.string());
        }
        for (int i = 0; i < n1; ++i) d.at(i, j) = rows[j][i];
    }
    return d;
}

void write_pgm(const DensityField& slice, const std::filesystem::path& path, double scale) {
    if (!(scale > 0.0)) throw ConfigError("pgm: scale must be > 0");
    auto out = open_out(path, std::ios::binary);
    out << "P5\n" << slice.n1() << " " << slice.n2() << "\n255\n";
    std::vector<std::uint8_t> row(slice.n1());
    for (int j = slice.n2() - 1; j >= 0; --j) {
        for (int i = 0; i < slice.n1(); ++i) {
            const double v = std::min(slice.at(i, j) / scale, 1.0);
            row[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
        }
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
}

void write_convergence_log(std::span<const ConvergenceRecord> records,
                           const std::filesystem::path& path) {
    auto out = open_out(path, std::ios::binary);
    out << "outer_step,k,E_k,verdict\n";
    for (const auto& rec : records) {
        for (size_t k = 0; k < rec.iterates.size(); ++k) {
            out << rec.outer_step << ',' << (k + 1) << ',' << format_double(rec.iterates[k])
                << ',' << to_string(rec.verdict) << '\n';
        }
    }
}

Vec2 barycenter(const DensityField& slice, const Grid& g) {
    double m = 0.0, sx = 0.0, sy = 0.0;
    for (int j = 0; j < slice.n2(); ++j) {
        for (int i = 0; i < slice.n1(); ++i) {
            const double v = slice.at(i, j);
            if (v == 0.0) continue;
            const Vec2 c = g.center(i, j);
            m += v;
            sx += v * c.x;
            sy += v * c.y;
        }
    }
    if (m == 0.0) {
        const Vec2 lo = g.domain_lo(), hi = g.domain_hi();
        return {(lo.x + hi.x) / 2, (lo.y + hi.y) / 2};
    }
    return {sx / m, sy / m};
}

void write_metrics_csv(const SimulationResult& result, const Grid& g,
                       const std::filesystem::path& path) {
    auto out = open_out(path, std::ios::binary);
    out << "step,t,mass,bary_x1,bary_x2,evac_total";
    for (const auto& label : result.exit_labels) out << ",evac_" << label;
    out << '\n';
    for (int n = 0; n < result.density_history.size(); ++n) {
        const DensityField& slice = result.density_history.slice(n);
        const Vec2 b = barycenter(slice, g);
        out << n << ',' << format_double(g.time_at(n)) << ','
            << format_double(total_mass(slice, g)) << ',' << format_double(b.x) << ','
            << format_double(b.y) << ',' << format_double(result.evacuated_over_time[n]);
        for (const auto& series : result.evacuated_per_exit) {
            out << ',' << format_double(series[n]);
        }
        out << '\n';
    }
}

}  // namespace mfgcrowd
