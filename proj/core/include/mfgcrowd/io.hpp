#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "mfgcrowd/fields.hpp"
#include "mfgcrowd/mfg_engine.hpp"

namespace mfgcrowd {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Density frame as CSV: one comment header line `# t=<time> mass=<mass>`,
/// then n2 rows of n1 comma-separated values, row j=0 first. Values use
/// round-trip precision, so reading the file back reproduces the slice
/// exactly.
void write_density_csv(const DensityField& slice, const Grid& g, double time,
                       const std::filesystem::path& path);

/// Reads a frame written by write_density_csv.
DensityField read_density_csv(const std::filesystem::path& path, double* time_out = nullptr,
                              double* mass_out = nullptr);

/// 8-bit binary PGM, pixel = round(255 * min(rho/scale, 1)), with the
/// domain's lower-left corner on the image's bottom row.
void write_pgm(const DensityField& slice, const std::filesystem::path& path, double scale);

/// CSV with columns outer_step,k,E_k,verdict (one row per iterate).
void write_convergence_log(std::span<const ConvergenceRecord> records,
                           const std::filesystem::path& path);

/// Per-step series: step, time, mass, barycenter, cumulative evacuated mass
/// (total and per exit).
void write_metrics_csv(const SimulationResult& result, const Grid& g,
                       const std::filesystem::path& path);

/// Mass-weighted mean position of a slice; the domain center for an empty
/// slice.
Vec2 barycenter(const DensityField& slice, const Grid& g);

}  // namespace mfgcrowd
