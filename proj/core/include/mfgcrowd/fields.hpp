#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfgcrowd/geometry.hpp"
#include "mfgcrowd/grid.hpp"

namespace mfgcrowd {

/// One spatial density slice, n1 x n2 nonnegative values indexed j*n1 + i.
class DensityField {
  public:
    DensityField() = default;
    DensityField(int n1, int n2, double value = 0.0)
        : n1_(n1), n2_(n2), v_(static_cast<size_t>(n1) * n2, value) {}

    int n1() const { return n1_; }
    int n2() const { return n2_; }
    double at(int i, int j) const { return v_[static_cast<size_t>(j) * n1_ + i]; }
    double& at(int i, int j) { return v_[static_cast<size_t>(j) * n1_ + i]; }
    std::span<const double> values() const { return v_; }
    std::span<double> values() { return v_; }
    bool same_shape(const DensityField& o) const { return n1_ == o.n1_ && n2_ == o.n2_; }

    bool operator==(const DensityField&) const = default;

  private:
    int n1_ = 0, n2_ = 0;
    std::vector<double> v_;
};

/// Full density history: nT+1 slices indexed by time step.
struct SpaceTimeDensity {
    std::vector<DensityField> slices;

    int size() const { return static_cast<int>(slices.size()); }
    const DensityField& slice(int n) const { return slices[n]; }
    DensityField& slice(int n) { return slices[n]; }

    bool operator==(const SpaceTimeDensity&) const = default;
};

/// Space-time value function with a finite saturation constant standing in
/// for the +infinity wall data. Entries never exceed wall_value.
class ValueField {
  public:
    ValueField() = default;
    ValueField(int n_slices, int n1, int n2, double wall_value, double fill = 0.0)
        : n_slices_(n_slices), n1_(n1), n2_(n2), wall_value_(wall_value),
          v_(static_cast<size_t>(n_slices) * n1 * n2, fill) {}

    int slices() const { return n_slices_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    double wall_value() const { return wall_value_; }

    std::span<const double> slice(int n) const {
        return {v_.data() + static_cast<size_t>(n) * n1_ * n2_, static_cast<size_t>(n1_) * n2_};
    }
    std::span<double> slice(int n) {
        return {v_.data() + static_cast<size_t>(n) * n1_ * n2_, static_cast<size_t>(n1_) * n2_};
    }
    double at(int n, int i, int j) const {
        return v_[(static_cast<size_t>(n) * n2_ + j) * n1_ + i];
    }

    bool operator==(const ValueField&) const = default;

  private:
    int n_slices_ = 0, n1_ = 0, n2_ = 0;
    double wall_value_ = 0.0;
    std::vector<double> v_;
};

/// Synthesized optimal control per cell per time step, stored as 1-based
/// indices into the discrete control set {a_1, ..., a_K}.
class ControlField {
  public:
    ControlField() = default;
    ControlField(int n_slices, int n1, int n2)
        : n_slices_(n_slices), n1_(n1), n2_(n2),
          idx_(static_cast<size_t>(n_slices) * n1 * n2, 1) {}

    int slices() const { return n_slices_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }

    std::span<const std::uint16_t> slice(int n) const {
        return {idx_.data() + static_cast<size_t>(n) * n1_ * n2_, static_cast<size_t>(n1_) * n2_};
    }
    std::span<std::uint16_t> slice(int n) {
        return {idx_.data() + static_cast<size_t>(n) * n1_ * n2_, static_cast<size_t>(n1_) * n2_};
    }
    std::uint16_t at(int n, int i, int j) const {
        return idx_[(static_cast<size_t>(n) * n2_ + j) * n1_ + i];
    }

    bool operator==(const ControlField&) const = default;

  private:
    int n_slices_ = 0, n1_ = 0, n2_ = 0;
    std::vector<std::uint16_t> idx_;
};

/// Cell-averaged initial condition: uniform density over the cells whose
/// centers fall in `region`, scaled so the total mass equals `mass`.
/// Throws ConfigError when the region captures no cell center.
DensityField cell_average_init(const Rect& region, double mass, const Grid& g);

/// Sum of rho * dx1 * dx2 over all cells.
double total_mass(const DensityField& d, const Grid& g);

/// Discrete L1(Omega x [0,T]) distance between two histories. Time uses
/// trapezoidal weights (half weight on the first and last slice) so the
/// unit field over the unit square and [0,1] has norm exactly 1.
double l1_distance(const SpaceTimeDensity& a, const SpaceTimeDensity& b, const Grid& g);

/// Uniform average of a nonempty history of density iterates, computed by
/// the incremental rule avg_k = ((k-1) avg_{k-1} + x_k) / k.
SpaceTimeDensity fictitious_play_average(std::span<const SpaceTimeDensity> history);

/// One incremental step of the same rule: avg <- (count*avg + x)/(count+1).
void accumulate_average(SpaceTimeDensity& avg, const SpaceTimeDensity& x, int count);

}  // namespace mfgcrowd
