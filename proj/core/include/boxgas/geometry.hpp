#pragma once

#include <array>
#include <cstdint>

#include "boxgas/common.hpp"

namespace boxgas {

// Index of a grid cell [k*delta, (k+1)*delta) per axis.
struct CubeIndex {
    std::array<int64_t, kMaxDim> k{};
    bool operator==(const CubeIndex&) const = default;
};

// Centered cube Lambda = [-L, L]^d partitioned into cells of side delta.
// 2L/delta must be a positive integer so the cells tile Lambda exactly; the
// grid is anchored so cell faces coincide with the walls of Lambda.
struct SimBox {
    int d;
    double L;
    double delta;

    SimBox(int d_, double L_, double delta_);

    double volume() const;            // (2L)^d
    int64_t cells_per_side() const;   // 2L/delta
    int64_t cell_count() const;       // (2L/delta)^d
    bool contains(const Vec& x) const;  // componentwise |x_i| <= L
    // Lower corner of a cell in box-grid coordinates.
    double cell_low(int64_t k) const;
};

// min_i (L - |x_i|): distance from x to the boundary of Lambda, in [0, L].
// Throws std::domain_error if x lies outside Lambda.
double boundary_distance(const SimBox& box, const Vec& x);

// Cell of the box-anchored grid containing x (half-open cells). Indices are
// relative to the cell whose lower corner sits at the origin when 2L/delta is
// even; for an odd cell count the origin cell is index 0.
CubeIndex cube_of(const SimBox& box, const Vec& x);

// Cell of the absolute grid [k*delta,(k+1)*delta)^d containing x. Used for
// boundary-configuration bookkeeping, which is independent of any box.
CubeIndex grid_cell(double delta, const Vec& x, int d);

// Infimum of ||y|| over the closed cell (the strictest point of the cell).
double cell_inf_radius(double delta, const CubeIndex& cell, int d);

// Concentric shrunken box Lambda_{L-h}. The cell side is re-chosen as the
// largest value not exceeding the original delta that divides 2(L-h) evenly.
SimBox shrink(const SimBox& box, double h);

}  // namespace boxgas
