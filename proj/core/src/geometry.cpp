#include "boxgas/geometry.hpp"

#include <cmath>
#include <string>

namespace boxgas {

SimBox::SimBox(int d_, double L_, double delta_) : d(d_), L(L_), delta(delta_) {
    require(d >= 1 && d <= kMaxDim, "SimBox: d must be in 1.." + std::to_string(kMaxDim));
    require(L > 0.0, "SimBox: L must be > 0");
    require(delta > 0.0, "SimBox: delta must be > 0");
    const double m = 2.0 * L / delta;
    require(std::abs(m - std::round(m)) < 1e-9 * std::max(1.0, m),
            "SimBox: 2L/delta must be a positive integer");
    require(std::round(m) >= 1.0, "SimBox: 2L/delta must be >= 1");
}

double SimBox::volume() const { return std::pow(2.0 * L, d); }

int64_t SimBox::cells_per_side() const { return static_cast<int64_t>(std::round(2.0 * L / delta)); }

int64_t SimBox::cell_count() const {
    int64_t n = 1;
    const int64_t m = cells_per_side();
    for (int i = 0; i < d; ++i) n *= m;
    return n;
}

bool SimBox::contains(const Vec& x) const {
    for (int i = 0; i < d; ++i)
        if (std::abs(x[i]) > L) return false;
    return true;
}

double SimBox::cell_low(int64_t k) const {
    const int64_t m = cells_per_side();
    return (static_cast<double>(k) + static_cast<double>(m / 2)) * delta - L;
}

double boundary_distance(const SimBox& box, const Vec& x) {
    double dmin = kInf;
    for (int i = 0; i < box.d; ++i) {
        const double t = box.L - std::abs(x[i]);
        require(t >= 0.0, "boundary_distance: x outside Lambda");
        if (t < dmin) dmin = t;
    }
    return dmin;
}

CubeIndex cube_of(const SimBox& box, const Vec& x) {
    // Grid anchored at -L so the walls are cell faces; indices shifted so the
    // origin cell matches the absolute grid whenever L/delta is integral.
    CubeIndex c;
    const int64_t half = box.cells_per_side() / 2;
    for (int i = 0; i < box.d; ++i)
        c.k[i] = static_cast<int64_t>(std::floor((x[i] + box.L) / box.delta)) - half;
    return c;
}

CubeIndex grid_cell(double delta, const Vec& x, int d) {
    require(delta > 0.0, "grid_cell: delta must be > 0");
    CubeIndex c;
    for (int i = 0; i < d; ++i) c.k[i] = static_cast<int64_t>(std::floor(x[i] / delta));
    return c;
}

double cell_inf_radius(double delta, const CubeIndex& cell, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const double lo = cell.k[i] * delta;
        const double hi = lo + delta;
        double t = 0.0;
        if (lo > 0.0)
            t = lo;
        else if (hi < 0.0)
            t = -hi;
        s += t * t;
    }
    return std::sqrt(s);
}

SimBox shrink(const SimBox& box, double h) {
    require(h >= 0.0, "shrink: h must be >= 0");
    require(h < box.L, "shrink: h must be < L");
    const double L2 = box.L - h;
    const double span = 2.0 * L2;
    const auto n = static_cast<int64_t>(std::ceil(span / box.delta - 1e-12));
    return SimBox(box.d, L2, span / static_cast<double>(n));
}

}  // namespace boxgas
