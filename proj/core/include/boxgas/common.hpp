#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace boxgas {

// Spatial dimension is a runtime parameter; simulation paths support d = 1..3.
inline constexpr int kMaxDim = 3;

using Vec = std::array<double, kMaxDim>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double norm2(const Vec& x, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += x[i] * x[i];
    return s;
}

inline double norm(const Vec& x, int d) { return std::sqrt(norm2(x, d)); }

inline double dist2(const Vec& a, const Vec& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const double dx = a[i] - b[i];
        s += dx * dx;
    }
    return s;
}

inline double dist(const Vec& a, const Vec& b, int d) { return std::sqrt(dist2(a, b, d)); }

// All numeric output is printed with 17 significant digits so that values
// round-trip bit-exactly through text.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::domain_error(msg);
}

// Surface measure of the unit sphere in R^d: 2, 2*pi, 4*pi, ...
inline double sphere_surface(int d) {
    require(d >= 1, "sphere_surface: d must be >= 1");
    const double pi = 3.14159265358979323846;
    return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace boxgas
