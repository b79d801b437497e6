#include "boxgas/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace boxgas {

double integrate(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
    if (hi <= lo) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    // Panels capped at about one decade of dynamic range: on wide tail
    // integrals a single adaptive call exhausts its bisection depth before
    // it resolves the near end and returns a silently poor estimate.
    double total = 0.0, a = lo;
    for (;;) {
        const double cap = 9.0 * std::max(1.0, std::abs(a));
        const double b = (hi - a > cap) ? a + cap : hi;
        total += GK::integrate(f, a, b, 15, rel_tol);
        if (b >= hi) return total;
        a = b;
    }
}

double integrate_split(const std::function<double(double)>& f, double lo, double hi,
                       std::vector<double> breaks, double rel_tol) {
    if (hi <= lo) return 0.0;
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double x) { return x <= lo || x >= hi; }),
                 breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(hi);
    double total = 0.0, a = lo;
    for (double cut : breaks) {
        if (cut > a) total += integrate(f, a, cut, rel_tol);
        a = cut;
    }
    return total;
}

namespace {

using GL = boost::math::quadrature::gauss<double, 8>;

double box_panel(const std::function<double(const Vec&)>& f, const Vec& lo, const Vec& hi,
                 int d) {
    const auto& xs = GL::abscissa();   // non-negative half of the nodes
    const auto& ws = GL::weights();
    // expand the symmetric rule to full node lists per axis
    std::vector<double> node, wt;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == 0.0) {
            node.push_back(0.0);
            wt.push_back(ws[i]);
        } else {
            node.push_back(-xs[i]);
            wt.push_back(ws[i]);
            node.push_back(xs[i]);
            wt.push_back(ws[i]);
        }
    }
    const int n = static_cast<int>(node.size());
    std::array<double, kMaxDim> mid{}, half{};
    for (int i = 0; i < d; ++i) {
        mid[i] = 0.5 * (lo[i] + hi[i]);
        half[i] = 0.5 * (hi[i] - lo[i]);
    }
    double sum = 0.0;
    std::array<int, kMaxDim> idx{};
    for (;;) {
        Vec x{};
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            x[i] = mid[i] + half[i] * node[idx[i]];
            w *= wt[idx[i]] * half[i];
        }
        sum += w * f(x);
        int axis = 0;
        while (axis < d && ++idx[axis] == n) idx[axis++] = 0;
        if (axis == d) break;
    }
    return sum;
}

}  // namespace

double integrate_box(const std::function<double(const Vec&)>& f, const Vec& lo, const Vec& hi,
                     int d, int levels) {
    require(d >= 1 && d <= kMaxDim, "integrate_box: bad dimension");
    const int parts = 1 << levels;
    std::array<double, kMaxDim> step{};
    for (int i = 0; i < d; ++i) step[i] = (hi[i] - lo[i]) / parts;
    double sum = 0.0;
    std::array<int, kMaxDim> idx{};
    for (;;) {
        Vec plo{}, phi{};
        for (int i = 0; i < d; ++i) {
            plo[i] = lo[i] + idx[i] * step[i];
            phi[i] = plo[i] + step[i];
        }
        sum += box_panel(f, plo, phi, d);
        int axis = 0;
        while (axis < d && ++idx[axis] == parts) idx[axis++] = 0;
        if (axis == d) break;
    }
    return sum;
}

}  // namespace boxgas
