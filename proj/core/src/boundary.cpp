#include "boxgas/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "boxgas/rng.hpp"

namespace boxgas {

const char* to_string(GrowthKind k) {
    switch (k) {
        case GrowthKind::Zero: return "zero";
        case GrowthKind::Power: return "power";
        case GrowthKind::Tabulated: return "tabulated";
    }
    return "?";
}

GrowthFunction GrowthFunction::zero() { return GrowthFunction{}; }

GrowthFunction GrowthFunction::power(double q) {
    GrowthFunction g;
    g.kind = GrowthKind::Power;
    g.q = q;
    g.validate();
    return g;
}

GrowthFunction GrowthFunction::tabulated(TableFn t) {
    GrowthFunction g;
    g.kind = GrowthKind::Tabulated;
    g.table = std::move(t);
    g.validate();
    return g;
}

void GrowthFunction::validate() const {
    switch (kind) {
        case GrowthKind::Zero:
            break;
        case GrowthKind::Power:
            require(std::isfinite(q) && q > 0.0, "GrowthFunction: power exponent must be > 0");
            break;
        case GrowthKind::Tabulated: {
            table.validate("growth table");
            require(table.hold_right,
                    "GrowthFunction: tabulated growth must hold its last value");
            double prev = 0.0;
            for (double v : table.v) {
                require(v >= prev, "GrowthFunction: tabulated growth must be non-decreasing");
                prev = v;
            }
            break;
        }
    }
}

double GrowthFunction::operator()(double r) const {
    require(r >= 0.0, "GrowthFunction: radius must be >= 0");
    switch (kind) {
        case GrowthKind::Zero: return 0.0;
        case GrowthKind::Power: return std::pow(r, q);
        case GrowthKind::Tabulated: return table(r);
    }
    return 0.0;
}

GrowthAudit audit_admissible(const GrowthFunction& g, const EnvelopeSpec& env, int n_pairs,
                             uint64_t seed) {
    g.validate();
    GrowthAudit rep;
    RngStream rng(seed, 0xAD317ULL);
    const double tol = 1e-9;

    std::vector<std::pair<double, double>> pairs = {
        {1.0, 1.0}, {env.b, env.b}, {0.5, 2.0}, {0.0, 1.0}};
    for (int i = 0; i < n_pairs; ++i)
        pairs.emplace_back(rng.uniform(0.0, 1e3), rng.uniform(0.0, 1e3));

    for (auto [al, be] : pairs) {
        const double lhs = g(al + be);
        const double rhs = g(al) + g(be);
        if (lhs > rhs * (1.0 + tol) + tol) {
            rep.subadditive = false;
            rep.issues.push_back(
                {"subadditive", "alpha = " + fmt17(al) + ", beta = " + fmt17(be) +
                                    ": g(a+b) = " + fmt17(lhs) + " > " + fmt17(rhs)});
        }
        const double lo = std::min(al, be), hi = std::max(al, be);
        if (g(lo) > g(hi) * (1.0 + tol) + tol) {
            rep.monotone = false;
            rep.issues.push_back({"monotone", "g(" + fmt17(lo) + ") > g(" + fmt17(hi) + ")"});
        }
        ++rep.pairs_sampled;
    }

    switch (g.kind) {
        case GrowthKind::Zero:
            break;
        case GrowthKind::Power:
            rep.unbounded = true;
            if (env.law == EnvelopeLaw::Power && env.C > 0.0 && g.q >= env.p) {
                rep.integrable = false;
                rep.issues.push_back({"integrable", "power growth q = " + fmt17(g.q) +
                                                        " >= tail exponent p = " + fmt17(env.p)});
            }
            break;
        case GrowthKind::Tabulated:
            // bounded growth: eta*g is integrable exactly when eta itself is
            try {
                (void)env.tail_integral();
            } catch (const std::exception& e) {
                rep.integrable = false;
                rep.issues.push_back({"integrable", e.what()});
            }
            break;
    }
    return rep;
}

const char* to_string(BoundaryMode m) {
    switch (m) {
        case BoundaryMode::Empty: return "empty";
        case BoundaryMode::Poisson: return "poisson";
        case BoundaryMode::Saturated: return "saturated";
    }
    return "?";
}

BoundaryMode boundary_mode_from(const std::string& name) {
    if (name == "empty") return BoundaryMode::Empty;
    if (name == "poisson") return BoundaryMode::Poisson;
    if (name == "saturated") return BoundaryMode::Saturated;
    throw std::domain_error("unknown boundary mode: " + name);
}

BoundaryConfiguration generate_boundary(BoundaryMode mode, int d, double rho,
                                        const GrowthFunction& g, double delta, double R_omega,
                                        uint64_t seed) {
    require(d >= 1 && d <= kMaxDim, "generate_boundary: bad dimension");
    require(delta > 0.0, "generate_boundary: delta must be > 0");
    require(rho >= 0.0, "generate_boundary: rho must be >= 0");
    require(R_omega > 0.0, "generate_boundary: extent must be > 0");
    g.validate();

    BoundaryConfiguration omega;
    omega.d = d;
    omega.delta = delta;
    omega.rho = rho;
    omega.growth = g;
    omega.mode = mode;
    omega.seed = seed;
    const auto half =
        std::max<int64_t>(1, static_cast<int64_t>(std::ceil(R_omega / delta - 1e-9)));
    omega.extent = half * delta;
    if (mode == BoundaryMode::Empty || rho == 0.0) return omega;

    const double cellvol = std::pow(delta, d);
    std::array<int64_t, kMaxDim> k{};
    for (int i = 0; i < d; ++i) k[i] = -half;
    for (;;) {
        CubeIndex cell;
        for (int i = 0; i < d; ++i) cell.k[i] = k[i];
        const double r_inf = cell_inf_radius(delta, cell, d);
        const int cap = static_cast<int>(std::floor(cellvol * rho * (1.0 + g(r_inf))));
        // one stream per cell, so output does not depend on scan order
        RngStream rng(seed, derive_seed(0xB0D17ULL, static_cast<uint64_t>(k[0]),
                                        static_cast<uint64_t>(k[1]),
                                        static_cast<uint64_t>(k[2])));
        int count = cap;
        if (mode == BoundaryMode::Poisson) {
            double c2 = 0.0;
            for (int i = 0; i < d; ++i) {
                const double ci = (k[i] + 0.5) * delta;
                c2 += ci * ci;
            }
            count = rng.poisson_capped(cellvol * rho * (1.0 + g(std::sqrt(c2))), cap);
        }
        for (int j = 0; j < count; ++j) {
            Vec x{};
            for (int i = 0; i < d; ++i) x[i] = (k[i] + rng.u01()) * delta;
            omega.pts.push_back(x);
        }
        int axis = 0;
        while (axis < d && ++k[axis] == half) k[axis++] = -half;
        if (axis == d) break;
    }
    return omega;
}

namespace {

struct CellHash {
    size_t operator()(const CubeIndex& c) const {
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (int i = 0; i < kMaxDim; ++i) {
            uint64_t z = static_cast<uint64_t>(c.k[i]) + 0x9e3779b97f4a7c15ULL;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            h ^= z + (h << 6) + (h >> 2);
        }
        return static_cast<size_t>(h);
    }
};

std::unordered_map<CubeIndex, int64_t, CellHash> cell_counts(const std::vector<Vec>& pts,
                                                             double delta, int d) {
    std::unordered_map<CubeIndex, int64_t, CellHash> counts;
    for (const Vec& y : pts) ++counts[grid_cell(delta, y, d)];
    return counts;
}

}  // namespace

double local_density(const BoundaryConfiguration& omega, double delta, const Vec& x) {
    require(delta > 0.0, "local_density: delta must be > 0");
    const CubeIndex home = grid_cell(delta, x, omega.d);
    int64_t count = 0;
    for (const Vec& y : omega.pts)
        if (grid_cell(delta, y, omega.d) == home) ++count;
    return count / std::pow(delta, omega.d);
}

MembershipReport class_membership(const BoundaryConfiguration& omega, double rho,
                                  const GrowthFunction& g, double delta) {
    require(delta > 0.0, "class_membership: delta must be > 0");
    MembershipReport rep;
    const double cellvol = std::pow(delta, omega.d);
    for (const auto& [cell, count] : cell_counts(omega.pts, delta, omega.d)) {
        const double r_inf = cell_inf_radius(delta, cell, omega.d);
        const double bound = rho * (1.0 + g(r_inf));
        const double density = count / cellvol;
        const double ratio = bound > 0.0 ? density / bound : kInf;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.worst_cell = cell;
            rep.worst_radius = r_inf;
            rep.worst_count = count;
        }
        ++rep.cells_checked;
    }
    rep.ok = rep.max_ratio <= 1.0 + 1e-12;
    return rep;
}

double redelta_bound(const BoundaryConfiguration& omega, const GrowthFunction& g, double delta1,
                     double delta2) {
    require(delta2 > 0.0, "redelta_bound: delta2 must be > 0");
    const MembershipReport pre = class_membership(omega, omega.rho, g, delta1);
    if (!pre.ok)
        throw std::domain_error(
            "redelta_bound: configuration leaves its declared class at delta1; worst cell "
            "density ratio " +
            fmt17(pre.max_ratio) + " at radius " + fmt17(pre.worst_radius));
    const double cellvol = std::pow(delta2, omega.d);
    double best = 0.0;
    for (const auto& [cell, count] : cell_counts(omega.pts, delta2, omega.d)) {
        const double r_inf = cell_inf_radius(delta2, cell, omega.d);
        best = std::max(best, (count / cellvol) / (1.0 + g(r_inf)));
    }
    return best;
}

OmegaView::OmegaView(const SimBox& box, const BoundaryConfiguration& omega) : d_(omega.d) {
    require(box.d == omega.d, "OmegaView: box and omega dimensions differ");
    coord_.reserve(omega.pts.size() * d_);
    for (const Vec& y : omega.pts) {
        if (box.contains(y)) continue;   // interior points are disregarded
        for (int i = 0; i < d_; ++i) coord_.push_back(y[i]);
        ++n_;
    }
}

double OmegaView::field(const PotentialSpec& pot, const EnvelopeSpec& env, FieldKernel k,
                        const Vec& x) const {
    double sum = 0.0;
    const double* ptr = coord_.data();
    for (size_t i = 0; i < n_; ++i, ptr += d_) {
        double r2 = 0.0;
        for (int j = 0; j < d_; ++j) {
            const double dx = x[j] - ptr[j];
            r2 += dx * dx;
        }
        switch (k) {
            case FieldKernel::V:
                sum += pot.evaluate_r2(r2);
                break;
            case FieldKernel::VPlus: {
                const double v = pot.evaluate_r2(r2);
                if (v > 0.0) sum += v;
                break;
            }
            case FieldKernel::VMinus: {
                const double v = pot.evaluate_r2(r2);
                if (v < 0.0) sum -= v;
                break;
            }
            case FieldKernel::Eta:
                sum += env.eta(std::sqrt(r2));
                break;
        }
    }
    return sum;
}

double external_field(const SimBox& box, const BoundaryConfiguration& omega,
                      const PotentialSpec& pot, const EnvelopeSpec& env, FieldKernel kernel,
                      const Vec& x) {
    require(box.contains(x), "external_field: point lies outside the box");
    const OmegaView view(box, omega);
    return view.field(pot, env, kernel, x);
}

double config_field(const SimBox& box, const BoundaryConfiguration& omega,
                    const PotentialSpec& pot, const EnvelopeSpec& env, FieldKernel kernel,
                    const std::vector<Vec>& xs) {
    const OmegaView view(box, omega);
    double sum = 0.0;
    for (const Vec& x : xs) {
        require(box.contains(x), "config_field: point lies outside the box");
        sum += view.field(pot, env, kernel, x);
    }
    return sum;
}

void BoundaryConfiguration::save(const std::string& path) const {
    double qval = 0.0;
    if (growth.kind == GrowthKind::Power) qval = growth.q;
    else if (growth.kind == GrowthKind::Tabulated)
        throw std::domain_error("BoundaryConfiguration::save: tabulated growth is not "
                                "representable in the fixed header");
    std::ofstream out(path);
    require(out.good(), "BoundaryConfiguration::save: cannot open " + path);
    out << d << ' ' << fmt17(delta) << ' ' << fmt17(rho) << ' ' << fmt17(qval) << ' '
        << to_string(mode) << ' ' << seed << '\n';
    for (const Vec& y : pts) {
        for (int i = 0; i < d; ++i) out << (i ? " " : "") << fmt17(y[i]);
        out << '\n';
    }
    require(out.good(), "BoundaryConfiguration::save: write failed for " + path);
}

BoundaryConfiguration BoundaryConfiguration::load(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "BoundaryConfiguration::load: cannot open " + path);
    BoundaryConfiguration omega;
    std::string mode_name;
    double qval = 0.0;
    in >> omega.d >> omega.delta >> omega.rho >> qval >> mode_name >> omega.seed;
    require(static_cast<bool>(in), "BoundaryConfiguration::load: malformed header in " + path);
    require(omega.d >= 1 && omega.d <= kMaxDim, "BoundaryConfiguration::load: bad dimension");
    omega.mode = boundary_mode_from(mode_name);
    omega.growth = qval > 0.0 ? GrowthFunction::power(qval) : GrowthFunction::zero();
    Vec y{};
    for (;;) {
        bool ok = true;
        for (int i = 0; i < omega.d; ++i)
            if (!(in >> y[i])) ok = false;
        if (!ok) break;
        omega.pts.push_back(y);
    }
    double far = 0.0;
    for (const Vec& y2 : omega.pts)
        for (int i = 0; i < omega.d; ++i) far = std::max(far, std::abs(y2[i]));
    // snap the recovered extent up to the generation grid
    omega.extent = omega.delta * std::ceil(far / omega.delta - 1e-12);
    return omega;
}

}  // namespace boxgas
