#include "boxgas/potential.hpp"

#include <algorithm>
#include <cmath>

#include "boxgas/rng.hpp"

namespace boxgas {

const char* to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::SoftRod: return "soft-rod";
        case PotentialKind::HardRod: return "hard-rod";
        case PotentialKind::CoreTail: return "core-plus-tail";
        case PotentialKind::Tabulated: return "tabulated";
    }
    return "?";
}

PotentialSpec PotentialSpec::soft_rod(int d, double K, double a, double c) {
    PotentialSpec s;
    s.kind = PotentialKind::SoftRod;
    s.d = d;
    s.K = K;
    s.a = a;
    s.c = c;
    s.b = a;
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::hard_rod(int d, double a) {
    PotentialSpec s;
    s.kind = PotentialKind::HardRod;
    s.d = d;
    s.a = a;
    s.c = 1.0;
    s.b = a;
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::core_tail(int d, double K, double a, double c, double C, double b,
                                       double p, double B) {
    PotentialSpec s;
    s.kind = PotentialKind::CoreTail;
    s.d = d;
    s.K = K;
    s.a = a;
    s.c = c;
    s.C = C;
    s.b = b;
    s.p = p;
    s.B = B;
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::tabulated(int d, TableFn t, double a, double c, double b, double B) {
    PotentialSpec s;
    s.kind = PotentialKind::Tabulated;
    s.d = d;
    s.table = std::move(t);
    s.a = a;
    s.c = c;
    s.b = b;
    s.B = B;
    s.validate();
    return s;
}

void PotentialSpec::validate() const {
    require(d >= 1 && d <= kMaxDim, "PotentialSpec: bad dimension");
    require(a > 0.0, "PotentialSpec: core radius a must be > 0");
    require(c >= 0.0, "PotentialSpec: core strength c must be >= 0");
    require(b >= a, "PotentialSpec: b must be >= a");
    require(B >= 0.0, "PotentialSpec: stability constant B must be >= 0");
    switch (kind) {
        case PotentialKind::SoftRod:
            require(K >= c, "soft rod: K must be >= c");
            break;
        case PotentialKind::HardRod:
            break;
        case PotentialKind::CoreTail:
            require(K >= c, "core+tail: K must be >= c");
            require(C >= 0.0, "core+tail: C must be >= 0");
            require(p > 0.0, "core+tail: p must be > 0");
            break;
        case PotentialKind::Tabulated:
            table.validate("PotentialSpec table");
            break;
    }
}

double PotentialSpec::evaluate(double r) const {
    require(r >= 0.0, "potential: separation must be >= 0");
    switch (kind) {
        case PotentialKind::SoftRod:
            return r <= a ? K : 0.0;
        case PotentialKind::HardRod:
            return r <= a ? kInf : 0.0;
        case PotentialKind::CoreTail:
            if (r <= a) return K;
            if (r > b) return -C * std::pow(r, -(d + p));
            return 0.0;
        case PotentialKind::Tabulated:
            return table(r);
    }
    return 0.0;
}

double PotentialSpec::evaluate_r2(double r2) const {
    switch (kind) {
        case PotentialKind::SoftRod:
            return r2 <= a * a ? K : 0.0;
        case PotentialKind::HardRod:
            return r2 <= a * a ? kInf : 0.0;
        case PotentialKind::CoreTail: {
            if (r2 <= a * a) return K;
            if (r2 > b * b) {
                if (d + p == 2.0) return -C / r2;  // common 1/r^2 tail, no sqrt
                return -C * std::pow(r2, -0.5 * (d + p));
            }
            return 0.0;
        }
        case PotentialKind::Tabulated:
            return table(std::sqrt(r2));
    }
    return 0.0;
}

double PotentialSpec::v_plus(double r) const { return std::max(evaluate(r), 0.0); }

double PotentialSpec::v_minus(double r) const { return std::max(-evaluate(r), 0.0); }

double PotentialSpec::v2(double r) const {
    require(r >= 0.0, "potential: separation must be >= 0");
    return r <= a ? c : 0.0;
}

double PotentialSpec::v1(double r) const { return evaluate(r) - v2(r); }

double PotentialSpec::range() const {
    switch (kind) {
        case PotentialKind::SoftRod:
        case PotentialKind::HardRod:
            return a;
        case PotentialKind::CoreTail:
            return C > 0.0 ? kInf : a;
        case PotentialKind::Tabulated:
            return table.hold_right ? kInf : table.last_r();
    }
    return kInf;
}

std::pair<double, double> split_signs(const PotentialSpec& pot, double r) {
    const double v = pot.evaluate(r);
    return {std::max(v, 0.0), std::max(-v, 0.0)};
}

EnvelopeSpec EnvelopeSpec::power(int d, double two_b, double b, double C, double p) {
    EnvelopeSpec e;
    e.d = d;
    e.two_b = two_b;
    e.b = b;
    e.law = EnvelopeLaw::Power;
    e.C = C;
    e.p = p;
    e.validate();
    return e;
}

EnvelopeSpec EnvelopeSpec::tabulated(int d, double two_b, double b, TableFn t) {
    EnvelopeSpec e;
    e.d = d;
    e.two_b = two_b;
    e.b = b;
    e.law = EnvelopeLaw::Tabulated;
    e.table = std::move(t);
    e.validate();
    return e;
}

EnvelopeSpec EnvelopeSpec::for_potential(const PotentialSpec& pot) {
    switch (pot.kind) {
        case PotentialKind::SoftRod:
        case PotentialKind::HardRod:
            return power(pot.d, 2.0 * pot.B, pot.b, 0.0, 1.0);
        case PotentialKind::CoreTail:
            return power(pot.d, 2.0 * pot.B, pot.b, pot.C, pot.p);
        case PotentialKind::Tabulated: {
            // suffix max of |v| beyond b gives the tightest monotone cover
            TableFn t;
            t.r.push_back(pot.b);
            t.v.push_back(0.0);
            for (size_t i = 0; i < pot.table.r.size(); ++i) {
                if (pot.table.r[i] > pot.b) {
                    t.r.push_back(pot.table.r[i]);
                    t.v.push_back(std::abs(pot.table.v[i]));
                }
            }
            for (size_t i = t.v.size(); i-- > 1;) t.v[i - 1] = std::max(t.v[i - 1], t.v[i]);
            t.v[0] = std::max(t.v[0], std::abs(pot.table(pot.b)));
            t.hold_right = pot.table.hold_right;
            // the plateau has to cover the table head or the cover is not monotone
            const double plateau = std::max(2.0 * pot.B, t.v[0]);
            return tabulated(pot.d, plateau, pot.b, std::move(t));
        }
    }
    throw std::logic_error("for_potential: unreachable");
}

void EnvelopeSpec::validate() const {
    require(d >= 1, "EnvelopeSpec: bad dimension");
    require(b > 0.0, "EnvelopeSpec: b must be > 0");
    require(two_b >= 0.0, "EnvelopeSpec: plateau must be >= 0");
    if (law == EnvelopeLaw::Power) {
        require(C >= 0.0, "EnvelopeSpec: C must be >= 0");
        if (C > 0.0) {
            require(p > 0.0, "EnvelopeSpec: tail integrability needs p > 0");
            require(C * std::pow(b, -(d + p)) <= two_b * (1.0 + 1e-12),
                    "EnvelopeSpec: tail exceeds plateau at the knee (not monotone)");
        }
    } else {
        table.validate("EnvelopeSpec table");
        double prev = two_b;
        for (size_t i = 0; i < table.r.size(); ++i) {
            if (table.r[i] < b) continue;
            require(table.v[i] >= 0.0, "EnvelopeSpec: negative envelope value");
            require(table.v[i] <= prev * (1.0 + 1e-12) + 1e-300,
                    "EnvelopeSpec: tabulated envelope must be non-increasing");
            prev = table.v[i];
        }
    }
}

double EnvelopeSpec::eta(double r) const {
    require(r >= 0.0, "eta: radius must be >= 0");
    if (r <= b) return two_b;
    if (law == EnvelopeLaw::Power) return C > 0.0 ? C * std::pow(r, -(d + p)) : 0.0;
    return table(r);
}

// integral over one linear segment of value(s) * s^(d-1)
static double segment_moment(double r0, double r1, double v0, double v1, int d) {
    const double m = (v1 - v0) / (r1 - r0);
    const double pd = (std::pow(r1, d) - std::pow(r0, d)) / d;
    const double pd1 = (std::pow(r1, d + 1) - std::pow(r0, d + 1)) / (d + 1);
    return v0 * pd + m * (pd1 - r0 * pd);
}

double EnvelopeSpec::tail_moment(double r) const {
    require(r >= 0.0 && std::isfinite(r), "tail_moment: radius must be finite and >= 0");
    const double head = r < b ? two_b * (std::pow(b, d) - std::pow(r, d)) / d : 0.0;
    const double rstart = std::max(r, b);
    if (law == EnvelopeLaw::Power) {
        if (C == 0.0) return head;
        return head + C * std::pow(rstart, -p) / p;
    }
    if (table.hold_right && !table.v.empty() && table.v.back() > 0.0)
        throw std::domain_error("EnvelopeSpec: non-decaying tabulated tail is not integrable");
    double tail = 0.0;
    double r0 = rstart, v0 = table(rstart);  // interpolated value at the start
    for (size_t i = 0; i < table.r.size(); ++i) {
        if (table.r[i] <= r0) continue;
        tail += segment_moment(r0, table.r[i], v0, table.v[i], d);
        r0 = table.r[i];
        v0 = table.v[i];
    }
    return head + tail;
}

double EnvelopeSpec::support_end() const {
    if (law == EnvelopeLaw::Power) return C > 0.0 ? kInf : b;
    return table.last_r();
}

AuditReport audit_assumptions(const PotentialSpec& pot, const EnvelopeSpec& env, int n_trials,
                              uint64_t seed) {
    AuditReport rep;
    const double reach = 10.0 * std::max(pot.a, pot.b);
    const double tol = 1e-9;

    // deterministic radial scan, denser near the core and the knee
    std::vector<double> radii;
    const int n_r = 4096;
    for (int i = 1; i <= n_r; ++i) radii.push_back(reach * i / n_r);
    for (double base : {pot.a, pot.b, env.b}) {
        for (double eps : {-1e-9, -1e-12, 0.0, 1e-12, 1e-9}) {
            const double r = base + eps;
            if (r > 0.0) radii.push_back(r);
        }
    }
    rep.radii_sampled = static_cast<int>(radii.size());

    for (double r : radii) {
        const double v = pot.evaluate(r);
        const double vm = std::max(-v, 0.0);
        if (r > pot.b && std::abs(v) > env.eta(r) * (1.0 + tol) + 1e-300) {
            rep.s3_tail_dominated = false;
            rep.issues.push_back({"s3", "|v| > eta at r = " + fmt17(r)});
        }
        if (vm > env.two_b * (1.0 + tol) + 1e-300) {
            rep.s4_minus_bounded = false;
            rep.issues.push_back({"s4", "v_minus exceeds plateau at r = " + fmt17(r)});
        }
        if (r <= pot.a && pot.v2(r) < pot.c * (1.0 - tol)) {
            rep.s2_core_floor = false;
            rep.issues.push_back({"s2", "v2 < c at r = " + fmt17(r)});
        }
        // two-particle stability probe: v1(r) >= -2B
        const double v1 = pot.v1(r);
        if (v1 < -2.0 * pot.B * (1.0 + tol) - 1e-300) {
            rep.s1_stability = false;
            rep.issues.push_back({"s1", "pair witness at r = " + fmt17(r) + ", v1 = " + fmt17(v1)});
        }
    }

    // random many-particle stability probes
    RngStream rng(seed, 0xA0D17ULL);
    for (int t = 0; t < n_trials; ++t) {
        const int n = 2 + static_cast<int>(rng.integer(19));
        std::vector<Vec> xs(n);
        for (auto& x : xs) {
            x = Vec{};
            for (int i = 0; i < pot.d; ++i) x[i] = rng.uniform(-0.5 * reach, 0.5 * reach);
        }
        double sum = 0.0;
        for (int i = 0; i < n && sum < kInf; ++i)
            for (int j = i + 1; j < n; ++j) {
                sum += pot.v1(dist(xs[i], xs[j], pot.d));
                if (sum == kInf) break;
            }
        if (sum < -pot.B * n * (1.0 + tol) - tol) {
            rep.s1_stability = false;
            rep.issues.push_back(
                {"s1", "config witness: n = " + std::to_string(n) + ", sum v1 = " + fmt17(sum)});
        }
        ++rep.configs_sampled;
    }

    try {
        const double integ = env.tail_integral();
        if (!std::isfinite(integ)) {
            rep.s5_integrable = false;
            rep.issues.push_back({"s5", "envelope moment integral is not finite"});
        }
    } catch (const std::exception& e) {
        rep.s5_integrable = false;
        rep.issues.push_back({"s5", e.what()});
    }
    if (env.law == EnvelopeLaw::Power && env.C > 0.0 && env.p <= 0.0) {
        rep.s5_integrable = false;
        rep.issues.push_back({"s5", "power tail needs p > 0"});
    }
    return rep;
}

}  // namespace boxgas
