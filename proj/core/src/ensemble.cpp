#include "boxgas/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "boxgas/bounds.hpp"
#include "boxgas/quadrature.hpp"
#include "boxgas/rng.hpp"

namespace boxgas {

double interaction_cutoff(const PotentialSpec& pot, const EnvelopeSpec& env) {
    const double floor_r = std::max(pot.a, pot.b);
    switch (pot.kind) {
        case PotentialKind::HardRod:
        case PotentialKind::SoftRod:
            return floor_r;
        case PotentialKind::Tabulated:
            if (pot.table.hold_right && !pot.table.v.empty() && pot.table.v.back() != 0.0)
                return kInf;
            return std::max(floor_r, pot.table.empty() ? 0.0 : pot.table.last_r());
        case PotentialKind::CoreTail:
            break;
    }
    if (pot.C == 0.0) return floor_r;
    const double scale = (pot.c > 0.0 ? pot.c : 1.0) * std::pow(pot.a, -pot.d);
    return std::max(floor_r, tail_radius(env, 1e-4 * scale));
}

double pair_energy(const std::vector<Vec>& xs, const PotentialSpec& pot, int d) {
    double u = 0.0;
    for (size_t i = 0; i < xs.size(); ++i)
        for (size_t j = i + 1; j < xs.size(); ++j) {
            u += pot.evaluate_r2(dist2(xs[i], xs[j], d));
            if (u == kInf) return kInf;
        }
    return u;
}

double total_energy(const SimBox& box, const PotentialSpec& pot, const EnvelopeSpec& env,
                    const std::vector<Vec>& xs, const BoundaryConfiguration& omega) {
    for (const Vec& x : xs) require(box.contains(x), "total_energy: particle outside the box");
    double u = pair_energy(xs, pot, box.d);
    if (u == kInf || xs.empty()) return u;
    const OmegaView view(box, omega);
    if (view.size() == 0) return u;
    for (const Vec& x : xs) {
        u += view.field(pot, env, FieldKernel::V, x);
        if (u == kInf) return kInf;
    }
    return u;
}

double acc_insert(double beta, double lambda, double volume, int n_before, double du) {
    if (du == kInf) return 0.0;
    return std::min(1.0, lambda * volume / (n_before + 1) * std::exp(-beta * du));
}

double acc_delete(double beta, double lambda, double volume, int n_before, double du) {
    require(n_before >= 1, "acc_delete: no particle to remove");
    if (du == kInf) return 0.0;
    return std::min(1.0, n_before / (lambda * volume) * std::exp(-beta * du));
}

double acc_translate(double beta, double du) {
    if (du == kInf) return 0.0;
    return std::min(1.0, std::exp(-beta * du));
}

namespace {

double boltzmann(double beta, double u) { return u == kInf ? 0.0 : std::exp(-beta * u); }

// Uniform bins over the box with side >= the pair cutoff, so interacting
// pairs always sit in adjacent bins. Collapses to a single bin (all pairs)
// when the cutoff exceeds the box.
struct Bins {
    int d;
    double L;
    int nb;
    double inv_side;
    std::vector<std::vector<int>> cells;

    Bins(const SimBox& box, double r_cut) : d(box.d), L(box.L) {
        const double span = 2.0 * box.L;
        nb = std::max(1, static_cast<int>(std::floor(span / std::max(r_cut, 1e-9 * span))));
        nb = std::min(nb, 64);
        inv_side = nb / span;
        int total = 1;
        for (int i = 0; i < d; ++i) total *= nb;
        cells.assign(static_cast<size_t>(total), {});
    }
    int index_of(const Vec& x) const {
        int idx = 0;
        for (int i = d - 1; i >= 0; --i) {
            const int k = std::clamp(static_cast<int>((x[i] + L) * inv_side), 0, nb - 1);
            idx = idx * nb + k;
        }
        return idx;
    }
    void put(int p, const Vec& x) { cells[static_cast<size_t>(index_of(x))].push_back(p); }
    void take(int p, const Vec& x) {
        auto& c = cells[static_cast<size_t>(index_of(x))];
        c.erase(std::find(c.begin(), c.end(), p));
    }
    template <class F>
    void around(const Vec& x, F&& f) const {
        if (nb == 1) {
            for (int p : cells[0]) f(p);
            return;
        }
        std::array<int, kMaxDim> lo{}, hi{};
        for (int i = 0; i < d; ++i) {
            const int k = std::clamp(static_cast<int>((x[i] + L) * inv_side), 0, nb - 1);
            lo[i] = std::max(0, k - 1);
            hi[i] = std::min(nb - 1, k + 1);
        }
        std::array<int, kMaxDim> c = lo;
        while (true) {
            int idx = 0;
            for (int i = d - 1; i >= 0; --i) idx = idx * nb + c[i];
            for (int p : cells[static_cast<size_t>(idx)]) f(p);
            int ax = 0;
            while (ax < d && ++c[ax] > hi[ax]) {
                c[ax] = lo[ax];
                ++ax;
            }
            if (ax == d) break;
        }
    }
};

struct Chain {
    const SimBox& box;
    const PotentialSpec& pot;
    const EnvelopeSpec& env;
    OmegaView view;
    double beta;
    Bins bins;
    std::vector<Vec> xs;
    std::vector<double> fld;
    double U = 0.0;

    Chain(const SimBox& b, const BoundaryConfiguration& omega, const PotentialSpec& p,
          const EnvelopeSpec& e, double beta_, double r_cut)
        : box(b), pot(p), env(e), view(b, omega), beta(beta_), bins(b, r_cut) {}

    int count() const { return static_cast<int>(xs.size()); }

    double pair_around(const Vec& x, int exclude) const {
        double u = 0.0;
        bins.around(x, [&](int p) {
            if (p == exclude) return;
            u += pot.evaluate_r2(dist2(x, xs[static_cast<size_t>(p)], box.d));
        });
        return u;
    }
    double field_at(const Vec& x) const { return view.field(pot, env, FieldKernel::V, x); }

    void seed_state(const std::vector<Vec>& initial) {
        for (const Vec& x : initial) {
            require(box.contains(x), "gcmc_run: warm-start particle outside the box");
            const int p = count();
            xs.push_back(x);
            fld.push_back(field_at(x));
            bins.put(p, x);
        }
        U = recompute();
        require(U < kInf, "gcmc_run: warm-start state has infinite energy");
    }

    void do_insert(const Vec& x, double f, double du) {
        const int p = count();
        xs.push_back(x);
        fld.push_back(f);
        bins.put(p, x);
        U += du;
    }
    void do_delete(int i, double du) {
        const int last = count() - 1;
        bins.take(i, xs[static_cast<size_t>(i)]);
        if (i != last) {
            bins.take(last, xs[static_cast<size_t>(last)]);
            xs[static_cast<size_t>(i)] = xs[static_cast<size_t>(last)];
            fld[static_cast<size_t>(i)] = fld[static_cast<size_t>(last)];
            bins.put(i, xs[static_cast<size_t>(i)]);
        }
        xs.pop_back();
        fld.pop_back();
        U += du;
    }
    void do_translate(int i, const Vec& y, double f, double du) {
        bins.take(i, xs[static_cast<size_t>(i)]);
        xs[static_cast<size_t>(i)] = y;
        fld[static_cast<size_t>(i)] = f;
        bins.put(i, y);
        U += du;
    }

    // From-scratch energy under the same adjacent-bin pair rule.
    double recompute() const {
        double u = 0.0;
        for (int i = 0; i < count(); ++i) {
            u += 0.5 * pair_around(xs[static_cast<size_t>(i)], i);
            u += view.size() > 0 ? field_at(xs[static_cast<size_t>(i)]) : 0.0;
        }
        return u;
    }
};

struct MoveCounters {
    int64_t ins_tried = 0, ins_acc = 0;
    int64_t del_tried = 0, del_acc = 0;
    int64_t tr_tried = 0, tr_acc = 0;
};

void one_move(Chain& st, RngStream& rng, double lambda, double step, MoveCounters& mc) {
    const int d = st.box.d;
    const double vol = st.box.volume();
    const uint64_t kind = rng.integer(3);
    if (kind == 0) {
        ++mc.ins_tried;
        Vec x{};
        for (int i = 0; i < d; ++i) x[i] = rng.uniform(-st.box.L, st.box.L);
        double du = st.pair_around(x, -1);
        const double f = du == kInf ? kInf : st.field_at(x);
        du = f == kInf ? kInf : du + f;
        if (rng.u01() < acc_insert(st.beta, lambda, vol, st.count(), du)) {
            st.do_insert(x, f, du);
            ++mc.ins_acc;
        }
    } else if (kind == 1) {
        ++mc.del_tried;
        if (st.count() >= 1) {
            const int i = static_cast<int>(rng.integer(static_cast<uint64_t>(st.count())));
            const double du =
                -(st.pair_around(st.xs[static_cast<size_t>(i)], i) + st.fld[static_cast<size_t>(i)]);
            if (rng.u01() < acc_delete(st.beta, lambda, vol, st.count(), du)) {
                st.do_delete(i, du);
                ++mc.del_acc;
            }
        }
    } else {
        ++mc.tr_tried;
        if (st.count() >= 1) {
            const int i = static_cast<int>(rng.integer(static_cast<uint64_t>(st.count())));
            Vec y = st.xs[static_cast<size_t>(i)];
            for (int j = 0; j < d; ++j) y[j] += rng.uniform(-step, step);
            if (st.box.contains(y)) {
                double du = st.pair_around(y, i) - st.pair_around(st.xs[static_cast<size_t>(i)], i);
                const double f = du == kInf ? kInf : st.field_at(y);
                du = f == kInf ? kInf : du + f - st.fld[static_cast<size_t>(i)];
                if (rng.u01() < acc_translate(st.beta, du)) {
                    st.do_translate(i, y, f, du);
                    ++mc.tr_acc;
                }
            }
        }
    }
}

void warn_rate(std::string& flags, const char* what, int64_t tried, int64_t acc) {
    if (tried <= 0) return;
    const double r = static_cast<double>(acc) / static_cast<double>(tried);
    if (r < 0.05 || r > 0.95) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s acceptance %.3f outside [0.05,0.95]; ", what, r);
        flags += buf;
    }
}

}  // namespace

GcmcResult gcmc_run(const SimBox& box, const BoundaryConfiguration& omega,
                    const PotentialSpec& pot, const EnvelopeSpec& env, const GcmcParams& prm,
                    std::ostream* trace) {
    require(prm.beta >= 0.0 && std::isfinite(prm.beta), "gcmc_run: beta must be finite and >= 0");
    require(prm.lambda > 0.0 && std::isfinite(prm.lambda), "gcmc_run: activity must be positive");
    require(prm.thin >= 1, "gcmc_run: thin must be >= 1");
    require(prm.n_moves >= 0 && prm.n_burnin >= 0, "gcmc_run: negative move counts");
    require(prm.blocks >= 2, "gcmc_run: need at least 2 blocks");

    GcmcResult out;
    const double uncapped = interaction_cutoff(pot, env);
    const double diameter = 2.0 * box.L * std::sqrt(static_cast<double>(box.d));
    out.r_cut = std::min(uncapped, diameter);
    out.tail_v = out.r_cut < uncapped ? big_v(env, out.r_cut) : 0.0;

    Chain st(box, omega, pot, env, prm.beta, out.r_cut);
    if (prm.initial) st.seed_state(*prm.initial);

    RngStream rng(prm.seed, 0x6C3C0ULL);
    double step = prm.displacement > 0.0 ? prm.displacement : pot.a;
    const bool tune = prm.displacement <= 0.0;

    {
        MoveCounters mc;
        int64_t window_tried = 0, window_acc = 0;
        for (int64_t mv = 0; mv < prm.n_burnin; ++mv) {
            const int64_t before_t = mc.tr_tried, before_a = mc.tr_acc;
            one_move(st, rng, prm.lambda, step, mc);
            window_tried += mc.tr_tried - before_t;
            window_acc += mc.tr_acc - before_a;
            if (tune && window_tried >= 500) {
                const double rate = static_cast<double>(window_acc) / window_tried;
                step = std::clamp(step * std::clamp(rate / 0.40, 0.5, 2.0), 1e-4 * pot.a, box.L);
                window_tried = window_acc = 0;
            }
        }
    }
    out.displacement = step;

    const int64_t n_samples = prm.n_moves / prm.thin;
    const int B = prm.blocks;
    std::vector<double> bn(B, 0.0), bn2(B, 0.0), bu(B, 0.0);
    std::vector<int64_t> bc(B, 0);

    MoveCounters mc;
    int64_t sample = 0;
    for (int64_t mv = 0; mv < prm.n_moves; ++mv) {
        one_move(st, rng, prm.lambda, step, mc);
        if ((mv + 1) % prm.thin == 0 && sample < n_samples) {
            const int b = static_cast<int>(sample * B / std::max<int64_t>(n_samples, 1));
            const double n = st.count();
            bn[b] += n;
            bn2[b] += n * n;
            bu[b] += st.U;
            ++bc[b];
            if (trace)
                (*trace) << (mv + 1) << ',' << st.count() << ',' << fmt17(st.U) << '\n';
            ++sample;
        }
    }

    out.samples = sample;
    if (sample > 0) {
        double tn = 0.0, tn2 = 0.0, tu = 0.0;
        for (int b = 0; b < B; ++b) {
            tn += bn[b];
            tn2 += bn2[b];
            tu += bu[b];
        }
        out.mean_n = tn / sample;
        out.var_n = std::max(0.0, tn2 / sample - out.mean_n * out.mean_n);
        out.mean_u = tu / sample;
        int used = 0;
        double sm = 0.0, su = 0.0, sv = 0.0;
        double vmean = 0.0;
        std::vector<double> vb(B, 0.0);
        for (int b = 0; b < B; ++b) {
            if (bc[b] == 0) continue;
            const double m = bn[b] / bc[b];
            vb[b] = bn2[b] / bc[b] - m * m;
            vmean += vb[b];
            ++used;
        }
        vmean /= std::max(1, used);
        for (int b = 0; b < B; ++b) {
            if (bc[b] == 0) continue;
            const double m = bn[b] / bc[b];
            const double mu = bu[b] / bc[b];
            sm += (m - out.mean_n) * (m - out.mean_n);
            su += (mu - out.mean_u) * (mu - out.mean_u);
            sv += (vb[b] - vmean) * (vb[b] - vmean);
        }
        if (used >= 2) {
            out.se_n = std::sqrt(sm / (used * (used - 1.0)));
            out.se_u = std::sqrt(su / (used * (used - 1.0)));
            out.se_var_n = std::sqrt(sv / (used * (used - 1.0)));
        }
    }

    out.acc_insert = mc.ins_tried ? static_cast<double>(mc.ins_acc) / mc.ins_tried : 0.0;
    out.acc_delete = mc.del_tried ? static_cast<double>(mc.del_acc) / mc.del_tried : 0.0;
    out.acc_translate = mc.tr_tried ? static_cast<double>(mc.tr_acc) / mc.tr_tried : 0.0;
    warn_rate(out.flags, "insert", mc.ins_tried, mc.ins_acc);
    warn_rate(out.flags, "delete", mc.del_tried, mc.del_acc);
    warn_rate(out.flags, "translate", mc.tr_tried, mc.tr_acc);

    const double fresh = st.recompute();
    out.drift = std::abs(st.U - fresh) / std::max(1.0, std::abs(fresh));
    out.final_state = st.xs;
    return out;
}

double bulk_density(const SimBox& box, const PotentialSpec& pot, const EnvelopeSpec& env,
                    const GcmcParams& prm) {
    BoundaryConfiguration empty;
    empty.d = box.d;
    empty.delta = 1.0;
    empty.rho = 1.0;
    empty.growth = GrowthFunction::zero();
    empty.mode = BoundaryMode::Empty;
    const GcmcResult r = gcmc_run(box, empty, pot, env, prm, nullptr);
    return r.mean_n / box.volume();
}

XiSeries xi_truncated(const SimBox& box, const BoundaryConfiguration& omega,
                      const PotentialSpec& pot, const EnvelopeSpec& env, double beta,
                      double lambda, int n_max, int64_t mc_samples, uint64_t seed,
                      double tail_tol) {
    require(beta >= 0.0 && std::isfinite(beta), "xi_truncated: beta must be finite and >= 0");
    require(lambda >= 0.0 && std::isfinite(lambda), "xi_truncated: activity must be >= 0");
    require(n_max >= 0, "xi_truncated: n_max must be >= 0");
    require(n_max == 0 || mc_samples >= 1, "xi_truncated: need samples for n >= 1 coefficients");
    require(tail_tol > 0.0, "xi_truncated: tolerance must be positive");

    XiSeries out;
    const OmegaView view(box, omega);
    const int d = box.d;
    const double vol = box.volume();
    out.terms.assign(static_cast<size_t>(n_max) + 1, 0.0);
    out.terms[0] = 1.0;
    double xi = 1.0, var_sum = 0.0;
    double factor = 1.0;
    RngStream rng(seed, 0x51E5EULL);
    std::vector<Vec> pts;
    for (int n = 1; n <= n_max && lambda > 0.0; ++n) {
        factor *= lambda * vol / n;
        double sum = 0.0, sum2 = 0.0;
        pts.assign(static_cast<size_t>(n), Vec{});
        for (int64_t s = 0; s < mc_samples; ++s) {
            for (auto& x : pts)
                for (int i = 0; i < d; ++i) x[i] = rng.uniform(-box.L, box.L);
            double u = pair_energy(pts, pot, d);
            if (u < kInf && view.size() > 0) {
                for (const auto& x : pts) {
                    u += view.field(pot, env, FieldKernel::V, x);
                    if (u == kInf) break;
                }
            }
            const double w = boltzmann(beta, u);
            sum += w;
            sum2 += w * w;
        }
        const double mean = sum / static_cast<double>(mc_samples);
        const double var =
            std::max(0.0, sum2 / static_cast<double>(mc_samples) - mean * mean) /
            static_cast<double>(mc_samples);
        out.terms[static_cast<size_t>(n)] = factor * mean;
        xi += out.terms[static_cast<size_t>(n)];
        var_sum += factor * factor * var;
    }
    out.xi = xi;
    out.log_xi = std::log(xi);
    out.se = std::sqrt(var_sum);

    // Remainder bound from stability plus the field bound for the class of omega.
    double x = kInf;
    try {
        double kappa_b = 0.0;
        if (view.size() > 0 && big_v(env, 0.0) > 0.0) {
            const double cd = c_delta_estimate(env, omega.delta);
            kappa_b = kappa_tilde(cd, omega.rho, env, omega.growth) * (1.0 + omega.growth(box.L));
        }
        x = lambda * vol * std::exp(beta * (pot.B + kappa_b));
    } catch (const std::exception&) {
        x = kInf;
    }
    if (x <= 600.0) {
        double t = 1.0;
        for (int i = 1; i <= n_max + 1; ++i) t *= x / i;
        double tail = 0.0;
        for (int k = n_max + 1; k < n_max + 2000000; ++k) {
            tail += t;
            t *= x / (k + 1);
            if (static_cast<double>(k) > x && t < tail * 1e-18 + 1e-300) break;
        }
        out.tail = tail;
    } else {
        out.tail = kInf;
    }
    out.tail_ok = out.tail <= tail_tol * xi;
    if (!out.tail_ok) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "increase n_max: remainder bound %.3g exceeds %.3g",
                      out.tail, tail_tol * xi);
        out.flags = buf;
    }
    return out;
}

TonksReference tonks_reference(double length, double a, double lambda) {
    require(length > 0.0 && std::isfinite(length), "tonks_reference: length must be positive");
    require(a > 0.0 && std::isfinite(a), "tonks_reference: rod length must be positive");
    require(lambda >= 0.0 && std::isfinite(lambda), "tonks_reference: activity must be >= 0");
    TonksReference t;
    double xi = 1.0;
    if (lambda > 0.0) {
        const int n_cap = static_cast<int>(std::floor(length / a)) + 1;
        for (int n = 1; n <= n_cap; ++n) {
            const double free_len = length - (n - 1) * a;
            if (free_len <= 0.0) break;
            xi += std::exp(n * std::log(lambda) + n * std::log(free_len) -
                           std::lgamma(n + 1.0));
            t.n_terms = n;
        }
    }
    t.xi = xi;
    t.beta_p = std::log(xi) / length;
    return t;
}

PressureEstimate pressure_by_integration(
    const SimBox& box, const BoundaryConfiguration& omega, const PotentialSpec& pot,
    const EnvelopeSpec& env, double beta, double lambda_target, const IntegrationParams& ip,
    uint64_t seed, const std::function<std::ostream*(int, double)>& trace_for) {
    require(ip.points >= 9 && ip.points % 2 == 1,
            "pressure_by_integration: grid must have an odd number of points, at least 9");
    require(ip.ratio > 1.0, "pressure_by_integration: grid ratio must exceed 1");
    require(lambda_target > 0.0 && std::isfinite(lambda_target),
            "pressure_by_integration: target activity must be positive");
    require(beta >= 0.0 && std::isfinite(beta),
            "pressure_by_integration: beta must be finite and >= 0");

    PressureEstimate est;
    est.method = "gcmc-integration";
    est.beta = beta;
    est.lambda = lambda_target;
    est.volume = box.volume();
    const int P = ip.points;
    const double h = std::log(ip.ratio) / (P - 1);
    const OmegaView view(box, omega);

    // Mean single-particle Boltzmann weight in the external field.
    double ibar;
    if (box.d == 1) {
        ibar = integrate(
                   [&](double x) {
                       Vec v{};
                       v[0] = x;
                       return boltzmann(beta, view.field(pot, env, FieldKernel::V, v));
                   },
                   -box.L, box.L, 1e-10) /
               est.volume;
    } else {
        Vec lo{}, hi{};
        for (int i = 0; i < box.d; ++i) {
            lo[i] = -box.L;
            hi[i] = box.L;
        }
        ibar = integrate_box(
                   [&](const Vec& x) {
                       return boltzmann(beta, view.field(pot, env, FieldKernel::V, x));
                   },
                   lo, hi, box.d, 3) /
               est.volume;
    }
    const double lambda_min = lambda_target / ip.ratio;
    est.anchor_lambda = lambda_min;
    est.anchor_value = lambda_min * ibar;

    // Second-order remainder of the anchor, estimated over particle pairs.
    {
        RngStream rng(seed, 0xA2C40ULL);
        const int64_t M = std::max(16, ip.virial_samples);
        double sum = 0.0, sum2 = 0.0;
        for (int64_t s = 0; s < M; ++s) {
            Vec x{}, y{};
            for (int i = 0; i < box.d; ++i) {
                x[i] = rng.uniform(-box.L, box.L);
                y[i] = rng.uniform(-box.L, box.L);
            }
            double u = pot.evaluate_r2(dist2(x, y, box.d));
            if (u < kInf && view.size() > 0) {
                const double fx = view.field(pot, env, FieldKernel::V, x);
                const double fy = view.field(pot, env, FieldKernel::V, y);
                u = (fx == kInf || fy == kInf) ? kInf : u + fx + fy;
            }
            const double w = boltzmann(beta, u);
            sum += w;
            sum2 += w * w;
        }
        const double mean = sum / M;
        const double var = std::max(0.0, sum2 / M - mean * mean) / M;
        const double z2 = mean * est.volume * est.volume;
        const double i1 = ibar * est.volume;
        est.err_anchor = lambda_min * lambda_min *
                         (std::abs(z2 - i1 * i1) + 3.0 * std::sqrt(var) * est.volume * est.volume) /
                         est.volume;
    }

    std::vector<double> means(P), ses(P);
    std::vector<Vec> state;
    for (int k = 0; k < P; ++k) {
        const double lam = lambda_target * std::exp(static_cast<double>(k - (P - 1)) * h);
        GcmcParams g = ip.gcmc;
        g.beta = beta;
        g.lambda = lam;
        g.seed = derive_seed(seed, 0x6C3CULL, static_cast<uint64_t>(k));
        g.initial = state.empty() ? nullptr : &state;
        std::ostream* tr = trace_for ? trace_for(k, lam) : nullptr;
        const GcmcResult r = gcmc_run(box, omega, pot, env, g, tr);
        means[k] = r.mean_n;
        ses[k] = r.se_n;
        state = r.final_state;
        CurvePoint cp;
        cp.lambda = lam;
        cp.mean_n = r.mean_n;
        cp.se_n = r.se_n;
        cp.acc_insert = r.acc_insert;
        cp.acc_delete = r.acc_delete;
        cp.acc_translate = r.acc_translate;
        cp.displacement = r.displacement;
        cp.samples = r.samples;
        cp.flags = r.flags;
        est.curve.push_back(cp);
        if (!r.flags.empty()) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "grid point %d: ", k);
            est.flags += buf + r.flags;
        }
    }

    double trap = 0.0;
    for (int k = 0; k + 1 < P; ++k) trap += 0.5 * h * (means[k] + means[k + 1]);
    double trap2 = 0.0;
    for (int k = 0; k + 2 < P; k += 2) trap2 += h * (means[k] + means[k + 2]);
    est.err_quad = std::abs(trap - trap2) / 3.0 / est.volume;
    double s2 = 0.25 * (ses[0] * ses[0] + ses[P - 1] * ses[P - 1]);
    for (int k = 1; k + 1 < P; ++k) s2 += ses[k] * ses[k];
    est.err_stat = h * std::sqrt(s2) / est.volume;
    est.beta_p = est.anchor_value + trap / est.volume;
    est.error = est.err_stat + est.err_quad + est.err_anchor;
    return est;
}

PressureEstimate pressure_by_series(const SimBox& box, const BoundaryConfiguration& omega,
                                    const PotentialSpec& pot, const EnvelopeSpec& env,
                                    double beta, double lambda, int n_max, int64_t mc_samples,
                                    uint64_t seed) {
    const XiSeries s = xi_truncated(box, omega, pot, env, beta, lambda, n_max, mc_samples, seed);
    PressureEstimate est;
    est.method = "series";
    est.beta = beta;
    est.lambda = lambda;
    est.volume = box.volume();
    est.beta_p = s.log_xi / est.volume;
    est.err_stat = s.se / s.xi / est.volume;
    est.err_tail = s.tail / s.xi / est.volume;
    est.error = est.err_stat + est.err_tail;
    est.flags = s.flags;
    return est;
}

}  // namespace boxgas
