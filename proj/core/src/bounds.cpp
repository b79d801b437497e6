#include "boxgas/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

#include "boxgas/quadrature.hpp"
#include "boxgas/rng.hpp"

namespace boxgas {

double big_v(const EnvelopeSpec& env, double r) {
    require(r >= 0.0 && std::isfinite(r), "big_v: radius must be finite and >= 0");
    return sphere_surface(env.d) * env.tail_moment(r);
}

double big_w(const EnvelopeSpec& env, const GrowthFunction& g, double r) {
    require(r >= 0.0 && std::isfinite(r), "big_w: radius must be finite and >= 0");
    if (g.is_zero()) return 0.0;
    const double sd = sphere_surface(env.d);
    const int d = env.d;
    const double b = env.b;
    if (g.kind == GrowthKind::Power && env.law == EnvelopeLaw::Power) {
        const double q = g.q, p = env.p;
        if (q >= p)
            throw std::domain_error(
                "big_w: r^q growth against a r^{-(d+p)} tail is not integrable for q >= p");
        const double knee = env.C == 0.0 ? 0.0 : env.C * std::pow(std::max(r, b), q - p) / (p - q);
        if (r >= b) return sd * knee;
        const double plateau = env.two_b * (std::pow(b, d + q) - std::pow(r, d + q)) / (d + q);
        return sd * (plateau + knee);
    }
    if (env.law == EnvelopeLaw::Tabulated && env.table.hold_right && !env.table.v.empty() &&
        env.table.v.back() > 0.0)
        throw std::domain_error("big_w: non-decaying tabulated tail is not integrable");
    // Numeric piece up to where one factor becomes trivial, exact remainder.
    double r_end;
    double g_const = 0.0;   // growth value past r_end (bounded tabulated growth)
    if (env.compact_support()) {
        r_end = env.support_end();
    } else {
        r_end = std::max(b, g.table.last_r());
        g_const = g(r_end);
    }
    const double remainder = g_const == 0.0
                                 ? 0.0
                                 : g_const * env.tail_moment(std::max(r, r_end));
    if (r >= r_end) return sd * remainder;
    std::vector<double> breaks{b};
    if (env.law == EnvelopeLaw::Tabulated)
        breaks.insert(breaks.end(), env.table.r.begin(), env.table.r.end());
    if (g.kind == GrowthKind::Tabulated)
        breaks.insert(breaks.end(), g.table.r.begin(), g.table.r.end());
    const auto f = [&](double s) { return env.eta(s) * g(s) * std::pow(s, d - 1); };
    return sd * (integrate_split(f, r, r_end, breaks, 1e-10) + remainder);
}

double c_delta_estimate(const EnvelopeSpec& env, double delta, int n_cubes) {
    require(delta > 0.0 && std::isfinite(delta), "c_delta_estimate: delta must be positive");
    require(n_cubes >= 1, "c_delta_estimate: need at least one cell");
    const int d = env.d;
    // Deterministic radial pattern: every cell near the origin, geometric
    // strides farther out. The worst ratio sits where the envelope is
    // steepest relative to its local mean, always within a few cells of the
    // knee for the admissible shapes.
    std::vector<int64_t> ks;
    for (int64_t k = 0; k <= 64 && static_cast<int>(ks.size()) < n_cubes; ++k) ks.push_back(k);
    for (double k = 96.0; k <= 1000.0 && static_cast<int>(ks.size()) < n_cubes; k *= 1.5)
        ks.push_back(static_cast<int64_t>(k));
    double worst = 0.0;
    bool any = false;
    const int patterns = d > 1 ? 2 : 1;   // axis cells, then diagonal cells
    for (int pat = 0; pat < patterns; ++pat) {
        for (int64_t k : ks) {
            CubeIndex cell{};
            for (int i = 0; i < d; ++i) cell.k[i] = (pat == 0 && i > 0) ? 0 : k;
            const double r_inf = cell_inf_radius(delta, cell, d);
            const double sup = env.eta(r_inf);
            double integral;
            if (d == 1) {
                const double lo = static_cast<double>(cell.k[0]) * delta;
                integral = env.tail_moment(lo) - env.tail_moment(lo + delta);
            } else {
                Vec lo{}, hi{};
                for (int i = 0; i < d; ++i) {
                    lo[i] = static_cast<double>(cell.k[i]) * delta;
                    hi[i] = lo[i] + delta;
                }
                integral = integrate_box([&](const Vec& x) { return env.eta(norm(x, d)); },
                                         lo, hi, d, 2);
            }
            if (sup <= 0.0 && integral <= 0.0) continue;   // beyond the support
            if (integral <= 0.0)
                throw std::domain_error(
                    "c_delta_estimate: sampled cell has positive sup but zero mass; no finite "
                    "cell constant exists at this delta");
            worst = std::max(worst, std::pow(delta, d) * sup / integral);
            any = true;
        }
    }
    require(any, "c_delta_estimate: envelope vanishes on every sampled cell");
    return worst;
}

double kappa_tilde(double c_delta, double rho, const EnvelopeSpec& env, const GrowthFunction& g) {
    require(c_delta >= 1.0 && std::isfinite(c_delta), "kappa_tilde: cell constant must be >= 1");
    require(rho > 0.0 && std::isfinite(rho), "kappa_tilde: density must be positive");
    return c_delta * rho * env.d * (big_w(env, g, 0.0) + big_v(env, 0.0));
}

CheckReport attractive_field_check(const SimBox& box, const BoundaryConfiguration& omega,
                          const PotentialSpec& pot, const EnvelopeSpec& env, double kappa,
                          int n_samples, uint64_t seed) {
    require(n_samples >= 1, "attractive_field_check: need at least one sample");
    const OmegaView view(box, omega);
    const double bound = kappa * (1.0 + omega.growth(box.L));
    RngStream rng(seed, 0x21C4ECULL);
    CheckReport rep;
    rep.samples = n_samples;
    char buf[192];
    for (int t = 0; t < n_samples; ++t) {
        Vec x{};
        for (int i = 0; i < box.d; ++i) x[i] = rng.uniform(-box.L, box.L);
        const double e = view.field(pot, env, FieldKernel::VMinus, x);
        const double margin = bound - e;
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            std::snprintf(buf, sizeof buf, "x = (%g, %g, %g), field = %.17g, bound = %.17g",
                          x[0], x[1], x[2], e, bound);
            rep.witness = buf;
        }
        if (e > bound * (1.0 + 1e-12) + 1e-12) ++rep.violations;
    }
    rep.ok = rep.violations == 0;
    return rep;
}

double partition_upper_bound(double lambda, double beta, const SimBox& box, double kappa,
                    const GrowthFunction& g, double B) {
    require(beta > 0.0 && std::isfinite(beta), "partition_upper_bound: beta must be positive");
    require(std::isfinite(lambda), "partition_upper_bound: activity must be finite");
    return std::abs(lambda) * box.volume() * std::exp(beta * B) *
           std::exp(beta * kappa * (1.0 + g(box.L)));
}

FieldScan field_supremum_scan(const SimBox& box, const BoundaryConfiguration& omega,
                              const PotentialSpec& pot, const EnvelopeSpec& env, double delta,
                              int samples_per_cell, uint64_t seed) {
    require(samples_per_cell >= 1, "field_supremum_scan: need at least one sample per cell");
    require(delta > 0.0 && delta * std::sqrt(static_cast<double>(box.d)) < pot.a,
            "field_supremum_scan: cell side must satisfy delta * sqrt(d) < a so cells fit in "
            "the core");
    const SimBox grid(box.d, box.L, delta);
    const OmegaView view(box, omega);
    const int d = box.d;
    const int64_t per_side = grid.cells_per_side();

    FieldScan scan;
    scan.samples_per_cell = samples_per_cell;
    scan.cells = grid.cell_count();
    scan.delta = delta;
    scan.cell_sup.assign(static_cast<size_t>(scan.cells), 0.0);
    scan.cell_arg.assign(static_cast<size_t>(scan.cells), Vec{});

    int strata_per_axis = 1;
    while (std::pow(strata_per_axis + 1, d) <= samples_per_cell) ++strata_per_axis;
    int64_t strata = 1;
    for (int i = 0; i < d; ++i) strata *= strata_per_axis;

    int64_t best_cell = -1;
    double best = -kInf;
    std::array<int64_t, kMaxDim> k{};
    for (int64_t idx = 0; idx < scan.cells; ++idx) {
        Vec lo{};
        for (int i = 0; i < d; ++i) lo[i] = -box.L + static_cast<double>(k[i]) * delta;
        RngStream rng(seed, derive_seed(0x5CAFF0ULL, static_cast<uint64_t>(idx)));
        double cell_best = 0.0;   // the kernel is non-negative
        Vec cell_arg = lo;
        const auto consider = [&](Vec x) {
            // accumulated lo + k * delta can overshoot a wall by an ulp
            for (int i = 0; i < d; ++i) x[i] = std::clamp(x[i], -box.L, box.L);
            const double e = view.field(pot, env, FieldKernel::VMinus, x);
            if (e > cell_best) {
                cell_best = e;
                cell_arg = x;
            }
        };
        for (int mask = 0; mask < (1 << d); ++mask) {
            Vec x{};
            for (int i = 0; i < d; ++i) x[i] = lo[i] + (((mask >> i) & 1) ? delta : 0.0);
            consider(x);
        }
        std::array<int, kMaxDim> s{};
        for (int64_t t = 0; t < strata; ++t) {
            Vec x{};
            for (int i = 0; i < d; ++i)
                x[i] = lo[i] + (static_cast<double>(s[i]) + rng.u01()) * delta / strata_per_axis;
            consider(x);
            for (int i = 0; i < d; ++i) {
                if (++s[i] < strata_per_axis) break;
                s[i] = 0;
            }
        }
        for (int64_t t = strata; t < samples_per_cell; ++t) {
            Vec x{};
            for (int i = 0; i < d; ++i) x[i] = lo[i] + rng.u01() * delta;
            consider(x);
        }
        scan.cell_sup[static_cast<size_t>(idx)] = cell_best;
        scan.cell_arg[static_cast<size_t>(idx)] = cell_arg;
        if (cell_best > best) {
            best = cell_best;
            best_cell = idx;
        }
        for (int i = 0; i < d; ++i) {
            if (++k[i] < per_side) break;
            k[i] = 0;
        }
    }

    // Shrinking-lattice refinement around the best sample, folded back into
    // its own cell so S >= K survives.
    if (best_cell >= 0 && best > 0.0) {
        Vec lo{};
        int64_t rem = best_cell;
        for (int i = 0; i < d; ++i) {
            lo[i] = -box.L + static_cast<double>(rem % per_side) * delta;
            rem /= per_side;
        }
        Vec xbest = scan.cell_arg[static_cast<size_t>(best_cell)];
        double vbest = best;
        double h = delta / 2.0;
        const int side = 9;
        int64_t lattice = 1;
        for (int i = 0; i < d; ++i) lattice *= side;
        for (int round = 0; round < 3; ++round) {
            const Vec center = xbest;
            std::array<int, kMaxDim> s{};
            for (int64_t t = 0; t < lattice; ++t) {
                Vec x{};
                for (int i = 0; i < d; ++i) {
                    x[i] = center[i] + (static_cast<double>(s[i]) / (side - 1) - 0.5) * 2.0 * h;
                    x[i] = std::clamp(x[i], lo[i], lo[i] + delta);
                    x[i] = std::clamp(x[i], -box.L, box.L);
                }
                const double e = view.field(pot, env, FieldKernel::VMinus, x);
                if (e > vbest) {
                    vbest = e;
                    xbest = x;
                }
                for (int i = 0; i < d; ++i) {
                    if (++s[i] < side) break;
                    s[i] = 0;
                }
            }
            h /= 4.0;
        }
        scan.cell_sup[static_cast<size_t>(best_cell)] = vbest;
        scan.cell_arg[static_cast<size_t>(best_cell)] = xbest;
        best = vbest;
    }

    scan.K = std::max(best, 0.0);
    double total = 0.0;
    for (double s : scan.cell_sup) total += s;
    scan.S = total;
    scan.argmax = best_cell >= 0 ? scan.cell_arg[static_cast<size_t>(best_cell)] : Vec{};
    return scan;
}

double s_lambda(const SimBox& box, const BoundaryConfiguration& omega, const PotentialSpec& pot,
                const EnvelopeSpec& env, double delta, int samples_per_cell, uint64_t seed) {
    return field_supremum_scan(box, omega, pot, env, delta, samples_per_cell, seed).S;
}

double k_lambda(const SimBox& box, const BoundaryConfiguration& omega, const PotentialSpec& pot,
                const EnvelopeSpec& env, int grid_resolution) {
    require(grid_resolution >= 2, "k_lambda: grid resolution must be >= 2");
    const OmegaView view(box, omega);
    const int d = box.d;
    const double step = 2.0 * box.L / (grid_resolution - 1);
    double best = 0.0;
    Vec xbest{};
    int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= grid_resolution;
    std::array<int64_t, kMaxDim> s{};
    for (int64_t t = 0; t < total; ++t) {
        Vec x{};
        for (int i = 0; i < d; ++i) x[i] = -box.L + static_cast<double>(s[i]) * step;
        const double e = view.field(pot, env, FieldKernel::VMinus, x);
        if (e > best) {
            best = e;
            xbest = x;
        }
        for (int i = 0; i < d; ++i) {
            if (++s[i] < grid_resolution) break;
            s[i] = 0;
        }
    }
    // One local refinement pass around the argmax.
    const int side = 17;
    int64_t lattice = 1;
    for (int i = 0; i < d; ++i) lattice *= side;
    const Vec center = xbest;
    std::array<int, kMaxDim> u{};
    for (int64_t t = 0; t < lattice; ++t) {
        Vec x{};
        for (int i = 0; i < d; ++i) {
            x[i] = center[i] + (static_cast<double>(u[i]) / (side - 1) - 0.5) * 2.0 * step;
            x[i] = std::clamp(x[i], -box.L, box.L);
        }
        best = std::max(best, view.field(pot, env, FieldKernel::VMinus, x));
        for (int i = 0; i < d; ++i) {
            if (++u[i] < side) break;
            u[i] = 0;
        }
    }
    return best;
}

ProofQuantities proof_quantities(double S, double K, double volume, double c, double E_minus) {
    require(S >= 0.0 && std::isfinite(S), "proof_quantities: S must be finite and >= 0");
    require(K >= 0.0 && std::isfinite(K), "proof_quantities: K must be finite and >= 0");
    require(volume > 0.0 && std::isfinite(volume), "proof_quantities: volume must be positive");
    require(c >= 0.0 && std::isfinite(c), "proof_quantities: core constant must be >= 0");
    require(E_minus >= 0.0 && std::isfinite(E_minus),
            "proof_quantities: attractive energy must be finite and >= 0");
    ProofQuantities q;
    if (S <= 0.0 || K <= 0.0) {
        q.free_shortcut = true;
        return q;
    }
    q.E_Lambda = std::cbrt(S * K) * std::pow(volume, 2.0 / 3.0);
    q.p_index = static_cast<int>(std::floor(E_minus / (2.0 * S))) + 2;
    q.G_Lambda = q.E_Lambda * ((c / 16.0) * q.E_Lambda / (S * K) - 1.0);
    return q;
}

CoreExtractionResult core_extraction_verify(const std::vector<Vec>& xs, const BoundaryConfiguration& omega,
                             const SimBox& box, const PotentialSpec& pot, const EnvelopeSpec& env,
                             double delta, double S, double K, double c, int p) {
    CoreExtractionResult res;
    res.p = p;
    if (p < 1) {
        res.detail = "hypothesis not satisfied: level index must be >= 1";
        return res;
    }
    if (!(delta > 0.0) || !(delta * std::sqrt(static_cast<double>(box.d)) < pot.a)) {
        res.detail = "hypothesis not satisfied: delta * sqrt(d) >= a, cells do not fit in the core";
        return res;
    }
    if (!(S > 0.0) || !(K > 0.0)) {
        res.detail = "hypothesis not satisfied: S or K vanishes";
        return res;
    }
    if (S < K) {
        res.detail = "hypothesis not satisfied: S < K contradicts the cell decomposition";
        return res;
    }
    const SimBox grid(box.d, box.L, delta);
    const OmegaView view(box, omega);
    const int d = box.d;
    const int64_t per_side = grid.cells_per_side();
    const size_t n = xs.size();

    std::vector<double> field(n);
    std::vector<int64_t> cell_of(n);
    double e_minus = 0.0;
    for (size_t i = 0; i < n; ++i) {
        require(box.contains(xs[i]), "core_extraction_verify: configuration point outside the box");
        field[i] = view.field(pot, env, FieldKernel::VMinus, xs[i]);
        e_minus += field[i];
        int64_t idx = 0;
        for (int ax = d - 1; ax >= 0; --ax) {
            int64_t ki = static_cast<int64_t>(std::floor((xs[i][ax] + box.L) / delta));
            ki = std::clamp<int64_t>(ki, 0, per_side - 1);
            idx = idx * per_side + ki;
        }
        cell_of[i] = idx;
    }
    res.E_minus = e_minus;
    if (!(e_minus > static_cast<double>(p) * S)) {
        res.detail = "hypothesis not satisfied: attractive field energy does not exceed p * S";
        return res;
    }
    res.hypothesis_ok = true;

    double v2sum = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) v2sum += pot.v2(dist(xs[i], xs[j], d));
    res.v2_total = v2sum;
    res.rhs = 0.25 * c * static_cast<double>(p) * static_cast<double>(p - 1) * S / K;
    res.inequality_ok = v2sum >= res.rhs * (1.0 - 1e-12) - 1e-12;

    // Extraction replay: m removals per level, each from a cell holding at
    // least `level` particles; every removal certifies (count - 1) core pairs.
    res.m = static_cast<int>(std::floor(S / K));
    res.core_pairs_required =
        static_cast<int64_t>(res.m) * p * (p - 1) / 2;
    std::vector<char> alive(n, 1);
    double e_cur = e_minus;
    bool replay = true;
    for (int level = p; level >= 2 && replay; --level) {
        for (int step = 0; step < res.m && replay; ++step) {
            if (!(e_cur > static_cast<double>(level - 1) * S * (1.0 - 1e-12))) {
                res.detail = "replay stalled: field energy fell below (level-1) * S";
                replay = false;
                break;
            }
            std::map<int64_t, int> count;
            for (size_t i = 0; i < n; ++i)
                if (alive[i]) ++count[cell_of[i]];
            int best_count = 0;
            int64_t best = -1;
            for (const auto& [cell, cnt] : count)
                if (cnt > best_count) {
                    best_count = cnt;
                    best = cell;
                }
            if (best_count < level) {
                res.detail = "counting argument violated: no cell holds enough particles";
                replay = false;
                break;
            }
            size_t victim = n;
            for (size_t i = 0; i < n; ++i)
                if (alive[i] && cell_of[i] == best) {
                    victim = i;
                    break;
                }
            alive[victim] = 0;
            res.core_pairs_found += best_count - 1;
            e_cur -= field[victim];
        }
    }
    res.replay_ok = replay && res.core_pairs_found >= res.core_pairs_required;
    if (replay && !res.replay_ok) res.detail = "extraction certified too few core pairs";
    return res;
}

CoreExtractionCampaign core_extraction_campaign(const SimBox& box, const BoundaryConfiguration& omega,
                                 const PotentialSpec& pot, const EnvelopeSpec& env, double delta,
                                 int n_instances, int samples_per_cell, uint64_t seed) {
    require(n_instances >= 1, "core_extraction_campaign: need at least one instance");
    CoreExtractionCampaign camp;
    RngStream rng(seed, 0x31CA3ULL);
    const FieldScan scan = field_supremum_scan(box, omega, pot, env, delta, samples_per_cell,
                                               derive_seed(seed, 0x31));
    if (!(scan.K > 0.0)) {
        // No attractive part anywhere: the premise is unsatisfiable and the
        // bound degenerates to v2 >= 0.
        camp.trivial = true;
        for (int t = 0; t < n_instances; ++t) {
            const int n_pts = 2 + static_cast<int>(rng.integer(8));
            std::vector<Vec> xs(static_cast<size_t>(n_pts));
            for (auto& x : xs)
                for (int i = 0; i < box.d; ++i) x[i] = rng.uniform(-box.L, box.L);
            double v2sum = 0.0;
            for (size_t i = 0; i < xs.size(); ++i)
                for (size_t j = i + 1; j < xs.size(); ++j)
                    v2sum += pot.v2(dist(xs[i], xs[j], box.d));
            ++camp.instances;
            if (v2sum < 0.0) {
                ++camp.violations;
                camp.failures.push_back("core split went negative on a random configuration");
            }
        }
        return camp;
    }
    std::vector<size_t> order(scan.cell_sup.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scan.cell_sup[a] > scan.cell_sup[b]; });
    size_t positive = 0;
    while (positive < order.size() && scan.cell_sup[order[positive]] > 0.0) ++positive;
    for (int t = 0; t < n_instances; ++t) {
        const int p = 2 + static_cast<int>(rng.integer(3));
        // Pile copies at per-cell argmax positions of the strongest cells so
        // the premise holds with the measured quantities themselves.
        const double target = static_cast<double>(p) * scan.S * (1.0 + 1e-6) + 1e-12;
        std::vector<Vec> xs;
        double e = 0.0;
        const uint64_t spread = 1 + rng.integer(std::min<uint64_t>(positive, 4));
        while (e <= target) {
            const size_t cell = order[rng.integer(spread)];
            xs.push_back(scan.cell_arg[cell]);
            e += scan.cell_sup[cell];
        }
        const CoreExtractionResult res = core_extraction_verify(xs, omega, box, pot, env, delta, scan.S, scan.K,
                                                 pot.c, p);
        ++camp.instances;
        if (!res.hypothesis_ok || !res.inequality_ok || !res.replay_ok) {
            ++camp.violations;
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "instance %d (p = %d, n = %zu): %s", t, p, xs.size(),
                          res.detail.empty() ? "pair sum below the certified bound"
                                             : res.detail.c_str());
            camp.failures.push_back(buf);
        }
    }
    return camp;
}

double distance_field_bound(const Vec& x, const SimBox& box, double rho, const GrowthFunction& g,
                     const EnvelopeSpec& env, double c_delta) {
    const double dx = boundary_distance(box, x);
    if (!(dx >= env.b))
        throw std::domain_error(
            "distance_field_bound: hypothesis not satisfied, boundary distance below the knee");
    const double kbar = c_delta * rho * env.d;
    return kbar * (big_w(env, g, dx) + (1.0 + g(box.L)) * big_v(env, dx));
}

CheckReport distance_field_check(const SimBox& box, const BoundaryConfiguration& omega,
                          const PotentialSpec& pot, const EnvelopeSpec& env, double c_delta,
                          int n_samples, uint64_t seed) {
    require(n_samples >= 1, "distance_field_check: need at least one sample");
    CheckReport rep;
    if (box.L <= env.b) {
        rep.witness = "box too small: no interior point is a knee length from the walls";
        return rep;   // vacuously fine, samples = 0
    }
    const OmegaView view(box, omega);
    RngStream rng(seed, 0x41C4ECULL);
    const double inner = box.L - env.b;
    char buf[192];
    rep.samples = n_samples;
    for (int t = 0; t < n_samples; ++t) {
        Vec x{};
        for (int i = 0; i < box.d; ++i) x[i] = rng.uniform(-inner, inner);
        const double bound = distance_field_bound(x, box, omega.rho, omega.growth, env, c_delta);
        const double e = view.field(pot, env, FieldKernel::VPlus, x);
        const double margin = bound - e;
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            std::snprintf(buf, sizeof buf, "x = (%g, %g, %g), field = %.17g, bound = %.17g",
                          x[0], x[1], x[2], e, bound);
            rep.witness = buf;
        }
        if (e > bound * (1.0 + 1e-12) + 1e-12) ++rep.violations;
    }
    rep.ok = rep.violations == 0;
    return rep;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::TendingToZero: return "tending-to-zero";
        case Verdict::Inconclusive: return "inconclusive";
        case Verdict::Diverging: return "diverging";
    }
    return "?";
}

Verdict classify_series(const std::vector<double>& abscissae, const std::vector<double>& values,
                        double* slope_out) {
    require(abscissae.size() == values.size(), "classify_series: length mismatch");
    require(abscissae.size() >= 4, "classify_series: need at least 4 points");
    require(abscissae.front() > 0.0, "classify_series: abscissae must be positive");
    for (size_t i = 1; i < abscissae.size(); ++i)
        require(abscissae[i] > abscissae[i - 1], "classify_series: abscissae must increase");
    const size_t n = abscissae.size();
    const size_t half = (n + 1) / 2;
    const size_t lo = n - half;
    if (slope_out) *slope_out = 0.0;
    double vmax = 0.0;
    for (size_t i = lo; i < n; ++i) vmax = std::max(vmax, std::abs(values[i]));
    if (vmax <= 1e-300) return Verdict::TendingToZero;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = lo; i < n; ++i) {
        const double lx = std::log(abscissae[i]);
        const double ly = std::log(std::max(std::abs(values[i]), 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double w = static_cast<double>(half);
    const double denom = w * sxx - sx * sx;
    require(denom > 0.0, "classify_series: degenerate abscissae");
    const double slope = (w * sxy - sx * sy) / denom;
    if (slope_out) *slope_out = slope;
    if (slope <= -0.05) return Verdict::TendingToZero;
    if (slope >= 0.05) return Verdict::Diverging;
    return Verdict::Inconclusive;
}

static void check_probe_abscissae(const std::vector<double>& R, bool need_decades,
                                  const char* who) {
    require(R.size() >= 4, std::string(who) + ": need at least 4 points");
    require(R.front() > 0.0, std::string(who) + ": abscissae must be positive");
    for (size_t i = 1; i < R.size(); ++i)
        require(R[i] > R[i - 1], std::string(who) + ": abscissae must increase");
    if (need_decades)
        require(R.back() >= 100.0 * R.front() * (1.0 - 1e-12),
                std::string(who) + ": series must span at least two decades");
}

TailGrowthProbes probe_tail_growth(const GrowthFunction& g, const EnvelopeSpec& env,
                                    const std::vector<double>& R_values) {
    check_probe_abscissae(R_values, true, "probe_tail_growth");
    TailGrowthProbes out;
    out.first.name = "growth-weighted-tail-mean";
    out.second.name = "squared-growth-tail-mean";
    double accW = 0.0, accV = 0.0, prev = 0.0;
    const bool gz = g.is_zero();
    for (double R : R_values) {
        if (!gz)
            accW += integrate_split([&](double s) { return big_w(env, g, s); }, prev, R,
                                    {env.b}, 1e-9);
        accV += integrate_split([&](double s) { return big_v(env, s); }, prev, R, {env.b}, 1e-9);
        prev = R;
        const double gr = g(R);
        out.first.abscissae.push_back(R);
        out.first.values.push_back(gr * accW / R);
        out.second.abscissae.push_back(R);
        out.second.values.push_back((1.0 + gr) * (1.0 + gr) * accV / R);
    }
    out.first.verdict = classify_series(out.first.abscissae, out.first.values, &out.first.slope);
    out.second.verdict =
        classify_series(out.second.abscissae, out.second.values, &out.second.slope);
    return out;
}

ProbeSeries probe_margin_growth(const GrowthFunction& g, const EnvelopeSpec& env,
                              const std::function<double(double)>& h,
                              const std::vector<double>& L_values) {
    check_probe_abscissae(L_values, false, "probe_margin_growth");
    require(static_cast<bool>(h), "probe_margin_growth: need a window profile h");
    ProbeSeries out;
    out.name = "window-tail-product";
    for (double L : L_values) {
        const double hl = h(L);
        require(hl >= 0.0 && std::isfinite(hl), "probe_margin_growth: h(L) must be finite and >= 0");
        out.abscissae.push_back(L);
        out.values.push_back((1.0 + g(L)) * big_v(env, hl));
    }
    out.verdict = classify_series(out.abscissae, out.values, &out.slope);
    return out;
}

bool growth_exponent_gate(double p, double q) {
    require(p > 0.0 && std::isfinite(p), "growth_exponent_gate: tail exponent must be positive");
    require(q >= 0.0 && std::isfinite(q), "growth_exponent_gate: growth exponent must be >= 0");
    return q < 0.5 * std::min(1.0, p);
}

double trend_kappa_delta(double rho, const GrowthFunction& g, double delta,
                         const EnvelopeSpec& env) {
    require(rho > 0.0, "trend_kappa_delta: density must be positive");
    require(delta > 0.0, "trend_kappa_delta: cell side must be positive");
    const double c_delta = c_delta_estimate(env, delta);
    const double k_delta = c_delta * c_delta / std::pow(delta, env.d);
    const double ktilde = kappa_tilde(c_delta, rho, env, g);
    return 2.0 * env.d * env.d * rho * k_delta * ktilde;
}

double trend_analytic(double kappa_delta, double L, const GrowthFunction& g,
                      const EnvelopeSpec& env) {
    require(L > 0.0, "trend_analytic: box size must be positive");
    const double accV =
        integrate_split([&](double s) { return big_v(env, s); }, 0.0, L, {env.b}, 1e-9);
    const double accW =
        g.is_zero() ? 0.0
                    : integrate_split([&](double s) { return big_w(env, g, s); }, 0.0, L,
                                      {env.b}, 1e-9);
    const double gl = g(L);
    return kappa_delta * ((1.0 + gl) * accW / L + (1.0 + gl) * (1.0 + gl) * accV / L);
}

TrendSeries trend_sk(const std::vector<double>& L_values, BoundaryMode mode, double rho,
                     const GrowthFunction& g, double delta, double extent_margin,
                     const PotentialSpec& pot, const EnvelopeSpec& env, int samples_per_cell,
                     uint64_t seed) {
    require(!L_values.empty(), "trend_sk: need at least one box size");
    for (size_t i = 1; i < L_values.size(); ++i)
        require(L_values[i] > L_values[i - 1], "trend_sk: box sizes must increase");
    require(extent_margin > 0.0, "trend_sk: extent margin must be positive");
    TrendSeries tr;
    tr.kappa_delta = trend_kappa_delta(rho, g, delta, env);
    for (size_t i = 0; i < L_values.size(); ++i) {
        const double L = L_values[i];
        const SimBox box(env.d, L, delta);
        const BoundaryConfiguration omega = generate_boundary(
            mode, env.d, rho, g, delta, L + extent_margin, derive_seed(seed, i, 1));
        const FieldScan scan = field_supremum_scan(box, omega, pot, env, delta, samples_per_cell,
                                                   derive_seed(seed, i, 2));
        TrendPoint ptn;
        ptn.L = L;
        ptn.S = scan.S;
        ptn.K = scan.K;
        ptn.measured = scan.S * scan.K / box.volume();
        ptn.analytic = trend_analytic(tr.kappa_delta, L, g, env);
        ptn.omega_points = omega.size();
        tr.points.push_back(ptn);
    }
    if (tr.points.size() >= 4) {
        std::vector<double> xs, ys;
        for (const auto& ptn : tr.points) {
            xs.push_back(ptn.L);
            ys.push_back(ptn.measured);
        }
        tr.verdict = classify_series(xs, ys, &tr.slope);
    }
    return tr;
}

double tail_radius(const EnvelopeSpec& env, double threshold) {
    require(threshold > 0.0 && std::isfinite(threshold), "tail_radius: threshold must be positive");
    if (big_v(env, 0.0) <= threshold) return 0.0;
    if (env.law == EnvelopeLaw::Power && env.C > 0.0) {
        const double r =
            std::pow(sphere_surface(env.d) * env.C / (env.p * threshold), 1.0 / env.p);
        if (r >= env.b) return r;
    }
    double lo = 0.0;
    double hi = env.compact_support() ? env.support_end() : env.b;
    while (big_v(env, hi) > threshold) {
        hi *= 2.0;
        require(hi < 1e18, "tail_radius: tail never reaches the threshold");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (big_v(env, mid) > threshold ? lo : hi) = mid;
    }
    return hi;
}

BoundsReport bounds_report(const SimBox& box, const BoundaryConfiguration& omega,
                           const PotentialSpec& pot, const EnvelopeSpec& env, double scan_delta,
                           int samples_per_cell, int n_check_samples, int extraction_instances,
                           uint64_t seed) {
    BoundsReport rep;
    rep.V0 = big_v(env, 0.0);
    rep.W0 = big_w(env, omega.growth, 0.0);
    rep.C_delta = c_delta_estimate(env, omega.delta);
    rep.kappa = kappa_tilde(rep.C_delta, omega.rho, env, omega.growth);

    const CheckReport l21 =
        attractive_field_check(box, omega, pot, env, rep.kappa, n_check_samples, derive_seed(seed, 21));
    rep.field_bound_ok = l21.ok;
    rep.field_margin = l21.worst_margin;

    const FieldScan scan = field_supremum_scan(box, omega, pot, env, scan_delta, samples_per_cell,
                                               derive_seed(seed, 40));
    rep.S = scan.S;
    rep.K = scan.K;
    rep.scan_delta = scan_delta;
    rep.scan_samples_per_cell = samples_per_cell;
    rep.scan_cells = scan.cells;
    rep.check_samples = n_check_samples;
    rep.s_dominates_k = rep.S >= rep.K * (1.0 - 1e-12);
    const double gl = omega.growth(box.L);
    rep.k_within_kappa = rep.K <= rep.kappa * (1.0 + gl) * (1.0 + 1e-12);

    const ProofQuantities q0 = proof_quantities(rep.S, rep.K, box.volume(), pot.c, 0.0);
    rep.free_shortcut = q0.free_shortcut;
    rep.E_Lambda = q0.E_Lambda;
    rep.G_Lambda = q0.G_Lambda;
    rep.p_index =
        q0.free_shortcut
            ? 0
            : proof_quantities(rep.S, rep.K, box.volume(), pot.c, q0.E_Lambda).p_index;

    const CoreExtractionCampaign camp = core_extraction_campaign(box, omega, pot, env, scan_delta,
                                                  extraction_instances, samples_per_cell,
                                                  derive_seed(seed, 31));
    rep.extraction_ok = camp.violations == 0;
    rep.extraction_instances = camp.instances;
    rep.extraction_trivial = camp.trivial;

    const CheckReport l41 =
        distance_field_check(box, omega, pot, env, rep.C_delta, n_check_samples, derive_seed(seed, 41));
    rep.distance_bound_ok = l41.ok;
    rep.distance_margin = l41.worst_margin;
    return rep;
}

}  // namespace boxgas
