#include "boxgas/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "boxgas/quadrature.hpp"
#include "boxgas/rng.hpp"
#include "boxgas/table.hpp"

namespace boxgas {

double omega_extent_margin(const PotentialSpec& pot, const EnvelopeSpec& env) {
    const double floor_r = std::max(pot.a, pot.b);
    const double rng = pot.range();
    if (rng < kInf) return std::max(floor_r, rng);
    const double scale = (pot.c > 0.0 ? pot.c : 1.0) * std::pow(pot.a, -pot.d);
    return std::max(floor_r, tail_radius(env, 1e-3 * scale));
}

PotentialSpec potential_from_config(const Config& cfg) {
    const std::string kind = cfg.get("potential.kind", "core_tail");
    const int d = static_cast<int>(cfg.get_int("potential.d", 1));
    const double a = cfg.get_num("potential.a", 1.0);
    const double c = cfg.get_num("potential.c", 1.0);
    const double K = cfg.get_num("potential.K", 10.0);
    const double C = cfg.get_num("potential.C", 1.0);
    const double b = cfg.get_num("potential.b", a);
    const double p = cfg.get_num("potential.p", 1.0);
    const double B = cfg.get_num("potential.B", 0.5);
    if (kind == "core_tail" || kind == "core-plus-tail")
        return PotentialSpec::core_tail(d, K, a, c, C, b, p, B);
    if (kind == "hard_rod" || kind == "hard-rod") return PotentialSpec::hard_rod(d, a);
    if (kind == "soft_rod" || kind == "soft-rod") return PotentialSpec::soft_rod(d, K, a, c);
    if (kind == "tabulated")
        return PotentialSpec::tabulated(d, load_table(cfg.get_required("potential.table")), a, c,
                                        b, B);
    throw std::domain_error("potential.kind: unknown value '" + kind + "'");
}

EnvelopeSpec envelope_from_config(const Config& cfg, const PotentialSpec& pot) {
    const std::string kind = cfg.get("envelope.kind", "auto");
    if (kind == "auto") return EnvelopeSpec::for_potential(pot);
    const double two_b = cfg.get_num("envelope.two_b", 2.0 * pot.B);
    const double b = cfg.get_num("envelope.b", pot.b);
    if (kind == "power")
        return EnvelopeSpec::power(pot.d, two_b, b, cfg.get_num("envelope.C", pot.C),
                                   cfg.get_num("envelope.p", pot.p));
    if (kind == "tabulated")
        return EnvelopeSpec::tabulated(pot.d, two_b, b,
                                       load_table(cfg.get_required("envelope.table")));
    throw std::domain_error("envelope.kind: unknown value '" + kind + "'");
}

GrowthFunction growth_from_config(const Config& cfg) {
    const std::string kind = cfg.get("growth.kind", "zero");
    if (kind == "zero") return GrowthFunction::zero();
    if (kind == "power") return GrowthFunction::power(cfg.get_num("growth.q", 0.25));
    if (kind == "tabulated")
        return GrowthFunction::tabulated(load_table(cfg.get_required("growth.table")));
    throw std::domain_error("growth.kind: unknown value '" + kind + "'");
}

ExperimentPlan ExperimentPlan::from_config(const Config& cfg) {
    ExperimentPlan plan;
    plan.pot = potential_from_config(cfg);
    plan.env = envelope_from_config(cfg, plan.pot);
    plan.growth = growth_from_config(cfg);
    plan.mode = boundary_mode_from(cfg.get("omega.mode", "saturated"));
    plan.name = cfg.get("plan.name", plan.name);
    plan.out_dir = cfg.get("plan.out", plan.out_dir);
    plan.rho = cfg.get_num("omega.rho", plan.rho);
    plan.delta = cfg.get_num("plan.delta", plan.delta);
    plan.beta = cfg.get_num("plan.beta", plan.beta);
    plan.lambda = cfg.get_num("plan.lambda", plan.lambda);
    plan.L_values = cfg.get_list("plan.L", plan.L_values);
    plan.scan_samples = static_cast<int>(cfg.get_int("plan.scan_samples", plan.scan_samples));
    plan.check_samples = static_cast<int>(cfg.get_int("plan.check_samples", plan.check_samples));
    plan.extraction_instances = static_cast<int>(
        cfg.get_int("plan.extraction_instances", plan.extraction_instances));
    plan.integration.points =
        static_cast<int>(cfg.get_int("plan.grid_points", plan.integration.points));
    plan.integration.ratio = cfg.get_num("plan.grid_ratio", plan.integration.ratio);
    plan.integration.gcmc.n_moves = cfg.get_int("plan.moves", plan.integration.gcmc.n_moves);
    plan.integration.gcmc.n_burnin = cfg.get_int("plan.burnin", plan.integration.gcmc.n_burnin);
    plan.integration.gcmc.thin = cfg.get_int("plan.thin", plan.integration.gcmc.thin);
    plan.integration.gcmc.blocks =
        static_cast<int>(cfg.get_int("plan.blocks", plan.integration.gcmc.blocks));
    plan.integration.gcmc.displacement =
        cfg.get_num("plan.displacement", plan.integration.gcmc.displacement);
    plan.integration.virial_samples = static_cast<int>(
        cfg.get_int("plan.virial_samples", plan.integration.virial_samples));
    plan.series_n_max = static_cast<int>(cfg.get_int("plan.series_nmax", plan.series_n_max));
    plan.series_samples = cfg.get_int("plan.series_samples", plan.series_samples);
    plan.seed = static_cast<uint64_t>(cfg.get_int("plan.seed", static_cast<long long>(plan.seed)));
    plan.contrast = cfg.get_bool("plan.contrast", plan.contrast);
    plan.validate();
    return plan;
}

void ExperimentPlan::validate() const {
    pot.validate();
    env.validate();
    growth.validate();
    require(!name.empty(), "plan: name must not be empty");
    for (char ch : name)
        require(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_',
                "plan: name must use only letters, digits, '-' and '_'");
    require(beta >= 0.0 && std::isfinite(beta), "plan: beta must be finite and >= 0");
    require(lambda > 0.0 && std::isfinite(lambda), "plan: activity must be positive");
    require(std::isfinite(rho), "plan: density must be finite");
    require(delta > 0.0, "plan: cell side must be positive");
    require(delta < pot.a / std::sqrt(static_cast<double>(pot.d)),
            "plan: cell side must stay below a/sqrt(d) so a core spans a cell");
    require(!L_values.empty(), "plan: need at least one box size");
    for (size_t i = 0; i < L_values.size(); ++i) {
        const double L = L_values[i];
        require(L > 0.0 && std::isfinite(L), "plan: box sizes must be positive");
        if (i > 0) require(L > L_values[i - 1], "plan: box sizes must increase");
        const double k = std::round(2.0 * L / delta);
        require(k >= 1.0 && std::abs(k * delta - 2.0 * L) <= 1e-9 * std::max(1.0, 2.0 * L),
                "plan: cell side must divide every box span evenly");
    }
    require(scan_samples >= 1, "plan: scan_samples must be >= 1");
    require(check_samples >= 1, "plan: check_samples must be >= 1");
    require(extraction_instances >= 0, "plan: extraction_instances must be >= 0");
    require(integration.points >= 9 && integration.points % 2 == 1,
            "plan: grid_points must be odd and at least 9");
    require(integration.ratio > 1.0, "plan: grid_ratio must exceed 1");
    require(series_n_max >= 0 && series_samples >= 1, "plan: bad series parameters");
}

GateReport check_gates(const ExperimentPlan& plan) {
    GateReport rep;
    const AuditReport audit =
        audit_assumptions(plan.pot, plan.env, 200, derive_seed(plan.seed, 0xAD17ULL));
    if (!audit.pass()) {
        rep.audits_ok = false;
        rep.failing = "assumption-audit: " +
                      (audit.issues.empty() ? std::string("failed") : audit.issues.front().check);
    }
    const GrowthAudit ga =
        audit_admissible(plan.growth, plan.env, 200, derive_seed(plan.seed, 0xAD18ULL));
    if (!ga.admissible()) {
        rep.growth_ok = false;
        if (rep.failing.empty())
            rep.failing = "growth-audit: " +
                          (ga.issues.empty() ? std::string("failed") : ga.issues.front().check);
    }
    if (plan.env.law == EnvelopeLaw::Power) {
        rep.p = plan.env.p;
        rep.q = plan.growth.kind == GrowthKind::Power ? plan.growth.q : 0.0;
        if (plan.growth.kind != GrowthKind::Tabulated &&
            !growth_exponent_gate(rep.p, rep.q)) {
            rep.exponent_gate_ok = false;
            if (rep.failing.empty()) {
                char buf[128];
                std::snprintf(buf, sizeof buf,
                              "growth-exponent-gate: q = %g needs q < min(1, p)/2 with p = %g",
                              rep.q, rep.p);
                rep.failing = buf;
            }
        }
    }
    rep.covered = rep.audits_ok && rep.growth_ok && rep.exponent_gate_ok;
    return rep;
}

std::string verdict_of(const std::vector<SizeRow>& rows) {
    if (rows.size() < 3) return "inconclusive";
    const size_t n = rows.size();
    for (size_t k = n - 3; k + 1 < n; ++k) {
        const double slack = rows[k].err_combined + rows[k + 1].err_combined;
        if (rows[k + 1].delta_p > rows[k].delta_p + slack) return "not-converging";
    }
    const SizeRow& last = rows[n - 1];
    const double cap = std::max(kVerdictErrFactor * last.err_combined,
                                kVerdictRelative * std::abs(last.beta_p_free));
    return last.delta_p <= cap ? "converging" : "not-converging";
}

std::string timestamp_line() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[48];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string("# generated ") + buf;
}

void ensure_dir(const std::string& path) { std::filesystem::create_directories(path); }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), "cannot open for writing: " + path);
    out << content;
    require(static_cast<bool>(out), "write failed: " + path);
}

std::string CsvDoc::str(bool with_timestamp) const {
    std::ostringstream out;
    if (with_timestamp) out << timestamp_line() << '\n';
    for (const auto& [k, v] : meta) out << "# " << k << " = " << v << '\n';
    out << header << '\n';
    for (const auto& r : rows) out << r << '\n';
    return out.str();
}

namespace {

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s.empty() ? std::string("-") : s;
}

std::string gbuf(double v) { return fmt17(v); }

void info_row(CsvDoc& doc, const std::string& name, double value, const std::string& res) {
    doc.rows.push_back(name + "," + gbuf(value) + "," + res + ",info");
}

void check_row(CsvDoc& doc, const std::string& name, double value, const std::string& res,
               bool ok) {
    doc.rows.push_back(name + "," + gbuf(value) + "," + res + "," + (ok ? "pass" : "fail"));
}

}  // namespace

CsvDoc bounds_csv(const BoundsReport& rep) {
    CsvDoc doc;
    doc.header = "name,value,resolution_or_tolerance,verdict";
    doc.meta["scan.delta"] = fmt17(rep.scan_delta);
    doc.meta["scan.samples_per_cell"] = std::to_string(rep.scan_samples_per_cell);
    doc.meta["scan.cells"] = std::to_string(rep.scan_cells);
    info_row(doc, "envelope-tail-mass", rep.V0, "-");
    info_row(doc, "envelope-growth-mass", rep.W0, "-");
    info_row(doc, "cell-ratio", rep.C_delta, "-");
    info_row(doc, "field-bound-constant", rep.kappa, "-");
    info_row(doc, "field-sum-sup", rep.S, gbuf(rep.scan_delta));
    info_row(doc, "field-single-sup", rep.K, gbuf(rep.scan_delta));
    info_row(doc, "coupling-energy", rep.E_Lambda, "-");
    info_row(doc, "coupling-gap", rep.G_Lambda, "-");
    info_row(doc, "coupling-index", static_cast<double>(rep.p_index), "-");
    check_row(doc, "s-dominates-k", rep.S - rep.K, "0", rep.s_dominates_k);
    check_row(doc, "k-within-field-bound", rep.K, gbuf(rep.kappa), rep.k_within_kappa);
    check_row(doc, "attractive-field-check", rep.field_margin,
              std::to_string(rep.check_samples), rep.field_bound_ok);
    check_row(doc, "core-extraction", static_cast<double>(rep.extraction_instances),
              rep.extraction_trivial ? "trivial" : "randomized", rep.extraction_ok);
    check_row(doc, "distance-field-check", rep.distance_margin,
              std::to_string(rep.check_samples), rep.distance_bound_ok);
    return doc;
}

void append_probe_rows(CsvDoc& doc, const ProbeSeries& series) {
    for (size_t i = 0; i < series.abscissae.size(); ++i)
        doc.rows.push_back(series.name + "," + gbuf(series.values[i]) + "," +
                           gbuf(series.abscissae[i]) + "," + to_string(series.verdict));
}

CsvDoc estimates_csv() {
    CsvDoc doc;
    doc.header = "beta,lambda,L,omega_id,method,beta_p,error,flags";
    return doc;
}

std::string estimate_row(const PressureEstimate& est, double L, const std::string& omega_id) {
    return gbuf(est.beta) + "," + gbuf(est.lambda) + "," + gbuf(L) + "," + omega_id + "," +
           est.method + "," + gbuf(est.beta_p) + "," + gbuf(est.error) + "," +
           csv_safe(est.flags);
}

namespace {

BoundaryConfiguration free_boundary(int d, double delta) {
    BoundaryConfiguration omega;
    omega.d = d;
    omega.delta = delta;
    omega.rho = 0.0;
    omega.growth = GrowthFunction::zero();
    omega.mode = BoundaryMode::Empty;
    return omega;
}

std::string size_dir_name(double L) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "L%g", L);
    return buf;
}

void plan_meta(CsvDoc& doc, const ExperimentPlan& plan, double rho_used, double margin) {
    doc.meta["rng"] = RngStream::engine_name();
    doc.meta["seed.root"] = std::to_string(plan.seed);
    doc.meta["plan.name"] = plan.name;
    doc.meta["beta"] = fmt17(plan.beta);
    doc.meta["lambda"] = fmt17(plan.lambda);
    doc.meta["delta"] = fmt17(plan.delta);
    doc.meta["omega.mode"] = to_string(plan.mode);
    doc.meta["omega.rho_used"] = fmt17(rho_used);
    doc.meta["omega.extent_margin"] = fmt17(margin);
    doc.meta["potential.kind"] = to_string(plan.pot.kind);
    doc.meta["potential.a"] = fmt17(plan.pot.a);
    doc.meta["potential.c"] = fmt17(plan.pot.c);
    doc.meta["potential.B"] = fmt17(plan.pot.B);
    doc.meta["growth.kind"] = to_string(plan.growth.kind);
    if (plan.growth.kind == GrowthKind::Power) doc.meta["growth.q"] = fmt17(plan.growth.q);
}

struct SizeArtifacts {
    SizeRow row;
    std::vector<std::pair<std::string, std::string>> files;   // path, body (no timestamp)
};

std::string render_stream_doc(const ExperimentPlan& plan, double rho_used, double margin,
                              double L, const std::string& omega_id, const CurvePoint& cp,
                              uint64_t chain_seed, double r_cut, const std::string& body) {
    CsvDoc doc;
    plan_meta(doc, plan, rho_used, margin);
    doc.meta["L"] = fmt17(L);
    doc.meta["omega.id"] = omega_id;
    doc.meta["chain.lambda"] = fmt17(cp.lambda);
    doc.meta["chain.seed"] = std::to_string(chain_seed);
    doc.meta["chain.moves"] = std::to_string(plan.integration.gcmc.n_moves);
    doc.meta["chain.burnin"] = std::to_string(plan.integration.gcmc.n_burnin);
    doc.meta["chain.thin"] = std::to_string(plan.integration.gcmc.thin);
    doc.meta["chain.blocks"] = std::to_string(plan.integration.gcmc.blocks);
    doc.meta["chain.displacement"] = fmt17(cp.displacement);
    doc.meta["chain.samples"] = std::to_string(cp.samples);
    doc.meta["chain.acc_insert"] = fmt17(cp.acc_insert);
    doc.meta["chain.acc_delete"] = fmt17(cp.acc_delete);
    doc.meta["chain.acc_translate"] = fmt17(cp.acc_translate);
    doc.meta["chain.r_cut"] = fmt17(r_cut);
    if (!cp.flags.empty()) doc.meta["chain.flags"] = csv_safe(cp.flags);
    doc.header = "move_index,N,U";
    std::string out = doc.str(false);
    out += body;
    return out;
}

}  // namespace

ConvergenceTable run_experiment(const ExperimentPlan& plan, FreePressureCache* cache) {
    plan.validate();
    const GateReport gates = check_gates(plan);
    if (!gates.audits_ok || !gates.growth_ok)
        throw std::domain_error("experiment refused: " + gates.failing);
    if (!gates.exponent_gate_ok && !plan.contrast)
        throw std::domain_error("experiment refused: " + gates.failing +
                                " (rerun with contrast to proceed outside the covered range)");

    ConvergenceTable table;
    table.covered = gates.covered;
    if (!table.covered) table.flags = "outside-theorem";

    const double margin = omega_extent_margin(plan.pot, plan.env);

    double rho_used = plan.rho;
    if (rho_used <= 0.0) {
        const SimBox box(plan.pot.d, plan.L_values.back(), plan.delta);
        GcmcParams g = plan.integration.gcmc;
        g.beta = plan.beta;
        g.lambda = plan.lambda;
        g.seed = derive_seed(plan.seed, 0xB07CULL);
        rho_used = 5.0 * bulk_density(box, plan.pot, plan.env, g);
    }
    table.rho_used = rho_used;

    const std::string plan_dir = plan.out_dir + "/" + plan.name;
    ensure_dir(plan_dir);

    // Probe series are properties of (eta, g) alone; render once, write per L.
    std::string probes_body;
    {
        std::vector<double> r_grid, l_grid;
        for (int i = 0; i < 25; ++i) r_grid.push_back(std::pow(10.0, 4.0 * i / 24.0));
        for (int i = 0; i < 13; ++i) l_grid.push_back(std::pow(10.0, 1.0 + 3.0 * i / 12.0));
        const TailGrowthProbes p22 = probe_tail_growth(plan.growth, plan.env, r_grid);
        const ProbeSeries p24 = probe_margin_growth(
            plan.growth, plan.env, [](double L) { return std::cbrt(L * L); }, l_grid);
        CsvDoc doc;
        plan_meta(doc, plan, rho_used, margin);
        doc.meta["margin.h"] = "L^(2/3)";
        doc.header = "name,value,resolution_or_tolerance,verdict";
        append_probe_rows(doc, p22.first);
        append_probe_rows(doc, p22.second);
        append_probe_rows(doc, p24);
        probes_body = doc.str(false);
    }

    const double kappa_d =
        rho_used > 0.0 ? trend_kappa_delta(rho_used, plan.growth, plan.delta, plan.env) : 0.0;
    const double r_cut_box = interaction_cutoff(plan.pot, plan.env);

    std::mutex cache_mu;

    auto run_size = [&](size_t i) -> SizeArtifacts {
        const double L = plan.L_values[i];
        const SimBox box(plan.pot.d, L, plan.delta);
        const std::string dir = plan_dir + "/" + size_dir_name(L);
        ensure_dir(dir);
        SizeArtifacts art;

        const BoundaryConfiguration omega =
            generate_boundary(plan.mode, plan.pot.d, rho_used, plan.growth, plan.delta,
                              L + margin, derive_seed(plan.seed, 0x0E6AULL, i));
        const std::string omega_id =
            std::string(to_string(plan.mode)) + "-" + std::to_string(omega.size()) + "pts";

        const BoundsReport rep = bounds_report(box, omega, plan.pot, plan.env, plan.delta,
                                               plan.scan_samples, plan.check_samples,
                                               plan.extraction_instances,
                                               derive_seed(plan.seed, 0xB04DULL, i));
        {
            CsvDoc doc = bounds_csv(rep);
            plan_meta(doc, plan, rho_used, margin);
            doc.meta["L"] = fmt17(L);
            doc.meta["omega.id"] = omega_id;
            doc.meta["omega.points"] = std::to_string(omega.size());
            const double measured = rep.S * rep.K / box.volume();
            const double analytic =
                kappa_d > 0.0 ? trend_analytic(kappa_d, L, plan.growth, plan.env) : 0.0;
            doc.rows.push_back("trend-measured," + fmt17(measured) + "," + fmt17(L) + ",info");
            doc.rows.push_back("trend-analytic," + fmt17(analytic) + "," + fmt17(L) + "," +
                               (kappa_d <= 0.0 || measured <= analytic ? "pass" : "fail"));
            art.files.emplace_back(dir + "/bounds.csv", doc.str(false));
        }
        art.files.emplace_back(dir + "/probes.csv", probes_body);

        const int P = plan.integration.points;
        const double cap = 2.0 * L * std::sqrt(static_cast<double>(plan.pot.d));
        const double r_cut = std::min(r_cut_box, cap);

        auto integrate_with_traces = [&](const BoundaryConfiguration& om, uint64_t seed,
                                         const std::string& id, PressureEstimate& est,
                                         std::vector<std::string>& docs) {
            std::vector<std::ostringstream> bufs(static_cast<size_t>(P));
            est = pressure_by_integration(
                box, om, plan.pot, plan.env, plan.beta, plan.lambda, plan.integration, seed,
                [&](int k, double) { return &bufs[static_cast<size_t>(k)]; });
            docs.clear();
            for (int k = 0; k < P; ++k)
                docs.push_back(render_stream_doc(
                    plan, rho_used, margin, L, id, est.curve[static_cast<size_t>(k)],
                    derive_seed(seed, 0x6C3CULL, static_cast<uint64_t>(k)), r_cut,
                    bufs[static_cast<size_t>(k)].str()));
        };

        PressureEstimate free_est;
        std::vector<std::string> free_docs;
        const uint64_t free_seed = derive_seed(plan.seed, 0xF2EEULL, i);
        {
            std::ostringstream key;
            key << plan.pot.d << '|' << to_string(plan.pot.kind) << '|' << fmt17(plan.pot.a)
                << '|' << fmt17(plan.pot.c) << '|' << fmt17(plan.pot.K) << '|'
                << fmt17(plan.pot.C) << '|' << fmt17(plan.pot.b) << '|' << fmt17(plan.pot.p)
                << '|' << fmt17(plan.pot.B) << '|' << plan.pot.table.r.size() << '|'
                << fmt17(plan.beta) << '|' << fmt17(plan.lambda) << '|' << fmt17(L) << '|'
                << fmt17(plan.delta) << '|' << P << '|' << fmt17(plan.integration.ratio) << '|'
                << plan.integration.gcmc.n_moves << '|' << plan.integration.gcmc.n_burnin << '|'
                << plan.integration.gcmc.thin << '|' << plan.integration.gcmc.blocks << '|'
                << fmt17(plan.integration.gcmc.displacement) << '|'
                << plan.integration.virial_samples << '|' << free_seed;
            bool hit = false;
            if (cache) {
                std::lock_guard<std::mutex> lock(cache_mu);
                const auto it = cache->find(key.str());
                if (it != cache->end()) {
                    free_est = it->second.est;
                    free_docs = it->second.traces;
                    hit = true;
                }
            }
            if (!hit) {
                integrate_with_traces(free_boundary(plan.pot.d, plan.delta), free_seed, "free",
                                      free_est, free_docs);
                if (cache) {
                    std::lock_guard<std::mutex> lock(cache_mu);
                    (*cache)[key.str()] = FreePressureEntry{free_est, free_docs};
                }
            }
        }

        PressureEstimate omega_est;
        std::vector<std::string> omega_docs;
        integrate_with_traces(omega, derive_seed(plan.seed, 0x0B0BULL, i), omega_id, omega_est,
                              omega_docs);

        for (int k = 0; k < P; ++k) {
            char name[48];
            std::snprintf(name, sizeof name, "/gcmc_free_%02d.csv", k);
            art.files.emplace_back(dir + name, free_docs[static_cast<size_t>(k)]);
            std::snprintf(name, sizeof name, "/gcmc_omega_%02d.csv", k);
            art.files.emplace_back(dir + name, omega_docs[static_cast<size_t>(k)]);
        }

        SizeRow& row = art.row;
        row.L = L;
        row.beta_p_free = free_est.beta_p;
        row.err_free = free_est.error;
        row.beta_p_omega = omega_est.beta_p;
        row.err_omega = omega_est.error;
        row.delta_p = std::abs(free_est.beta_p - omega_est.beta_p);
        row.err_combined = free_est.error + omega_est.error;
        row.omega_points = omega.size();
        if (!table.covered) row.flags = "outside-theorem";

        CsvDoc pdoc = estimates_csv();
        plan_meta(pdoc, plan, rho_used, margin);
        pdoc.meta["L"] = fmt17(L);
        pdoc.meta["free.err_stat"] = fmt17(free_est.err_stat);
        pdoc.meta["free.err_quad"] = fmt17(free_est.err_quad);
        pdoc.meta["free.err_anchor"] = fmt17(free_est.err_anchor);
        pdoc.meta["omega.err_stat"] = fmt17(omega_est.err_stat);
        pdoc.meta["omega.err_quad"] = fmt17(omega_est.err_quad);
        pdoc.meta["omega.err_anchor"] = fmt17(omega_est.err_anchor);
        pdoc.meta["omega.field_tail_per_density"] = fmt17(big_v(plan.env, margin));
        pdoc.rows.push_back(estimate_row(free_est, L, "free"));
        pdoc.rows.push_back(estimate_row(omega_est, L, omega_id));

        if (plan.lambda * box.volume() <= 2.0) {
            const PressureEstimate sfree = pressure_by_series(
                box, free_boundary(plan.pot.d, plan.delta), plan.pot, plan.env, plan.beta,
                plan.lambda, plan.series_n_max, plan.series_samples,
                derive_seed(plan.seed, 0x5E1FULL, i));
            const PressureEstimate somega = pressure_by_series(
                box, omega, plan.pot, plan.env, plan.beta, plan.lambda, plan.series_n_max,
                plan.series_samples, derive_seed(plan.seed, 0x5E20ULL, i));
            pdoc.rows.push_back(estimate_row(sfree, L, "free"));
            pdoc.rows.push_back(estimate_row(somega, L, omega_id));
            if (std::isfinite(sfree.error) &&
                std::abs(sfree.beta_p - free_est.beta_p) > 3.0 * (sfree.error + free_est.error))
                row.flags += (row.flags.empty() ? "" : "; ") + std::string("series-mismatch-free");
            if (std::isfinite(somega.error) &&
                std::abs(somega.beta_p - omega_est.beta_p) >
                    3.0 * (somega.error + omega_est.error))
                row.flags +=
                    (row.flags.empty() ? "" : "; ") + std::string("series-mismatch-omega");
        }
        art.files.emplace_back(dir + "/pressure.csv", pdoc.str(false));
        return art;
    };

    std::vector<std::future<SizeArtifacts>> futures;
    futures.reserve(plan.L_values.size());
    for (size_t i = 0; i < plan.L_values.size(); ++i)
        futures.push_back(std::async(std::launch::async, run_size, i));
    for (auto& f : futures) {
        SizeArtifacts art = f.get();
        for (const auto& [path, body] : art.files)
            write_text_file(path, timestamp_line() + "\n" + body);
        table.rows.push_back(art.row);
    }

    table.verdict = verdict_of(table.rows);

    CsvDoc tdoc;
    plan_meta(tdoc, plan, rho_used, margin);
    tdoc.meta["verdict"] = table.verdict;
    tdoc.meta["verdict.rule"] =
        "delta_p non-increasing over the last 3 rows within combined error; final delta_p <= "
        "max(" +
        fmt17(kVerdictErrFactor) + "*err; " + fmt17(kVerdictRelative) + "*beta_p_free)";
    tdoc.meta["covered"] = table.covered ? "yes" : "no";
    tdoc.header =
        "L,beta_p_free,err_free,beta_p_omega,err_omega,delta_p,err_combined,omega_points,flags";
    for (const SizeRow& r : table.rows)
        tdoc.rows.push_back(gbuf(r.L) + "," + gbuf(r.beta_p_free) + "," + gbuf(r.err_free) +
                            "," + gbuf(r.beta_p_omega) + "," + gbuf(r.err_omega) + "," +
                            gbuf(r.delta_p) + "," + gbuf(r.err_combined) + "," +
                            std::to_string(r.omega_points) + "," + csv_safe(r.flags));
    write_text_file(plan_dir + "/table.csv", tdoc.str(true));
    return table;
}

}  // namespace boxgas
