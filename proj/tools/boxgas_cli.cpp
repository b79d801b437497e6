// Command-line front end: audits, bound reports, probe series, reference
// pressures, single chains, and the full convergence sweep. Exit codes:
// 0 success, 2 validation failure, 3 result flagged inconclusive.

#include <cmath>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boxgas/boundary.hpp"
#include "boxgas/bounds.hpp"
#include "boxgas/config.hpp"
#include "boxgas/ensemble.hpp"
#include "boxgas/harness.hpp"
#include "boxgas/potential.hpp"
#include "boxgas/rng.hpp"

namespace {

using namespace boxgas;

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kFlagged = 3;

std::string flatten(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n') ch = ';';
    return s;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "potential.kind", "potential.d", "potential.a", "potential.c", "potential.K",
        "potential.C", "potential.b", "potential.p", "potential.B", "potential.table",
        "envelope.kind", "envelope.two_b", "envelope.b", "envelope.C", "envelope.p",
        "envelope.table",
        "growth.kind", "growth.q", "growth.table",
        "omega.mode", "omega.rho", "omega.file",
        "plan.name", "plan.out", "plan.seed", "plan.beta", "plan.lambda", "plan.L",
        "plan.delta", "plan.contrast", "plan.scan_samples", "plan.check_samples",
        "plan.extraction_instances", "plan.grid_points", "plan.grid_ratio", "plan.moves",
        "plan.burnin", "plan.thin", "plan.blocks", "plan.displacement", "plan.series_nmax",
        "plan.series_samples", "plan.virial_samples",
        "bounds.L",
        "audit.trials",
    };
    return keys;
}

int reject_unknown_keys(const Config& cfg) {
    std::string bad;
    for (const auto& [k, v] : cfg.entries())
        if (!known_keys().count(k)) bad += (bad.empty() ? "" : ", ") + k;
    if (bad.empty()) return kOk;
    std::cerr << "error: unknown config keys: " << bad << '\n';
    return kInvalid;
}

struct Common {
    std::string config_path;
    std::string out_dir;
    std::string format = "csv";
    uint64_t seed = 0;
    bool seed_set = false;

    Config load() const {
        Config cfg = config_path.empty() ? Config() : Config::load(config_path);
        return cfg;
    }
    void emit(const std::string& filename, const std::string& body) const {
        std::cout << body;
        if (!out_dir.empty()) {
            ensure_dir(out_dir);
            write_text_file(out_dir + "/" + filename, body);
        }
    }
};

uint64_t pick_seed(const Common& common, const Config& cfg) {
    if (common.seed_set) return common.seed;
    return static_cast<uint64_t>(cfg.get_int("plan.seed", 1));
}

int cmd_audit(const Common& common) {
    const Config cfg = common.load();
    if (const int rc = reject_unknown_keys(cfg)) return rc;
    const PotentialSpec pot = potential_from_config(cfg);
    const EnvelopeSpec env = envelope_from_config(cfg, pot);
    const GrowthFunction g = growth_from_config(cfg);
    const int trials = static_cast<int>(cfg.get_int("audit.trials", 200));
    const uint64_t seed = pick_seed(common, cfg);

    const AuditReport rep = audit_assumptions(pot, env, trials, derive_seed(seed, 0xAD17ULL));
    const GrowthAudit ga = audit_admissible(g, env, trials, derive_seed(seed, 0xAD18ULL));

    CsvDoc doc;
    doc.header = "name,value,resolution_or_tolerance,verdict";
    doc.meta["rng"] = RngStream::engine_name();
    doc.meta["seed.root"] = std::to_string(seed);
    doc.meta["trials"] = std::to_string(trials);
    auto row = [&](const std::string& name, double value, bool ok) {
        doc.rows.push_back(name + "," + fmt17(value) + "," + std::to_string(trials) + "," +
                           (ok ? "pass" : "fail"));
    };
    row("stability-at-declared-B", pot.B, rep.s1_stability);
    row("core-floor", pot.c, rep.s2_core_floor);
    row("tail-dominated-by-envelope", env.b, rep.s3_tail_dominated);
    row("attractive-part-bounded", env.two_b, rep.s4_minus_bounded);
    row("envelope-integrable", env.tail_integral(), rep.s5_integrable);
    row("growth-subadditive", 0.0, ga.subadditive);
    row("growth-monotone", 0.0, ga.monotone);
    row("growth-envelope-integrable", 0.0, ga.integrable);
    for (const AuditIssue& issue : rep.issues)
        doc.rows.push_back(issue.check + ",nan,witness," + flatten(issue.detail));
    for (const AuditIssue& issue : ga.issues)
        doc.rows.push_back(issue.check + ",nan,witness," + flatten(issue.detail));
    common.emit("audit.csv", doc.str());
    return rep.pass() && ga.admissible() ? kOk : kInvalid;
}

BoundaryConfiguration boundary_for(const Config& cfg, const ExperimentPlan& plan, double L,
                                   uint64_t seed) {
    const std::string file = cfg.get("omega.file", "");
    if (!file.empty()) return BoundaryConfiguration::load(file);
    const double margin = omega_extent_margin(plan.pot, plan.env);
    return generate_boundary(plan.mode, plan.pot.d, plan.rho, plan.growth, plan.delta, L + margin,
                             derive_seed(seed, 0x0E6AULL));
}

int cmd_bounds(const Common& common) {
    const Config cfg = common.load();
    if (const int rc = reject_unknown_keys(cfg)) return rc;
    ExperimentPlan plan = ExperimentPlan::from_config(cfg);
    if (common.seed_set) plan.seed = common.seed;
    const double L = cfg.get_num("bounds.L", plan.L_values.front());
    const SimBox box(plan.pot.d, L, plan.delta);
    if (plan.mode != BoundaryMode::Empty && cfg.get("omega.file", "").empty())
        require(plan.rho > 0.0, "bounds: omega.rho must be positive to generate a boundary");
    const BoundaryConfiguration omega = boundary_for(cfg, plan, L, plan.seed);
    const BoundsReport rep =
        bounds_report(box, omega, plan.pot, plan.env, plan.delta, plan.scan_samples,
                      plan.check_samples, plan.extraction_instances,
                      derive_seed(plan.seed, 0xB04DULL));
    CsvDoc doc = bounds_csv(rep);
    doc.meta["rng"] = RngStream::engine_name();
    doc.meta["seed.root"] = std::to_string(plan.seed);
    doc.meta["L"] = fmt17(L);
    doc.meta["omega.points"] = std::to_string(omega.size());
    common.emit("bounds.csv", doc.str());
    return rep.pass() ? kOk : kFlagged;
}

int cmd_probe(const Common& common) {
    const Config cfg = common.load();
    if (const int rc = reject_unknown_keys(cfg)) return rc;
    const PotentialSpec pot = potential_from_config(cfg);
    const EnvelopeSpec env = envelope_from_config(cfg, pot);
    const GrowthFunction g = growth_from_config(cfg);

    std::vector<double> r_grid, l_grid;
    for (int i = 0; i < 25; ++i) r_grid.push_back(std::pow(10.0, 4.0 * i / 24.0));
    for (int i = 0; i < 13; ++i) l_grid.push_back(std::pow(10.0, 1.0 + 3.0 * i / 12.0));
    const TailGrowthProbes tg = probe_tail_growth(g, env, r_grid);
    const ProbeSeries mg = probe_margin_growth(
        g, env, [](double L) { return std::cbrt(L * L); }, l_grid);

    CsvDoc doc;
    doc.header = "name,value,resolution_or_tolerance,verdict";
    doc.meta["margin.h"] = "L^(2/3)";
    append_probe_rows(doc, tg.first);
    append_probe_rows(doc, tg.second);
    append_probe_rows(doc, mg);

    bool gate_ok = true;
    if (env.law == EnvelopeLaw::Power && g.kind != GrowthKind::Tabulated) {
        const double q = g.kind == GrowthKind::Power ? g.q : 0.0;
        gate_ok = growth_exponent_gate(env.p, q);
        doc.rows.push_back("growth-exponent-gate," + fmt17(q) + "," + fmt17(env.p) + "," +
                           (gate_ok ? "pass" : "fail"));
    }
    common.emit("probes.csv", doc.str());

    const bool tending = tg.first.verdict == Verdict::TendingToZero &&
                         tg.second.verdict == Verdict::TendingToZero &&
                         mg.verdict == Verdict::TendingToZero;
    return tending && gate_ok ? kOk : kFlagged;
}

int cmd_exact_pressure(const Common& common) {
    const Config cfg = common.load();
    if (const int rc = reject_unknown_keys(cfg)) return rc;
    ExperimentPlan plan = ExperimentPlan::from_config(cfg);
    if (common.seed_set) plan.seed = common.seed;
    const double L = plan.L_values.front();
    const SimBox box(plan.pot.d, L, plan.delta);

    BoundaryConfiguration free_omega;
    free_omega.d = plan.pot.d;
    free_omega.delta = plan.delta;
    free_omega.mode = BoundaryMode::Empty;

    const PressureEstimate series =
        pressure_by_series(box, free_omega, plan.pot, plan.env, plan.beta, plan.lambda,
                           plan.series_n_max, plan.series_samples,
                           derive_seed(plan.seed, 0x5E1FULL));

    CsvDoc doc = estimates_csv();
    doc.meta["rng"] = RngStream::engine_name();
    doc.meta["seed.root"] = std::to_string(plan.seed);
    doc.meta["series.n_max"] = std::to_string(plan.series_n_max);
    doc.meta["series.samples"] = std::to_string(plan.series_samples);
    doc.rows.push_back(estimate_row(series, L, "free"));
    if (plan.pot.kind == PotentialKind::HardRod && plan.pot.d == 1) {
        const TonksReference tonks = tonks_reference(box.volume(), plan.pot.a, plan.lambda);
        PressureEstimate oracle;
        oracle.method = "tonks-oracle";
        oracle.beta = plan.beta;
        oracle.lambda = plan.lambda;
        oracle.volume = box.volume();
        oracle.beta_p = tonks.beta_p;
        oracle.error = 0.0;
        doc.rows.push_back(estimate_row(oracle, L, "free"));
    }
    common.emit("pressure.csv", doc.str());
    return series.flags.empty() ? kOk : kFlagged;
}

int cmd_gcmc(const Common& common) {
    const Config cfg = common.load();
    if (const int rc = reject_unknown_keys(cfg)) return rc;
    ExperimentPlan plan = ExperimentPlan::from_config(cfg);
    if (common.seed_set) plan.seed = common.seed;
    const double L = plan.L_values.front();
    const SimBox box(plan.pot.d, L, plan.delta);

    BoundaryConfiguration omega;
    if (plan.mode == BoundaryMode::Empty) {
        omega.d = plan.pot.d;
        omega.delta = plan.delta;
        omega.mode = BoundaryMode::Empty;
    } else {
        if (cfg.get("omega.file", "").empty())
            require(plan.rho > 0.0, "gcmc: omega.rho must be positive to generate a boundary");
        omega = boundary_for(cfg, plan, L, plan.seed);
    }

    GcmcParams prm = plan.integration.gcmc;
    prm.beta = plan.beta;
    prm.lambda = plan.lambda;
    prm.seed = derive_seed(plan.seed, 0x6C3CULL);

    std::ostringstream trace;
    const GcmcResult res = gcmc_run(box, omega, plan.pot, plan.env, prm, &trace);

    CsvDoc doc;
    doc.header = "move_index,N,U";
    doc.meta["rng"] = RngStream::engine_name();
    doc.meta["seed.root"] = std::to_string(plan.seed);
    doc.meta["beta"] = fmt17(plan.beta);
    doc.meta["lambda"] = fmt17(plan.lambda);
    doc.meta["L"] = fmt17(L);
    doc.meta["moves"] = std::to_string(prm.n_moves);
    doc.meta["burnin"] = std::to_string(prm.n_burnin);
    doc.meta["thin"] = std::to_string(prm.thin);
    doc.meta["displacement"] = fmt17(res.displacement);
    doc.meta["mean_n"] = fmt17(res.mean_n);
    doc.meta["se_n"] = fmt17(res.se_n);
    doc.meta["mean_u"] = fmt17(res.mean_u);
    doc.meta["acc_insert"] = fmt17(res.acc_insert);
    doc.meta["acc_delete"] = fmt17(res.acc_delete);
    doc.meta["acc_translate"] = fmt17(res.acc_translate);
    doc.meta["r_cut"] = fmt17(res.r_cut);
    doc.meta["neglected_tail"] = fmt17(res.tail_v);
    doc.meta["energy_drift"] = fmt17(res.drift);
    doc.meta["omega.points"] = std::to_string(omega.size());
    if (!res.flags.empty()) doc.meta["flags"] = res.flags;
    std::string body = doc.str();
    body += trace.str();
    common.emit("gcmc.csv", body);
    return res.drift <= 1e-8 ? kOk : kFlagged;
}

int cmd_sweep(const Common& common, bool contrast) {
    const Config cfg = common.load();
    if (const int rc = reject_unknown_keys(cfg)) return rc;
    ExperimentPlan plan = ExperimentPlan::from_config(cfg);
    if (common.seed_set) plan.seed = common.seed;
    if (!common.out_dir.empty()) plan.out_dir = common.out_dir;
    if (contrast) plan.contrast = true;

    const ConvergenceTable table = run_experiment(plan);

    std::cout << "plan " << plan.name << ": verdict " << table.verdict << ", rho "
              << fmt17(table.rho_used) << (table.covered ? "" : " [outside-theorem]") << '\n';
    for (const SizeRow& r : table.rows)
        std::cout << "  L " << fmt17(r.L) << ": free " << fmt17(r.beta_p_free) << " +- "
                  << fmt17(r.err_free) << ", coupled " << fmt17(r.beta_p_omega) << " +- "
                  << fmt17(r.err_omega) << ", gap " << fmt17(r.delta_p)
                  << (r.flags.empty() ? "" : " [" + r.flags + "]") << '\n';
    return table.verdict == "converging" && table.covered ? kOk : kFlagged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"box gas pressure experiments"};
    app.require_subcommand(1);
    app.fallthrough(true);

    Common common;
    app.add_option("--config", common.config_path, "key = value configuration file");
    auto* seed_opt = app.add_option("--seed", common.seed, "root seed (overrides plan.seed)");
    app.add_option("--out", common.out_dir, "output directory");
    app.add_option("--format", common.format, "output format (csv)");

    app.add_subcommand("audit", "sampled checks of the potential/envelope/growth declarations");
    app.add_subcommand("bounds", "bound report for one box and boundary configuration");
    app.add_subcommand("probe", "tail and margin probe series plus the exponent gate");
    app.add_subcommand("exact-pressure", "series pressure with the exact rod oracle");
    app.add_subcommand("gcmc", "one grand-canonical chain with trace output");
    auto* sweep = app.add_subcommand("sweep", "full convergence experiment");
    bool contrast = false;
    sweep->add_flag("--contrast", contrast, "run plans outside the exponent gate, stamped");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }
    common.seed_set = seed_opt->count() > 0;
    if (common.format != "csv") {
        std::cerr << "error: unsupported format '" << common.format << "'\n";
        return kInvalid;
    }

    try {
        if (app.got_subcommand("audit")) return cmd_audit(common);
        if (app.got_subcommand("bounds")) return cmd_bounds(common);
        if (app.got_subcommand("probe")) return cmd_probe(common);
        if (app.got_subcommand("exact-pressure")) return cmd_exact_pressure(common);
        if (app.got_subcommand("gcmc")) return cmd_gcmc(common);
        if (app.got_subcommand("sweep")) return cmd_sweep(common, contrast);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kInvalid;
}
