#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "boxgas/boundary.hpp"
#include "boxgas/bounds.hpp"
#include "boxgas/config.hpp"
#include "boxgas/ensemble.hpp"
#include "boxgas/potential.hpp"

namespace boxgas {

// Margin beyond the box walls out to which external points are generated:
// past it the envelope tail V drops below 1e-3 of the core energy scale
// c a^{-d} (or the margin covers the whole finite range of v, when it has
// one). The neglected far field is bounded by V(margin) per unit external
// density; that bound is written into run metadata.
double omega_extent_margin(const PotentialSpec& pot, const EnvelopeSpec& env);

// Shared declaration parsers for config files (keys potential.*, envelope.*,
// growth.*). Unknown enum values throw.
PotentialSpec potential_from_config(const Config& cfg);
EnvelopeSpec envelope_from_config(const Config& cfg, const PotentialSpec& pot);
GrowthFunction growth_from_config(const Config& cfg);

struct ExperimentPlan {
    std::string name = "plan";
    std::string out_dir = "out";
    PotentialSpec pot = PotentialSpec::core_tail(1, 10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5);
    EnvelopeSpec env = EnvelopeSpec::for_potential(pot);
    GrowthFunction growth = GrowthFunction::zero();
    BoundaryMode mode = BoundaryMode::Saturated;
    double rho = 0.0;   // <= 0: five times the measured free-boundary bulk density
    double delta = 0.8;
    double beta = 1.0;
    double lambda = 0.5;
    std::vector<double> L_values{8.0, 16.0, 32.0, 64.0};
    int scan_samples = 6;
    int check_samples = 1000;
    int extraction_instances = 24;
    IntegrationParams integration;
    int series_n_max = 24;
    int64_t series_samples = 200000;
    uint64_t seed = 1;
    bool contrast = false;

    static ExperimentPlan from_config(const Config& cfg);
    void validate() const;
};

// Up-front refusal checks: sampled assumption audits on (v, eta), growth
// admissibility, and the power-law exponent gate. A plan failing the gate
// runs only with contrast set, and every output row is stamped
// outside-theorem.
struct GateReport {
    bool audits_ok = true;
    bool growth_ok = true;
    bool exponent_gate_ok = true;
    bool covered = true;
    std::string failing;
    double p = 0.0;
    double q = 0.0;
};

GateReport check_gates(const ExperimentPlan& plan);

struct SizeRow {
    double L = 0.0;
    double beta_p_free = 0.0, err_free = 0.0;
    double beta_p_omega = 0.0, err_omega = 0.0;
    double delta_p = 0.0, err_combined = 0.0;
    size_t omega_points = 0;
    std::string flags;
};

struct ConvergenceTable {
    std::vector<SizeRow> rows;
    std::string verdict;   // converging | not-converging | inconclusive
    double rho_used = 0.0;
    bool covered = true;
    std::string flags;
};

// Free-boundary pressure runs keyed by every parameter that affects them, so
// plans sharing (beta, lambda, L, chain settings, seed) reuse the runs and
// their traces instead of recomputing.
struct FreePressureEntry {
    PressureEstimate est;
    std::vector<std::string> traces;   // rendered per-grid-point stream docs
};
using FreePressureCache = std::map<std::string, FreePressureEntry>;

// Runs the full convergence experiment: per box size, regenerate the boundary
// configuration, compute free and boundary-coupled pressures, emit the bound
// reports and probe series, and write the artifact tree
//   <out>/<name>/L<value>/{bounds.csv, probes.csv, gcmc_*.csv, pressure.csv}
// with table.csv at <out>/<name>/. Throws std::domain_error on validation or
// gate refusal.
ConvergenceTable run_experiment(const ExperimentPlan& plan, FreePressureCache* cache = nullptr);

// Fixed constants of the convergence verdict, quoted in output metadata.
inline constexpr double kVerdictErrFactor = 2.0;
inline constexpr double kVerdictRelative = 0.02;

std::string verdict_of(const std::vector<SizeRow>& rows);

// CSV assembly. Every document starts with a "# generated <utc>" line, then
// sorted "# key = value" metadata, a column header, and rows; numbers carry
// 17 significant digits.
struct CsvDoc {
    std::map<std::string, std::string> meta;
    std::string header;
    std::vector<std::string> rows;
    std::string str(bool with_timestamp = true) const;
};

CsvDoc bounds_csv(const BoundsReport& rep);
void append_probe_rows(CsvDoc& doc, const ProbeSeries& series);
CsvDoc estimates_csv();   // header only; rows appended by the caller
std::string estimate_row(const PressureEstimate& est, double L, const std::string& omega_id);

std::string timestamp_line();
void ensure_dir(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace boxgas
