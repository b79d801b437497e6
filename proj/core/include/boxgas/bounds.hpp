#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "boxgas/boundary.hpp"
#include "boxgas/common.hpp"
#include "boxgas/geometry.hpp"
#include "boxgas/potential.hpp"

namespace boxgas {

// V(r) = S_d * integral_r^inf eta(s) s^{d-1} ds, closed form for power-law
// envelopes and segment-exact for tabulated ones. Throws if the tail is not
// integrable.
double big_v(const EnvelopeSpec& env, double r);

// W(r) = S_d * integral_r^inf eta(s) g(s) s^{d-1} ds. Closed form when both
// the envelope tail and the growth are power laws (requires q < p, else the
// integral diverges and this throws).
double big_w(const EnvelopeSpec& env, const GrowthFunction& g, double r);

// Worst sampled ratio delta^d * sup_cell(eta) / integral_cell(eta) over a
// deterministic pattern of n_cubes cells at radii spanning [0, 1e3*delta].
// The supremum uses the envelope's radial monotonicity; the cell integral is
// exact in d = 1 and tensor quadrature otherwise. Throws if some sampled cell
// has positive sup but zero integral (possible for compact-support tails).
double c_delta_estimate(const EnvelopeSpec& env, double delta, int n_cubes = 1000);

// c_delta * rho * d * (W(0) + V(0)): the constant dominating the attractive
// external field of any configuration in the (rho, g) class.
double kappa_tilde(double c_delta, double rho, const EnvelopeSpec& env, const GrowthFunction& g);

struct CheckReport {
    bool ok = true;
    int samples = 0;
    int violations = 0;
    double worst_margin = kInf;   // min over samples of (bound - measured)
    std::string witness;          // location of the worst sample
};

// Samples x in the box and verifies E^{v-}(x, omega) <= kappa * (1 + g(L)).
CheckReport attractive_field_check(const SimBox& box, const BoundaryConfiguration& omega,
                          const PotentialSpec& pot, const EnvelopeSpec& env, double kappa,
                          int n_samples, uint64_t seed);

// |lambda| * |Lambda| * e^{beta B} * e^{beta kappa (1 + g(L))}, an upper
// bound on log Xi.
double partition_upper_bound(double lambda, double beta, const SimBox& box, double kappa,
                    const GrowthFunction& g, double B);

// Shared sampling scan behind S and K. Each cell supremum of E^{v-} is the
// max over stratified samples plus the cell corners; the global argmax is
// refined locally and the refinement folds back into its cell's supremum, so
// S = sum of cell sups >= K = best sample holds structurally. Both are lower
// estimates of the true suprema.
struct FieldScan {
    double S = 0.0;
    double K = 0.0;
    Vec argmax{};
    std::vector<double> cell_sup;   // linear cell index, axis-0 fastest
    std::vector<Vec> cell_arg;
    int samples_per_cell = 0;
    int64_t cells = 0;
    double delta = 0.0;
};

FieldScan field_supremum_scan(const SimBox& box, const BoundaryConfiguration& omega,
                              const PotentialSpec& pot, const EnvelopeSpec& env, double delta,
                              int samples_per_cell, uint64_t seed);

// Sum over cells of the sampled per-cell supremum of E^{v-}; the decomposition
// is exact because the one-particle-per-cell supremum separates across cells.
// Requires delta < a / sqrt(d).
double s_lambda(const SimBox& box, const BoundaryConfiguration& omega, const PotentialSpec& pot,
                const EnvelopeSpec& env, double delta, int samples_per_cell, uint64_t seed);

// Supremum of E^{v-} over a regular grid with grid_resolution points per side,
// refined once around the argmax.
double k_lambda(const SimBox& box, const BoundaryConfiguration& omega, const PotentialSpec& pot,
                const EnvelopeSpec& env, int grid_resolution);

struct ProofQuantities {
    bool free_shortcut = false;   // S*K = 0: the free-boundary bound applies directly
    double E_Lambda = 0.0;        // (S K)^{1/3} |Lambda|^{2/3}
    double G_Lambda = 0.0;        // E * (c/16 * E/(S K) - 1)
    int p_index = 0;              // floor(E_minus / (2S)) + 2
};

ProofQuantities proof_quantities(double S, double K, double volume, double c, double E_minus);

// Verifies the core-pair lower bound v2(xs) >= (c/4) p (p-1) S/K for a
// configuration satisfying the premise E^{v-}(xs, omega) > p*S, and replays
// the extraction procedure (m = floor(S/K) removals per level from a cell
// holding at least `level` particles) as an executable certificate.
struct CoreExtractionResult {
    bool hypothesis_ok = false;
    bool inequality_ok = false;
    bool replay_ok = false;
    int p = 0;
    int m = 0;
    double E_minus = 0.0;
    double v2_total = 0.0;
    double rhs = 0.0;
    int64_t core_pairs_required = 0;
    int64_t core_pairs_found = 0;
    std::string detail;
};

CoreExtractionResult core_extraction_verify(const std::vector<Vec>& xs, const BoundaryConfiguration& omega,
                             const SimBox& box, const PotentialSpec& pot, const EnvelopeSpec& env,
                             double delta, double S, double K, double c, int p);

// Randomized campaign: builds premise-satisfying configurations by piling
// particles at per-cell field argmaxes and verifies each. For potentials with
// no attractive part the premise is unsatisfiable and the campaign degrades
// to checking the trivial bound v2 >= 0 on random configurations.
struct CoreExtractionCampaign {
    int instances = 0;
    int violations = 0;
    bool trivial = false;   // no attractive part: only v2 >= 0 checked
    std::vector<std::string> failures;
};

CoreExtractionCampaign core_extraction_campaign(const SimBox& box, const BoundaryConfiguration& omega,
                                 const PotentialSpec& pot, const EnvelopeSpec& env, double delta,
                                 int n_instances, int samples_per_cell, uint64_t seed);

// kbar * (W(d_x) + (1 + g(L)) V(d_x)) with kbar = c_delta * rho * d; valid
// for boundary distance d_x >= b (throws otherwise).
double distance_field_bound(const Vec& x, const SimBox& box, double rho, const GrowthFunction& g,
                     const EnvelopeSpec& env, double c_delta);

// Samples x with d_x >= b and verifies measured E^{v+}(x, omega) <= bound.
CheckReport distance_field_check(const SimBox& box, const BoundaryConfiguration& omega,
                          const PotentialSpec& pot, const EnvelopeSpec& env, double c_delta,
                          int n_samples, uint64_t seed);

enum class Verdict { TendingToZero, Inconclusive, Diverging };

const char* to_string(Verdict v);

// Least-squares slope of log(value) vs log(abscissa) over the last half of
// the points: slope <= -0.05 tending-to-zero, >= +0.05 diverging, else
// inconclusive. An all-zero tail window counts as tending-to-zero.
Verdict classify_series(const std::vector<double>& abscissae, const std::vector<double>& values,
                        double* slope_out = nullptr);

struct ProbeSeries {
    std::string name;
    std::vector<double> abscissae;
    std::vector<double> values;
    Verdict verdict = Verdict::Inconclusive;
    double slope = 0.0;
};

struct TailGrowthProbes {
    ProbeSeries first;    // g(R) * (int_0^R W) / R
    ProbeSeries second;   // (1 + g(R))^2 * (int_0^R V) / R
};

// Both vanishing-boundary-coupling probes on an increasing R series (>= 4
// points spanning >= 2 decades). With zero growth the second series reduces
// to (int_0^R V)/R, the bounded-density case.
TailGrowthProbes probe_tail_growth(const GrowthFunction& g, const EnvelopeSpec& env,
                                    const std::vector<double>& R_values);

// (1 + g(L)) * V(h(L)) on an increasing L series; h defaults to L^{2/3} at
// call sites.
ProbeSeries probe_margin_growth(const GrowthFunction& g, const EnvelopeSpec& env,
                              const std::function<double(double)>& h,
                              const std::vector<double>& L_values);

// Power-law admissibility gate: pass iff q < min(1, p)/2 strictly.
bool growth_exponent_gate(double p, double q);

// One point of the surface-to-volume trend: measured S*K/|Lambda| against the
// dominating analytic series
//   kappa_delta * [(1+g(L)) (int_0^L W)/L + (1+g(L))^2 (int_0^L V)/L],
// kappa_delta = 2 d^2 rho K_delta kappa_tilde, K_delta = C_delta^2/delta^d.
struct TrendPoint {
    double L = 0.0;
    double measured = 0.0;
    double analytic = 0.0;
    double S = 0.0;
    double K = 0.0;
    size_t omega_points = 0;
};

struct TrendSeries {
    std::vector<TrendPoint> points;
    Verdict verdict = Verdict::Inconclusive;
    double slope = 0.0;
    double kappa_delta = 0.0;
};

TrendSeries trend_sk(const std::vector<double>& L_values, BoundaryMode mode, double rho,
                     const GrowthFunction& g, double delta, double extent_margin,
                     const PotentialSpec& pot, const EnvelopeSpec& env, int samples_per_cell,
                     uint64_t seed);

// The constant and the L-dependent factor of the analytic trend, separately,
// so callers that already hold measured S and K can place single points on
// the dominating curve.
double trend_kappa_delta(double rho, const GrowthFunction& g, double delta,
                         const EnvelopeSpec& env);
double trend_analytic(double kappa_delta, double L, const GrowthFunction& g,
                      const EnvelopeSpec& env);

// Smallest radius at which V drops to the threshold (exact for power tails,
// bisection otherwise). Used to pick boundary extents L + tail_radius(...).
double tail_radius(const EnvelopeSpec& env, double threshold);

// Everything the proofs consume for one (box, omega) instance, with verdicts.
struct BoundsReport {
    double V0 = 0.0;
    double W0 = 0.0;
    double C_delta = 1.0;
    double kappa = 0.0;   // kappa_tilde
    double S = 0.0;
    double K = 0.0;
    double E_Lambda = 0.0;
    double G_Lambda = 0.0;
    int p_index = 0;
    bool free_shortcut = false;
    bool s_dominates_k = false;        // S >= K
    bool k_within_kappa = false;        // K <= kappa (1 + g(L))
    bool field_bound_ok = false;
    bool extraction_ok = false;
    bool distance_bound_ok = false;
    double field_margin = kInf;
    double distance_margin = kInf;
    int extraction_instances = 0;
    bool extraction_trivial = false;
    double scan_delta = 0.0;
    int scan_samples_per_cell = 0;
    int64_t scan_cells = 0;
    int check_samples = 0;
    bool pass() const { return s_dominates_k && k_within_kappa && field_bound_ok && extraction_ok && distance_bound_ok; }
};

BoundsReport bounds_report(const SimBox& box, const BoundaryConfiguration& omega,
                           const PotentialSpec& pot, const EnvelopeSpec& env, double scan_delta,
                           int samples_per_cell, int n_check_samples, int extraction_instances,
                           uint64_t seed);

}  // namespace boxgas
