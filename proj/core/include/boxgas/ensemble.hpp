#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "boxgas/boundary.hpp"
#include "boxgas/common.hpp"
#include "boxgas/geometry.hpp"
#include "boxgas/potential.hpp"

namespace boxgas {

// Interaction radius beyond which the pair tail is ignored: the smallest r
// with V(r) <= 1e-4 * c * a^{-d} (and at least the hard structure max(a, b)).
// kInf for non-decaying tabulated tails; callers cap by the box diameter.
double interaction_cutoff(const PotentialSpec& pot, const EnvelopeSpec& env);

double pair_energy(const std::vector<Vec>& xs, const PotentialSpec& pot, int d);

// Pair sum plus the external field of every particle; +inf on core overlap.
double total_energy(const SimBox& box, const PotentialSpec& pot, const EnvelopeSpec& env,
                    const std::vector<Vec>& xs, const BoundaryConfiguration& omega);

struct ParticleState {
    std::vector<Vec> xs;
    std::vector<double> field;   // cached external field per particle
    double U = 0.0;              // running total energy
};

// Metropolis acceptance probabilities for the grand-canonical weight
// lambda^N e^{-beta U} (unordered-configuration density). Pure, so detailed
// balance is unit-checkable.
double acc_insert(double beta, double lambda, double volume, int n_before, double du);
double acc_delete(double beta, double lambda, double volume, int n_before, double du);
double acc_translate(double beta, double du);

struct GcmcParams {
    double beta = 1.0;
    double lambda = 0.5;
    int64_t n_moves = 100000;    // measurement moves
    int64_t n_burnin = 20000;
    int64_t thin = 20;           // record/sample stride
    double displacement = 0.0;   // 0 -> tune to ~40% acceptance in burn-in, then freeze
    int blocks = 16;
    uint64_t seed = 1;
    const std::vector<Vec>* initial = nullptr;   // warm start
};

struct GcmcResult {
    double mean_n = 0.0, se_n = 0.0;
    double var_n = 0.0, se_var_n = 0.0;
    double mean_u = 0.0, se_u = 0.0;
    double acc_insert = 0.0, acc_delete = 0.0, acc_translate = 0.0;
    double displacement = 0.0;   // frozen step actually used
    int64_t samples = 0;
    double r_cut = 0.0;          // pair cutoff after capping by the box diameter
    double tail_v = 0.0;         // V(r_cut): per-unit-density bound on the ignored tail
    double drift = 0.0;          // relative gap between running and recomputed U
    std::string flags;           // acceptance-rate warnings
    std::vector<Vec> final_state;
};

// One grand-canonical chain: insert/delete/translate chosen uniformly,
// acceptance per the functions above, external field from omega included in
// every energy difference. `trace` receives CSV rows (move_index, N, U) every
// `thin` measurement moves.
GcmcResult gcmc_run(const SimBox& box, const BoundaryConfiguration& omega,
                    const PotentialSpec& pot, const EnvelopeSpec& env, const GcmcParams& prm,
                    std::ostream* trace = nullptr);

// Free-boundary bulk density <N>/|Lambda|.
double bulk_density(const SimBox& box, const PotentialSpec& pot, const EnvelopeSpec& env,
                    const GcmcParams& prm);

struct XiSeries {
    double log_xi = 0.0;
    double xi = 1.0;
    double se = 0.0;             // statistical error (1 sigma) on the sum
    double tail = 0.0;           // rigorous bound on the dropped terms
    std::vector<double> terms;   // lambda^n |Lambda|^n mean(e^{-beta U}) / n!
    bool tail_ok = true;
    std::string flags;
};

// Truncated activity series: coefficient n estimated from mc_samples uniform
// n-tuples; remainder bounded by sum_{n > n_max} x^n / n! with
// x = lambda |Lambda| e^{beta B} e^{beta kappa_tilde (1 + g(L))} (zero field
// exponent when omega is empty).
XiSeries xi_truncated(const SimBox& box, const BoundaryConfiguration& omega,
                      const PotentialSpec& pot, const EnvelopeSpec& env, double beta,
                      double lambda, int n_max, int64_t mc_samples, uint64_t seed,
                      double tail_tol = 1e-9);

struct TonksReference {
    double xi = 1.0;
    double beta_p = 0.0;
    int n_terms = 0;
};

// Exact d=1 hard-rod grand partition function on a segment of the given
// length via the ordered-coordinates substitution.
TonksReference tonks_reference(double length, double a, double lambda);

struct CurvePoint {
    double lambda = 0.0;
    double mean_n = 0.0, se_n = 0.0;
    double acc_insert = 0.0, acc_delete = 0.0, acc_translate = 0.0;
    double displacement = 0.0;
    int64_t samples = 0;
    std::string flags;
};

struct PressureEstimate {
    double beta = 0.0, lambda = 0.0, volume = 0.0;
    double beta_p = 0.0;
    double err_stat = 0.0;     // statistical
    double err_quad = 0.0;     // trapezoid curvature (Richardson halved-grid gap / 3)
    double err_anchor = 0.0;   // small-activity closed-form remainder
    double err_tail = 0.0;     // series remainder bound (series method)
    double error = 0.0;        // sum of the above
    double anchor_lambda = 0.0, anchor_value = 0.0;
    std::string method;        // "series" | "gcmc-integration" | "tonks-oracle"
    std::string flags;
    std::vector<CurvePoint> curve;
};

struct IntegrationParams {
    int points = 17;           // odd, >= 9; trapezoid nodes in u = ln lambda
    double ratio = 256.0;      // lambda_min = lambda_target / ratio
    GcmcParams gcmc;           // per-point chain settings (seeds derived internally)
    int virial_samples = 4000; // MC size for the anchor's second-order estimate
};

// log Xi / |Lambda| via the particle-number identity: integrate <N> d(ln s)
// from the small-activity anchor lambda_min up to lambda_target by trapezoid
// on a geometric grid, chains warm-started upward.
PressureEstimate pressure_by_integration(
    const SimBox& box, const BoundaryConfiguration& omega, const PotentialSpec& pot,
    const EnvelopeSpec& env, double beta, double lambda_target, const IntegrationParams& ip,
    uint64_t seed, const std::function<std::ostream*(int, double)>& trace_for = nullptr);

// log Xi / |Lambda| from the truncated series (small boxes).
PressureEstimate pressure_by_series(const SimBox& box, const BoundaryConfiguration& omega,
                                    const PotentialSpec& pot, const EnvelopeSpec& env,
                                    double beta, double lambda, int n_max, int64_t mc_samples,
                                    uint64_t seed);

inline double pressure_finite(double log_xi, const SimBox& box) {
    require(std::isfinite(log_xi), "pressure_finite: log Xi must be finite");
    return log_xi / box.volume();
}

}  // namespace boxgas
