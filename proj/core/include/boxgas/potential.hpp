#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "boxgas/common.hpp"
#include "boxgas/table.hpp"

namespace boxgas {

enum class PotentialKind { SoftRod, HardRod, CoreTail, Tabulated };

const char* to_string(PotentialKind k);

// Translation-invariant pair potential v(r) together with the declared
// superstable decomposition v = v1 + v2. The positive part v2 is taken as
// c * 1{r <= a} for every kind, so the remainder v1 keeps any core excess and
// the whole (possibly attractive) tail; the stability constant B of v1 is a
// user declaration that the audit can falsify by sampling but never prove.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::SoftRod;
    int d = 1;
    double a = 1.0;   // core radius
    double c = 1.0;   // guaranteed floor of v2 on [0, a]
    double K = 0.0;   // plateau height (soft rod, core+tail)
    double C = 0.0;   // tail amplitude: v(r) = -C r^{-(d+p)} for r > b
    double b = 1.0;   // radius past which the envelope controls |v|
    double p = 1.0;   // tail decay exponent
    double B = 0.0;   // declared stability constant of v1
    TableFn table;    // kind == Tabulated

    static PotentialSpec soft_rod(int d, double K, double a, double c);
    static PotentialSpec hard_rod(int d, double a);
    static PotentialSpec core_tail(int d, double K, double a, double c, double C, double b,
                                   double p, double B);
    static PotentialSpec tabulated(int d, TableFn t, double a, double c, double b, double B);

    void validate() const;

    // Pair energy at separation r >= 0 (+inf encodes a hard core; exp(-beta*inf)
    // is exactly zero). Throws std::domain_error for r < 0.
    double evaluate(double r) const;
    double evaluate_r2(double r2) const;   // same, from squared separation

    double v_plus(double r) const;
    double v_minus(double r) const;
    double v2(double r) const;   // c * 1{r <= a}
    double v1(double r) const;   // v - v2

    // Radius beyond which v vanishes identically (kInf when the tail never
    // ends, as for core+tail).
    double range() const;
};

// (v_plus, v_minus) with v = v_plus - v_minus exactly.
std::pair<double, double> split_signs(const PotentialSpec& pot, double r);

// Monotone non-increasing envelope: eta(r) = two_b on [0, b] and a decaying
// tail beyond, dominating |v| past b.
enum class EnvelopeLaw { Power, Tabulated };

struct EnvelopeSpec {
    int d = 1;
    double two_b = 0.0;   // plateau value on [0, b]
    double b = 1.0;
    EnvelopeLaw law = EnvelopeLaw::Power;
    double C = 0.0;   // tail: C r^{-(d+p)} for r > b
    double p = 1.0;
    TableFn table;    // tabulated tail for r > b (compact support)

    static EnvelopeSpec power(int d, double two_b, double b, double C, double p);
    static EnvelopeSpec tabulated(int d, double two_b, double b, TableFn t);
    // Canonical envelope of a potential: plateau 2B, same knee and tail law.
    static EnvelopeSpec for_potential(const PotentialSpec& pot);

    void validate() const;

    double eta(double r) const;   // throws for r < 0

    // integral_r^inf eta(s) s^{d-1} ds (closed form for the power law).
    double tail_moment(double r) const;
    double tail_integral() const { return tail_moment(0.0); }

    bool compact_support() const { return law == EnvelopeLaw::Tabulated && !table.hold_right; }
    double support_end() const;   // kInf for power law
};

// Sampled audit of the standing assumptions on (v, eta):
//   s1  stability of v1 at the declared B (falsifiable only),
//   s2  v2 >= c on [0, a],
//   s3  |v| <= eta strictly beyond b,
//   s4  v_minus <= two_b everywhere,
//   s5  finiteness of integral eta r^{d-1} dr.
struct AuditIssue {
    std::string check;
    std::string detail;
};

struct AuditReport {
    bool s1_stability = true;
    bool s2_core_floor = true;
    bool s3_tail_dominated = true;
    bool s4_minus_bounded = true;
    bool s5_integrable = true;
    std::vector<AuditIssue> issues;
    int configs_sampled = 0;
    int radii_sampled = 0;
    bool pass() const {
        return s1_stability && s2_core_floor && s3_tail_dominated && s4_minus_bounded &&
               s5_integrable;
    }
};

AuditReport audit_assumptions(const PotentialSpec& pot, const EnvelopeSpec& env, int n_trials,
                              uint64_t seed);

}  // namespace boxgas
