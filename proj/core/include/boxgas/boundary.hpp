#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boxgas/common.hpp"
#include "boxgas/geometry.hpp"
#include "boxgas/potential.hpp"
#include "boxgas/table.hpp"

namespace boxgas {

// Non-decreasing modulation of how fast external density may grow with
// distance from the origin. Power means g(r) = r^q; exponents q >= 1 are
// representable so that the admissibility audit can exhibit subadditivity
// witnesses against them.
enum class GrowthKind { Zero, Power, Tabulated };

const char* to_string(GrowthKind k);

struct GrowthFunction {
    GrowthKind kind = GrowthKind::Zero;
    double q = 0.0;
    TableFn table;   // non-decreasing, holds its last value to the right

    static GrowthFunction zero();
    static GrowthFunction power(double q);
    static GrowthFunction tabulated(TableFn t);

    void validate() const;
    double operator()(double r) const;
    bool is_zero() const { return kind == GrowthKind::Zero; }
};

struct GrowthAudit {
    bool subadditive = true;     // g(a+b) <= g(a) + g(b) on sampled pairs
    bool monotone = true;        // non-decreasing on sampled pairs
    bool integrable = true;      // integral eta * g * s^{d-1} ds finite
    bool unbounded = false;      // g(r) -> inf (growth actually present)
    std::vector<AuditIssue> issues;
    int pairs_sampled = 0;
    bool admissible() const { return subadditive && monotone && integrable; }
};

// Samples subadditivity/monotonicity and decides integrability of eta*g
// against the envelope (analytic for power/power: requires q < p).
GrowthAudit audit_admissible(const GrowthFunction& g, const EnvelopeSpec& env, int n_pairs,
                             uint64_t seed);

enum class BoundaryMode { Empty, Poisson, Saturated };

const char* to_string(BoundaryMode m);
BoundaryMode boundary_mode_from(const std::string& name);

// A finite multiset of fixed external particles, generated on the delta-grid
// so that every cell count respects rho * (1 + g(r)) * delta^d with r the
// infimum of ||.|| over the cell. Only points strictly outside a simulation
// box exert any influence; points inside are ignored by field sums.
struct BoundaryConfiguration {
    int d = 1;
    double delta = 1.0;
    double rho = 0.0;
    GrowthFunction growth;
    BoundaryMode mode = BoundaryMode::Empty;
    uint64_t seed = 0;
    double extent = 0.0;   // all points lie in [-extent, extent]^d
    std::vector<Vec> pts;

    size_t size() const { return pts.size(); }

    // Text round-trip: header "d delta rho q mode seed", then one point per
    // line. Tabulated growth has no place in this header and is rejected.
    void save(const std::string& path) const;
    static BoundaryConfiguration load(const std::string& path);
};

BoundaryConfiguration generate_boundary(BoundaryMode mode, int d, double rho,
                                        const GrowthFunction& g, double delta, double R_omega,
                                        uint64_t seed);

// Cell count around x divided by the cell volume.
double local_density(const BoundaryConfiguration& omega, double delta, const Vec& x);

struct MembershipReport {
    bool ok = true;
    double max_ratio = 0.0;   // worst cell's density over its class bound
    CubeIndex worst_cell{};
    double worst_radius = 0.0;
    int64_t worst_count = 0;
    int64_t cells_checked = 0;
};

// Does every nonempty delta-cell satisfy count/delta^d <= rho(1 + g(r_inf))?
MembershipReport class_membership(const BoundaryConfiguration& omega, double rho,
                                  const GrowthFunction& g, double delta);

// Smallest density at which omega belongs to the (rho~, g) class on the
// delta2 grid. Requires omega to belong to its declared class at delta1.
double redelta_bound(const BoundaryConfiguration& omega, const GrowthFunction& g, double delta1,
                     double delta2);

enum class FieldKernel { V, VPlus, VMinus, Eta };

// Points of omega strictly outside a box, flattened for fast kernel sums.
class OmegaView {
public:
    OmegaView(const SimBox& box, const BoundaryConfiguration& omega);

    int dim() const { return d_; }
    size_t size() const { return n_; }

    // Sum of the kernel over all viewed points; x is not range-checked here.
    double field(const PotentialSpec& pot, const EnvelopeSpec& env, FieldKernel k,
                 const Vec& x) const;

private:
    int d_;
    size_t n_ = 0;
    std::vector<double> coord_;   // point-major, stride d_
};

// Kernel sum over the omega points strictly outside the box. Throws if x is
// outside the box.
double external_field(const SimBox& box, const BoundaryConfiguration& omega,
                      const PotentialSpec& pot, const EnvelopeSpec& env, FieldKernel kernel,
                      const Vec& x);

// Additive extension to a whole configuration (multiset).
double config_field(const SimBox& box, const BoundaryConfiguration& omega,
                    const PotentialSpec& pot, const EnvelopeSpec& env, FieldKernel kernel,
                    const std::vector<Vec>& xs);

}  // namespace boxgas
