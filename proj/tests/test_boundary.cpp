#include <cmath>
#include <cstdio>
#include <vector>

#include <doctest.h>

#include "boxgas/boundary.hpp"
#include "boxgas/geometry.hpp"
#include "boxgas/potential.hpp"

using namespace boxgas;

namespace {

TableFn make_table(std::vector<double> r, std::vector<double> v, bool hold = false) {
    TableFn t;
    t.r = std::move(r);
    t.v = std::move(v);
    t.hold_right = hold;
    return t;
}

}  // namespace

TEST_CASE("growth functions evaluate and validate") {
    CHECK(GrowthFunction::zero()(5.0) == 0.0);
    CHECK(GrowthFunction::power(0.5)(4.0) == doctest::Approx(2.0));
    const GrowthFunction tab =
        GrowthFunction::tabulated(make_table({0.0, 2.0}, {0.0, 3.0}, true));
    CHECK(tab(0.0) == 0.0);
    CHECK(tab(1.0) == doctest::Approx(1.5));
    CHECK(tab(5.0) == 3.0);
    CHECK_THROWS(GrowthFunction::power(0.0));
    CHECK_THROWS(GrowthFunction::power(-1.0));
    CHECK_THROWS(GrowthFunction::tabulated(make_table({0.0, 1.0}, {2.0, 1.0}, true)));
    CHECK_THROWS(GrowthFunction::tabulated(make_table({0.0, 1.0}, {0.0, 1.0}, false)));
    CHECK_THROWS(GrowthFunction::zero()(-0.1));
}

TEST_CASE("admissibility audit separates slow from fast growth") {
    const EnvelopeSpec env = EnvelopeSpec::power(1, 4.0, 1.0, 1.0, 1.0);

    const GrowthAudit slow = audit_admissible(GrowthFunction::power(0.25), env, 400, 5);
    CHECK(slow.admissible());
    CHECK(slow.unbounded);
    CHECK(slow.issues.empty());

    // superlinear growth breaks subadditivity; witnesses must be recorded
    const GrowthAudit super = audit_admissible(GrowthFunction::power(1.5), env, 400, 5);
    CHECK_FALSE(super.subadditive);
    CHECK_FALSE(super.integrable);   // q = 1.5 >= tail exponent p = 1
    CHECK_FALSE(super.issues.empty());

    // linear growth is subadditive but the weighted tail diverges at p = 1
    const GrowthAudit lin = audit_admissible(GrowthFunction::power(1.0), env, 400, 5);
    CHECK(lin.subadditive);
    CHECK(lin.monotone);
    CHECK_FALSE(lin.integrable);

    CHECK(audit_admissible(GrowthFunction::zero(), env, 10, 5).admissible());
}

TEST_CASE("bounded tabulated growth inherits integrability from the envelope") {
    const GrowthFunction tab =
        GrowthFunction::tabulated(make_table({0.0, 1.0}, {0.0, 1.0}, true));
    const EnvelopeSpec compact = EnvelopeSpec::power(1, 1.0, 2.0, 0.0, 1.0);
    CHECK(audit_admissible(tab, compact, 50, 5).admissible());

    const EnvelopeSpec held =
        EnvelopeSpec::tabulated(1, 1.0, 1.0, make_table({1.0, 2.0}, {1.0, 0.5}, true));
    CHECK_FALSE(audit_admissible(tab, held, 50, 5).integrable);
}

TEST_CASE("saturated generation fills every cell to its cap") {
    const BoundaryConfiguration omega = generate_boundary(
        BoundaryMode::Saturated, 1, 2.0, GrowthFunction::zero(), 0.5, 3.0, 77);
    CHECK(omega.extent == doctest::Approx(3.0));
    CHECK(omega.size() == 12);   // 12 cells, cap = floor(0.5 * 2) = 1 each
    const MembershipReport rep =
        class_membership(omega, 2.0, GrowthFunction::zero(), 0.5);
    CHECK(rep.ok);
    CHECK(rep.max_ratio == doctest::Approx(1.0));
    CHECK(rep.cells_checked == 12);
}

TEST_CASE("growth raises the permitted count with distance") {
    const BoundaryConfiguration omega = generate_boundary(
        BoundaryMode::Saturated, 1, 1.0, GrowthFunction::power(1.0), 1.0, 4.0, 3);
    // caps per cell at r_inf = 3,2,1,0,0,1,2,3 -> 4+3+2+1+1+2+3+4
    CHECK(omega.size() == 20);
    CHECK(class_membership(omega, 1.0, GrowthFunction::power(1.0), 1.0).ok);
}

TEST_CASE("a cap below one particle produces an empty boundary") {
    const BoundaryConfiguration omega = generate_boundary(
        BoundaryMode::Saturated, 1, 0.5, GrowthFunction::zero(), 1.0, 10.0, 3);
    CHECK(omega.size() == 0);
}

TEST_CASE("poisson generation is capped and reproducible") {
    const BoundaryConfiguration a = generate_boundary(
        BoundaryMode::Poisson, 1, 3.0, GrowthFunction::zero(), 1.0, 50.0, 11);
    CHECK(a.size() > 0);
    CHECK(a.size() < 300);   // strictly fewer than cap * cells with high probability
    CHECK(class_membership(a, 3.0, GrowthFunction::zero(), 1.0).ok);

    const BoundaryConfiguration b = generate_boundary(
        BoundaryMode::Poisson, 1, 3.0, GrowthFunction::zero(), 1.0, 50.0, 11);
    REQUIRE(b.size() == a.size());
    bool same = true;
    for (size_t i = 0; i < a.size(); ++i) same = same && a.pts[i] == b.pts[i];
    CHECK(same);

    const BoundaryConfiguration c = generate_boundary(
        BoundaryMode::Poisson, 1, 3.0, GrowthFunction::zero(), 1.0, 50.0, 12);
    CHECK((c.size() != a.size() || !(c.pts == a.pts)));
}

TEST_CASE("local density counts the home cell") {
    BoundaryConfiguration omega;
    omega.d = 1;
    omega.pts = {Vec{0.25, 0.0, 0.0}, Vec{0.3, 0.0, 0.0}, Vec{0.75, 0.0, 0.0}};
    CHECK(local_density(omega, 0.5, Vec{0.1, 0.0, 0.0}) == doctest::Approx(4.0));
    CHECK(local_density(omega, 0.5, Vec{0.6, 0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(local_density(omega, 0.5, Vec{-0.1, 0.0, 0.0}) == 0.0);
}

TEST_CASE("regridding reports the density needed on the coarser grid") {
    const BoundaryConfiguration omega = generate_boundary(
        BoundaryMode::Saturated, 1, 2.0, GrowthFunction::zero(), 0.5, 3.0, 77);
    CHECK(redelta_bound(omega, GrowthFunction::zero(), 0.5, 1.0) == doctest::Approx(2.0));

    BoundaryConfiguration lying = omega;
    lying.rho = 1.0;   // claims a class the points do not satisfy
    CHECK_THROWS(redelta_bound(lying, GrowthFunction::zero(), 0.5, 1.0));
}

TEST_CASE("boundary files round trip") {
    const BoundaryConfiguration omega = generate_boundary(
        BoundaryMode::Saturated, 1, 1.0, GrowthFunction::power(0.25), 1.0, 4.0, 9);
    REQUIRE(omega.size() > 0);
    const std::string path = "omega_roundtrip_test.txt";
    omega.save(path);
    const BoundaryConfiguration back = BoundaryConfiguration::load(path);
    std::remove(path.c_str());
    CHECK(back.d == omega.d);
    CHECK(back.delta == omega.delta);
    CHECK(back.rho == omega.rho);
    CHECK(back.growth.kind == GrowthKind::Power);
    CHECK(back.growth.q == omega.growth.q);
    CHECK(back.mode == omega.mode);
    CHECK(back.seed == omega.seed);
    CHECK(back.extent == doctest::Approx(omega.extent));
    REQUIRE(back.size() == omega.size());
    bool same = true;
    for (size_t i = 0; i < omega.size(); ++i) same = same && back.pts[i] == omega.pts[i];
    CHECK(same);

    BoundaryConfiguration tab = omega;
    tab.growth = GrowthFunction::tabulated(make_table({0.0, 1.0}, {0.0, 1.0}, true));
    CHECK_THROWS(tab.save("omega_should_not_exist.txt"));
}

TEST_CASE("only points strictly outside the box act on it") {
    const SimBox box(1, 1.0, 0.5);
    BoundaryConfiguration omega;
    omega.d = 1;
    omega.pts = {Vec{0.5, 0.0, 0.0}, Vec{1.5, 0.0, 0.0}, Vec{-2.0, 0.0, 0.0}};
    const OmegaView view(box, omega);
    CHECK(view.size() == 2);

    const PotentialSpec pot = PotentialSpec::core_tail(1, 10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5);
    const EnvelopeSpec env = EnvelopeSpec::for_potential(pot);

    // from the center: both outside points are in the tail
    const Vec center{0.0, 0.0, 0.0};
    const double expect_v = -1.0 / (1.5 * 1.5) - 1.0 / (2.0 * 2.0);
    CHECK(external_field(box, omega, pot, env, FieldKernel::V, center) ==
          doctest::Approx(expect_v).epsilon(1e-14));
    CHECK(external_field(box, omega, pot, env, FieldKernel::VMinus, center) ==
          doctest::Approx(-expect_v).epsilon(1e-14));
    CHECK(external_field(box, omega, pot, env, FieldKernel::VPlus, center) == 0.0);
    CHECK(external_field(box, omega, pot, env, FieldKernel::Eta, center) ==
          doctest::Approx(-expect_v).epsilon(1e-14));

    // near the wall: one point is inside the repulsive core
    const Vec edge{0.9, 0.0, 0.0};
    CHECK(external_field(box, omega, pot, env, FieldKernel::VPlus, edge) ==
          doctest::Approx(2.0));
    CHECK(external_field(box, omega, pot, env, FieldKernel::VMinus, edge) ==
          doctest::Approx(1.0 / (2.9 * 2.9)).epsilon(1e-14));
    CHECK(external_field(box, omega, pot, env, FieldKernel::V, edge) ==
          doctest::Approx(2.0 - 1.0 / (2.9 * 2.9)).epsilon(1e-14));
    CHECK(external_field(box, omega, pot, env, FieldKernel::Eta, edge) ==
          doctest::Approx(4.0 + 1.0 / (2.9 * 2.9)).epsilon(1e-14));

    CHECK_THROWS(external_field(box, omega, pot, env, FieldKernel::V, Vec{1.5, 0.0, 0.0}));

    const double both = config_field(box, omega, pot, env, FieldKernel::V, {center, edge});
    CHECK(both == doctest::Approx(expect_v + 2.0 - 1.0 / (2.9 * 2.9)).epsilon(1e-14));
}
