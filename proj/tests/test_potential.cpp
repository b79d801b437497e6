#include <cmath>
#include <vector>

#include <doctest.h>

#include "boxgas/potential.hpp"
#include "boxgas/quadrature.hpp"

using namespace boxgas;

namespace {

TableFn make_table(std::vector<double> r, std::vector<double> v, bool hold = false) {
    TableFn t;
    t.r = std::move(r);
    t.v = std::move(v);
    t.hold_right = hold;
    return t;
}

PotentialSpec default_pot() {
    return PotentialSpec::core_tail(1, 10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5);
}

}  // namespace

TEST_CASE("soft rod evaluates to a plateau on the core") {
    const PotentialSpec pot = PotentialSpec::soft_rod(1, 2.0, 1.0, 1.0);
    CHECK(pot.evaluate(0.0) == 2.0);
    CHECK(pot.evaluate(1.0) == 2.0);   // core boundary included
    CHECK(pot.evaluate(1.0 + 1e-12) == 0.0);
    CHECK(pot.evaluate(5.0) == 0.0);
    CHECK(pot.range() == 1.0);
    CHECK(pot.v2(0.7) == 1.0);
    CHECK(pot.v2(1.0) == 1.0);
    CHECK(pot.v2(1.1) == 0.0);
    CHECK(pot.v1(0.5) == 1.0);
    CHECK_THROWS(pot.evaluate(-0.1));
    CHECK_THROWS(PotentialSpec::soft_rod(1, 0.5, 1.0, 1.0));   // K < c
    CHECK_THROWS(PotentialSpec::soft_rod(1, 2.0, 0.0, 1.0));   // a = 0
    CHECK_THROWS(PotentialSpec::soft_rod(0, 2.0, 1.0, 1.0));   // bad d
}

TEST_CASE("hard rod core is infinite and sets the unit split") {
    const PotentialSpec pot = PotentialSpec::hard_rod(1, 1.0);
    CHECK(pot.evaluate(0.5) == kInf);
    CHECK(pot.evaluate(1.0) == kInf);
    CHECK(pot.evaluate(1.5) == 0.0);
    CHECK(pot.evaluate_r2(0.25) == kInf);
    CHECK(pot.evaluate_r2(1.0) == kInf);
    CHECK(pot.evaluate_r2(2.25) == 0.0);
    CHECK(pot.c == 1.0);
    CHECK(pot.b == 1.0);
    CHECK(pot.v1(0.5) == kInf);
}

TEST_CASE("core plus tail matches its piecewise definition") {
    const PotentialSpec pot = PotentialSpec::core_tail(1, 2.0, 1.0, 1.0, 1.0, 2.0, 1.0, 2.0);
    CHECK(pot.evaluate(0.5) == 2.0);
    CHECK(pot.evaluate(1.0) == 2.0);
    CHECK(pot.evaluate(1.5) == 0.0);   // dead zone between core and knee
    CHECK(pot.evaluate(2.0) == 0.0);
    CHECK(pot.evaluate(4.0) == doctest::Approx(-1.0 / 16.0).epsilon(1e-15));
    CHECK(pot.range() == kInf);
    CHECK(pot.v_minus(4.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(pot.v_plus(4.0) == 0.0);
    CHECK_THROWS(PotentialSpec::core_tail(1, 2.0, 1.0, 1.0, -1.0, 2.0, 1.0, 2.0));
    CHECK_THROWS(PotentialSpec::core_tail(1, 2.0, 1.0, 1.0, 1.0, 0.5, 1.0, 2.0));   // b < a
    CHECK_THROWS(PotentialSpec::core_tail(1, 2.0, 1.0, 1.0, 1.0, 2.0, 0.0, 2.0));   // p = 0
    CHECK_THROWS(PotentialSpec::core_tail(1, 2.0, 1.0, 1.0, 1.0, 2.0, 1.0, -1.0));  // B < 0
}

TEST_CASE("tabulated potential interpolates and holds ends as declared") {
    const PotentialSpec pot = PotentialSpec::tabulated(
        1, make_table({1.0, 2.0, 3.0}, {5.0, -1.0, 0.0}), 1.0, 1.0, 1.0, 3.0);
    CHECK(pot.evaluate(0.5) == 5.0);   // left of the first node
    CHECK(pot.evaluate(1.5) == doctest::Approx(2.0));
    CHECK(pot.evaluate(2.5) == doctest::Approx(-0.5));
    CHECK(pot.evaluate(3.0) == 0.0);
    CHECK(pot.evaluate(4.0) == 0.0);   // compact support
    CHECK(pot.range() == 3.0);

    const PotentialSpec held = PotentialSpec::tabulated(
        1, make_table({1.0, 2.0}, {3.0, 1.0}, true), 1.0, 1.0, 1.0, 3.0);
    CHECK(held.evaluate(10.0) == 1.0);
    CHECK(held.range() == kInf);

    CHECK_THROWS(PotentialSpec::tabulated(1, make_table({2.0, 1.0}, {0.0, 0.0}), 1.0, 1.0, 1.0,
                                          0.0));   // radii not ascending
    CHECK_THROWS(PotentialSpec::tabulated(1, make_table({1.0}, {0.0, 0.0}), 1.0, 1.0, 1.0, 0.0));
}

TEST_CASE("squared-separation evaluation agrees with the radial one") {
    const std::vector<PotentialSpec> pots = {
        PotentialSpec::soft_rod(2, 2.0, 1.0, 1.0),
        PotentialSpec::hard_rod(1, 0.7),
        default_pot(),
        PotentialSpec::core_tail(3, 2.0, 1.0, 1.0, 0.5, 2.0, 1.5, 2.0),
        PotentialSpec::tabulated(1, make_table({1.0, 2.0, 4.0}, {4.0, -0.5, 0.0}), 1.0, 1.0, 1.0,
                                 2.0),
    };
    for (const auto& pot : pots) {
        for (int i = 0; i <= 400; ++i) {
            const double r = 5.0 * i / 400.0;
            const double a = pot.evaluate(r);
            const double b = pot.evaluate_r2(r * r);
            if (a == kInf)
                CHECK(b == kInf);
            else
                CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("sign split reassembles the potential") {
    const PotentialSpec pot = default_pot();
    for (double r : {0.1, 0.999, 1.0, 1.001, 2.0, 7.5}) {
        const auto [plus, minus] = split_signs(pot, r);
        CHECK(plus >= 0.0);
        CHECK(minus >= 0.0);
        CHECK(plus - minus == doctest::Approx(pot.evaluate(r)).epsilon(1e-15));
        CHECK(plus * minus == 0.0);
    }
}

TEST_CASE("power envelope has the declared plateau and tail") {
    const EnvelopeSpec env = EnvelopeSpec::power(1, 1.0, 1.0, 1.0, 1.0);
    CHECK(env.eta(0.0) == 1.0);
    CHECK(env.eta(1.0) == 1.0);   // knee belongs to the plateau
    CHECK(env.eta(2.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(env.eta(10.0) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(!env.compact_support());
    CHECK(env.support_end() == kInf);
    CHECK_THROWS(env.eta(-1.0));
    // tail taller than the plateau at the knee is not monotone
    CHECK_THROWS(EnvelopeSpec::power(1, 1.0, 1.0, 10.0, 1.0));
    CHECK_THROWS(EnvelopeSpec::power(1, 1.0, 1.0, 1.0, 0.0));
}

TEST_CASE("envelope moment matches quadrature for the power law") {
    const EnvelopeSpec env = EnvelopeSpec::power(2, 3.0, 1.5, 2.0, 1.2);
    const auto f = [&](double s) { return env.eta(s) * s; };
    for (double r : {0.0, 0.4, 1.5, 2.0, 9.0}) {
        // closed-form tail beyond R, numeric quadrature up to R
        const double R = 4000.0;
        const double analytic_rest = env.tail_moment(R);
        const double numeric = integrate_split(f, r, R, {env.b, 10.0, 100.0, 1000.0}, 1e-11);
        CHECK(env.tail_moment(r) ==
              doctest::Approx(numeric + analytic_rest).epsilon(1e-8));
    }
}

TEST_CASE("tabulated envelope moment matches quadrature") {
    const EnvelopeSpec env =
        EnvelopeSpec::tabulated(1, 2.0, 1.0, make_table({1.0, 2.0, 3.5}, {2.0, 0.5, 0.0}));
    CHECK(env.compact_support());
    CHECK(env.support_end() == 3.5);
    const auto f = [&](double s) { return env.eta(s); };
    for (double r : {0.0, 0.5, 1.0, 1.7, 2.9, 3.5, 4.0}) {
        const double numeric = integrate_split(f, r, 3.5, {1.0, 2.0}, 1e-11);
        CHECK(env.tail_moment(r) == doctest::Approx(r >= 3.5 ? 0.0 : numeric).epsilon(1e-9));
    }
    // a held positive tail has no finite moment
    const EnvelopeSpec held =
        EnvelopeSpec::tabulated(1, 1.0, 1.0, make_table({1.0, 2.0}, {1.0, 0.5}, true));
    CHECK_THROWS(held.tail_moment(0.0));
}

TEST_CASE("canonical envelope dominates every potential kind beyond the knee") {
    const std::vector<PotentialSpec> pots = {
        PotentialSpec::soft_rod(1, 2.0, 1.0, 1.0),
        PotentialSpec::hard_rod(1, 1.0),
        default_pot(),
        PotentialSpec::tabulated(1, make_table({1.0, 2.0, 4.0}, {4.0, -0.5, 0.0}), 1.0, 1.0, 1.0,
                                 2.0),
    };
    for (const auto& pot : pots) {
        const EnvelopeSpec env = EnvelopeSpec::for_potential(pot);
        CHECK(env.two_b == 2.0 * pot.B);
        for (int i = 1; i <= 300; ++i) {
            const double r = pot.b + 9.0 * i / 300.0;
            const double v = pot.evaluate(r);
            if (v == kInf) continue;
            CHECK(std::abs(v) <= env.eta(r) * (1.0 + 1e-12) + 1e-300);
        }
    }
}

TEST_CASE("assumption audit passes the stock potential") {
    const PotentialSpec pot = default_pot();
    const AuditReport rep = audit_assumptions(pot, EnvelopeSpec::for_potential(pot), 300, 99);
    CHECK(rep.pass());
    CHECK(rep.issues.empty());
    CHECK(rep.configs_sampled == 300);
    CHECK(rep.radii_sampled > 4000);
}

TEST_CASE("assumption audit finds an understated stability constant") {
    // tail reaches -1 next to the core, so pair configurations already need
    // B >= 1/2; declaring 0.1 leaves a two-particle witness
    const PotentialSpec pot = PotentialSpec::core_tail(1, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.1);
    const EnvelopeSpec env = EnvelopeSpec::power(1, 2.0, 1.0, 1.0, 1.0);
    const AuditReport rep = audit_assumptions(pot, env, 100, 7);
    CHECK_FALSE(rep.s1_stability);
    CHECK_FALSE(rep.pass());
    CHECK_FALSE(rep.issues.empty());
}

TEST_CASE("assumption audit flags a tail the envelope misses") {
    const PotentialSpec pot = PotentialSpec::core_tail(1, 2.0, 1.0, 1.0, 2.0, 1.0, 1.0, 6.0);
    const EnvelopeSpec env = EnvelopeSpec::power(1, 4.0, 1.0, 1.0, 1.0);   // declares C = 1 < 2
    const AuditReport rep = audit_assumptions(pot, env, 100, 7);
    CHECK_FALSE(rep.s3_tail_dominated);
}

TEST_CASE("assumption audit flags an attractive part above the plateau") {
    const PotentialSpec pot = PotentialSpec::tabulated(
        1, make_table({1.0, 2.0}, {-3.0, 0.0}), 1.0, 0.1, 2.0, 40.0);
    const EnvelopeSpec env = EnvelopeSpec::power(1, 1.0, 2.0, 0.0, 1.0);
    const AuditReport rep = audit_assumptions(pot, env, 100, 7);
    CHECK_FALSE(rep.s4_minus_bounded);
    CHECK(rep.s1_stability);
    CHECK(rep.s3_tail_dominated);
}

TEST_CASE("assumption audit rejects a non-integrable envelope") {
    const PotentialSpec pot = PotentialSpec::soft_rod(1, 1.0, 1.0, 1.0);
    const EnvelopeSpec env =
        EnvelopeSpec::tabulated(1, 1.0, 1.0, make_table({1.0, 2.0}, {1.0, 0.5}, true));
    const AuditReport rep = audit_assumptions(pot, env, 50, 7);
    CHECK_FALSE(rep.s5_integrable);
}
