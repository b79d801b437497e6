#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "boxgas/boundary.hpp"
#include "boxgas/ensemble.hpp"
#include "boxgas/potential.hpp"
#include "boxgas/rng.hpp"

using namespace boxgas;

namespace {

PotentialSpec stock_pot() {
    return PotentialSpec::core_tail(1, 10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5);
}

PotentialSpec free_pot() { return PotentialSpec::soft_rod(1, 0.0, 1.0, 0.0); }   // v == 0

BoundaryConfiguration no_omega() {
    BoundaryConfiguration omega;
    omega.d = 1;
    return omega;
}

// exact hard-rod grand potential on a length-4 segment at unit rod length
double tonks_xi_len4(double lam) {
    return 1.0 + 4.0 * lam + 4.5 * lam * lam + (8.0 / 6.0) * lam * lam * lam +
           (1.0 / 24.0) * lam * lam * lam * lam;
}

double tonks_mean_n_len4(double lam) {
    const double dxi = 4.0 + 9.0 * lam + 4.0 * lam * lam + (1.0 / 6.0) * lam * lam * lam;
    return lam * dxi / tonks_xi_len4(lam);
}

}  // namespace

TEST_CASE("acceptance probabilities take their textbook values") {
    CHECK(acc_insert(1.0, 0.5, 4.0, 3, 0.0) == doctest::Approx(0.5));
    CHECK(acc_insert(1.0, 10.0, 4.0, 0, 0.0) == 1.0);
    CHECK(acc_insert(1.0, 0.5, 4.0, 0, kInf) == 0.0);
    CHECK(acc_delete(1.0, 0.5, 4.0, 2, 0.0) == 1.0);
    CHECK(acc_delete(1.0, 0.5, 4.0, 1, 0.0) == doctest::Approx(0.5));
    CHECK_THROWS(acc_delete(1.0, 0.5, 4.0, 0, 0.0));
    CHECK(acc_translate(1.0, 0.0) == 1.0);
    CHECK(acc_translate(1.0, kInf) == 0.0);
    CHECK(acc_translate(1.0, std::log(2.0)) == doctest::Approx(0.5));
    CHECK(acc_translate(1.0, -5.0) == 1.0);
}

TEST_CASE("insert and delete balance the grand-canonical weights") {
    RngStream rng(5, 1);
    const double beta = 0.7;
    for (int t = 0; t < 200; ++t) {
        const double lam = rng.uniform(0.1, 3.0);
        const double vol = rng.uniform(1.0, 10.0);
        const int n = static_cast<int>(rng.integer(10));
        const double du = rng.uniform(-3.0, 3.0);
        const double up = acc_insert(beta, lam, vol, n, du);
        const double down = acc_delete(beta, lam, vol, n + 1, -du);
        const double weight_ratio = lam * vol / (n + 1) * std::exp(-beta * du);
        REQUIRE(down > 0.0);
        CHECK(up / down == doctest::Approx(weight_ratio).epsilon(1e-12));
    }
}

TEST_CASE("interaction cutoff tracks the tail threshold") {
    const PotentialSpec pot = stock_pot();
    CHECK(interaction_cutoff(pot, EnvelopeSpec::for_potential(pot)) ==
          doctest::Approx(20000.0).epsilon(1e-12));

    const PotentialSpec rod = PotentialSpec::hard_rod(1, 1.0);
    CHECK(interaction_cutoff(rod, EnvelopeSpec::for_potential(rod)) == doctest::Approx(1.0));

    TableFn t;
    t.r = {1.0, 2.0};
    t.v = {1.0, 0.5};
    t.hold_right = true;
    const PotentialSpec held = PotentialSpec::tabulated(1, t, 1.0, 1.0, 1.0, 0.0);
    CHECK(std::isinf(interaction_cutoff(held, EnvelopeSpec::for_potential(held))));
}

TEST_CASE("pair and total energies add up by hand") {
    const PotentialSpec pot = stock_pot();
    const std::vector<Vec> xs{Vec{0.5, 0.0, 0.0}, Vec{1.2, 0.0, 0.0}, Vec{3.0, 0.0, 0.0}};
    const double expect = 2.0 - 1.0 / 6.25 - 1.0 / 3.24;
    CHECK(pair_energy(xs, pot, 1) == doctest::Approx(expect).epsilon(1e-12));

    const PotentialSpec rod = PotentialSpec::hard_rod(1, 1.0);
    CHECK(std::isinf(pair_energy({Vec{0.0, 0.0, 0.0}, Vec{0.5, 0.0, 0.0}}, rod, 1)));

    const SimBox box(1, 1.0, 0.5);
    BoundaryConfiguration omega = no_omega();
    omega.pts = {Vec{1.5, 0.0, 0.0}};
    const std::vector<Vec> two{Vec{0.0, 0.0, 0.0}, Vec{0.3, 0.0, 0.0}};
    const double fields = -1.0 / 2.25 - 1.0 / 1.44;
    CHECK(total_energy(box, pot, EnvelopeSpec::for_potential(pot), two, omega) ==
          doctest::Approx(2.0 + fields).epsilon(1e-12));
    CHECK(std::isinf(total_energy(box, rod, EnvelopeSpec::for_potential(rod),
                                  {Vec{0.6, 0.0, 0.0}}, omega)));
}

TEST_CASE("activity series is exact for the ideal gas") {
    const PotentialSpec pot = free_pot();
    const SimBox box(1, 2.0, 0.5);
    const XiSeries s = xi_truncated(box, no_omega(), pot, EnvelopeSpec::for_potential(pot),
                                    1.0, 0.5, 24, 100, 7);
    CHECK(s.log_xi == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.se == 0.0);   // the integrand is identically one
    CHECK(s.tail_ok);
    CHECK(s.flags.empty());
    REQUIRE(s.terms.size() == 25);
    CHECK(s.terms[0] == 1.0);
    CHECK(s.terms[1] == doctest::Approx(2.0));
    CHECK(s.terms[3] == doctest::Approx(8.0 / 6.0));
}

TEST_CASE("a short series reports its unresolved tail") {
    const PotentialSpec pot = free_pot();
    const SimBox box(1, 2.0, 0.5);
    const XiSeries s = xi_truncated(box, no_omega(), pot, EnvelopeSpec::for_potential(pot),
                                    1.0, 0.5, 3, 100, 7);
    CHECK_FALSE(s.tail_ok);
    CHECK_FALSE(s.flags.empty());
    CHECK(s.tail > 0.5);   // e^2 minus the first four terms
}

TEST_CASE("hard-rod reference matches the frozen fraction") {
    const TonksReference t = tonks_reference(4.0, 1.0, 0.5);
    CHECK(t.xi == doctest::Approx(1649.0 / 384.0).epsilon(1e-12));
    CHECK(t.beta_p == doctest::Approx(std::log(1649.0 / 384.0) / 4.0).epsilon(1e-12));
    CHECK(t.n_terms >= 4);
    CHECK(tonks_reference(2.0, 1.0, 1.0).xi == doctest::Approx(3.5).epsilon(1e-12));
    CHECK_THROWS(tonks_reference(-1.0, 1.0, 0.5));
}

TEST_CASE("sampled series agrees with the hard-rod reference") {
    const PotentialSpec rod = PotentialSpec::hard_rod(1, 1.0);
    const SimBox box(1, 2.0, 0.5);
    const XiSeries s = xi_truncated(box, no_omega(), rod, EnvelopeSpec::for_potential(rod),
                                    1.0, 0.5, 16, 50000, 11);
    CHECK(s.tail_ok);
    const double exact = 1649.0 / 384.0;
    CHECK(std::abs(s.xi - exact) <= 3.0 * s.se + 1e-9);
    CHECK(s.se > 0.0);
}

TEST_CASE("ideal-gas chain reproduces poisson occupation") {
    const PotentialSpec pot = free_pot();
    const SimBox box(1, 2.0, 0.5);
    GcmcParams prm;
    prm.n_moves = 200000;
    prm.n_burnin = 20000;
    prm.thin = 10;
    prm.seed = 3;
    const GcmcResult r =
        gcmc_run(box, no_omega(), pot, EnvelopeSpec::for_potential(pot), prm);
    CHECK(r.samples == 20000);
    CHECK(std::abs(r.mean_n - 2.0) <= 5.0 * r.se_n);
    CHECK(std::abs(r.var_n - 2.0) <= 5.0 * r.se_var_n);
    CHECK(r.drift <= 1e-8);
    CHECK(r.displacement > 0.0);
    CHECK(r.mean_u == 0.0);

    // same seed, same trajectory
    const GcmcResult r2 =
        gcmc_run(box, no_omega(), pot, EnvelopeSpec::for_potential(pot), prm);
    CHECK(r2.mean_n == r.mean_n);
    CHECK(r2.mean_u == r.mean_u);
}

TEST_CASE("hard-rod chain matches the exact occupation") {
    const PotentialSpec rod = PotentialSpec::hard_rod(1, 1.0);
    const SimBox box(1, 2.0, 0.5);
    GcmcParams prm;
    prm.n_moves = 300000;
    prm.n_burnin = 30000;
    prm.thin = 10;
    prm.seed = 5;
    const GcmcResult r =
        gcmc_run(box, no_omega(), rod, EnvelopeSpec::for_potential(rod), prm);
    CHECK(std::abs(r.mean_n - tonks_mean_n_len4(0.5)) <= 4.0 * r.se_n);
    CHECK(r.drift <= 1e-8);
}

TEST_CASE("external points push particles out") {
    const PotentialSpec rod = PotentialSpec::hard_rod(1, 1.0);
    const EnvelopeSpec env = EnvelopeSpec::for_potential(rod);
    const SimBox box(1, 2.0, 0.5);
    GcmcParams prm;
    prm.n_moves = 150000;
    prm.n_burnin = 15000;
    prm.seed = 9;
    const GcmcResult free_run = gcmc_run(box, no_omega(), rod, env, prm);

    BoundaryConfiguration omega = no_omega();
    omega.pts = {Vec{2.3, 0.0, 0.0}, Vec{-2.3, 0.0, 0.0}};   // exclude 0.7 at each wall
    const GcmcResult squeezed = gcmc_run(box, omega, rod, env, prm);
    CHECK(free_run.mean_n - squeezed.mean_n > 0.2);
    CHECK(squeezed.drift <= 1e-8);
}

TEST_CASE("energy bookkeeping survives a long interacting run") {
    const PotentialSpec pot = stock_pot();
    const EnvelopeSpec env = EnvelopeSpec::for_potential(pot);
    const SimBox box(1, 2.0, 0.5);
    BoundaryConfiguration omega = no_omega();
    omega.pts = {Vec{2.3, 0.0, 0.0}, Vec{-2.7, 0.0, 0.0}};
    GcmcParams prm;
    prm.n_moves = 120000;
    prm.n_burnin = 12000;
    prm.seed = 13;
    const GcmcResult r = gcmc_run(box, omega, pot, env, prm);
    CHECK(r.drift <= 1e-8);
    CHECK(r.r_cut == doctest::Approx(4.0));     // capped by the box diameter
    CHECK(r.tail_v == doctest::Approx(0.5));    // V(4) for the stock envelope
    CHECK(r.samples > 0);
    CHECK(std::isfinite(r.mean_u));
}

TEST_CASE("chains emit a parseable trace") {
    const PotentialSpec pot = free_pot();
    const SimBox box(1, 2.0, 0.5);
    GcmcParams prm;
    prm.n_moves = 2000;
    prm.n_burnin = 500;
    prm.thin = 100;
    prm.seed = 1;
    std::ostringstream trace;
    const GcmcResult r =
        gcmc_run(box, no_omega(), pot, EnvelopeSpec::for_potential(pot), prm, &trace);
    const std::string text = trace.str();
    int64_t lines = 0;
    for (char ch : text) lines += ch == '\n';
    CHECK(lines == r.samples);
    const size_t c1 = text.find(',');
    const size_t c2 = text.find(',', c1 + 1);
    REQUIRE(c1 != std::string::npos);
    REQUIRE(c2 != std::string::npos);
    CHECK(c2 < text.find('\n'));
}

TEST_CASE("free-boundary bulk density approaches the activity for the ideal gas") {
    const PotentialSpec pot = free_pot();
    const SimBox box(1, 2.0, 0.5);
    GcmcParams prm;
    prm.n_moves = 100000;
    prm.seed = 17;
    const double rho = bulk_density(box, pot, EnvelopeSpec::for_potential(pot), prm);
    CHECK(rho == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("series pressure is exact for the ideal gas") {
    const PotentialSpec pot = free_pot();
    const SimBox box(1, 2.0, 0.5);
    const PressureEstimate ps = pressure_by_series(
        box, no_omega(), pot, EnvelopeSpec::for_potential(pot), 1.0, 0.5, 24, 100, 7);
    CHECK(ps.beta_p == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ps.method == "series");
    CHECK(ps.error <= 1e-9);
    CHECK(ps.flags.empty());
}

TEST_CASE("integrated pressure brackets the ideal-gas value") {
    const PotentialSpec pot = free_pot();
    const SimBox box(1, 2.0, 0.5);
    IntegrationParams ip;
    ip.points = 17;
    ip.ratio = 256.0;
    ip.gcmc.n_moves = 40000;
    ip.gcmc.n_burnin = 8000;
    ip.gcmc.thin = 10;
    const PressureEstimate ps = pressure_by_integration(
        box, no_omega(), pot, EnvelopeSpec::for_potential(pot), 1.0, 0.5, ip, 23);
    CHECK(ps.method == "gcmc-integration");
    REQUIRE(ps.curve.size() == 17);
    CHECK(ps.curve.front().lambda < ps.curve.back().lambda);
    CHECK(ps.curve.back().lambda == doctest::Approx(0.5));
    CHECK(ps.error > 0.0);
    CHECK(std::abs(ps.beta_p - 0.5) <= 3.0 * ps.error);
}
