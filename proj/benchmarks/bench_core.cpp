#include <benchmark/benchmark.h>

#include <cmath>

#include "boxgas/boundary.hpp"
#include "boxgas/bounds.hpp"
#include "boxgas/ensemble.hpp"
#include "boxgas/geometry.hpp"
#include "boxgas/potential.hpp"
#include "boxgas/quadrature.hpp"

using namespace boxgas;

namespace {

PotentialSpec bench_pot() {
    return PotentialSpec::core_tail(1, 10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5);
}

void bm_pair_energy(benchmark::State& state) {
    const PotentialSpec pot = bench_pot();
    double r = 0.0;
    for (auto _ : state) {
        r += 1e-4;
        if (r > 8.0) r = 1e-4;
        benchmark::DoNotOptimize(pot.evaluate(r));
    }
}
BENCHMARK(bm_pair_energy);

// Flat kernel sum over the exterior points; cost is linear in the view size.
void bm_external_field(benchmark::State& state) {
    const PotentialSpec pot = bench_pot();
    const EnvelopeSpec env = EnvelopeSpec::for_potential(pot);
    const double extent = static_cast<double>(state.range(0));
    const BoundaryConfiguration omega = generate_boundary(
        BoundaryMode::Saturated, 1, 5.0, GrowthFunction::zero(), 0.8, extent, 42);
    const SimBox box(1, 8.0, 0.8);
    const OmegaView view(box, omega);
    Vec x{0.0, 0.0, 0.0};
    for (auto _ : state) {
        x[0] = std::fmod(x[0] + 0.37, 8.0);
        benchmark::DoNotOptimize(view.field(pot, env, FieldKernel::VMinus, x));
    }
    state.counters["omega_pts"] = static_cast<double>(view.size());
}
BENCHMARK(bm_external_field)->Arg(64)->Arg(256)->Arg(2048);

void bm_gcmc_moves(benchmark::State& state) {
    const PotentialSpec pot = bench_pot();
    const EnvelopeSpec env = EnvelopeSpec::for_potential(pot);
    const SimBox box(1, 8.0, 0.8);
    const BoundaryConfiguration omega = generate_boundary(
        BoundaryMode::Saturated, 1, 5.0, GrowthFunction::zero(), 0.8, 16.0, 42);
    GcmcParams prm;
    prm.n_moves = static_cast<int64_t>(state.range(0));
    prm.n_burnin = 0;
    prm.thin = 64;
    for (auto _ : state) {
        prm.seed++;
        benchmark::DoNotOptimize(gcmc_run(box, omega, pot, env, prm));
    }
    state.SetItemsProcessed(state.iterations() * prm.n_moves);
}
BENCHMARK(bm_gcmc_moves)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

void bm_field_scan(benchmark::State& state) {
    const PotentialSpec pot = bench_pot();
    const EnvelopeSpec env = EnvelopeSpec::for_potential(pot);
    const double L = static_cast<double>(state.range(0));
    const BoundaryConfiguration omega = generate_boundary(
        BoundaryMode::Saturated, 1, 5.0, GrowthFunction::zero(), 0.8, L + 8.0, 42);
    const SimBox box(1, L, 0.8);
    uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(field_supremum_scan(box, omega, pot, env, 0.5, 6, seed++));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_field_scan)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void bm_envelope_quadrature(benchmark::State& state) {
    const EnvelopeSpec env = EnvelopeSpec::power(1, 1.0, 1.0, 1.0, 1.0);
    for (auto _ : state) {
        const double got = integrate_split(
            [&](double s) { return env.eta(s); }, 0.0, 1e6, {env.b}, 1e-10);
        benchmark::DoNotOptimize(got);
    }
}
BENCHMARK(bm_envelope_quadrature);

}  // namespace

BENCHMARK_MAIN();
