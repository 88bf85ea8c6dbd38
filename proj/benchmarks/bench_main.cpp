#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "meanper/expansion.hpp"
#include "meanper/functionals.hpp"
#include "meanper/newton.hpp"

namespace {

using namespace meanper;

MultiplicityVariety random_variety(std::size_t nodes, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<ZeroPoint> points;
    while (points.size() < nodes) {
        const cplx z{5.0 * unit(rng), 5.0 * unit(rng)};
        bool ok = true;
        for (const auto& p : points) {
            if (std::abs(p.location - z) < 0.3) {
                ok = false;
                break;
            }
        }
        if (ok) {
            points.push_back(ZeroPoint{z, 1 + static_cast<int>(points.size() % 3)});
        }
    }
    return MultiplicityVariety::sorted(std::move(points));
}

void BM_psi_forward(benchmark::State& state) {
    const auto V = random_variety(static_cast<std::size_t>(state.range(0)), 42);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::vector<cplx>> rows(V.size());
    for (std::size_t k = 0; k < V.size(); ++k) {
        rows[k].resize(static_cast<std::size_t>(V[k].multiplicity));
        for (auto& v : rows[k]) {
            v = cplx{unit(rng), unit(rng)};
        }
    }
    const ValueSet values{rows};
    for (auto _ : state) {
        benchmark::DoNotOptimize(psi_forward(V, values));
    }
}
BENCHMARK(BM_psi_forward)->Arg(6)->Arg(12);

void BM_find_zeros_contour(benchmark::State& state) {
    // e^{2 xi} - e^{xi}: generic contour path, zeros on the imaginary axis.
    const auto phi = EntireFunctionSpec::exp_sum(
        {ExpSumSpec::Term{{1.0, 0.0}, {2.0, 0.0}}, ExpSumSpec::Term{{-1.0, 0.0}, {1.0, 0.0}}});
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_zeros(phi, 7.0, 1e-10));
    }
}
BENCHMARK(BM_find_zeros_contour);

void BM_synthesize_general(benchmark::State& state) {
    const auto phi = EntireFunctionSpec::exp_sum(
        {ExpSumSpec::Term{{1.0, 0.0}, {1.0, 0.0}}, ExpSumSpec::Term{{-1.0, 0.0}, {0.0, 0.0}}});
    const auto V = find_zeros(phi, 20.0, 1e-10);
    const auto f = EntireFunctionSpec::exp_sum(
        {ExpSumSpec::Term{{0.0, -0.5}, {0.0, 2.0 * std::numbers::pi}},
         ExpSumSpec::Term{{0.0, 0.5}, {0.0, -2.0 * std::numbers::pi}}});
    const auto c =
        extract_general(phi, V, taylor_stream_of(f, YoungSpec::linear(), 1.0), V.size());
    double x = -1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthesize_general(c, cplx{x, 0.0}));
        x += 0.01;
        if (x > 1.0) {
            x = -1.0;
        }
    }
}
BENCHMARK(BM_synthesize_general);

} // namespace

BENCHMARK_MAIN();
