#include <benchmark/benchmark.h>

#include "wigner/ensemble.hpp"
#include "wigner/harness.hpp"
#include "wigner/region_bounds.hpp"
#include "wigner/resolvent.hpp"
#include "wigner/spectral.hpp"

namespace {

using namespace wigner;

SymmetricMatrix draw(std::size_t n, std::uint64_t seed) {
    return sample_wigner(WignerSpec{n, EntryLaw::gaussian(), seed, 2.0, false});
}

void BM_SampleEntries(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            sample_entries(WignerSpec{n, EntryLaw::gaussian(), seed++, 2.0, false}));
    }
}
BENCHMARK(BM_SampleEntries)->Arg(256)->Arg(1024);

void BM_Eigenvalues(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const SymmetricMatrix w = draw(n, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eigenvalues(w));
    }
}
BENCHMARK(BM_Eigenvalues)->Arg(64)->Arg(256)->Arg(512)->Arg(1024)
    ->Unit(benchmark::kMillisecond);

void BM_KolmogorovDistance(benchmark::State& state) {
    const auto reps = static_cast<std::size_t>(state.range(0));
    std::vector<Spectrum> spectra;
    for (std::size_t r = 0; r < reps; ++r) {
        spectra.push_back(eigenvalues(draw(64, r)));
    }
    const ESD pooled = mean_esd(spectra);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kolmogorov_distance(pooled));
    }
}
BENCHMARK(BM_KolmogorovDistance)->Arg(64)->Arg(512);

void BM_Resolvent(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const SymmetricMatrix w = draw(n, 11);
    const UpperHalfPoint z{0.5, 0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(resolvent(w, z));
    }
}
BENCHMARK(BM_Resolvent)->Arg(16)->Arg(64);

void BM_IdentityReport(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const SymmetricMatrix w = draw(n, 13);
    const auto grid = default_identity_grid();
    for (auto _ : state) {
        benchmark::DoNotOptimize(identity_report(w, grid, 13));
    }
}
BENCHMARK(BM_IdentityReport)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SmoothingBound(benchmark::State& state) {
    const SmoothingParams params = semicircle::smoothing_params(1000, 1.0);
    const TransformSampler s_f = [](const UpperHalfPoint& z) {
        return semicircle::stieltjes({z.u - 0.05, z.v});
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(smoothing_bound(s_f, params, 1.0, 1.0, 4.0));
    }
}
BENCHMARK(BM_SmoothingBound)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
