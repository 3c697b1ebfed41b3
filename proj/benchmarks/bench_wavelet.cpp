#include <benchmark/benchmark.h>

#include "meshband/wavelet.hpp"

#include <random>

namespace {

using namespace meshband;

Vector signal_1940(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(1940);
    for (Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    return v;
}

void BM_decompose(benchmark::State& state, const char* family_name) {
    const WaveletFamily family = WaveletFamily::from_name(family_name);
    const Vector x = signal_1940(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(decompose(x, family, 11));
    }
}
BENCHMARK_CAPTURE(BM_decompose, haar, "haar");
BENCHMARK_CAPTURE(BM_decompose, db4, "daubechies4");
BENCHMARK_CAPTURE(BM_decompose, battle_lemarie, "battle_lemarie_cubic");

void BM_reconstruct_all_subbands(benchmark::State& state) {
    const WaveletFamily family = WaveletFamily::from_name("daubechies4");
    const Vector x = signal_1940(2);
    const WaveletCoefficients coeffs = decompose(x, family, 11);
    for (auto _ : state) {
        for (int j = 1; j <= 22; ++j) {
            benchmark::DoNotOptimize(
                reconstruct_subband(coeffs, SubbandIndex(j, 11), family));
        }
    }
}
BENCHMARK(BM_reconstruct_all_subbands);

void BM_subject_stack_r90(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 1.0);
    SubjectRecord subject;
    subject.subject_id = "bench";
    subject.series = Matrix(90, 1940);
    for (Index r = 0; r < 90; ++r) {
        for (Index t = 0; t < 1940; ++t) subject.series(r, t) = normal(rng);
    }
    subject.sessions = {{1, 1940, 0}};
    const WaveletFamily family = WaveletFamily::from_name("battle_lemarie_cubic");
    for (auto _ : state) {
        benchmark::DoNotOptimize(subband_stack(subject, family, 11));
    }
}
BENCHMARK(BM_subject_stack_r90)->Unit(benchmark::kMillisecond);

}  // namespace
