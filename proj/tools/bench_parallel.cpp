// Benchmarks for the OpenMP kernels against their serial reference
// implementations: the deterministic chunked reduction, the QFI eigenpair
// double sum, and the Wigner grid fill.  Thread counts are the benchmark
// argument, so a run shows the parallel speedup next to the serial baseline.
//
//   ./bench_parallel [--benchmark_filter=...]
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "cavitysense/analytic.hpp"
#include "cavitysense/parallel.hpp"
#include "cavitysense/qfi_sum.hpp"

using namespace cavitysense;

namespace {

constexpr std::int64_t reduction_n = 1 << 20;

complexd reduction_term(std::int64_t i) {
    const double x = 1e-6 * static_cast<double>(i);
    return complexd{std::cos(x), std::sin(x)} / (1.0 + x * x);
}

void bm_ordered_sum(benchmark::State& state) {
    set_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        complexd s = ordered_sum<complexd>(reduction_n, reduction_term);
        benchmark::DoNotOptimize(s);
    }
    set_threads(1);
    state.SetItemsProcessed(state.iterations() * reduction_n);
}

void bm_serial_sum(benchmark::State& state) {
    for (auto _ : state) {
        complexd s = serial_sum<complexd>(reduction_n, reduction_term);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * reduction_n);
}

struct QfiInput {
    Eigen::VectorXd lambda;
    Eigen::MatrixXcd b;
};

QfiInput qfi_input(int dim) {
    std::mt19937_64 rng(0xB5EEDu);
    std::normal_distribution<double> gauss(0.0, 1.0);
    QfiInput in;
    in.lambda.resize(dim);
    double tot = 0.0;
    for (int i = 0; i < dim; ++i) {
        in.lambda(i) = std::abs(gauss(rng));
        tot += in.lambda(i);
    }
    in.lambda /= tot;
    in.b.resize(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) in.b(i, j) = complexd{gauss(rng), gauss(rng)};
    return in;
}

void bm_qfi_pair_sum(benchmark::State& state) {
    const QfiInput in = qfi_input(600);
    set_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        double f = qfi_pair_sum(in.lambda, in.b);
        benchmark::DoNotOptimize(f);
    }
    set_threads(1);
}

void bm_qfi_pair_sum_serial(benchmark::State& state) {
    const QfiInput in = qfi_input(600);
    for (auto _ : state) {
        double f = qfi_pair_sum_serial(in.lambda, in.b);
        benchmark::DoNotOptimize(f);
    }
}

void bm_wigner_grid(benchmark::State& state) {
    const std::vector<complexd> amps{complexd{1.5, 0.0}, complexd{-1.5, 0.0}};
    const std::vector<complexd> w{complexd{1.0, 0.0}, complexd{1.0, 0.0}};
    set_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        WignerGrid g = wigner_cat(amps, w, -3.5, 3.5, -3.5, 3.5, 0.05);
        benchmark::DoNotOptimize(g.w.data());
    }
    set_threads(1);
}

}  // namespace

BENCHMARK(bm_serial_sum)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ordered_sum)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_qfi_pair_sum_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_qfi_pair_sum)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_wigner_grid)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
