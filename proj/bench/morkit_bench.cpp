// Serial reference kernels against their OpenMP counterparts, plus the
// vector array operations used by the benchmark subcommand.

#include <benchmark/benchmark.h>

#include <vector>

#include "morkit/algorithms.hpp"
#include "morkit/kernels.hpp"
#include "morkit/random.hpp"
#include "morkit/toolbox/thermal_block.hpp"
#include "morkit/vector_array.hpp"

using namespace morkit;
namespace k = morkit::kernels;

namespace
{
std::vector<double> random_values(std::size_t n, std::uint64_t seed)
{
    Xoshiro256 rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

template <bool Parallel>
void axpy(benchmark::State& state)
{
    const auto dim = static_cast<std::size_t>(state.range(0)), len = static_cast<std::size_t>(state.range(1));
    auto a = random_values(dim * len, 1);
    const auto x = random_values(dim * len, 2);
    const std::vector<double> alpha(len, 1e-3);
    for (auto _ : state) {
        if constexpr (Parallel)
            k::omp::axpy(a, alpha, x, dim);
        else
            k::serial::axpy(a, alpha, x, dim);
        benchmark::DoNotOptimize(a.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 3 * dim * len * sizeof(double)));
}

template <bool Parallel>
void gramian(benchmark::State& state)
{
    const auto dim = static_cast<std::size_t>(state.range(0)), len = static_cast<std::size_t>(state.range(1));
    const auto a = random_values(dim * len, 1);
    std::vector<double> g(len * len);
    for (auto _ : state) {
        if constexpr (Parallel)
            k::omp::gramian(g, a, len, a, len, dim);
        else
            k::serial::gramian(g, a, len, a, len, dim);
        benchmark::DoNotOptimize(g.data());
    }
}

template <bool Parallel>
void lincomb(benchmark::State& state)
{
    const auto dim = static_cast<std::size_t>(state.range(0)), len = static_cast<std::size_t>(state.range(1));
    const auto a = random_values(dim * len, 1);
    const auto c = random_values(len * len, 2);
    std::vector<double> out(dim * len);
    for (auto _ : state) {
        if constexpr (Parallel)
            k::omp::lincomb(out, a, c, len, len, dim);
        else
            k::serial::lincomb(out, a, c, len, len, dim);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void spmv(benchmark::State& state)
{
    const auto d = toolbox::discretize_thermal_block({2, 2, 1.0 / static_cast<double>(state.range(0))});
    const auto& m = dynamic_cast<const MatrixOperator&>(*d.h1_0_semi).sparse();
    const auto view = m.view();
    const auto x = random_values(m.cols(), 1);
    std::vector<double> y(m.rows());
    for (auto _ : state) {
        if constexpr (Parallel)
            k::omp::spmv(view, x, y, 1);
        else
            k::serial::spmv(view, x, y, 1);
        benchmark::DoNotOptimize(y.data());
    }
    state.counters["dofs"] = static_cast<double>(m.rows());
}

void pod_dense(benchmark::State& state)
{
    const auto dim = state.range(0), len = state.range(1);
    const auto values = random_values(static_cast<std::size_t>(dim * len), 1);
    DenseVectorArray a(static_cast<std::size_t>(dim), static_cast<std::size_t>(len));
    std::copy(values.begin(), values.end(), a.data().begin());
    for (auto _ : state) benchmark::DoNotOptimize(pod(a));
}

void grid(benchmark::internal::Benchmark* b)
{
    for (std::int64_t dim : {1000, 10000})
        for (std::int64_t len : {1, 4, 16, 64, 256}) b->Args({dim, len});
}
}  // namespace

BENCHMARK(axpy<false>)->Name("axpy/serial")->Apply(grid);
BENCHMARK(axpy<true>)->Name("axpy/omp")->Apply(grid);
BENCHMARK(gramian<false>)->Name("gramian/serial")->Apply(grid);
BENCHMARK(gramian<true>)->Name("gramian/omp")->Apply(grid);
BENCHMARK(lincomb<false>)->Name("lincomb/serial")->Args({10000, 16})->Args({10000, 64});
BENCHMARK(lincomb<true>)->Name("lincomb/omp")->Args({10000, 16})->Args({10000, 64});
BENCHMARK(spmv<false>)->Name("spmv/serial")->Arg(32)->Arg(128);
BENCHMARK(spmv<true>)->Name("spmv/omp")->Arg(32)->Arg(128);
BENCHMARK(pod_dense)->Name("pod/dense")->Args({1000, 16})->Args({10000, 64});

BENCHMARK_MAIN();
