/// @file bench_kernels.cpp
/// @brief Microbenchmarks comparing the serial and OpenMP execution paths of
///        the pointwise loops, the deterministic reductions, and one full
///        tendency assembly.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lcflow/field.hpp"
#include "lcflow/grid.hpp"
#include "lcflow/kernels.hpp"
#include "lcflow/model.hpp"

namespace {

using lcflow::Grid;
using lcflow::ScalarField;
namespace kernels = lcflow::kernels;
namespace model = lcflow::model;

model::FlowState bench_state(const Grid& g) {
    model::FlowState st =
        model::make_state(g, model::FlowMode::compressible, 0.5);
    st.phi = g.sample(
        [](double x, double y) { return 0.05 * std::cos(x) * std::cos(y); });
    st.u.comp(0) = g.sample(
        [](double x, double y) { return 0.1 * std::sin(x) * std::cos(y); });
    st.u.comp(1) = g.sample(
        [](double x, double y) { return -0.1 * std::cos(x) * std::sin(y); });
    const ScalarField theta = g.sample(
        [](double x, double y) { return 0.2 * (std::sin(x) + std::cos(y)); });
    const ScalarField rate = g.sample(
        [](double x, double y) { return 0.05 * std::cos(x + y); });
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double c = std::cos(theta[i]);
        const double s = std::sin(theta[i]);
        st.d.comp(0)[i] = c;
        st.d.comp(1)[i] = s;
        st.ddot.comp(0)[i] = -rate[i] * s;
        st.ddot.comp(1)[i] = rate[i] * c;
    }
    return st;
}

template <kernels::Exec M>
void BM_reduce_sum(benchmark::State& state) {
    kernels::exec_mode() = M;
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i)
        a[i] = std::sin(1e-3 * static_cast<double>(i));
    for (auto _ : state) {
        double s =
            kernels::reduce_sum(n, [&](std::size_t i) { return a[i] * a[i]; });
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(n));
}

template <kernels::Exec M>
void BM_pointwise_fma(benchmark::State& state) {
    kernels::exec_mode() = M;
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> x(n), y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::cos(1e-3 * static_cast<double>(i));
    for (auto _ : state) {
        kernels::parallel_for(
            n, [&](std::size_t i) { y[i] = std::fma(0.5, x[i] * x[i], y[i]); });
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(n));
}

template <kernels::Exec M>
void BM_reduce_max(benchmark::State& state) {
    kernels::exec_mode() = M;
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i)
        a[i] = std::sin(1e-3 * static_cast<double>(i));
    for (auto _ : state) {
        double m = kernels::reduce_max(
            n, [&](std::size_t i) { return std::abs(a[i]); });
        benchmark::DoNotOptimize(m);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(n));
}

template <kernels::Exec M>
void BM_compressible_rhs(benchmark::State& state) {
    kernels::exec_mode() = M;
    const auto n = static_cast<std::size_t>(state.range(0));
    const Grid g(n, n);
    const model::FlowState st = bench_state(g);
    const model::LeslieCoefficients c;
    for (auto _ : state) {
        model::FlowState k = model::compressible_rhs(st, c);
        benchmark::DoNotOptimize(k.u.comp(0).data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(n * n));
}

}  // namespace

BENCHMARK_TEMPLATE(BM_reduce_sum, kernels::Exec::serial)
    ->Name("reduce_sum/serial")
    ->Arg(1 << 14)
    ->Arg(1 << 18)
    ->Arg(1 << 22);
BENCHMARK_TEMPLATE(BM_reduce_sum, kernels::Exec::parallel)
    ->Name("reduce_sum/parallel")
    ->Arg(1 << 14)
    ->Arg(1 << 18)
    ->Arg(1 << 22);

BENCHMARK_TEMPLATE(BM_pointwise_fma, kernels::Exec::serial)
    ->Name("pointwise_fma/serial")
    ->Arg(1 << 14)
    ->Arg(1 << 18)
    ->Arg(1 << 22);
BENCHMARK_TEMPLATE(BM_pointwise_fma, kernels::Exec::parallel)
    ->Name("pointwise_fma/parallel")
    ->Arg(1 << 14)
    ->Arg(1 << 18)
    ->Arg(1 << 22);

BENCHMARK_TEMPLATE(BM_reduce_max, kernels::Exec::serial)
    ->Name("reduce_max/serial")
    ->Arg(1 << 18);
BENCHMARK_TEMPLATE(BM_reduce_max, kernels::Exec::parallel)
    ->Name("reduce_max/parallel")
    ->Arg(1 << 18);

BENCHMARK_TEMPLATE(BM_compressible_rhs, kernels::Exec::serial)
    ->Name("compressible_rhs/serial")
    ->Arg(64)
    ->Arg(128)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_compressible_rhs, kernels::Exec::parallel)
    ->Name("compressible_rhs/parallel")
    ->Arg(64)
    ->Arg(128)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
