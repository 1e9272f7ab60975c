#pragma once
/// @file kernels.hpp
/// @brief Pointwise loops and reductions with a serial reference path and an
///        OpenMP path selected at run time.
///
/// Reductions are chunked Kahan sums: the index range is split into a fixed
/// number of chunks, each chunk is compensated-summed sequentially, and the
/// per-chunk partials are combined in chunk order. The result is therefore
/// bit-identical between the serial and parallel paths and across thread
/// counts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lcflow::kernels {

enum class Exec { serial, parallel };

/// Global execution-mode switch (default: parallel).
inline Exec& exec_mode() {
    static Exec mode = Exec::parallel;
    return mode;
}

inline constexpr std::size_t reduce_chunks = 64;

/// Apply fn(i) for i in [0, n).
template <typename F>
inline void parallel_for(std::size_t n, F&& fn) {
    if (exec_mode() == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
    }
}

namespace detail {

template <typename F>
inline double kahan_chunk(std::size_t lo, std::size_t hi, F&& term) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        double y = term(i) - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace detail

/// Deterministic sum of term(i) for i in [0, n).
template <typename F>
inline double reduce_sum(std::size_t n, F&& term) {
    if (n == 0) return 0.0;
    const std::size_t nchunks = std::min(reduce_chunks, n);
    std::array<double, reduce_chunks> partial{};
    const std::size_t base = n / nchunks, rem = n % nchunks;
    auto chunk_of = [&](std::size_t c) {
        std::size_t lo = c * base + std::min(c, rem);
        std::size_t hi = lo + base + (c < rem ? 1 : 0);
        return std::pair<std::size_t, std::size_t>(lo, hi);
    };
    if (exec_mode() == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
            auto [lo, hi] = chunk_of(static_cast<std::size_t>(c));
            partial[static_cast<std::size_t>(c)] = detail::kahan_chunk(lo, hi, term);
        }
    } else {
        for (std::size_t c = 0; c < nchunks; ++c) {
            auto [lo, hi] = chunk_of(c);
            partial[c] = detail::kahan_chunk(lo, hi, term);
        }
    }
    double sum = 0.0, comp = 0.0;
    for (std::size_t c = 0; c < nchunks; ++c) {
        double y = partial[c] - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

/// Maximum of term(i) for i in [0, n); returns -inf for n = 0.
template <typename F>
inline double reduce_max(std::size_t n, F&& term) {
    if (n == 0) return -HUGE_VAL;
    const std::size_t nchunks = std::min(reduce_chunks, n);
    std::array<double, reduce_chunks> partial;
    partial.fill(-HUGE_VAL);
    const std::size_t base = n / nchunks, rem = n % nchunks;
    auto chunk_of = [&](std::size_t c) {
        std::size_t lo = c * base + std::min(c, rem);
        std::size_t hi = lo + base + (c < rem ? 1 : 0);
        return std::pair<std::size_t, std::size_t>(lo, hi);
    };
    auto scan = [&](std::size_t c) {
        auto [lo, hi] = chunk_of(c);
        double m = -HUGE_VAL;
        for (std::size_t i = lo; i < hi; ++i) m = std::max(m, term(i));
        partial[c] = m;
    };
    if (exec_mode() == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < static_cast<long long>(nchunks); ++c)
            scan(static_cast<std::size_t>(c));
    } else {
        for (std::size_t c = 0; c < nchunks; ++c) scan(c);
    }
    double m = -HUGE_VAL;
    for (std::size_t c = 0; c < nchunks; ++c) m = std::max(m, partial[c]);
    return m;
}

/// Minimum of term(i) for i in [0, n); returns +inf for n = 0.
template <typename F>
inline double reduce_min(std::size_t n, F&& term) {
    return -reduce_max(n, [&](std::size_t i) { return -term(i); });
}

} // namespace lcflow::kernels
