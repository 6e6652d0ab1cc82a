#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace logsob::par {

// Data-parallel building blocks. Every kernel writes per-index values into a
// buffer and reduces in a fixed pairwise order, so results are bitwise
// identical for any thread count (including the serial reference twins kept
// for testing and benchmarking).

enum class Exec { Serial, OpenMP };

#ifdef _OPENMP
inline int max_threads() { return omp_get_max_threads(); }
#else
inline int max_threads() { return 1; }
#endif

template <class F>
void map_fill_serial(std::size_t n, double* out, F&& fn) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
}

template <class F>
void map_fill(std::size_t n, double* out, F&& fn) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
#else
    map_fill_serial(n, out, fn);
#endif
}

template <class F>
void map_fill(Exec exec, std::size_t n, double* out, F&& fn) {
    if (exec == Exec::Serial)
        map_fill_serial(n, out, fn);
    else
        map_fill(n, out, fn);
}

// Pairwise summation over a fixed binary tree. Order depends only on n.
inline double fixed_order_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = v[0];
        for (std::size_t i = 1; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return fixed_order_sum(v, half) + fixed_order_sum(v + half, n - half);
}

inline double fixed_order_sum(const std::vector<double>& v) {
    return fixed_order_sum(v.data(), v.size());
}

// Independent work items; fn(i) must not touch shared mutable state.
template <class F>
void for_each_index(Exec exec, std::size_t n, F&& fn) {
#ifdef _OPENMP
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

// sum_i fn(i), evaluated element-wise in parallel, reduced in fixed order.
template <class F>
double map_sum(Exec exec, std::size_t n, F&& fn) {
    std::vector<double> buf(n);
    map_fill(exec, n, buf.data(), fn);
    return fixed_order_sum(buf);
}

template <class F>
double map_sum(std::size_t n, F&& fn) {
    return map_sum(Exec::OpenMP, n, fn);
}

}  // namespace logsob::par
