#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <omp.h>

namespace sheetlab {

// Worker count used by the parallel kernels. 0 = library default (all cores).
// Results never depend on this value: every loop body writes only to its own
// index, and reductions sum the per-index slots in fixed order afterwards.
namespace detail {
inline int& worker_count() {
    static int w = 0;
    return w;
}
}  // namespace detail

inline void set_workers(int w) {
    if (w < 0) throw std::invalid_argument("workers must be >= 0");
    detail::worker_count() = w;
}

inline int workers() { return detail::worker_count(); }

inline int resolved_workers() {
    int w = detail::worker_count();
    return w == 0 ? omp_get_max_threads() : w;
}

// Parallel map over [0, n): body(i) may touch only state owned by index i.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const int w = resolved_workers();
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
#pragma omp parallel for schedule(static) num_threads(w)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
}

// Serial reference for the map kernel; kept so tests can assert that the
// parallel path produces byte-identical output.
template <class Body>
void serial_for(std::size_t n, Body&& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

// Deterministic sum reduction: term(i) is evaluated in parallel into slot i,
// then the slots are accumulated left to right. Bitwise independent of the
// worker count.
template <class Term>
double parallel_sum(std::size_t n, Term&& term) {
    std::vector<double> slot(n);
    parallel_for(n, [&](std::size_t i) { slot[i] = term(i); });
    double acc = 0.0;
    for (double v : slot) acc += v;
    return acc;
}

template <class Term>
double serial_sum(std::size_t n, Term&& term) {
    std::vector<double> slot(n);
    for (std::size_t i = 0; i < n; ++i) slot[i] = term(i);
    double acc = 0.0;
    for (double v : slot) acc += v;
    return acc;
}

}  // namespace sheetlab
