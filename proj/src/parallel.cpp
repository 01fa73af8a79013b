#include "porolux/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace porolux::parallel {

namespace {

constexpr std::size_t kBlock = 4096;
int g_override = 0;

int default_threads() {
    if (const char* env = std::getenv("POROLUX_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return n;
            }
        } catch (...) {
        }
    }
    return std::max(1, omp_get_num_procs());
}

template <class BlockFn>
double blocked_sum(std::size_t n, BlockFn&& fn) {
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    if (nblocks <= 1) {
        return fn(0, n);
    }
    std::vector<double> partial(nblocks, 0.0);
    const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        partial[b] = fn(lo, std::min(n, lo + kBlock));
    }
    double total = 0.0;
    for (double p : partial) {
        total += p;
    }
    return total;
}

}  // namespace

int thread_count() {
    static const int hardware = default_threads();
    return g_override > 0 ? g_override : hardware;
}

void set_thread_count(int n) { g_override = std::max(0, n); }

double dot(std::span<const double> a, std::span<const double> b) {
    return blocked_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            s += a[i] * b[i];
        }
        return s;
    });
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double sum(std::span<const double> a) {
    return blocked_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            s += a[i];
        }
        return s;
    });
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (n > 65536)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

}  // namespace porolux::parallel
