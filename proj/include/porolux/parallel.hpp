#pragma once

// Thread control and fixed-order reductions. Results never depend on the
// number of threads: reductions sum fixed-size blocks, then the block sums in order.

#include <cstddef>
#include <span>

namespace porolux::parallel {

/// Worker count: POROLUX_THREADS if set and positive, else the hardware count.
int thread_count();

/// Overrides the worker count for this process (0 restores the default).
void set_thread_count(int n);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);
double sum(std::span<const double> a);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace porolux::parallel
