#pragma once

// Inner loops of the truncated tensor product.
//
// `serial` is the reference. `parallel` distributes output coefficients over
// OpenMP threads; each coefficient is still summed over split points in
// ascending order, so both produce bitwise-identical results.

#include "sigtree/tensor_algebra.hpp"

namespace sigtree::kernels {

namespace serial {
void truncated_mul(const TruncatedTensor& g, const TruncatedTensor& h, TruncatedTensor& out);
}

namespace parallel {
void truncated_mul(const TruncatedTensor& g, const TruncatedTensor& h, TruncatedTensor& out);
}

/// Levels with at least this many coefficients go through the parallel kernel.
inline constexpr std::size_t kParallelLevelThreshold = 1u << 14;

/// Number of worker threads OpenMP will use (1 without OpenMP).
int max_threads();

/// Apply a thread-count override (e.g. from SIGTREE_THREADS). n <= 0 is ignored.
void set_threads(int n);

}  // namespace sigtree::kernels
