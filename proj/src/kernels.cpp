#include "sigtree/kernels.hpp"

#include "sigtree/errors.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sigtree::kernels {

namespace {

void check_shapes(const TruncatedTensor& g, const TruncatedTensor& h, const TruncatedTensor& out) {
    if (!g.same_shape(h) || !g.same_shape(out))
        throw ShapeError("truncated_mul: operands must share dim and step");
}

// Entries [lo, hi) of level m of g ⊗ h. Split points run in ascending order,
// as in the serial loop, so every coefficient is summed identically.
void product_block(const TruncatedTensor& g, const TruncatedTensor& h, int m, std::size_t lo, std::size_t hi,
                   std::span<double> dst) {
    std::fill(dst.begin() + static_cast<std::ptrdiff_t>(lo), dst.begin() + static_cast<std::ptrdiff_t>(hi), 0.0);
    for (int i = 0; i <= m; ++i) {
        const auto a = g.level(i);
        const auto b = h.level(m - i);
        const std::size_t tail = b.size();
        std::size_t u = lo / tail, v = lo % tail, w = lo;
        while (w < hi) {
            const double au = a[u];
            const std::size_t stop = std::min(tail, v + (hi - w));
            for (; v < stop; ++v) dst[w++] += au * b[v];
            ++u;
            v = 0;
        }
    }
}

constexpr std::size_t kChunk = 1u << 12;

}  // namespace

namespace serial {

void truncated_mul(const TruncatedTensor& g, const TruncatedTensor& h, TruncatedTensor& out) {
    check_shapes(g, h, out);
    const int k = g.step();
    for (int m = 0; m <= k; ++m) {
        auto dst = out.level(m);
        std::fill(dst.begin(), dst.end(), 0.0);
        for (int i = 0; i <= m; ++i) {
            auto a = g.level(i);
            auto b = h.level(m - i);
            std::size_t w = 0;
            for (double au : a)
                for (double bv : b) dst[w++] += au * bv;
        }
    }
}

}  // namespace serial

namespace parallel {

void truncated_mul(const TruncatedTensor& g, const TruncatedTensor& h, TruncatedTensor& out) {
    check_shapes(g, h, out);
    for (int m = 0; m <= g.step(); ++m) {
        auto dst = out.level(m);
        const auto chunks = static_cast<std::ptrdiff_t>((dst.size() + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static) if (dst.size() >= kParallelLevelThreshold)
        for (std::ptrdiff_t c = 0; c < chunks; ++c) {
            const auto lo = static_cast<std::size_t>(c) * kChunk;
            product_block(g, h, m, lo, std::min(dst.size(), lo + kChunk), dst);
        }
    }
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace sigtree::kernels
