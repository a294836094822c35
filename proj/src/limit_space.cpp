#include "sigtree/limit_space.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sigtree/cc_norm.hpp"
#include "sigtree/errors.hpp"

namespace sigtree {

namespace {

void require_same_dim(const LimitElement& x, const LimitElement& y, const char* what) {
    if (x.dim() != y.dim()) throw ShapeError(std::string(what) + ": dimension mismatch");
}

// Words over a small set of axis and diagonal moves with a few lengths, so
// that random elements share prefixes and partially cancel.
PLPath random_lattice_word(int dim, int max_segments, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(0, max_segments);
    std::uniform_int_distribution<int> axis(0, dim - 1);
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> len(1, 4);
    std::bernoulli_distribution flip(0.5);
    const int segs = count(rng);
    std::vector<Point> incs;
    for (int s = 0; s < segs; ++s) {
        Point d(static_cast<std::size_t>(dim), 0.0);
        const double l = 0.5 * len(rng);
        const double sign = flip(rng) ? 1.0 : -1.0;
        if (kind(rng) < 2 || dim == 1) {
            d[static_cast<std::size_t>(axis(rng))] = sign * l;
        } else {
            d[0] = sign * l;
            d[1] = (flip(rng) ? 1.0 : -1.0) * l;
        }
        incs.push_back(std::move(d));
    }
    return PLPath::from_increments(Point(static_cast<std::size_t>(dim), 0.0), std::move(incs));
}

}  // namespace

LimitElement::LimitElement(PLPath canonical)
    : rep_(std::move(canonical)), cache_(std::make_shared<Cache>()) {}

LimitElement LimitElement::from_path(const PLPath& p) {
    return LimitElement(tree_reduce(normalize(anchor_at_origin(p))));
}

LimitElement LimitElement::identity(int dim) {
    if (dim < 1) throw DomainError("LimitElement: dimension must be >= 1");
    return LimitElement(PLPath::constant(Point(static_cast<std::size_t>(dim), 0.0)));
}

const GroupElement& LimitElement::level(int step) const {
    {
        std::lock_guard lock(cache_->mutex);
        auto it = cache_->levels.find(step);
        if (it != cache_->levels.end()) return *it->second;
    }
    // Computed outside the lock; a racing thread may duplicate the work, and
    // the first insertion wins.
    auto value = std::make_shared<const GroupElement>(signature(rep_, step));
    std::lock_guard lock(cache_->mutex);
    return *cache_->levels.emplace(step, std::move(value)).first->second;
}

LimitElement LimitElement::inverse() const { return LimitElement(anchor_at_origin(reverse(rep_))); }

LimitElement operator*(const LimitElement& x, const LimitElement& y) {
    require_same_dim(x, y, "LimitElement::operator*");
    return LimitElement(tree_reduce(concat(x.rep_, y.rep_)));
}

bool operator==(const LimitElement& x, const LimitElement& y) {
    return same_vertices(x.rep_, y.rep_, 1e-9);
}

LimitElement mul(const LimitElement& x, const LimitElement& y) { return x * y; }
LimitElement inverse(const LimitElement& x) { return x.inverse(); }

double d_infinity(const LimitElement& x, const LimitElement& y) {
    require_same_dim(x, y, "d_infinity");
    return tree_reduce(concat(reverse(x.rep()), y.rep())).length();
}

double four_point_excess(double dxy, double dzw, double dxz, double dyw, double dxw, double dyz) {
    const double a = dxy + dzw;
    const double b = dxz + dyw;
    const double c = dxw + dyz;
    return std::max({a - std::max(b, c), b - std::max(a, c), c - std::max(a, b)});
}

bool four_point_check(const LimitElement& x, const LimitElement& y, const LimitElement& z,
                      const LimitElement& w, double slack) {
    const double excess = four_point_excess(d_infinity(x, y), d_infinity(z, w), d_infinity(x, z),
                                            d_infinity(y, w), d_infinity(x, w), d_infinity(y, z));
    return excess <= slack;
}

PLPath remark_path(int n) {
    if (n < 1) throw DomainError("remark_path: n must be >= 1");
    return PLPath::from_vertices({{1.0, 0.0}, {0.0, 0.0}, {1.0, 1.0 / n}});
}

PLPath remark_limit_path() { return PLPath::from_vertices({{1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}); }

RemarkReport remark_experiment(std::span<const int> n_values, int max_step) {
    if (max_step < 1) throw DomainError("remark_experiment: max_step must be >= 1");
    RemarkReport report;
    report.max_step = max_step;
    const auto one = LimitElement::identity(2);
    for (int n : n_values) {
        const auto x = LimitElement::from_path(remark_path(n));
        RemarkRow row{n, d_infinity(one, x), {}};
        for (int k = 1; k <= max_step; ++k)
            row.level_lower.push_back(certified_lower_bound(x.level(k).tensor()));
        report.rows.push_back(std::move(row));
    }
    report.limit_d_inf = d_infinity(one, LimitElement::from_path(remark_limit_path()));
    return report;
}

std::vector<RightTranslationRow> right_translation_experiment(const LimitElement& g,
                                                              std::span<const LimitElement> ys) {
    std::vector<RightTranslationRow> rows;
    const auto one = LimitElement::identity(g.dim());
    int n = 1;
    for (const auto& y : ys) {
        require_same_dim(g, y, "right_translation_experiment");
        rows.push_back({n++, d_infinity(y, one), d_infinity(y * g, g), d_infinity(g * y, g)});
    }
    return rows;
}

std::vector<LimitElement> shrinking_segments(int count) {
    std::vector<LimitElement> ys;
    for (int n = 1; n <= count; ++n)
        ys.push_back(LimitElement::from_path(PLPath::from_vertices({{0.0, 0.0}, {1.0 / n, 0.0}})));
    return ys;
}

PLPath random_path(int dim, int segments, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Point> incs;
    for (int s = 0; s < segments; ++s) {
        Point d(static_cast<std::size_t>(dim));
        for (double& v : d) v = gauss(rng);
        incs.push_back(std::move(d));
    }
    return PLPath::from_increments(Point(static_cast<std::size_t>(dim), 0.0), std::move(incs));
}

TreeAxiomsReport tree_axioms_experiment(int dim, int quadruples, int triples, int max_segments,
                                        std::uint64_t seed, bool parallel) {
    // Elements are drawn serially so the sample does not depend on threading.
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> segs(1, std::max(1, max_segments));
    auto draw = [&](int i) {
        if (i % 2 == 0) return LimitElement::from_path(random_lattice_word(dim, max_segments, rng));
        return LimitElement::from_path(random_path(dim, segs(rng), rng()));
    };
    std::vector<LimitElement> quad;
    for (int i = 0; i < 4 * quadruples; ++i) quad.push_back(draw(i));
    std::vector<LimitElement> tri;
    for (int i = 0; i < 3 * triples; ++i) tri.push_back(draw(i));

    TreeAxiomsReport report;
    report.quadruples = quadruples;
    report.triples = triples;
    int fp_fail = 0;
    double fp_max = -1e300;
#pragma omp parallel for reduction(+ : fp_fail) reduction(max : fp_max) if (parallel)
    for (int q = 0; q < quadruples; ++q) {
        const auto& x = quad[static_cast<std::size_t>(4 * q)];
        const auto& y = quad[static_cast<std::size_t>(4 * q + 1)];
        const auto& z = quad[static_cast<std::size_t>(4 * q + 2)];
        const auto& w = quad[static_cast<std::size_t>(4 * q + 3)];
        const double e = four_point_excess(d_infinity(x, y), d_infinity(z, w), d_infinity(x, z),
                                           d_infinity(y, w), d_infinity(x, w), d_infinity(y, z));
        fp_max = std::max(fp_max, e);
        if (e > 1e-9) ++fp_fail;
    }
    int m_fail = 0;
    double tri_max = -1e300;
#pragma omp parallel for reduction(+ : m_fail) reduction(max : tri_max) if (parallel)
    for (int t = 0; t < triples; ++t) {
        const auto& x = tri[static_cast<std::size_t>(3 * t)];
        const auto& y = tri[static_cast<std::size_t>(3 * t + 1)];
        const auto& z = tri[static_cast<std::size_t>(3 * t + 2)];
        const double dxy = d_infinity(x, y);
        const double dyx = d_infinity(y, x);
        const double dyz = d_infinity(y, z);
        const double dxz = d_infinity(x, z);
        const double excess = dxz - (dxy + dyz);
        tri_max = std::max(tri_max, excess);
        const bool zero_ok = (d_infinity(x, x) == 0.0) && ((dxy == 0.0) == (x == y));
        const bool ok = zero_ok && std::abs(dxy - dyx) <= 1e-12 * (1.0 + dxy) && excess <= 1e-9 &&
                        dxy >= 0.0;
        if (!ok) ++m_fail;
    }
    report.four_point_failures = fp_fail;
    report.metric_failures = m_fail;
    report.max_four_point_excess = quadruples > 0 ? fp_max : 0.0;
    report.max_triangle_excess = triples > 0 ? tri_max : 0.0;
    return report;
}

}  // namespace sigtree
