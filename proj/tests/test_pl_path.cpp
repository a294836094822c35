#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "sigtree/errors.hpp"
#include "sigtree/pl_path.hpp"
#include "sigtree/signature.hpp"
#include "test_util.hpp"

using namespace sigtree;

namespace {

bool verts_eq(const PLPath& p, std::vector<Point> expect, double tol = 1e-12) {
    const auto v = p.vertices();
    if (v.size() != expect.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t c = 0; c < v[i].size(); ++c)
            if (std::abs(v[i][c] - expect[i][c]) > tol) return false;
    return true;
}

// Random word of unit axis steps ±e_axis, as letters ±(axis+1).
std::vector<int> lattice_letters(int dim, int len, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> axis(1, dim);
    std::bernoulli_distribution neg(0.5);
    std::vector<int> out;
    for (int i = 0; i < len; ++i) out.push_back(neg(rng) ? -axis(rng) : axis(rng));
    return out;
}

PLPath lattice_path(int dim, const std::vector<int>& letters) {
    std::vector<Point> incs;
    for (int l : letters) {
        Point d(static_cast<std::size_t>(dim), 0.0);
        d[static_cast<std::size_t>(std::abs(l) - 1)] = l > 0 ? 1.0 : -1.0;
        incs.push_back(std::move(d));
    }
    return PLPath::from_increments(Point(static_cast<std::size_t>(dim), 0.0), std::move(incs));
}

}  // namespace

TEST_CASE("length") {
    CHECK(PLPath::constant({1.0, 2.0}).length() == 0.0);
    CHECK(PLPath::from_vertices({{0, 0}, {1, 0}, {1, 1}}).length() == 2.0);
    CHECK(PLPath::from_vertices({{0, 0}, {3, 4}}).length() == 5.0);
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(PLPath::from_vertices(std::vector<Point>{}), DomainError);
    CHECK_THROWS_AS(PLPath::from_vertices({{0, 0}, {1}}), ShapeError);
    CHECK_THROWS_AS(PLPath::from_vertices({{0, 0}, {1, std::nan("")}}), DomainError);
    CHECK_THROWS_AS(concat(PLPath::from_vertices({{0, 0}, {1, 0}}), PLPath::from_vertices({{0, 0}, {1, 0}}), false),
                    DomainError);
    CHECK_THROWS_AS(concat(PLPath::constant({0, 0}), PLPath::constant({0, 0, 0})), ShapeError);
}

TEST_CASE("concat, reverse, translate") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = testutil::random_pl(3, 4, rng);
        const auto q = testutil::random_pl(3, 3, rng);
        CHECK(same_vertices(normalize(concat(p, PLPath::constant(p.end()))), normalize(p), 1e-12));
        CHECK(same_vertices(reverse(reverse(p)), p, 1e-12));
        CHECK(concat(p, q).length() == doctest::Approx(p.length() + q.length()).epsilon(1e-14));
        CHECK(reverse(p).length() == doctest::Approx(p.length()).epsilon(1e-14));
        const auto c = concat(p, q);
        CHECK(same_vertices(PLPath::constant(c.start()), PLPath::constant(p.start()), 0.0));
    }
    const auto a = PLPath::from_vertices({{0, 0}, {1, 0}});
    const auto b = PLPath::from_vertices({{1, 0}, {1, 1}});
    CHECK(verts_eq(concat(a, b, false), {{0, 0}, {1, 0}, {1, 1}}));
    CHECK(verts_eq(translate(a, Point{2, 3}), {{2, 3}, {3, 3}}));
    CHECK(verts_eq(anchor_at_origin(b), {{0, 0}, {0, 1}}));
}

TEST_CASE("sample_curve") {
    const auto line = sample_curve([](double t) { return Point{2 * t, t}; }, 7);
    CHECK(line.segment_count() == 7);
    CHECK(normalize(line).vertices().size() == 2);

    const auto circle = [](double t) {
        return Point{std::cos(2 * std::numbers::pi * t), std::sin(2 * std::numbers::pi * t)};
    };
    CHECK(verts_eq(sample_curve(circle, 4), {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 0}}, 1e-15));
    double prev = 0.0;
    for (int m : {4, 16, 64}) {
        const double l = sample_curve(circle, m).length();
        CHECK(l <= 2 * std::numbers::pi);
        CHECK(l > prev);
        prev = l;
    }
    CHECK_THROWS_AS(sample_curve(circle, 0), DomainError);
}

TEST_CASE("normalize") {
    CHECK(verts_eq(normalize(PLPath::from_vertices({{0, 0}, {1, 0}, {2, 0}})), {{0, 0}, {2, 0}}));
    CHECK(verts_eq(normalize(PLPath::from_vertices({{0, 0}, {1, 0}, {1, 0}, {1, 1}})), {{0, 0}, {1, 0}, {1, 1}}));
    const auto lp = PLPath::from_vertices({{0, 0}, {1, 0}, {1, 1}});
    CHECK(same_vertices(normalize(lp), lp, 0.0));
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = refine(testutil::random_pl(2, 5, rng), 3);
        CHECK(std::abs(normalize(p).length() - p.length()) <= 1e-12 * (1 + p.length()));
        CHECK(normalize(p).segment_count() == 5);
    }
}

TEST_CASE("tree_reduce examples") {
    CHECK(verts_eq(tree_reduce(PLPath::from_vertices({{0, 0}, {1, 0}, {0, 0}})), {{0, 0}}));
    CHECK(verts_eq(tree_reduce(PLPath::from_vertices({{0, 0}, {2, 0}, {1, 0}, {1, 1}})), {{0, 0}, {1, 0}, {1, 1}}));
    CHECK(verts_eq(tree_reduce(PLPath::from_vertices({{0, 0}, {1, 0}, {1, 1}, {1, 0}, {2, 0}})), {{0, 0}, {2, 0}}));
    CHECK(verts_eq(tree_reduce(PLPath::constant({3, 4})), {{3, 4}}));
    // Incoming segment longer than the one it cancels.
    CHECK(verts_eq(tree_reduce(PLPath::from_vertices({{0, 0}, {0, 1}, {1, 1}, {-1, 1}})),
                   {{0, 0}, {0, 1}, {-1, 1}}));
    CHECK(verts_eq(tree_reduce(PLPath::from_vertices({{0, 0}, {1, 0}, {1, 1}, {1, -1}, {0, -1}})),
                   {{0, 0}, {1, 0}, {1, -1}, {0, -1}}));
}

TEST_CASE("is_tree_like") {
    CHECK(is_tree_like(PLPath::from_vertices({{0, 0}, {1, 1}, {0, 0}})));
    CHECK_FALSE(is_tree_like(PLPath::from_vertices({{0, 0}, {1, 0}, {1, 1}})));
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = testutil::random_pl(3, 5, rng);
        CHECK(is_tree_like(concat(a, reverse(a))));
    }
}

TEST_CASE("tree_reduce agrees with free reduction of lattice words") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 300; ++trial) {
        const int dim = 1 + trial % 3;
        const auto letters = lattice_letters(dim, 2 + trial % 14, rng);
        const auto reduced = oracle::free_reduce(letters);
        const auto got = tree_reduce(lattice_path(dim, letters));
        CHECK(got.length() == doctest::Approx(static_cast<double>(reduced.size())));
        CHECK(same_vertices(got, normalize(lattice_path(dim, reduced)), 1e-12));
    }
}

TEST_CASE("tree_reduce invariants") {
    std::mt19937_64 rng(59);
    std::uniform_int_distribution<int> pick(0, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 1 + trial % 3;
        // Mix random segments with partial backtracks so reductions happen.
        auto p = testutil::random_pl(dim, 3, rng);
        for (int extra = 0; extra < 3; ++extra) {
            const double s = 0.2 * (1 + pick(rng));
            p = pick(rng) < 3 ? concat(p, reverse(subpath(p, 1.0 - s, 1.0))) : concat(p, testutil::random_pl(dim, 1, rng));
        }
        const auto r = tree_reduce(p);
        CHECK(same_vertices(tree_reduce(r), r, 0.0));
        CHECK(r.length() <= p.length() + 1e-12);
        for (std::size_t c = 0; c < static_cast<std::size_t>(dim); ++c) {
            CHECK(std::abs(r.start()[c] - p.start()[c]) <= 1e-12);
            CHECK(std::abs(r.end()[c] - p.end()[c]) <= 1e-9);
        }
        const auto& inc = r.increments();
        for (std::size_t i = 0; i + 1 < inc.size(); ++i) {
            double dot = 0.0;
            for (std::size_t c = 0; c < inc[i].size(); ++c) dot += inc[i][c] * inc[i + 1][c];
            CHECK(dot / (norm(inc[i]) * norm(inc[i + 1])) > -1.0 + 1e-12);
        }
        const int k = 1 + trial % 4;
        CHECK(rho_dist(signature(p, k).tensor(), signature(r, k).tensor()) <= 1e-9);
        // Resampled copy reduces to the same path.
        if (!r.is_constant()) CHECK(same_vertices(tree_reduce(refine(p, 3)), r, 1e-9));
    }
}

TEST_CASE("subpath and at_fraction") {
    const auto lp = PLPath::from_vertices({{0, 0}, {1, 0}, {1, 1}});
    CHECK(verts_eq(PLPath::constant(lp.at_fraction(0.25)), {{0.5, 0}}));
    CHECK(verts_eq(PLPath::constant(lp.at_fraction(0.75)), {{1, 0.5}}));
    CHECK(verts_eq(subpath(lp, 0.25, 0.75), {{0.5, 0}, {1, 0}, {1, 0.5}}));
    CHECK(verts_eq(refine(lp, 2), {{0, 0}, {0.5, 0}, {1, 0}, {1, 0.5}, {1, 1}}));
}
