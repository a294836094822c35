#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include "sigtree/cc_norm.hpp"
#include "sigtree/errors.hpp"
#include "sigtree/limit_space.hpp"
#include "test_util.hpp"

using namespace sigtree;

namespace {

LimitElement seg(double x, double y) { return LimitElement::from_path(PLPath::from_vertices({{0, 0}, {x, y}})); }

}  // namespace

TEST_CASE("canonical representatives") {
    const auto x = LimitElement::from_path(PLPath::from_vertices({{5, 5}, {6, 5}, {6, 6}, {6, 5}, {7, 5}}));
    CHECK(x == seg(2, 0));
    CHECK(x.rep().start() == Point{0.0, 0.0});
    CHECK(LimitElement::identity(2).is_identity());
    CHECK(LimitElement::from_path(PLPath::from_vertices({{1, 1}, {2, 3}, {1, 1}})).is_identity());
    CHECK_THROWS_AS(LimitElement::identity(0), DomainError);
}

TEST_CASE("group law") {
    const auto one = LimitElement::identity(2);
    const auto e1 = seg(1, 0);
    const auto e2 = seg(0, 1);
    CHECK(e1 * one == e1);
    CHECK(one * e1 == e1);
    CHECK(inverse(e1) == seg(-1, 0));
    const auto l = mul(e1, e2);
    CHECK(same_vertices(l.rep(), PLPath::from_vertices({{0, 0}, {1, 0}, {1, 1}}), 0.0));
    CHECK(testutil::max_abs_diff(l.level(2).tensor(),
                                 signature(PLPath::from_vertices({{0, 0}, {1, 0}, {1, 1}}), 2).tensor()) <= 1e-15);
    CHECK_THROWS_AS(e1 * LimitElement::identity(3), ShapeError);

    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 30; ++trial) {
        const auto x = LimitElement::from_path(testutil::random_pl(2 + trial % 2, 4, rng));
        const auto y = LimitElement::from_path(testutil::random_pl(2 + trial % 2, 4, rng));
        CHECK((x * x.inverse()).is_identity());
        CHECK((x.inverse() * x).is_identity());
        for (int k = 1; k <= 4; ++k)
            CHECK(rho_dist((x * y).level(k).tensor(), (x.level(k) * y.level(k)).tensor()) <= 1e-9);
    }
}

TEST_CASE("tree distance examples") {
    const auto one = LimitElement::identity(2);
    const auto e1 = seg(1, 0);
    CHECK(d_infinity(e1, e1) == 0.0);
    CHECK(d_infinity(e1, seg(0, 1)) == 2.0);
    CHECK(d_infinity(one, LimitElement::from_path(remark_path(1))) == doctest::Approx(1 + std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(d_infinity(e1, LimitElement::identity(3)), ShapeError);
}

TEST_CASE("left invariance is exact") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 2;
        const auto g = LimitElement::from_path(testutil::random_pl(n, 3, rng));
        const auto x = LimitElement::from_path(testutil::random_pl(n, 3, rng));
        const auto y = LimitElement::from_path(testutil::random_pl(n, 3, rng));
        CHECK(d_infinity(g * x, g * y) == d_infinity(x, y));
    }
}

TEST_CASE("four-point condition") {
    const auto a = seg(1, 0);
    const auto b = seg(0, 1);
    CHECK(four_point_check(a, a, b, b));
    CHECK(four_point_check(a, b, a, b));
    // Points along one geodesic: the two largest pair sums coincide.
    const auto s = seg(1, 0.5);
    const auto t = seg(-0.3, 1);
    const auto x = LimitElement::from_path(PLPath::from_vertices({{0, 0}, {0, -1}}));
    const auto y = x * s;
    const auto z = y * t;
    const auto w = LimitElement::identity(2);
    const double dxz = d_infinity(x, z);
    CHECK(dxz == doctest::Approx(d_infinity(x, y) + d_infinity(y, z)));
    CHECK(four_point_check(x, y, z, w));
    CHECK(four_point_excess(1, 1, 1, 1, 1, 1) == 0.0);
    CHECK(four_point_excess(3, 3, 1, 1, 1, 1) == 4.0);

    const auto rep = tree_axioms_experiment(2, 300, 300, 5, 7);
    CHECK(rep.four_point_failures == 0);
    CHECK(rep.metric_failures == 0);
    CHECK(rep.max_four_point_excess <= 1e-9);
    // Lattice words make some quadruples tight.
    CHECK(rep.max_four_point_excess >= -1e-9);
    const auto serial = tree_axioms_experiment(2, 300, 300, 5, 7, false);
    CHECK(serial.max_four_point_excess == rep.max_four_point_excess);
    CHECK(serial.max_triangle_excess == rep.max_triangle_excess);
}

TEST_CASE("remark experiment") {
    const std::vector<int> ns{1, 2, 4, 8, 16};
    const auto rep = remark_experiment(ns, 3);
    REQUIRE(rep.rows.size() == ns.size());
    double prev = 1e300;
    for (const auto& row : rep.rows) {
        const double n = row.n;
        CHECK(std::abs(row.d_inf - (1 + std::sqrt(1 + 1 / (n * n)))) <= 1e-12);
        CHECK(row.d_inf >= 2.0);
        CHECK(row.d_inf < prev);
        prev = row.d_inf;
        REQUIRE(row.level_lower.size() == 3);
        for (double l : row.level_lower) CHECK(l <= 1 / n + 1e-15);
    }
    CHECK(rep.limit_d_inf == 0.0);
    CHECK_THROWS_AS(remark_path(0), DomainError);
}

TEST_CASE("right translations") {
    const auto g = seg(0, 1);
    const auto ys = shrinking_segments(32);
    const auto rows = right_translation_experiment(g, ys);
    REQUIRE(rows.size() == 32);
    for (const auto& row : rows) {
        const double n = row.n;
        CHECK(std::abs(row.d_y_identity - 1 / n) <= 1e-12);
        CHECK(std::abs(row.d_right - (2 + 1 / n)) <= 1e-12);
        CHECK(std::abs(row.d_left - 1 / n) <= 1e-12);
    }
    const auto trivial = right_translation_experiment(LimitElement::identity(2), ys);
    for (const auto& row : trivial) CHECK(row.d_right == row.d_y_identity);
}

TEST_CASE("level cache is safe to share") {
    const auto x = LimitElement::from_path(PLPath::from_vertices({{0, 0}, {1, 2}, {3, 1}, {2, -1}}));
    std::vector<const GroupElement*> seen(8);
    std::vector<std::thread> pool;
    for (int t = 0; t < 8; ++t) pool.emplace_back([&, t] { seen[static_cast<std::size_t>(t)] = &x.level(4); });
    for (auto& th : pool) th.join();
    for (const auto* p : seen) CHECK(p == seen[0]);
    CHECK(x.level(4).tensor() == signature(x.rep(), 4).tensor());
    const auto copy = x;
    CHECK(&copy.level(4) == seen[0]);
}
