#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "sigtree/errors.hpp"
#include "sigtree/inverse_system.hpp"

using namespace sigtree;

namespace {

FinitePointedSpace discrete(std::size_t n, double d = 1.0) {
    FinitePointedSpace s;
    for (std::size_t i = 0; i < n; ++i) s.labels.push_back("p" + std::to_string(i));
    s.dist.assign(n, std::vector<double>(n, d));
    for (std::size_t i = 0; i < n; ++i) s.dist[i][i] = 0.0;
    return s;
}

FiniteMap identity_map(std::size_t n) {
    FiniteMap m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = i;
    return m;
}

// Shortest-path metric of a random connected graph with integer weights.
FinitePointedSpace random_graph_space(std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> w(1, 3);
    std::bernoulli_distribution edge(0.4);
    const double inf = 1e9;
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> prev(0, i - 1);
        const std::size_t j = prev(rng);
        d[i][j] = d[j][i] = w(rng);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (edge(rng)) d[i][j] = d[j][i] = std::min(d[i][j], static_cast<double>(w(rng)));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    FinitePointedSpace s = discrete(n);
    s.dist = d;
    return s;
}

// X x F with the max metric, and the projection onto X (a submetry).
std::pair<FinitePointedSpace, FiniteMap> product_over(const FinitePointedSpace& x, const FinitePointedSpace& f) {
    FinitePointedSpace p;
    FiniteMap proj;
    for (std::size_t a = 0; a < x.size(); ++a)
        for (std::size_t b = 0; b < f.size(); ++b) {
            p.labels.push_back(x.labels[a] + "." + f.labels[b]);
            proj.push_back(a);
        }
    const std::size_t n = p.labels.size();
    p.dist.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            p.dist[i][j] = std::max(x.d(i / f.size(), j / f.size()), f.d(i % f.size(), j % f.size()));
    p.base = x.base * f.size() + f.base;
    return {p, proj};
}

// The definition, read literally.
bool submetry_oracle(const FiniteMap& m, const FinitePointedSpace& dom, const FinitePointedSpace& cod) {
    for (std::size_t a = 0; a < dom.size(); ++a)
        for (std::size_t b = 0; b < dom.size(); ++b)
            if (cod.d(m[a], m[b]) > dom.d(a, b) + 1e-12) return false;
    for (std::size_t x = 0; x < dom.size(); ++x)
        for (std::size_t yp = 0; yp < cod.size(); ++yp) {
            bool ok = false;
            for (std::size_t xp = 0; xp < dom.size(); ++xp)
                ok = ok || (m[xp] == yp && std::abs(dom.d(x, xp) - cod.d(m[x], yp)) <= 1e-12);
            if (!ok) return false;
        }
    return true;
}

FiniteMap compose(const FiniteMap& g, const FiniteMap& f) {
    FiniteMap out;
    for (std::size_t x : f) out.push_back(g[x]);
    return out;
}

}  // namespace

TEST_CASE("metric validation") {
    CHECK(metric_violations(discrete(4)).empty());
    auto s = discrete(3);
    s.dist[0][2] = s.dist[2][0] = 3.0;
    CHECK_FALSE(metric_violations(s).empty());
    s = discrete(3);
    s.dist[0][1] = 2.0;
    CHECK_FALSE(metric_violations(s).empty());
    s = discrete(3);
    s.dist[0][1] = s.dist[1][0] = 0.0;
    CHECK_FALSE(metric_violations(s).empty());
}

TEST_CASE("chain validation") {
    BondingChain id{{discrete(3), discrete(3), discrete(3)}, {identity_map(3), identity_map(3)}};
    CHECK(validate_chain(id).valid());

    const auto ex = counterexample_chain(6);
    CHECK(validate_chain(ex).valid());
    for (std::size_t i = 0; i < ex.maps.size(); ++i) CHECK(is_submetry(ex.maps[i], ex.spaces[i + 1], ex.spaces[i]).is_submetry);

    // A map that stretches a pair.
    auto wide = discrete(2, 2.0);
    BondingChain bad{{wide, discrete(3)}, {FiniteMap{0, 1, 1}}};
    const auto rep = validate_chain(bad);
    REQUIRE_FALSE(rep.valid());
    CHECK(rep.violations[0].kind == "lipschitz");
    CHECK(rep.violations[0].points == std::vector<std::size_t>{0, 1});
    CHECK(rep.violations[0].domain_distance == 1.0);
    CHECK(rep.violations[0].codomain_distance == 2.0);

    BondingChain base{{discrete(2), discrete(2)}, {FiniteMap{1, 0}}};
    CHECK(validate_chain(base).violations.at(0).kind == "base");
    BondingChain shape{{discrete(2), discrete(2)}, {FiniteMap{0, 5}}};
    CHECK(validate_chain(shape).violations.at(0).kind == "shape");
}

TEST_CASE("submetry checker") {
    CHECK(is_submetry(identity_map(4), discrete(4), discrete(4)).is_submetry);
    // Collapsing two points of a discrete space is still a submetry.
    const auto r = is_submetry(FiniteMap{0, 1, 1}, discrete(3), discrete(2));
    CHECK(r.is_submetry);
    const auto far = is_submetry(FiniteMap{0, 0, 1}, discrete(3), discrete(2, 2.0));
    REQUIRE_FALSE(far.is_submetry);
    CHECK(far.certificate->reason == "lipschitz");

    auto path3 = discrete(3);
    path3.dist = {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
    const auto fib = is_submetry(FiniteMap{0, 1, 1}, path3, discrete(2));
    REQUIRE_FALSE(fib.is_submetry);
    CHECK(fib.certificate->reason == "fiber");
    CHECK(fib.certificate->x == 2);
    CHECK(fib.certificate->y_prime == 0);
    CHECK(fib.certificate->required == 1.0);
    CHECK(fib.certificate->best == 2.0);
}

TEST_CASE("submetry checker agrees with the definition") {
    std::mt19937_64 rng(103);
    int positives = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_graph_space(2 + trial % 4, rng);
        FinitePointedSpace dom;
        FiniteMap m;
        if (trial % 2 == 0) {
            std::tie(dom, m) = product_over(x, random_graph_space(1 + trial % 3, rng));
        } else {
            dom = random_graph_space(3 + trial % 5, rng);
            std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
            for (std::size_t i = 0; i < dom.size(); ++i) m.push_back(pick(rng));
        }
        const bool expect = submetry_oracle(m, dom, x);
        CHECK(is_submetry(m, dom, x).is_submetry == expect);
        CHECK(is_submetry(m, dom, x, false).is_submetry == expect);
        positives += expect;
    }
    CHECK(positives >= 100);
}

TEST_CASE("submetries compose") {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        const auto x = random_graph_space(2 + trial % 3, rng);
        const auto [y, g] = product_over(x, random_graph_space(2, rng));
        const auto [z, f] = product_over(y, random_graph_space(1 + trial % 3, rng));
        REQUIRE(is_submetry(f, z, y).is_submetry);
        REQUIRE(is_submetry(g, y, x).is_submetry);
        CHECK(is_submetry(compose(g, f), z, x).is_submetry);
    }
}

TEST_CASE("finite inverse limit matches product enumeration") {
    auto check = [](const BondingChain& chain, double radius) {
        std::vector<std::size_t> sizes;
        for (const auto& s : chain.spaces) sizes.push_back(s.size());
        auto threads = oracle::product_threads(sizes, chain.maps);
        std::erase_if(threads, [&](const auto& t) {
            for (std::size_t l = 0; l < t.size(); ++l)
                if (chain.spaces[l].d(chain.spaces[l].base, t[l]) > radius + 1e-12) return true;
            return false;
        });
        const auto lim = finite_inverse_limit(chain, radius);
        CHECK(std::set(threads.begin(), threads.end()) ==
              std::set(lim.threads.begin(), lim.threads.end()));
        CHECK(lim.threads.size() == threads.size());
        for (std::size_t a = 0; a < lim.threads.size(); ++a)
            for (std::size_t b = 0; b < lim.threads.size(); ++b) {
                double d = 0.0;
                double prev = 0.0;
                for (std::size_t l = 0; l < chain.levels(); ++l) {
                    const double dl = chain.spaces[l].d(lim.threads[a][l], lim.threads[b][l]);
                    CHECK(dl >= prev);  // 1-Lipschitz bonding maps
                    prev = dl;
                    d = std::max(d, dl);
                }
                CHECK(lim.space.d(a, b) == d);
            }
        CHECK(metric_violations(lim.space).empty());
        for (std::size_t l = 0; l < chain.levels(); ++l)
            CHECK(lim.threads[lim.space.base][l] == chain.spaces[l].base);
        return lim;
    };

    const auto lim5 = check(counterexample_chain(5), 1.0);
    CHECK(lim5.space.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t n = 0; n < 5; ++n) CHECK(lim5.threads[i][n] == std::min(i, n));
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = 0; b < 5; ++b) CHECK(lim5.space.d(a, b) == (a == b ? 0.0 : 1.0));
    CHECK(lim5.space.labels[4] == "(a1,a2,a3,a4,a5)");
    CHECK_FALSE(lim5.stabilizes_at.has_value());

    // Constant chain: isometric to X_1.
    BondingChain id{{discrete(3), discrete(3), discrete(3)}, {identity_map(3), identity_map(3)}};
    const auto limid = check(id, 5.0);
    CHECK(limid.space.dist == discrete(3).dist);
    CHECK(limid.stabilizes_at == std::size_t{0});

    // Random product towers, with a radius cut.
    std::mt19937_64 rng(109);
    for (int trial = 0; trial < 20; ++trial) {
        BondingChain c;
        c.spaces.push_back(random_graph_space(2 + trial % 3, rng));
        for (int l = 0; l < 2; ++l) {
            auto [p, proj] = product_over(c.spaces.back(), random_graph_space(1 + (trial + l) % 3, rng));
            c.spaces.push_back(p);
            c.maps.push_back(proj);
        }
        REQUIRE(validate_chain(c).valid());
        const auto lim = check(c, 1.0 + trial % 4);
        // Level projections of the limit of a submetry chain are submetries when nothing is cut.
        const auto full = finite_inverse_limit(c, 1e9);
        for (std::size_t l = 0; l < c.levels(); ++l) {
            CHECK(is_submetry(limit_projection(full, l), full.space, c.spaces[l]).is_submetry);
            const auto proj = limit_projection(lim, l);
            for (std::size_t a = 0; a < proj.size(); ++a)
                for (std::size_t b = 0; b < proj.size(); ++b)
                    CHECK(c.spaces[l].d(proj[a], proj[b]) <= lim.space.d(a, b));
        }
    }

    BondingChain bad{{discrete(2, 2.0), discrete(2)}, {identity_map(2)}};
    CHECK_THROWS_AS(finite_inverse_limit(bad, 1.0), DomainError);
}

TEST_CASE("counterexample fixtures") {
    const std::size_t n = 5, m = n - 1;
    const auto chain = counterexample_chain(n);
    const auto y = counterexample_receiver(m);
    const auto yp = counterexample_receiver(m, 1.5);
    CHECK(metric_violations(y).empty());
    CHECK(metric_violations(yp).empty());
    const auto family = counterexample_family(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        CHECK(is_submetry(family[i], y, chain.spaces[i]).is_submetry);
        CHECK(is_submetry(family[i], yp, chain.spaces[i]).is_submetry);
    }
    // Fibers over distinct points of X_n sit at distance 1 in Y and Y'.
    for (const auto* recv : {&y, &yp}) {
        const auto fd = fiber_distances(family[m - 1], *recv, chain.spaces[m - 1]);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) CHECK(fd[a][b] == (a == b ? 0.0 : 1.0));
    }

    const auto lim = finite_inverse_limit(chain, 1.0);
    for (const auto* recv : {&y, &yp}) {
        const auto u = universal_map(chain, lim, *recv, family);
        REQUIRE(u.ok());
        CHECK(u.unique);
        CHECK(u.lipschitz);
        CHECK(u.base_preserving);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(u.map[i] == i);
            CHECK(u.map[m + i] == i);
        }
        CHECK(u.map[2 * m] == n - 1);  // the diagonal thread
        const auto s = is_submetry(u.map, *recv, lim.space);
        REQUIRE_FALSE(s.is_submetry);
        CHECK(s.certificate->reason == "fiber");
        CHECK(s.certificate->x == 0);
        CHECK(s.certificate->y_prime == n - 1);
        CHECK(s.certificate->required == 1.0);
        CHECK(s.certificate->best == recv->d(0, 2 * m));
    }
}

TEST_CASE("universal map violations") {
    const auto chain = counterexample_chain(4);
    const auto lim = finite_inverse_limit(chain, 1.0);
    const auto y = counterexample_receiver(3);
    auto family = counterexample_family(3, 4);
    family[1][4] = 0;  // u_2(b2) = a1 breaks π ∘ u_3 = u_2 at b2
    const auto r = universal_map(chain, lim, y, family);
    CHECK_FALSE(r.ok());
    bool seen = false;
    for (const auto& v : r.violations) seen = seen || (v.kind == "incompatible" && v.level == 1 && v.point == 4);
    CHECK(seen);

    // Constant family: everything goes to the base thread.
    std::vector<FiniteMap> constant(4, FiniteMap(y.size(), 0));
    const auto c = universal_map(chain, lim, y, constant);
    REQUIRE(c.ok());
    for (std::size_t p : c.map) CHECK(p == lim.space.base);

    CHECK_FALSE(universal_map(chain, lim, y, std::vector<FiniteMap>(2, FiniteMap(y.size(), 0))).ok());
}
