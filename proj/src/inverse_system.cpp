#include "sigtree/inverse_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sigtree/errors.hpp"

namespace sigtree {

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

bool map_in_range(const FiniteMap& map, std::size_t domain, std::size_t codomain) {
    return map.size() == domain &&
           std::all_of(map.begin(), map.end(), [codomain](std::size_t y) { return y < codomain; });
}

}  // namespace

std::vector<std::string> metric_violations(const FinitePointedSpace& space) {
    std::vector<std::string> out;
    const std::size_t n = space.size();
    if (space.dist.size() != n) {
        out.push_back("distance matrix has " + std::to_string(space.dist.size()) + " rows for " +
                      std::to_string(n) + " labels");
        return out;
    }
    for (const auto& row : space.dist)
        if (row.size() != n) {
            out.push_back("distance matrix is not square");
            return out;
        }
    if (n == 0) out.push_back("space is empty");
    if (space.base >= n && n > 0) out.push_back("base index out of range");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dij = space.dist[i][j];
            if (!std::isfinite(dij) || dij < 0.0)
                out.push_back("d(" + space.labels[i] + "," + space.labels[j] + ") is negative or not finite");
            if (std::abs(dij - space.dist[j][i]) > kDistanceTol)
                out.push_back("asymmetric pair (" + space.labels[i] + "," + space.labels[j] + ")");
            if ((i == j) != (dij <= kDistanceTol))
                out.push_back("d(" + space.labels[i] + "," + space.labels[j] + ") = " + fmt_double(dij) +
                              " violates d(x,y) = 0 iff x = y");
            for (std::size_t k = 0; k < n; ++k)
                if (dij > space.dist[i][k] + space.dist[k][j] + kDistanceTol)
                    out.push_back("triangle inequality fails for (" + space.labels[i] + "," +
                                  space.labels[k] + "," + space.labels[j] + ")");
        }
    }
    return out;
}

FiniteMap BondingChain::compose(std::size_t from, std::size_t to) const {
    if (from >= levels() || to > from) throw DomainError("compose: levels out of range");
    FiniteMap out(spaces[from].size());
    for (std::size_t x = 0; x < out.size(); ++x) {
        std::size_t p = x;
        for (std::size_t lvl = from; lvl > to; --lvl) p = maps[lvl - 1].at(p);
        out[x] = p;
    }
    return out;
}

ChainReport validate_chain(const BondingChain& chain) {
    ChainReport report;
    auto add = [&](std::string kind, std::size_t level, std::vector<std::size_t> pts, double dd,
                   double cd, std::string msg) {
        report.violations.push_back({std::move(kind), level, std::move(pts), dd, cd, std::move(msg)});
    };

    for (std::size_t i = 0; i < chain.levels(); ++i)
        for (auto& msg : metric_violations(chain.spaces[i])) add("metric", i, {}, 0, 0, msg);
    if (chain.maps.size() + 1 != chain.levels() && !chain.spaces.empty()) {
        add("shape", 0, {}, 0, 0, "expected " + std::to_string(chain.levels() - 1) + " bonding maps");
        return report;
    }
    if (!report.valid()) return report;

    bool shapes_ok = true;
    for (std::size_t i = 0; i < chain.maps.size(); ++i) {
        const auto& dom = chain.spaces[i + 1];
        const auto& cod = chain.spaces[i];
        const auto& map = chain.maps[i];
        if (!map_in_range(map, dom.size(), cod.size())) {
            add("shape", i + 1, {}, 0, 0, "bonding map has wrong size or image out of range");
            shapes_ok = false;
            continue;
        }
        if (map[dom.base] != cod.base)
            add("base", i + 1, {dom.base}, 0, 0, "bonding map does not preserve the base point");
        for (std::size_t x = 0; x < dom.size(); ++x)
            for (std::size_t y = x + 1; y < dom.size(); ++y) {
                const double dd = dom.d(x, y);
                const double cd = cod.d(map[x], map[y]);
                if (cd > dd + kDistanceTol)
                    add("lipschitz", i + 1, {x, y}, dd, cd,
                        "d(" + cod.labels[map[x]] + "," + cod.labels[map[y]] + ") = " + fmt_double(cd) +
                            " > d(" + dom.labels[x] + "," + dom.labels[y] + ") = " + fmt_double(dd));
            }
    }
    if (!shapes_ok) return report;

    // The induced compositions must satisfy π^j_k ∘ π^i_j = π^i_k.
    for (std::size_t i = 0; i < chain.levels(); ++i) {
        if (chain.compose(i, i) != [&] {
                FiniteMap id(chain.spaces[i].size());
                for (std::size_t x = 0; x < id.size(); ++x) id[x] = x;
                return id;
            }())
            add("coherence", i, {}, 0, 0, "π^i_i is not the identity");
        for (std::size_t j = 0; j <= i; ++j) {
            const auto ij = chain.compose(i, j);
            for (std::size_t k = 0; k <= j; ++k) {
                const auto jk = chain.compose(j, k);
                const auto ik = chain.compose(i, k);
                for (std::size_t x = 0; x < ij.size(); ++x)
                    if (jk[ij[x]] != ik[x])
                        add("coherence", i, {x, j, k}, 0, 0, "composition law fails");
            }
        }
    }
    return report;
}

SubmetryResult is_submetry(const FiniteMap& map, const FinitePointedSpace& domain,
                           const FinitePointedSpace& codomain, bool parallel) {
    SubmetryResult result;
    if (!map_in_range(map, domain.size(), codomain.size())) {
        result.is_submetry = false;
        result.certificate = SubmetryCertificate{"shape", 0, 0, 0, 0, 0.0, 0.0};
        return result;
    }
    const auto nx = static_cast<std::ptrdiff_t>(domain.size());
    const std::size_t ny = codomain.size();

    // Per-x first violation; merged serially so the certificate is deterministic.
    std::vector<std::optional<SubmetryCertificate>> lipschitz(domain.size());
    std::vector<std::optional<SubmetryCertificate>> fiber(domain.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t xi = 0; xi < nx; ++xi) {
        const auto x = static_cast<std::size_t>(xi);
        const std::size_t y = map[x];
        for (std::size_t xp = 0; xp < domain.size() && !lipschitz[x]; ++xp) {
            const double cd = codomain.d(y, map[xp]);
            if (cd > domain.d(x, xp) + kDistanceTol)
                lipschitz[x] = SubmetryCertificate{"lipschitz", x, xp, y, map[xp], domain.d(x, xp), cd};
        }
        for (std::size_t yp = 0; yp < ny && !fiber[x]; ++yp) {
            const double required = codomain.d(y, yp);
            double best = std::numeric_limits<double>::infinity();
            bool found = false;
            for (std::size_t xp = 0; xp < domain.size(); ++xp) {
                if (map[xp] != yp) continue;
                const double dd = domain.d(x, xp);
                if (std::abs(dd - required) < std::abs(best - required)) best = dd;
                if (std::abs(dd - required) <= kDistanceTol) {
                    found = true;
                    break;
                }
            }
            if (!found) fiber[x] = SubmetryCertificate{"fiber", x, x, y, yp, required, best};
        }
    }
    for (const auto* list : {&lipschitz, &fiber})
        for (const auto& c : *list)
            if (c) {
                result.is_submetry = false;
                result.certificate = c;
                return result;
            }
    return result;
}

std::vector<std::vector<double>> fiber_distances(const FiniteMap& map,
                                                 const FinitePointedSpace& domain,
                                                 const FinitePointedSpace& codomain) {
    if (!map_in_range(map, domain.size(), codomain.size()))
        throw DomainError("fiber_distances: map does not match the spaces");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> out(codomain.size(), std::vector<double>(codomain.size(), inf));
    for (std::size_t x = 0; x < domain.size(); ++x)
        for (std::size_t xp = 0; xp < domain.size(); ++xp) {
            double& slot = out[map[x]][map[xp]];
            slot = std::min(slot, domain.d(x, xp));
        }
    return out;
}

FiniteLimit finite_inverse_limit(const BondingChain& chain, double radius) {
    if (chain.levels() == 0) throw DomainError("finite_inverse_limit: empty chain");
    const auto report = validate_chain(chain);
    if (!report.valid())
        throw DomainError("finite_inverse_limit: invalid chain: " + report.violations.front().message);

    const std::size_t top = chain.levels() - 1;
    FiniteLimit limit;
    std::vector<FiniteMap> down(chain.levels());
    for (std::size_t lvl = 0; lvl <= top; ++lvl) down[lvl] = chain.compose(top, lvl);

    // A thread is determined by its top coordinate.
    for (std::size_t t = 0; t < chain.spaces[top].size(); ++t) {
        std::vector<std::size_t> coords(chain.levels());
        bool inside = true;
        for (std::size_t lvl = 0; lvl <= top; ++lvl) {
            coords[lvl] = down[lvl][t];
            const auto& sp = chain.spaces[lvl];
            if (sp.d(sp.base, coords[lvl]) > radius + kDistanceTol) inside = false;
        }
        if (inside) limit.threads.push_back(std::move(coords));
    }

    auto& space = limit.space;
    const std::size_t n = limit.threads.size();
    space.dist.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
        std::string label = "(";
        for (std::size_t lvl = 0; lvl <= top; ++lvl) {
            if (lvl) label += ",";
            label += chain.spaces[lvl].labels[limit.threads[a][lvl]];
        }
        space.labels.push_back(label + ")");
        for (std::size_t b = 0; b < n; ++b) {
            double d = 0.0;
            for (std::size_t lvl = 0; lvl <= top; ++lvl)
                d = std::max(d, chain.spaces[lvl].d(limit.threads[a][lvl], limit.threads[b][lvl]));
            space.dist[a][b] = d;
        }
        bool is_base = true;
        for (std::size_t lvl = 0; lvl <= top; ++lvl)
            is_base = is_base && limit.threads[a][lvl] == chain.spaces[lvl].base;
        if (is_base) space.base = a;
    }

    // Reachable points per level and the first level after which counts stop changing.
    std::vector<std::size_t> reach(chain.levels());
    for (std::size_t lvl = 0; lvl <= top; ++lvl) {
        std::vector<bool> hit(chain.spaces[lvl].size(), false);
        for (std::size_t x : down[lvl]) hit[x] = true;
        reach[lvl] = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true));
    }
    std::size_t from = top;
    while (from > 0 && reach[from - 1] == reach[top]) --from;
    if (from < top) limit.stabilizes_at = from;
    return limit;
}

FiniteMap limit_projection(const FiniteLimit& limit, std::size_t level) {
    FiniteMap out;
    out.reserve(limit.threads.size());
    for (const auto& t : limit.threads) out.push_back(t.at(level));
    return out;
}

UniversalMapResult universal_map(const BondingChain& chain, const FiniteLimit& limit,
                                 const FinitePointedSpace& receiver,
                                 const std::vector<FiniteMap>& family) {
    UniversalMapResult res;
    auto add = [&](std::string kind, std::size_t level, std::size_t point, std::string msg) {
        res.violations.push_back({std::move(kind), level, point, std::move(msg)});
    };
    if (family.size() != chain.levels()) {
        add("shape", 0, 0, "family must have one map per level");
        return res;
    }
    for (std::size_t i = 0; i < family.size(); ++i)
        if (!map_in_range(family[i], receiver.size(), chain.spaces[i].size())) {
            add("shape", i, 0, "u_" + std::to_string(i + 1) + " has wrong size or image out of range");
            return res;
        }

    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto& sp = chain.spaces[i];
        if (family[i][receiver.base] != sp.base)
            add("base", i, receiver.base, "u_" + std::to_string(i + 1) + " does not preserve the base point");
        for (std::size_t y = 0; y < receiver.size(); ++y)
            for (std::size_t yp = y + 1; yp < receiver.size(); ++yp)
                if (sp.d(family[i][y], family[i][yp]) > receiver.d(y, yp) + kDistanceTol)
                    add("lipschitz", i, y,
                        "u_" + std::to_string(i + 1) + " increases d(" + receiver.labels[y] + "," +
                            receiver.labels[yp] + ")");
        if (i + 1 < family.size())
            for (std::size_t y = 0; y < receiver.size(); ++y)
                if (chain.maps[i][family[i + 1][y]] != family[i][y])
                    add("incompatible", i, y,
                        "π ∘ u_" + std::to_string(i + 2) + " != u_" + std::to_string(i + 1) + " at " +
                            receiver.labels[y]);
    }
    if (!res.ok()) return res;

    // Exhaust candidate threads for each point.
    res.map.assign(receiver.size(), 0);
    res.unique = true;
    for (std::size_t y = 0; y < receiver.size(); ++y) {
        std::size_t candidates = 0;
        for (std::size_t t = 0; t < limit.threads.size(); ++t) {
            bool match = true;
            for (std::size_t i = 0; i < family.size() && match; ++i)
                match = limit.threads[t][i] == family[i][y];
            if (match) {
                if (candidates == 0) res.map[y] = t;
                ++candidates;
            }
        }
        if (candidates == 0)
            add("radius", 0, y, "no thread within the radius matches " + receiver.labels[y]);
        if (candidates != 1) res.unique = false;
    }
    if (!res.ok()) return res;

    res.base_preserving = res.map[receiver.base] == limit.space.base;
    res.lipschitz = true;
    for (std::size_t y = 0; y < receiver.size(); ++y)
        for (std::size_t yp = 0; yp < receiver.size(); ++yp)
            if (limit.space.d(res.map[y], res.map[yp]) > receiver.d(y, yp) + kDistanceTol)
                res.lipschitz = false;
    return res;
}

BondingChain counterexample_chain(std::size_t levels) {
    if (levels == 0) throw DomainError("counterexample_chain: at least one level required");
    BondingChain chain;
    for (std::size_t n = 1; n <= levels; ++n) {
        FinitePointedSpace sp;
        for (std::size_t i = 1; i <= n; ++i) sp.labels.push_back("a" + std::to_string(i));
        sp.dist.assign(n, std::vector<double>(n, 1.0));
        for (std::size_t i = 0; i < n; ++i) sp.dist[i][i] = 0.0;
        sp.base = 0;
        chain.spaces.push_back(std::move(sp));
    }
    for (std::size_t n = 1; n < levels; ++n) {
        FiniteMap pi(n + 1);
        for (std::size_t i = 0; i < n; ++i) pi[i] = i;
        pi[n] = n - 1;  // a_{n+1} -> a_n
        chain.maps.push_back(std::move(pi));
    }
    return chain;
}

FinitePointedSpace counterexample_receiver(std::size_t m, double far) {
    if (m == 0) throw DomainError("counterexample_receiver: m must be >= 1");
    FinitePointedSpace y;
    for (std::size_t i = 1; i <= m; ++i) y.labels.push_back("a" + std::to_string(i));
    for (std::size_t i = 1; i <= m; ++i) y.labels.push_back("b" + std::to_string(i));
    y.labels.push_back("b");
    const std::size_t n = 2 * m + 1;
    auto is_a = [m](std::size_t p) { return p < m; };
    y.dist.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            y.dist[p][q] = (is_a(p) != is_a(q)) ? far : 1.0;
        }
    y.base = 0;
    return y;
}

std::vector<FiniteMap> counterexample_family(std::size_t m, std::size_t levels) {
    std::vector<FiniteMap> family;
    for (std::size_t n = 1; n <= levels; ++n) {
        FiniteMap u(2 * m + 1, n - 1);  // default: a_n
        for (std::size_t i = 1; i <= std::min(n, m); ++i) {
            u[i - 1] = i - 1;      // a_i
            u[m + i - 1] = i - 1;  // b_i
        }
        family.push_back(std::move(u));
    }
    return family;
}

}  // namespace sigtree
