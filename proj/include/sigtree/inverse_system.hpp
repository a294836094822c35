#pragma once

// Finite inverse systems of pointed metric spaces, checked by brute force.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sigtree {

/// Map between finite spaces, as image indices.
using FiniteMap = std::vector<std::size_t>;

struct FinitePointedSpace {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> dist;
    std::size_t base = 0;

    std::size_t size() const noexcept { return labels.size(); }
    double d(std::size_t i, std::size_t j) const { return dist[i][j]; }
};

/// Tolerance for every distance comparison in this module.
inline constexpr double kDistanceTol = 1e-12;

/// Human-readable descriptions of every metric-axiom violation; empty if valid.
std::vector<std::string> metric_violations(const FinitePointedSpace& space);

/// Chain X_1 <- X_2 <- ... <- X_N; maps[i] : spaces[i+1] -> spaces[i].
struct BondingChain {
    std::vector<FinitePointedSpace> spaces;
    std::vector<FiniteMap> maps;

    std::size_t levels() const noexcept { return spaces.size(); }
    /// Induced π^from_to (0-based levels, from >= to).
    FiniteMap compose(std::size_t from, std::size_t to) const;
};

struct ChainViolation {
    std::string kind;  // "metric", "shape", "base", "lipschitz", "coherence"
    std::size_t level;
    std::vector<std::size_t> points;
    double domain_distance = 0.0;
    double codomain_distance = 0.0;
    std::string message;
};

struct ChainReport {
    std::vector<ChainViolation> violations;
    bool valid() const noexcept { return violations.empty(); }
};

ChainReport validate_chain(const BondingChain& chain);

/// Certificate that a map is not a submetry: from point `x` in the fiber over
/// `y`, no point of the fiber over `y_prime` lies at distance d(y, y_prime).
struct SubmetryCertificate {
    std::string reason;  // "lipschitz", "fiber" or "shape"
    std::size_t x = 0;
    std::size_t x_prime = 0;  // second point for a Lipschitz violation
    std::size_t y = 0;
    std::size_t y_prime = 0;
    double required = 0.0;
    double best = 0.0;  // closest attainable distance (or the offending distance)
};

struct SubmetryResult {
    bool is_submetry = true;
    std::optional<SubmetryCertificate> certificate;
};

/// Brute force over every (x, y') pair. The reported certificate is the
/// lexicographically smallest violation, independent of threading.
SubmetryResult is_submetry(const FiniteMap& map, const FinitePointedSpace& domain,
                           const FinitePointedSpace& codomain, bool parallel = true);

/// dist(π^{-1}(y), π^{-1}(y')) for every codomain pair (infinity for empty fibers).
std::vector<std::vector<double>> fiber_distances(const FiniteMap& map,
                                                 const FinitePointedSpace& domain,
                                                 const FinitePointedSpace& codomain);

struct FiniteLimit {
    FinitePointedSpace space;                       // threads with the max metric
    std::vector<std::vector<std::size_t>> threads;  // per point, its coordinate at each level
    /// First level from which every bonding map restricted to reachable points
    /// is a bijection, if any.
    std::optional<std::size_t> stabilizes_at;
};

/// Threads of the chain within radius R of the base thread. Throws DomainError
/// on an invalid chain.
FiniteLimit finite_inverse_limit(const BondingChain& chain, double radius);

/// Projection of the finite limit onto a level.
FiniteMap limit_projection(const FiniteLimit& limit, std::size_t level);

struct UniversalMapViolation {
    std::string kind;  // "incompatible", "base", "lipschitz", "radius", "shape"
    std::size_t level;
    std::size_t point;
    std::string message;
};

struct UniversalMapResult {
    FiniteMap map;  // Y -> limit points (valid only when ok())
    std::vector<UniversalMapViolation> violations;
    bool unique = false;  // every y has exactly one candidate thread
    bool lipschitz = false;
    bool base_preserving = false;
    bool ok() const noexcept { return violations.empty(); }
};

/// u(y) = (u_i(y))_i for a compatible family u_i : Y -> X_i.
UniversalMapResult universal_map(const BondingChain& chain, const FiniteLimit& limit,
                                 const FinitePointedSpace& receiver,
                                 const std::vector<FiniteMap>& family);

// -- Fixtures ----------------------------------------------------------------

/// X_n = {a_1..a_n} with all distances 1, π(a_i) = a_i for i <= n-1 and
/// π(a_{n+1}) = a_n; levels 1..N, base a_1.
BondingChain counterexample_chain(std::size_t levels);

/// Y_M = {a_1..a_M, b_1..b_M, b}: d(a_i,a_j) = d(b_i,b_j) = d(b_i,b) = 1,
/// d(a_i,b_j) = d(a_i,b) = far (2 for Y, 3/2 for Y'); base a_1.
FinitePointedSpace counterexample_receiver(std::size_t m, double far = 2.0);

/// u_n(a_i) = u_n(b_i) = a_i for i <= n, everything else to a_n, for n = 1..levels.
std::vector<FiniteMap> counterexample_family(std::size_t m, std::size_t levels);

}  // namespace sigtree
