#pragma once

// The inverse limit G^∞(R^n) of the free nilpotent groups, realized through
// path-backed elements.
//
// Every bounded thread is the signature of a rectifiable path, and a path is
// determined by its signature up to reparametrization, translation and
// tree-like reduction. A LimitElement therefore stores the canonical reduced
// representative anchored at the origin. The group law is concatenation
// followed by reduction, and d_∞ is the length of the reduced path joining
// the two elements (the unique geodesic of the metric tree).

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "sigtree/pl_path.hpp"
#include "sigtree/signature.hpp"

namespace sigtree {

class LimitElement {
public:
    /// Canonical element of a path: reduced, normalized, anchored at 0.
    static LimitElement from_path(const PLPath& p);
    /// 1_∞ in R^dim.
    static LimitElement identity(int dim);

    int dim() const noexcept { return rep_.dim(); }
    const PLPath& rep() const noexcept { return rep_; }
    bool is_identity() const noexcept { return rep_.is_constant(); }

    /// π^∞_k: the step-k signature of the representative, memoized.
    const GroupElement& level(int step) const;

    LimitElement inverse() const;
    friend LimitElement operator*(const LimitElement& x, const LimitElement& y);

    /// Vertex-list equality of representatives to 1e-9.
    friend bool operator==(const LimitElement& x, const LimitElement& y);

private:
    struct Cache {
        std::mutex mutex;
        std::map<int, std::shared_ptr<const GroupElement>> levels;
    };

    explicit LimitElement(PLPath canonical);

    PLPath rep_;
    std::shared_ptr<Cache> cache_;
};

LimitElement mul(const LimitElement& x, const LimitElement& y);
LimitElement inverse(const LimitElement& x);

/// Length of tree_reduce(reverse(rep x) * rep y).
double d_infinity(const LimitElement& x, const LimitElement& y);

/// 0-hyperbolicity: for every pairing, d(x,y)+d(z,w) <= max of the other two
/// pair sums + slack.
bool four_point_check(const LimitElement& x, const LimitElement& y, const LimitElement& z,
                      const LimitElement& w, double slack = 1e-9);

/// Largest violation of the four-point inequality over the three pairings
/// (<= 0 for a tree metric).
double four_point_excess(double dxy, double dzw, double dxz, double dyw, double dxw, double dyz);

// -- Experiments ------------------------------------------------------------

/// γ_n: (1,0) -> (0,0) -> (1, 1/n).
PLPath remark_path(int n);
/// The uniform limit of γ_n: (1,0) -> (0,0) -> (1,0).
PLPath remark_limit_path();

struct RemarkRow {
    int n;
    double d_inf;                    // d_∞(1_∞, lift of γ_n)
    std::vector<double> level_lower; // certified lower bound on d_k(1_k, level k), k = 1..max_step
};

struct RemarkReport {
    std::vector<RemarkRow> rows;
    double limit_d_inf;  // d_∞(1_∞, lift of the limit path)
    int max_step;
};

RemarkReport remark_experiment(std::span<const int> n_values, int max_step = 4);

struct RightTranslationRow {
    int n;
    double d_y_identity;  // d_∞(y_n, 1_∞)
    double d_right;       // d_∞(y_n · g, g)
    double d_left;        // d_∞(g · y_n, g)
};

std::vector<RightTranslationRow> right_translation_experiment(const LimitElement& g,
                                                              std::span<const LimitElement> ys);

/// y_n = segment (1/n) e_1 in R^2 for n = 1..count.
std::vector<LimitElement> shrinking_segments(int count);

struct TreeAxiomsReport {
    int quadruples = 0;
    int triples = 0;
    int four_point_failures = 0;
    int metric_failures = 0;
    double max_four_point_excess = 0.0;
    double max_triangle_excess = 0.0;
};

/// Random reduced paths (dim, <= max_segments segments), tested for the
/// four-point condition and the metric axioms. Deterministic given the seed.
TreeAxiomsReport tree_axioms_experiment(int dim, int quadruples, int triples, int max_segments,
                                        std::uint64_t seed, bool parallel = true);

/// Random PL path starting at the origin with Gaussian increments.
PLPath random_path(int dim, int segments, std::uint64_t seed);

}  // namespace sigtree
