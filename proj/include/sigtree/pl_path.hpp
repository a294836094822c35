#pragma once

// Piecewise-linear paths in R^n.
//
// A PLPath is stored as its start point plus the list of segment increments;
// vertices() materializes the cumulative sums. Keeping increments as the
// primary data makes translation, reversal and concatenation exact in
// floating point, which the tree metric relies on.

#include <functional>
#include <span>
#include <vector>

namespace sigtree {

using Point = std::vector<double>;

class PLPath {
public:
    /// Path through the given vertices (at least one).
    static PLPath from_vertices(std::span<const Point> vertices);
    static PLPath from_vertices(std::initializer_list<Point> vertices);
    /// Path starting at `start` with the given segment increments.
    static PLPath from_increments(Point start, std::vector<Point> increments);
    /// Single-vertex path.
    static PLPath constant(Point at);

    int dim() const noexcept { return static_cast<int>(start_.size()); }
    std::size_t segment_count() const noexcept { return increments_.size(); }
    const Point& start() const noexcept { return start_; }
    const std::vector<Point>& increments() const noexcept { return increments_; }
    Point end() const;
    std::vector<Point> vertices() const;

    /// Sum of Euclidean segment lengths.
    double length() const;
    bool is_constant() const noexcept { return increments_.empty(); }

    /// Point at arclength fraction t in [0, 1]; constant paths return start().
    Point at_fraction(double t) const;

private:
    PLPath(Point start, std::vector<Point> increments)
        : start_(std::move(start)), increments_(std::move(increments)) {}

    Point start_;
    std::vector<Point> increments_;
};

/// Tolerance on normalized direction dot products for "same" / "opposite".
inline constexpr double kDirectionTol = 1e-12;

double norm(std::span<const double> v);

/// Concatenation p * q. If end(p) != start(q) (beyond 1e-12) and auto_translate
/// is false, throws DomainError; otherwise q is translated onto end(p).
PLPath concat(const PLPath& p, const PLPath& q, bool auto_translate = true);
PLPath reverse(const PLPath& p);
PLPath translate(const PLPath& p, std::span<const double> offset);
/// Same path, starting at the origin.
PLPath anchor_at_origin(const PLPath& p);
/// Scales every vertex by lambda (about the origin).
PLPath scale(const PLPath& p, double lambda);

/// Vertices f(i/m) for i = 0..m.
PLPath sample_curve(const std::function<Point(double)>& f, int segments);

/// Drops zero-length segments and merges consecutive same-direction segments.
PLPath normalize(const PLPath& p);

/// Cancels exactly backtracking segments (stack reduction) and merges
/// collinear survivors. The result is a fixed point with the same endpoints.
PLPath tree_reduce(const PLPath& p);

/// True iff tree_reduce(p) is constant.
bool is_tree_like(const PLPath& p);

/// Subdivides every segment into `pieces` equal collinear parts.
PLPath refine(const PLPath& p, int pieces);

/// Sub-path between arclength fractions s <= t.
PLPath subpath(const PLPath& p, double s, double t);

/// Vertex-list equality after normalization, to `tol` per coordinate.
bool same_vertices(const PLPath& a, const PLPath& b, double tol = 1e-9);

}  // namespace sigtree
