#include "sigtree/pl_path.hpp"

#include <algorithm>
#include <cmath>

#include "sigtree/errors.hpp"

namespace sigtree {

namespace {

constexpr double kEndpointTol = 1e-12;
constexpr double kZeroLength = 1e-14;
constexpr double kLengthTieTol = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void add_into(Point& a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void require_dim(const Point& p, std::size_t dim) {
    if (p.size() != dim) throw ShapeError("PLPath: vertex dimension mismatch");
    for (double x : p)
        if (!std::isfinite(x)) throw DomainError("PLPath: coordinates must be finite");
}

// Cosine of the angle between two nonzero increments.
double cosine(const Point& a, const Point& b) { return dot(a, b) / (norm(a) * norm(b)); }

}  // namespace

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

PLPath PLPath::from_vertices(std::span<const Point> vertices) {
    if (vertices.empty()) throw DomainError("PLPath: at least one vertex required");
    const std::size_t n = vertices.front().size();
    if (n == 0) throw DomainError("PLPath: dimension must be >= 1");
    require_dim(vertices.front(), n);
    std::vector<Point> incs;
    incs.reserve(vertices.size() - 1);
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        require_dim(vertices[i], n);
        Point d(n);
        for (std::size_t c = 0; c < n; ++c) d[c] = vertices[i][c] - vertices[i - 1][c];
        incs.push_back(std::move(d));
    }
    return PLPath(vertices.front(), std::move(incs));
}

PLPath PLPath::from_vertices(std::initializer_list<Point> vertices) {
    return from_vertices(std::span<const Point>(vertices.begin(), vertices.size()));
}

PLPath PLPath::from_increments(Point start, std::vector<Point> increments) {
    if (start.empty()) throw DomainError("PLPath: dimension must be >= 1");
    require_dim(start, start.size());
    for (const auto& d : increments) require_dim(d, start.size());
    return PLPath(std::move(start), std::move(increments));
}

PLPath PLPath::constant(Point at) { return from_increments(std::move(at), {}); }

Point PLPath::end() const {
    Point p = start_;
    for (const auto& d : increments_) add_into(p, d);
    return p;
}

std::vector<Point> PLPath::vertices() const {
    std::vector<Point> out;
    out.reserve(increments_.size() + 1);
    out.push_back(start_);
    for (const auto& d : increments_) {
        Point p = out.back();
        add_into(p, d);
        out.push_back(std::move(p));
    }
    return out;
}

double PLPath::length() const {
    double total = 0.0;
    for (const auto& d : increments_) total += norm(d);
    return total;
}

Point PLPath::at_fraction(double t) const {
    if (t < 0.0 || t > 1.0) throw DomainError("at_fraction: t must lie in [0, 1]");
    const double total = length();
    Point p = start_;
    if (total == 0.0) return p;
    double remaining = t * total;
    for (const auto& d : increments_) {
        const double len = norm(d);
        if (remaining >= len) {
            add_into(p, d);
            remaining -= len;
            continue;
        }
        const double f = remaining / len;
        for (std::size_t c = 0; c < p.size(); ++c) p[c] += f * d[c];
        return p;
    }
    return p;
}

PLPath concat(const PLPath& p, const PLPath& q, bool auto_translate) {
    if (p.dim() != q.dim()) throw ShapeError("concat: dimension mismatch");
    if (!auto_translate) {
        const Point e = p.end();
        for (std::size_t c = 0; c < e.size(); ++c)
            if (std::abs(e[c] - q.start()[c]) > kEndpointTol)
                throw DomainError("concat: end of first path does not match start of second");
    }
    std::vector<Point> incs = p.increments();
    incs.insert(incs.end(), q.increments().begin(), q.increments().end());
    return PLPath::from_increments(p.start(), std::move(incs));
}

PLPath reverse(const PLPath& p) {
    std::vector<Point> incs;
    incs.reserve(p.segment_count());
    for (auto it = p.increments().rbegin(); it != p.increments().rend(); ++it) {
        Point d = *it;
        for (double& x : d) x = -x;
        incs.push_back(std::move(d));
    }
    return PLPath::from_increments(p.end(), std::move(incs));
}

PLPath translate(const PLPath& p, std::span<const double> offset) {
    if (offset.size() != p.start().size()) throw ShapeError("translate: dimension mismatch");
    Point s = p.start();
    add_into(s, offset);
    return PLPath::from_increments(std::move(s), p.increments());
}

PLPath anchor_at_origin(const PLPath& p) {
    return PLPath::from_increments(Point(p.start().size(), 0.0), p.increments());
}

PLPath scale(const PLPath& p, double lambda) {
    Point s = p.start();
    for (double& x : s) x *= lambda;
    std::vector<Point> incs = p.increments();
    for (auto& d : incs)
        for (double& x : d) x *= lambda;
    return PLPath::from_increments(std::move(s), std::move(incs));
}

PLPath sample_curve(const std::function<Point(double)>& f, int segments) {
    if (segments < 1) throw DomainError("sample_curve: segment count must be >= 1");
    std::vector<Point> verts;
    verts.reserve(static_cast<std::size_t>(segments) + 1);
    for (int i = 0; i <= segments; ++i) verts.push_back(f(static_cast<double>(i) / segments));
    return PLPath::from_vertices(verts);
}

PLPath normalize(const PLPath& p) {
    std::vector<Point> out;
    for (const auto& d : p.increments()) {
        if (norm(d) <= kZeroLength) continue;
        if (!out.empty() && cosine(out.back(), d) >= 1.0 - kDirectionTol)
            add_into(out.back(), d);
        else
            out.push_back(d);
    }
    return PLPath::from_increments(p.start(), std::move(out));
}

PLPath tree_reduce(const PLPath& p) {
    std::vector<Point> stack;
    for (const auto& incoming : p.increments()) {
        if (norm(incoming) <= kZeroLength) continue;
        Point s = incoming;
        bool alive = true;
        while (alive && !stack.empty()) {
            Point& top = stack.back();
            const double c = cosine(top, s);
            if (c >= 1.0 - kDirectionTol) {
                add_into(top, s);
                alive = false;
            } else if (c <= -1.0 + kDirectionTol) {
                const double lt = norm(top);
                const double ls = norm(s);
                if (std::abs(lt - ls) <= kLengthTieTol * std::max(lt, ls)) {
                    stack.pop_back();
                    alive = false;
                } else if (lt > ls) {
                    add_into(top, s);
                    alive = false;
                } else {
                    add_into(s, top);
                    stack.pop_back();
                }
            } else {
                break;
            }
        }
        if (alive) stack.push_back(std::move(s));
    }
    return PLPath::from_increments(p.start(), std::move(stack));
}

bool is_tree_like(const PLPath& p) { return tree_reduce(p).is_constant(); }

PLPath refine(const PLPath& p, int pieces) {
    if (pieces < 1) throw DomainError("refine: pieces must be >= 1");
    std::vector<Point> incs;
    incs.reserve(p.segment_count() * static_cast<std::size_t>(pieces));
    for (const auto& d : p.increments()) {
        Point part = d;
        for (double& x : part) x /= pieces;
        for (int i = 0; i < pieces; ++i) incs.push_back(part);
    }
    return PLPath::from_increments(p.start(), std::move(incs));
}

PLPath subpath(const PLPath& p, double s, double t) {
    if (!(0.0 <= s && s <= t && t <= 1.0))
        throw DomainError("subpath: fractions must satisfy 0 <= s <= t <= 1");
    const double total = p.length();
    if (total == 0.0 || s == t) return PLPath::constant(p.at_fraction(s));
    const double a = s * total;
    const double b = t * total;
    std::vector<Point> incs;
    double pos = 0.0;
    for (const auto& d : p.increments()) {
        const double len = norm(d);
        const double lo = std::max(pos, a);
        const double hi = std::min(pos + len, b);
        if (hi > lo && len > 0.0) {
            if (lo == pos && hi == pos + len) {
                incs.push_back(d);
            } else {
                Point part = d;
                const double f = (hi - lo) / len;
                for (double& x : part) x *= f;
                incs.push_back(std::move(part));
            }
        }
        pos += len;
        if (pos >= b) break;
    }
    return PLPath::from_increments(p.at_fraction(s), std::move(incs));
}

bool same_vertices(const PLPath& a, const PLPath& b, double tol) {
    if (a.dim() != b.dim()) return false;
    const auto va = normalize(a).vertices();
    const auto vb = normalize(b).vertices();
    if (va.size() != vb.size()) return false;
    for (std::size_t i = 0; i < va.size(); ++i)
        for (std::size_t c = 0; c < va[i].size(); ++c)
            if (std::abs(va[i][c] - vb[i][c]) > tol) return false;
    return true;
}

}  // namespace sigtree
