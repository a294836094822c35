#include "sigtree/tensor_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sigtree/errors.hpp"
#include "sigtree/kernels.hpp"

namespace sigtree {

namespace {

constexpr double kScalarTol = 1e-12;

void require_same_shape(const TruncatedTensor& a, const TruncatedTensor& b, const char* what) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(what) + ": shape mismatch (dim " + std::to_string(a.dim()) +
                         "/" + std::to_string(b.dim()) + ", step " + std::to_string(a.step()) +
                         "/" + std::to_string(b.step()) + ")");
}

void require_unit_scalar(const TruncatedTensor& g, const char* what) {
    if (std::abs(g.scalar() - 1.0) > kScalarTol)
        throw DomainError(std::string(what) + ": scalar part must be 1");
}

// 1_k with level 0 replaced by c.
TruncatedTensor scalar_tensor(int dim, int step, double c) {
    TruncatedTensor t(dim, step);
    t.scalar() = c;
    return t;
}

}  // namespace

std::size_t level_size(int dim, int level) {
    if (dim < 1) throw DomainError("dimension must be >= 1");
    if (level < 0) throw DomainError("level must be >= 0");
    std::size_t size = 1;
    for (int i = 0; i < level; ++i) {
        size *= static_cast<std::size_t>(dim);
        if (size > TruncatedTensor::kMaxLevelCoefficients)
            throw MemoryGuardError("dim^step = " + std::to_string(dim) + "^" +
                                   std::to_string(level) + " exceeds the per-level budget of " +
                                   std::to_string(TruncatedTensor::kMaxLevelCoefficients));
    }
    return size;
}

TruncatedTensor::TruncatedTensor(int dim, int step) : dim_(dim), step_(step) {
    if (step < 0) throw DomainError("step must be >= 0");
    offsets_.reserve(static_cast<std::size_t>(step) + 2);
    std::size_t total = 0;
    for (int i = 0; i <= step; ++i) {
        offsets_.push_back(total);
        total += level_size(dim, i);
    }
    offsets_.push_back(total);
    data_.assign(total, 0.0);
}

std::span<const double> TruncatedTensor::level(int i) const {
    if (i < 0 || i > step_) throw DomainError("level index out of range");
    const auto b = offsets_[static_cast<std::size_t>(i)];
    const auto e = offsets_[static_cast<std::size_t>(i) + 1];
    return std::span<const double>(data_).subspan(b, e - b);
}

std::span<double> TruncatedTensor::level(int i) {
    if (i < 0 || i > step_) throw DomainError("level index out of range");
    const auto b = offsets_[static_cast<std::size_t>(i)];
    const auto e = offsets_[static_cast<std::size_t>(i) + 1];
    return std::span<double>(data_).subspan(b, e - b);
}

std::size_t TruncatedTensor::word_index(std::span<const int> word) const {
    if (static_cast<int>(word.size()) > step_) throw DomainError("word longer than step");
    std::size_t idx = 0;
    for (int letter : word) {
        if (letter < 0 || letter >= dim_) throw DomainError("letter out of alphabet");
        idx = idx * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(letter);
    }
    return idx;
}

double TruncatedTensor::coefficient(std::span<const int> word) const {
    return level(static_cast<int>(word.size()))[word_index(word)];
}

double& TruncatedTensor::coefficient(std::span<const int> word) {
    return level(static_cast<int>(word.size()))[word_index(word)];
}

TruncatedTensor& TruncatedTensor::operator+=(const TruncatedTensor& rhs) {
    require_same_shape(*this, rhs, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

TruncatedTensor& TruncatedTensor::operator-=(const TruncatedTensor& rhs) {
    require_same_shape(*this, rhs, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

TruncatedTensor& TruncatedTensor::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

TruncatedTensor operator+(TruncatedTensor lhs, const TruncatedTensor& rhs) { return lhs += rhs; }
TruncatedTensor operator-(TruncatedTensor lhs, const TruncatedTensor& rhs) { return lhs -= rhs; }
TruncatedTensor operator*(double s, TruncatedTensor t) { return t *= s; }

TruncatedTensor identity(int dim, int step) { return scalar_tensor(dim, step, 1.0); }

TruncatedTensor from_vector(std::span<const double> v, int step) {
    TruncatedTensor t(static_cast<int>(v.size()), step);
    if (step >= 1) std::copy(v.begin(), v.end(), t.level(1).begin());
    return t;
}

TruncatedTensor basis_vector(int dim, int step, int letter) {
    if (letter < 0 || letter >= dim) throw DomainError("basis_vector: letter out of range");
    if (step < 1) throw DomainError("basis_vector: step must be >= 1");
    TruncatedTensor t(dim, step);
    t.level(1)[static_cast<std::size_t>(letter)] = 1.0;
    return t;
}

TruncatedTensor truncated_mul(const TruncatedTensor& g, const TruncatedTensor& h) {
    require_same_shape(g, h, "truncated_mul");
    TruncatedTensor out(g.dim(), g.step());
    if (level_size(g.dim(), g.step()) >= kernels::kParallelLevelThreshold)
        kernels::parallel::truncated_mul(g, h, out);
    else
        kernels::serial::truncated_mul(g, h, out);
    return out;
}

TruncatedTensor tensor_exp(const TruncatedTensor& a) {
    if (std::abs(a.scalar()) > kScalarTol) throw DomainError("tensor_exp: scalar part must be 0");
    // 1 + a(1 + a/2(1 + a/3(...)))
    TruncatedTensor r = identity(a.dim(), a.step());
    for (int i = a.step(); i >= 1; --i) {
        r = truncated_mul(a, r);
        r *= 1.0 / i;
        r.scalar() += 1.0;
    }
    return r;
}

TruncatedTensor segment_exp(std::span<const double> v, int step) {
    TruncatedTensor t = identity(static_cast<int>(v.size()), step);
    for (int m = 1; m <= step; ++m) {
        auto prev = t.level(m - 1);
        auto cur = t.level(m);
        const double inv = 1.0 / m;
        std::size_t w = 0;
        for (double p : prev)
            for (double x : v) cur[w++] = p * x * inv;
    }
    return t;
}

TruncatedTensor tensor_log(const TruncatedTensor& g) {
    require_unit_scalar(g, "tensor_log");
    TruncatedTensor u = g;
    u.scalar() = 0.0;
    const int k = g.step();
    if (k == 0) return u;
    // log(1+u) = u (c_1 + u (c_2 + ... + u c_k)), c_i = (-1)^{i+1}/i
    auto coeff = [](int i) { return (i % 2 == 1 ? 1.0 : -1.0) / i; };
    TruncatedTensor r = scalar_tensor(g.dim(), k, coeff(k));
    for (int i = k - 1; i >= 1; --i) {
        r = truncated_mul(u, r);
        r.scalar() += coeff(i);
    }
    return truncated_mul(u, r);
}

TruncatedTensor group_inverse(const TruncatedTensor& g) {
    require_unit_scalar(g, "group_inverse");
    TruncatedTensor neg_u = g;
    neg_u.scalar() = 0.0;
    neg_u *= -1.0;
    TruncatedTensor r = identity(g.dim(), g.step());
    for (int i = 0; i < g.step(); ++i) {
        r = truncated_mul(neg_u, r);
        r.scalar() += 1.0;
    }
    return r;
}

TruncatedTensor bracket(const TruncatedTensor& g, const TruncatedTensor& h) {
    require_same_shape(g, h, "bracket");
    return truncated_mul(g, h) - truncated_mul(h, g);
}

TruncatedTensor project(const TruncatedTensor& g, int j) {
    if (j < 0 || j > g.step()) throw DomainError("project: target step out of range");
    TruncatedTensor out(g.dim(), j);
    auto src = g.coefficients().first(out.coefficients().size());
    std::copy(src.begin(), src.end(), out.coefficients().begin());
    return out;
}

TruncatedTensor dilate(const TruncatedTensor& g, double lambda) {
    TruncatedTensor out = g;
    double factor = 1.0;
    for (int i = 1; i <= g.step(); ++i) {
        factor *= lambda;
        for (double& x : out.level(i)) x *= factor;
    }
    return out;
}

double level_norm(const TruncatedTensor& g, int i) {
    double s = 0.0;
    for (double x : g.level(i)) s += x * x;
    return std::sqrt(s);
}

double rho_dist(const TruncatedTensor& g, const TruncatedTensor& h) {
    require_same_shape(g, h, "rho_dist");
    double best = 0.0;
    for (int i = 0; i <= g.step(); ++i) {
        auto a = g.level(i);
        auto b = h.level(i);
        double s = 0.0;
        for (std::size_t w = 0; w < a.size(); ++w) {
            const double d = a[w] - b[w];
            s += d * d;
        }
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

double rho_norm(const TruncatedTensor& g) {
    double best = 0.0;
    for (int i = 1; i <= g.step(); ++i) best = std::max(best, level_norm(g, i));
    return best;
}

Word word_of_index(int dim, int level, std::size_t index) {
    Word w(static_cast<std::size_t>(level));
    for (int pos = level - 1; pos >= 0; --pos) {
        w[static_cast<std::size_t>(pos)] = static_cast<int>(index % static_cast<std::size_t>(dim));
        index /= static_cast<std::size_t>(dim);
    }
    return w;
}

}  // namespace sigtree
