#include "sigtree/signature.hpp"

#include <cmath>

#include "sigtree/errors.hpp"
#include "sigtree/free_lie.hpp"

namespace sigtree {

GroupElement GroupElement::from_tensor(TruncatedTensor t) {
    if (std::abs(t.scalar() - 1.0) > 1e-12)
        throw DomainError("GroupElement: scalar part must be 1");
    if (t.step() < 1) throw DomainError("GroupElement: step must be >= 1");
    const double r = sigtree::membership_residual(t);
    return GroupElement(std::move(t), r);
}

GroupElement GroupElement::identity(int dim, int step) {
    if (step < 1) throw DomainError("GroupElement: step must be >= 1");
    return GroupElement(sigtree::identity(dim, step), 0.0);
}

GroupElement GroupElement::inverse() const {
    return from_tensor(group_inverse(tensor_));
}

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    return GroupElement::from_tensor(truncated_mul(a.tensor_, b.tensor_));
}

TruncatedTensor signature_tensor(const PLPath& p, int step) {
    if (step < 1) throw DomainError("signature: step must be >= 1");
    level_size(p.dim(), step);
    TruncatedTensor s = identity(p.dim(), step);
    for (const auto& d : p.increments()) s = truncated_mul(s, segment_exp(d, step));
    return s;
}

GroupElement signature(const PLPath& p, int step) {
    return GroupElement::from_tensor(signature_tensor(p, step));
}

GroupElement signature_window(const PLPath& p, double s, double t, int step) {
    if (!(0.0 <= s && s <= t && t <= 1.0))
        throw DomainError("signature_window: fractions must satisfy 0 <= s <= t <= 1");
    return signature(subpath(p, s, t), step);
}

std::vector<LiftSample> lift(const PLPath& p, const GroupElement& g, int samples, bool anchored) {
    if (samples < 1) throw DomainError("lift: sample count must be >= 1");
    if (g.dim() != p.dim()) throw ShapeError("lift: dimension mismatch");
    if (anchored) {
        auto lvl1 = g.tensor().level(1);
        for (std::size_t c = 0; c < lvl1.size(); ++c)
            if (std::abs(lvl1[c] - p.start()[c]) > 1e-12)
                throw DomainError("lift: level 1 of the base point must equal the start of the path");
    }
    const int k = g.step();
    std::vector<LiftSample> out;
    out.reserve(static_cast<std::size_t>(samples) + 1);
    out.push_back({0.0, g});
    TruncatedTensor running = g.tensor();
    for (int i = 1; i <= samples; ++i) {
        const double t0 = static_cast<double>(i - 1) / samples;
        const double t1 = static_cast<double>(i) / samples;
        running = truncated_mul(running, signature_tensor(subpath(p, t0, t1), k));
        out.push_back({t1, GroupElement::from_tensor(running)});
    }
    return out;
}

}  // namespace sigtree
