#pragma once

#include <vector>

#include "sigtree/pl_path.hpp"
#include "sigtree/tensor_algebra.hpp"

namespace sigtree {

/// Residual above which a tensor is flagged as not lying in G^k.
inline constexpr double kMembershipTol = 1e-8;

/// An element of the free nilpotent group G^k(R^n): a tensor with unit scalar
/// part, together with its distance from the group as measured by the Lyndon
/// least-squares residual.
class GroupElement {
public:
    /// Records the membership residual; does not reject non-members.
    /// Throws DomainError unless ξ_0 = 1.
    static GroupElement from_tensor(TruncatedTensor t);
    static GroupElement identity(int dim, int step);

    const TruncatedTensor& tensor() const noexcept { return tensor_; }
    int dim() const noexcept { return tensor_.dim(); }
    int step() const noexcept { return tensor_.step(); }
    double membership_residual() const noexcept { return residual_; }
    bool flagged() const noexcept { return residual_ > kMembershipTol; }

    GroupElement inverse() const;
    friend GroupElement operator*(const GroupElement& a, const GroupElement& b);

private:
    GroupElement(TruncatedTensor t, double residual) : tensor_(std::move(t)), residual_(residual) {}

    TruncatedTensor tensor_;
    double residual_;
};

/// Step-k signature as a raw tensor: exp(Δ_1) ⊗ ... ⊗ exp(Δ_m).
TruncatedTensor signature_tensor(const PLPath& p, int step);

/// Step-k signature of a PL path.
GroupElement signature(const PLPath& p, int step);

/// Signature of the sub-path between arclength fractions s <= t.
GroupElement signature_window(const PLPath& p, double s, double t, int step);

struct LiftSample {
    double t;  // arclength fraction
    GroupElement value;
};

/// Horizontal lift t -> g ⊗ S_k(p)_{0,t}, sampled at t = i/samples.
/// With `anchored`, the level-1 part of g must equal the start of p.
std::vector<LiftSample> lift(const PLPath& p, const GroupElement& g, int samples,
                             bool anchored = true);

}  // namespace sigtree
