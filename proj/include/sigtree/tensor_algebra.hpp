#pragma once

// Dense truncated tensor algebra T^k(R^n).
//
// A TruncatedTensor stores levels 0..step in one flat buffer; level i holds
// dim^i coefficients indexed by words (w_1, ..., w_i) over the 0-based
// alphabet {0, ..., dim-1}, row-major (the first letter is most significant).

#include <cstddef>
#include <span>
#include <vector>

namespace sigtree {

using Word = std::vector<int>;

class TruncatedTensor {
public:
    /// Per-level coefficient budget; construction beyond it throws MemoryGuardError.
    static constexpr std::size_t kMaxLevelCoefficients = 10'000'000;

    /// The zero tensor of the given shape.
    TruncatedTensor(int dim, int step);

    int dim() const noexcept { return dim_; }
    int step() const noexcept { return step_; }

    std::span<const double> level(int i) const;
    std::span<double> level(int i);

    double scalar() const noexcept { return data_[0]; }
    double& scalar() noexcept { return data_[0]; }

    /// All coefficients, level 0 first.
    std::span<const double> coefficients() const noexcept { return data_; }
    std::span<double> coefficients() noexcept { return data_; }

    /// Offset of level i inside coefficients().
    std::size_t level_offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }

    double coefficient(std::span<const int> word) const;
    double& coefficient(std::span<const int> word);

    bool same_shape(const TruncatedTensor& other) const noexcept {
        return dim_ == other.dim_ && step_ == other.step_;
    }

    TruncatedTensor& operator+=(const TruncatedTensor& rhs);
    TruncatedTensor& operator-=(const TruncatedTensor& rhs);
    TruncatedTensor& operator*=(double s);

    friend bool operator==(const TruncatedTensor&, const TruncatedTensor&) = default;

private:
    std::size_t word_index(std::span<const int> word) const;

    int dim_;
    int step_;
    std::vector<std::size_t> offsets_;
    std::vector<double> data_;
};

TruncatedTensor operator+(TruncatedTensor lhs, const TruncatedTensor& rhs);
TruncatedTensor operator-(TruncatedTensor lhs, const TruncatedTensor& rhs);
TruncatedTensor operator*(double s, TruncatedTensor t);

/// Number of coefficients in a level, i.e. dim^level; throws MemoryGuardError past the budget.
std::size_t level_size(int dim, int level);

/// 1_k = (1, 0, ..., 0).
TruncatedTensor identity(int dim, int step);

/// Tensor with level 1 equal to v and every other level zero.
TruncatedTensor from_vector(std::span<const double> v, int step);

/// Word with a single letter, as a level-1 basis tensor e_letter.
TruncatedTensor basis_vector(int dim, int step, int letter);

/// g ⊗_k h. Summation order is fixed (ascending split point, then ascending
/// word index) so the result is independent of the kernel used.
TruncatedTensor truncated_mul(const TruncatedTensor& g, const TruncatedTensor& h);

/// 1_k + sum_{i=1..k} a^{⊗i}/i!, evaluated by Horner's scheme. Requires ξ_0(a) = 0.
TruncatedTensor tensor_exp(const TruncatedTensor& a);

/// exp of a pure level-1 tensor, in closed form: level i = v^{⊗i}/i!.
TruncatedTensor segment_exp(std::span<const double> v, int step);

/// Truncated series log(1 + u). Requires ξ_0(g) = 1.
TruncatedTensor tensor_log(const TruncatedTensor& g);

/// Inverse in 1_k + t^k via the truncated Neumann series. Requires ξ_0(g) = 1.
TruncatedTensor group_inverse(const TruncatedTensor& g);

/// [g, h] = g ⊗ h - h ⊗ g.
TruncatedTensor bracket(const TruncatedTensor& g, const TruncatedTensor& h);

/// Truncation π^k_j: keeps levels 0..j.
TruncatedTensor project(const TruncatedTensor& g, int j);

/// Carnot dilation: level i scaled by lambda^i.
TruncatedTensor dilate(const TruncatedTensor& g, double lambda);

/// Euclidean norm of one level block.
double level_norm(const TruncatedTensor& g, int i);

/// ρ(g, h) = max_i |ξ_i(g) - ξ_i(h)| with Euclidean block norms.
double rho_dist(const TruncatedTensor& g, const TruncatedTensor& h);

/// max_{i>=1} |ξ_i(g)|, the ρ-size of the non-scalar part.
double rho_norm(const TruncatedTensor& g);

/// Decode a flat level index into its word.
Word word_of_index(int dim, int level, std::size_t index);

}  // namespace sigtree
