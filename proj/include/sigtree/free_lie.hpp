#pragma once

// Lyndon basis of the free nilpotent Lie algebra g^k(R^n) and log-signature
// coordinates with respect to it.

#include <memory>
#include <vector>

#include "sigtree/tensor_algebra.hpp"

namespace sigtree {

/// All Lyndon words over {0..dim-1} of length 1..step, grouped by length,
/// lexicographic within each length (Duval's algorithm).
std::vector<Word> lyndon_words(int dim, int step);

/// Necklace-polynomial count of Lyndon words of a given length (Witt formula).
std::size_t witt_dimension(int dim, int length);

bool is_lyndon(std::span<const int> word);

/// Standard-factorization bracketing of a Lyndon word, expanded as a tensor of
/// the given step (which must be >= the word length). Throws DomainError for
/// non-Lyndon input.
TruncatedTensor bracket_expansion(std::span<const int> word, int dim, int step);

struct LogSignatureCoordinates {
    std::vector<double> coeffs;  // one per word of the basis, in basis order
    double residual = 0.0;       // summed per-level least-squares residuals
};

class LyndonBasis {
public:
    LyndonBasis(int dim, int step);

    int dim() const noexcept { return dim_; }
    int step() const noexcept { return step_; }
    const std::vector<Word>& words() const noexcept { return words_; }
    const TruncatedTensor& expansion(std::size_t i) const { return expansions_.at(i); }

    /// Index range [first, last) of the words of one length.
    std::pair<std::size_t, std::size_t> level_range(int length) const;

    /// Least-squares coordinates of a Lie-algebra candidate (ξ_0 ignored).
    LogSignatureCoordinates coordinates(const TruncatedTensor& lie_element) const;

    /// Coordinates of log(g); the residual measures distance from G^k.
    LogSignatureCoordinates log_signature(const TruncatedTensor& g) const;

    /// sum_w c_w expansion(w).
    TruncatedTensor lie_element(std::span<const double> coeffs) const;

    double membership_residual(const TruncatedTensor& g) const {
        return log_signature(g).residual;
    }

private:
    struct LevelSolver;

    int dim_;
    int step_;
    std::vector<Word> words_;
    std::vector<TruncatedTensor> expansions_;
    std::vector<std::size_t> level_starts_;
    std::vector<std::shared_ptr<const LevelSolver>> solvers_;
};

/// Shared, lazily built basis for a (dim, step) pair. Thread-safe.
std::shared_ptr<const LyndonBasis> lyndon_basis(int dim, int step);

/// Residual of g against G^k via the shared basis.
double membership_residual(const TruncatedTensor& g);

}  // namespace sigtree
