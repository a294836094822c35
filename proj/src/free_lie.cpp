#include "sigtree/free_lie.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "sigtree/errors.hpp"

namespace sigtree {

namespace {

int mobius(int n) {
    int result = 1;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            result = -result;
        }
    }
    if (n > 1) result = -result;
    return result;
}

// Longest proper suffix that is itself Lyndon; splits w = u v.
std::size_t standard_split(std::span<const int> word) {
    for (std::size_t start = 1; start < word.size(); ++start)
        if (is_lyndon(word.subspan(start))) return start;
    return word.size();
}

}  // namespace

std::vector<Word> lyndon_words(int dim, int step) {
    if (dim < 1 || step < 1) throw DomainError("lyndon_words: dim and step must be >= 1");
    std::vector<Word> out;
    Word w{0};
    while (!w.empty()) {
        out.push_back(w);
        const std::size_t m = w.size();
        while (w.size() < static_cast<std::size_t>(step)) w.push_back(w[w.size() - m]);
        while (!w.empty() && w.back() == dim - 1) w.pop_back();
        if (!w.empty()) ++w.back();
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Word& a, const Word& b) { return a.size() < b.size(); });
    return out;
}

std::size_t witt_dimension(int dim, int length) {
    if (length < 1) return 0;
    long double total = 0;
    for (int d = 1; d <= length; ++d) {
        if (length % d != 0) continue;
        total += mobius(d) * std::pow(static_cast<long double>(dim), length / d);
    }
    return static_cast<std::size_t>(std::llround(total / length));
}

bool is_lyndon(std::span<const int> word) {
    if (word.empty()) return false;
    const std::size_t n = word.size();
    for (std::size_t r = 1; r < n; ++r) {
        // compare word with its rotation starting at r
        for (std::size_t i = 0; i < n; ++i) {
            const int a = word[i];
            const int b = word[(i + r) % n];
            if (a < b) break;
            if (a > b) return false;
            if (i + 1 == n) return false;  // equal to a rotation: periodic
        }
    }
    return true;
}

TruncatedTensor bracket_expansion(std::span<const int> word, int dim, int step) {
    if (!is_lyndon(word)) throw DomainError("bracket_expansion: word is not Lyndon");
    if (static_cast<int>(word.size()) > step)
        throw DomainError("bracket_expansion: word longer than step");
    if (word.size() == 1) return basis_vector(dim, step, word[0]);
    const std::size_t split = standard_split(word);
    return bracket(bracket_expansion(word.first(split), dim, step),
                   bracket_expansion(word.subspan(split), dim, step));
}

struct LyndonBasis::LevelSolver {
    Eigen::MatrixXd basis;  // dim^level rows, one column per Lyndon word
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
};

LyndonBasis::LyndonBasis(int dim, int step)
    : dim_(dim), step_(step), words_(lyndon_words(dim, step)) {
    expansions_.reserve(words_.size());
    for (const auto& w : words_) expansions_.push_back(bracket_expansion(w, dim, step));

    // words_ is sorted by length, so words of length L occupy [starts[L], starts[L+1]).
    level_starts_.resize(static_cast<std::size_t>(step) + 2);
    for (int lvl = 0; lvl <= step + 1; ++lvl) {
        auto it = std::partition_point(words_.begin(), words_.end(), [lvl](const Word& w) {
            return static_cast<int>(w.size()) < lvl;
        });
        level_starts_[static_cast<std::size_t>(lvl)] =
            static_cast<std::size_t>(it - words_.begin());
    }

    solvers_.resize(static_cast<std::size_t>(step) + 1);
    for (int lvl = 1; lvl <= step; ++lvl) {
        auto [first, last] = level_range(lvl);
        auto solver = std::make_shared<LevelSolver>();
        const auto rows = static_cast<Eigen::Index>(level_size(dim, lvl));
        solver->basis.resize(rows, static_cast<Eigen::Index>(last - first));
        for (std::size_t c = first; c < last; ++c) {
            auto block = expansions_[c].level(lvl);
            for (Eigen::Index r = 0; r < rows; ++r)
                solver->basis(r, static_cast<Eigen::Index>(c - first)) =
                    block[static_cast<std::size_t>(r)];
        }
        if (last > first) solver->qr.compute(solver->basis);
        solvers_[static_cast<std::size_t>(lvl)] = std::move(solver);
    }
}

std::pair<std::size_t, std::size_t> LyndonBasis::level_range(int length) const {
    if (length < 1 || length > step_) throw DomainError("level_range: length out of range");
    return {level_starts_[static_cast<std::size_t>(length)],
            level_starts_[static_cast<std::size_t>(length) + 1]};
}

LogSignatureCoordinates LyndonBasis::coordinates(const TruncatedTensor& lie_element) const {
    if (lie_element.dim() != dim_ || lie_element.step() != step_)
        throw ShapeError("LyndonBasis: tensor shape does not match basis");
    LogSignatureCoordinates out;
    out.coeffs.assign(words_.size(), 0.0);
    for (int lvl = 1; lvl <= step_; ++lvl) {
        const auto& solver = *solvers_[static_cast<std::size_t>(lvl)];
        auto block = lie_element.level(lvl);
        Eigen::Map<const Eigen::VectorXd> y(block.data(), static_cast<Eigen::Index>(block.size()));
        if (solver.basis.cols() == 0) {  // no Lyndon words of this length (dim 1)
            out.residual += y.norm();
            continue;
        }
        const Eigen::VectorXd c = solver.qr.solve(y);
        out.residual += (solver.basis * c - y).norm();
        const auto first = level_range(lvl).first;
        for (Eigen::Index i = 0; i < c.size(); ++i)
            out.coeffs[first + static_cast<std::size_t>(i)] = c(i);
    }
    return out;
}

LogSignatureCoordinates LyndonBasis::log_signature(const TruncatedTensor& g) const {
    return coordinates(tensor_log(g));
}

TruncatedTensor LyndonBasis::lie_element(std::span<const double> coeffs) const {
    if (coeffs.size() != words_.size()) throw ShapeError("lie_element: coefficient count mismatch");
    TruncatedTensor out(dim_, step_);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0.0) continue;
        const auto lvl = static_cast<int>(words_[i].size());
        auto dst = out.level(lvl);
        auto src = expansions_[i].level(lvl);
        for (std::size_t w = 0; w < dst.size(); ++w) dst[w] += coeffs[i] * src[w];
    }
    return out;
}

std::shared_ptr<const LyndonBasis> lyndon_basis(int dim, int step) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const LyndonBasis>> cache;
    {
        std::lock_guard lock(mutex);
        auto it = cache.find({dim, step});
        if (it != cache.end()) return it->second;
    }
    auto basis = std::make_shared<const LyndonBasis>(dim, step);
    std::lock_guard lock(mutex);
    return cache.emplace(std::make_pair(dim, step), std::move(basis)).first->second;
}

double membership_residual(const TruncatedTensor& g) {
    return lyndon_basis(g.dim(), g.step())->membership_residual(g);
}

}  // namespace sigtree
