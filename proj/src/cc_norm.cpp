#include "sigtree/cc_norm.hpp"

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include <Eigen/Dense>
#include <glog/logging.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sigtree/errors.hpp"

namespace sigtree {

namespace {

// Ceres' line search warns on degenerate interpolation steps; those are harmless here.
void quiet_ceres_logging() {
    static const bool once = [] {
        FLAGS_minloglevel = google::GLOG_ERROR;
        return true;
    }();
    (void)once;
}

constexpr double kLengthSmoothing = 1e-14;  // ε² in sqrt(|Δ|² + ε²)
constexpr double kMemberTol = 1e-6;
constexpr int kProjectionSteps = 30;

// ∂ exp(Δ) / ∂Δ_a: level ℓ = (D_{ℓ-1} ⊗ Δ + Δ^{⊗(ℓ-1)}/(ℓ-1)! ⊗ e_a) / ℓ.
TruncatedTensor segment_exp_derivative(const TruncatedTensor& exp_delta,
                                       std::span<const double> delta, int letter) {
    const int n = exp_delta.dim();
    TruncatedTensor d(n, exp_delta.step());
    for (int lvl = 1; lvl <= d.step(); ++lvl) {
        auto prev_d = d.level(lvl - 1);
        auto prev_e = exp_delta.level(lvl - 1);
        auto cur = d.level(lvl);
        const double inv = 1.0 / lvl;
        std::size_t w = 0;
        for (std::size_t u = 0; u < prev_d.size(); ++u)
            for (int c = 0; c < n; ++c, ++w)
                cur[w] = (prev_d[u] * delta[static_cast<std::size_t>(c)] +
                          (c == letter ? prev_e[u] : 0.0)) * inv;
    }
    return d;
}

std::vector<double> level_weights(int step) {
    std::vector<double> w(static_cast<std::size_t>(step) + 1, 1.0);
    for (int i = 1; i <= step; ++i) w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i) - 1] * i;
    return w;
}

// Signature of the increment vector and, optionally, one derivative column
// per variable.
struct SignatureJet {
    TruncatedTensor value;
    std::vector<TruncatedTensor> columns;
};

SignatureJet signature_jet(std::span<const double> x, int dim, int step, bool with_columns) {
    const std::size_t n = static_cast<std::size_t>(dim);
    const std::size_t m = x.size() / n;
    std::vector<TruncatedTensor> exps;
    exps.reserve(m);
    for (std::size_t j = 0; j < m; ++j) exps.push_back(segment_exp(x.subspan(j * n, n), step));

    std::vector<TruncatedTensor> prefix;  // prefix[j] = E_0 ⊗ ... ⊗ E_{j-1}
    prefix.reserve(m + 1);
    prefix.push_back(identity(dim, step));
    for (std::size_t j = 0; j < m; ++j) prefix.push_back(truncated_mul(prefix.back(), exps[j]));

    SignatureJet jet{prefix.back(), {}};
    if (!with_columns) return jet;

    std::vector<TruncatedTensor> suffix(m + 1, identity(dim, step));  // suffix[j] = E_j ⊗ ... ⊗ E_{m-1}
    for (std::size_t j = m; j-- > 0;) suffix[j] = truncated_mul(exps[j], suffix[j + 1]);

    jet.columns.reserve(m * n);
    for (std::size_t j = 0; j < m; ++j) {
        const auto delta = x.subspan(j * n, n);
        for (std::size_t a = 0; a < n; ++a) {
            const auto d = segment_exp_derivative(exps[j], delta, static_cast<int>(a));
            jet.columns.push_back(truncated_mul(truncated_mul(prefix[j], d), suffix[j + 1]));
        }
    }
    return jet;
}

double smoothed_length(std::span<const double> x, std::size_t n, std::span<double> gradient) {
    double total = 0.0;
    for (std::size_t j = 0; j * n < x.size(); ++j) {
        double sq = kLengthSmoothing;
        for (std::size_t c = 0; c < n; ++c) sq += x[j * n + c] * x[j * n + c];
        const double len = std::sqrt(sq);
        total += len;
        if (!gradient.empty())
            for (std::size_t c = 0; c < n; ++c) gradient[j * n + c] = x[j * n + c] / len;
    }
    return total;
}

double exact_length(std::span<const double> x, std::size_t n) {
    double total = 0.0;
    for (std::size_t j = 0; j * n < x.size(); ++j) total += norm(x.subspan(j * n, n));
    return total;
}

class PenaltyFunction final : public ceres::FirstOrderFunction {
public:
    PenaltyFunction(const TruncatedTensor& target, int variables, double mu)
        : target_(target), variables_(variables), mu_(mu) {}

    bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
        std::span<const double> x(parameters, static_cast<std::size_t>(variables_));
        std::span<double> g;
        if (gradient != nullptr) g = std::span<double>(gradient, static_cast<std::size_t>(variables_));
        *cost = penalty_objective(target_, x, mu_, g);
        return std::isfinite(*cost);
    }

    int NumParameters() const override { return variables_; }

private:
    const TruncatedTensor& target_;
    int variables_;
    double mu_;
};

// Minimum-norm Gauss-Newton steps on the weighted constraint residual.
int project_onto_constraint(const TruncatedTensor& target, std::vector<double>& x) {
    const int dim = target.dim();
    const int step = target.step();
    const auto weights = level_weights(step);
    const auto rows = static_cast<Eigen::Index>(target.coefficients().size() - 1);
    const auto cols = static_cast<Eigen::Index>(x.size());

    auto weighted_residual = [&](const TruncatedTensor& s) {
        Eigen::VectorXd r(rows);
        Eigen::Index at = 0;
        for (int i = 1; i <= step; ++i) {
            auto a = s.level(i);
            auto b = target.level(i);
            for (std::size_t w = 0; w < a.size(); ++w)
                r(at++) = weights[static_cast<std::size_t>(i)] * (a[w] - b[w]);
        }
        return r;
    };

    int steps = 0;
    for (; steps < kProjectionSteps; ++steps) {
        auto jet = signature_jet(x, dim, step, true);
        const double violation = rho_dist(jet.value, target);
        if (violation <= 1e-14) break;
        const Eigen::VectorXd r = weighted_residual(jet.value);
        Eigen::MatrixXd jac(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            Eigen::Index at = 0;
            for (int i = 1; i <= step; ++i)
                for (double v : jet.columns[static_cast<std::size_t>(c)].level(i))
                    jac(at++, c) = weights[static_cast<std::size_t>(i)] * v;
        }
        const Eigen::VectorXd delta = jac.completeOrthogonalDecomposition().solve(-r);

        // Backtrack until the violation decreases.
        bool improved = false;
        for (double t = 1.0; t > 1e-4; t *= 0.5) {
            std::vector<double> trial = x;
            for (Eigen::Index c = 0; c < cols; ++c) trial[static_cast<std::size_t>(c)] += t * delta(c);
            const double v = rho_dist(signature_jet(trial, dim, step, false).value, target);
            if (v < violation) {
                x = std::move(trial);
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return steps;
}

struct StartResult {
    std::vector<double> x;
    double length = 0.0;
    double violation = 0.0;
    int iterations = 0;
    std::vector<TraceRow> trace;
};

std::vector<double> initial_point(const TruncatedTensor& target, int segments, int start_index,
                                  const CCNormOptions& opts) {
    const auto n = static_cast<std::size_t>(target.dim());
    const auto m = static_cast<std::size_t>(segments);
    std::vector<double> x(n * m, 0.0);

    if (start_index == 0 && opts.warm_start) {
        const PLPath& w = *opts.warm_start;
        for (std::size_t j = 0; j < m; ++j) {
            const Point a = w.at_fraction(static_cast<double>(j) / segments);
            const Point b = w.at_fraction(static_cast<double>(j + 1) / segments);
            for (std::size_t c = 0; c < n; ++c) x[j * n + c] = b[c] - a[c];
        }
        return x;
    }

    // Typical increment size from the homogeneous size of the target.
    double scale = 1e-3;
    for (int i = 1; i <= target.step(); ++i)
        scale = std::max(scale, std::pow(level_norm(target, i), 1.0 / i));

    std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(start_index) + 1);
    std::normal_distribution<double> gauss(0.0, scale / std::sqrt(static_cast<double>(m)));
    auto drift = target.level(1);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t c = 0; c < n; ++c) x[j * n + c] = drift[c] / static_cast<double>(m) + gauss(rng);
    return x;
}

StartResult run_start(const TruncatedTensor& target, int segments, int start_index,
                      const CCNormOptions& opts) {
    const auto n = static_cast<std::size_t>(target.dim());
    StartResult res;
    res.x = initial_point(target, segments, start_index, opts);

    for (double mu : opts.penalty_schedule) {
        ceres::GradientProblem problem(
            new PenaltyFunction(target, static_cast<int>(res.x.size()), mu));
        ceres::GradientProblemSolver::Options o;
        o.line_search_direction_type = ceres::BFGS;
        o.max_num_iterations = opts.max_inner_iterations;
        o.function_tolerance = 1e-15;
        o.gradient_tolerance = 1e-12;
        o.parameter_tolerance = 1e-15;
        o.logging_type = ceres::SILENT;
        o.minimizer_progress_to_stdout = false;
        ceres::GradientProblemSolver::Summary summary;
        ceres::Solve(o, problem, res.x.data(), &summary);
        res.iterations += static_cast<int>(summary.iterations.size());
        const auto sig = signature_jet(res.x, target.dim(), target.step(), false).value;
        res.trace.push_back({start_index, mu, exact_length(res.x, n), rho_dist(sig, target)});
    }

    res.iterations += project_onto_constraint(target, res.x);
    res.length = exact_length(res.x, n);
    res.violation = rho_dist(signature_jet(res.x, target.dim(), target.step(), false).value, target);
    return res;
}

PLPath path_from_increments(std::span<const double> x, int dim) {
    const auto n = static_cast<std::size_t>(dim);
    std::vector<Point> incs;
    for (std::size_t j = 0; j * n < x.size(); ++j)
        incs.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(j * n),
                          x.begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
    return PLPath::from_increments(Point(n, 0.0), std::move(incs));
}

}  // namespace

double penalty_objective(const TruncatedTensor& target, std::span<const double> x, double mu,
                         std::span<double> gradient) {
    const auto n = static_cast<std::size_t>(target.dim());
    const int step = target.step();
    const auto weights = level_weights(step);
    const bool want_grad = !gradient.empty();

    double cost = smoothed_length(x, n, gradient);
    const auto jet = signature_jet(x, target.dim(), step, want_grad);
    for (int i = 1; i <= step; ++i) {
        const double w2 = weights[static_cast<std::size_t>(i)] * weights[static_cast<std::size_t>(i)];
        auto s = jet.value.level(i);
        auto g = target.level(i);
        for (std::size_t w = 0; w < s.size(); ++w) {
            const double r = s[w] - g[w];
            cost += mu * w2 * r * r;
        }
    }
    if (want_grad) {
        for (std::size_t c = 0; c < x.size(); ++c) {
            double acc = 0.0;
            for (int i = 1; i <= step; ++i) {
                const double w2 =
                    weights[static_cast<std::size_t>(i)] * weights[static_cast<std::size_t>(i)];
                auto s = jet.value.level(i);
                auto g = target.level(i);
                auto col = jet.columns[c].level(i);
                double dotp = 0.0;
                for (std::size_t w = 0; w < s.size(); ++w) dotp += (s[w] - g[w]) * col[w];
                acc += w2 * dotp;
            }
            gradient[c] += 2.0 * mu * acc;
        }
    }
    return cost;
}

double certified_lower_bound(const TruncatedTensor& g) {
    const double increment = level_norm(g, 1);
    double bound = increment;
    if (g.dim() == 2 && g.step() >= 2 && increment <= 1e-12) {
        auto l2 = g.level(2);
        const double area = 0.5 * (l2[1] - l2[2]);
        bound = std::max(bound, std::sqrt(4.0 * std::numbers::pi * std::abs(area)));
    }
    return bound;
}

CCNormEstimate cc_norm(const GroupElement& g, const CCNormOptions& opts) {
    quiet_ceres_logging();
    if (g.membership_residual() > kMemberTol)
        throw DomainError("cc_norm: input is not a member of G^k (residual " +
                          std::to_string(g.membership_residual()) + ")");
    if (opts.starts < 1) throw DomainError("cc_norm: at least one start required");
    const TruncatedTensor& target = g.tensor();
    const int dim = target.dim();

    CCNormEstimate est;
    est.lower = certified_lower_bound(target);
    if (rho_norm(target) == 0.0) {
        est.witness = PLPath::constant(Point(static_cast<std::size_t>(dim), 0.0));
        est.report.best_start = 0;
        return est;
    }

    const int segments = opts.segments > 0 ? opts.segments : 2 * target.step() + 4;
    std::vector<StartResult> results(static_cast<std::size_t>(opts.starts));
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
    for (int s = 0; s < opts.starts; ++s)
        results[static_cast<std::size_t>(s)] = run_start(target, segments, s, opts);

    // Feasible starts beat infeasible ones; then shorter; then lower index.
    std::size_t best = 0;
    auto feasible = [&](const StartResult& r) { return r.violation <= opts.tolerance; };
    for (std::size_t s = 1; s < results.size(); ++s) {
        const auto& a = results[s];
        const auto& b = results[best];
        if (feasible(a) != feasible(b)) {
            if (feasible(a)) best = s;
        } else if (feasible(a) ? a.length < b.length : a.violation < b.violation) {
            best = s;
        }
    }

    for (const auto& r : results) {
        est.report.iterations += r.iterations;
        est.report.trace.insert(est.report.trace.end(), r.trace.begin(), r.trace.end());
    }
    const auto& winner = results[best];
    est.upper = winner.length;
    est.witness = path_from_increments(winner.x, dim);
    est.report.violation = winner.violation;
    est.report.converged = feasible(winner);
    est.report.best_start = static_cast<int>(best);
    return est;
}

CCNormEstimate cc_dist(const GroupElement& g, const GroupElement& h, const CCNormOptions& opts) {
    if (g.dim() != h.dim() || g.step() != h.step()) throw ShapeError("cc_dist: shape mismatch");
    return cc_norm(g.inverse() * h, opts);
}

double sup_deviation(const PLPath& a, const PLPath& b) {
    if (a.dim() != b.dim()) throw ShapeError("sup_deviation: dimension mismatch");
    std::vector<double> breaks{0.0, 1.0};
    for (const PLPath* p : {&a, &b}) {
        const double total = p->length();
        if (total == 0.0) continue;
        double acc = 0.0;
        for (const auto& d : p->increments()) {
            acc += norm(d);
            breaks.push_back(std::min(1.0, acc / total));
        }
    }
    // The difference of two PL maps is PL on the merged partition, and its
    // norm is convex on each piece, so the maximum sits at a breakpoint.
    double worst = 0.0;
    for (double t : breaks) {
        const Point pa = a.at_fraction(t);
        const Point pb = b.at_fraction(t);
        Point diff(pa.size());
        for (std::size_t c = 0; c < pa.size(); ++c) diff[c] = pa[c] - pb[c];
        worst = std::max(worst, norm(diff));
    }
    return worst;
}

std::vector<GeodesicProjectionRow> geodesic_projection_experiment(const PLPath& p,
                                                                  std::span<const int> steps,
                                                                  const CCNormOptions& opts) {
    if (!same_vertices(tree_reduce(p), p))
        throw DomainError("geodesic_projection_experiment: path must be tree-reduced");
    std::vector<GeodesicProjectionRow> rows;
    CCNormOptions local = opts;
    local.warm_start = anchor_at_origin(p);
    for (int k : steps) {
        const auto est = cc_norm(signature(p, k), local);
        PLPath witness = translate(est.witness, p.start());
        const double dev = sup_deviation(witness, p);
        rows.push_back({k, est.upper, dev, est.report.violation, est.report.converged, std::move(witness)});
    }
    return rows;
}

}  // namespace sigtree
