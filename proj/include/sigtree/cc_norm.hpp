#pragma once

// Carnot-Carathéodory norm estimation.
//
// ‖g‖ is the infimal length of a path whose step-k signature is g. The upper
// bound comes from a multistart penalty method over m-segment PL paths:
//
//   minimize  sum_j |Δ_j| + μ sum_i (i! |ξ_i(S(Δ)) - ξ_i(g)|)^2
//
// with μ stepped through a schedule, each stage solved by a quasi-Newton
// method and warm-started from the previous one, followed by a minimum-norm
// Gauss-Newton projection onto the constraint. Lower bounds are only those
// that hold without unknown constants: |ξ_1(g)|, and for n = 2 closed loops
// the isoperimetric bound sqrt(4π|A|) with A the Lévy area.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sigtree/pl_path.hpp"
#include "sigtree/signature.hpp"

namespace sigtree {

struct CCNormOptions {
    int segments = 0;  // 0 selects 2k + 4
    int starts = 8;
    std::uint64_t seed = 1;
    std::vector<double> penalty_schedule = {1e2, 1e3, 1e4, 1e5, 1e6, 1e7};
    double tolerance = 1e-6;  // required ρ-violation of the witness
    int max_inner_iterations = 400;
    std::optional<PLPath> warm_start;  // used as start 0 when present
    bool parallel = true;              // run starts on OpenMP threads
};

struct TraceRow {
    int start_index;
    double mu;
    double length;
    double violation;
};

struct OptimizerReport {
    int iterations = 0;
    double violation = 0.0;
    bool converged = true;
    int best_start = -1;
    std::vector<TraceRow> trace;
};

struct CCNormEstimate {
    double lower = 0.0;
    double upper = 0.0;
    PLPath witness = PLPath::constant({0.0});
    OptimizerReport report;
};

/// Certified lower bound on ‖g‖.
double certified_lower_bound(const TruncatedTensor& g);

/// Throws DomainError when membership_residual(g) > 1e-6.
CCNormEstimate cc_norm(const GroupElement& g, const CCNormOptions& opts = {});

/// d_k(g, h) = ‖g^{-1} ⊗ h‖.
CCNormEstimate cc_dist(const GroupElement& g, const GroupElement& h, const CCNormOptions& opts = {});

/// Penalty objective value and gradient for a flat increment vector; exposed
/// for gradient checks.
double penalty_objective(const TruncatedTensor& target, std::span<const double> increments,
                         double mu, std::span<double> gradient);

/// max_t |a(t) - b(t)| with both paths parametrized proportionally to arclength.
double sup_deviation(const PLPath& a, const PLPath& b);

struct GeodesicProjectionRow {
    int step;
    double witness_length;
    double deviation;
    double violation;
    bool converged;
    PLPath witness;
};

/// For each step k: the CC-norm witness of S_k(p), translated onto p's start,
/// and its sup-deviation from p. The reduced path itself seeds start 0.
std::vector<GeodesicProjectionRow> geodesic_projection_experiment(const PLPath& p,
                                                                  std::span<const int> steps,
                                                                  const CCNormOptions& opts = {});

}  // namespace sigtree
