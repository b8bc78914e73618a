#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sparseclf/cd.hpp"

namespace sparseclf {

/**
 * min G(beta) + lambda0 sum z_i  s.t. |beta_i| <= M z_i, z_i in {0,1} for i in
 * `integral`, z_i in [0,1] otherwise.
 *
 * With `integral` = all coordinates this is the exact big-M formulation of
 * min P(beta) (as long as M bounds some optimal solution).
 */
struct MipProblem {
    const Dataset* data = nullptr;
    LossKind kind;
    PenaltyParams lambda;
    double big_m = 1.0;
    std::vector<Index> integral;

    void validate() const;
};

/// Branching state of one coordinate.
enum class Fix : signed char { free = -1, zero = 0, one = 1 };

struct MipNode {
    std::vector<Fix> fixed;  ///< length p; coordinates outside `integral` stay free
    double lower_bound = 0.0;
    Vector beta;             ///< relaxation solution
    Vector z;                ///< reconstructed indicators
    int depth = 0;
};

struct RelaxationOptions {
    /// Stop once (primal - bound) <= rel_tol * max(|primal|, 1e-12).
    double rel_tol = 1e-9;
    int max_cycles = 20000;
    double gamma = 1.05;
    /// Stop early once the bound reaches this value (the node would be pruned anyway).
    double cutoff = std::numeric_limits<double>::infinity();
};

struct RelaxationResult {
    Vector beta;
    Vector z;
    /// Valid lower bound on every completion of the node (holds even when not converged).
    double bound = 0.0;
    /// Relaxation objective at beta.
    double primal = 0.0;
    bool converged = false;
    int cycles = 0;
};

/**
 * Solves the node relaxation
 *   min g(beta) + sum_i h_i(beta_i) + lambda0 * #{fixed to one}
 * with h_i = (lambda1 + lambda0/M)|b| + lambda2 b^2 on free coordinates,
 * lambda1|b| + lambda2 b^2 on coordinates fixed to one, |b| <= M, and
 * beta_i = 0 on coordinates fixed to zero. Free indicators are recovered as
 * z_i = |beta_i| / M.
 *
 * Proximal coordinate descent (threshold() with lambda0 = 0, then clipping to
 * [-M, M]). The bound linearizes g at the final iterate and minimizes the
 * separable remainder over the box, which is exact at the optimum and a valid
 * lower bound anywhere by convexity of g.
 */
RelaxationResult solve_relaxation(const MipProblem& prob, const std::vector<Fix>& fixed, const Vector& warm,
                                  const RelaxationOptions& opts = {});

/// Relaxation objective written with explicit indicators: G(beta) + lambda0 sum z.
double relaxation_objective_with_z(const MipProblem& prob, const Vector& beta, const Vector& z);

enum class MipStatus { optimal, gap_reached, budget_exhausted };

std::string to_string(MipStatus status);

struct MipResult {
    Vector beta;
    Vector z;
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    double gap = 0.0;
    long nodes_explored = 0;
    int iga_iterations = 0;
    MipStatus status = MipStatus::budget_exhausted;
    double big_m = 1.0;
    std::vector<std::string> warnings;

    std::vector<Index> support() const { return support_of(beta); }
};

/// (UB - LB) / LB, with 0 when the bounds coincide.
double optimality_gap(double upper, double lower);

struct BigMChoice {
    double value = 1.0;
    bool fallback = false;
};

/// 1.2 ||beta||_inf of a warm start; 1.0 (flagged) for a zero warm start.
BigMChoice choose_big_m(const Vector& warm);

struct BnbOptions {
    double gap_tol = 1e-6;
    long node_budget = 100000;
    double int_tol = 1e-6;
    RelaxationOptions relaxation;
};

/// Gaps at or below this count as a proof of optimality.
inline constexpr double kOptimalGap = 1e-6;

/// Best-bound-first branch and bound over the indicators in prob.integral.
MipResult branch_and_bound(const MipProblem& prob, const Solution& incumbent, const BnbOptions& opts = {});

struct IgaOptions {
    double gap_tol = 1e-6;
    int max_add_per_iter = 10;
    /// When set, add every fractional z_i >= frac_cutoff instead of the largest few.
    std::optional<double> frac_cutoff;
    long node_budget = 100000;
    int max_iterations = 100;
    /// 0 means choose_big_m(warm).
    double big_m = 0.0;
    double int_tol = 1e-6;
    RelaxationOptions relaxation;
};

/// Integrality generation: grows the binary set from the warm support until
/// the partially relaxed problem returns integral indicators.
MipResult iga_solve(const Dataset& d, const LossKind& kind, const PenaltyParams& lambda, const Solution& warm,
                    const IgaOptions& opts = {});

struct BigMSensitivity {
    double objective_at_m = 0.0;
    double objective_at_2m = 0.0;
    bool active = false;  ///< doubling M improved the optimum by more than the gap tolerance
};

/// Re-solves with 2M to detect a binding big-M bound.
BigMSensitivity big_m_sensitivity(const Dataset& d, const LossKind& kind, const PenaltyParams& lambda,
                                  const Solution& warm, const IgaOptions& opts = {});

}  // namespace sparseclf
