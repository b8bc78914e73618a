#pragma once

#include <vector>

#include "sparseclf/cd.hpp"

namespace sparseclf {

struct PathResult;

/// min G(beta) subject to ||beta||_0 <= k, solved with step 1/(gamma L).
struct ConstrainedSpec {
    Index k = 1;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double gamma = 1.05;

    void validate(Index p) const;
    PenaltyParams penalties() const { return {0.0, lambda1, lambda2}; }
};

struct IhtOptions {
    double rel_tol = 1e-6;
    int max_iter = 10000;
};

/// gamma * (global Lipschitz constant of grad g).
double iht_lipschitz(const Dataset& d, const LossKind& kind, double gamma);

/**
 * One hard-thresholding proximal step: c = beta - grad g(beta) / Lhat, keep the
 * k largest |c_i| (ties to the lower index) and shrink them to
 * sign(c)(|c| - lambda1/Lhat)_+ / (1 + 2 lambda2/Lhat).
 */
Vector iht_step(const Vector& beta, const ConstrainedSpec& spec, const Dataset& d, const LossKind& kind, double Lhat);

struct IhtResult {
    Solution solution;
    int iterations = 0;
    bool converged = false;
    /// Final support is smaller than k.
    bool degenerate = false;
};

IhtResult iht_fit(const Dataset& d, const LossKind& kind, const ConstrainedSpec& spec, const Vector& init,
                  const IhtOptions& opts = {});

struct IhtFixedPointReport {
    double restricted_gradient = 0.0;  ///< subgradient residual of G on the support
    double outside_excess = 0.0;       ///< max_{i not in S} (|grad_i g| - delta_(k)), clamped at 0
    double delta_k = 0.0;
    bool pass = false;
};

IhtFixedPointReport iht_fixed_point(const Solution& sol, const ConstrainedSpec& spec, const Dataset& d,
                                    const LossKind& kind, double Lhat, double tol);

struct ConstrainedEntry {
    Index k = 0;
    Solution solution;
    bool from_path = false;
    bool degenerate = false;
    /// Path entry used directly or as the IHT initializer (-1 for the zero start).
    int source_index = -1;
};

/// Fills requested support sizes from a penalized path, running IHT only for gaps.
std::vector<ConstrainedEntry> constrained_path(const Dataset& d, const LossKind& kind, double lambda1, double lambda2,
                                               const std::vector<Index>& wanted_k, const PathResult& path,
                                               double gamma = 1.05, const IhtOptions& opts = {});

}  // namespace sparseclf
