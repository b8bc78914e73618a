#pragma once

#include <optional>
#include <vector>

#include "sparseclf/data.hpp"
#include "sparseclf/loss.hpp"

namespace sparseclf {

enum class CycleOrder { natural, partially_greedy };

struct FitOptions {
    /// Relative change of P over one cycle that counts as converged.
    double rel_tol = 1e-6;
    /// Cap on coordinate cycles (restricted and full sweeps both count).
    int max_full_cycles = 1000;
    /// Lhat_i = gamma * L_i; must exceed 1.
    double gamma = 1.05;
    bool active_set = true;
    CycleOrder cycle_order = CycleOrder::natural;
    /// Optional: also require max_i Lhat_i |delta beta_i| <= grad_tol over the
    /// last cycle. 0 disables the check.
    double grad_tol = 0.0;
    /// Restrict the first cycles to the top ceil(0.2 p) coordinates by |grad_i g(0)|.
    /// A final sweep over all p coordinates still runs before returning.
    bool screening = false;
    /// Keep a per-update log of objective values (tests and audits).
    bool record_trace = false;

    void validate() const;
};

/// One coordinate update, logged when FitOptions::record_trace is set.
struct UpdateRecord {
    Index coord = 0;
    double before = 0.0;
    double after = 0.0;
    double P_before = 0.0;
    double P_after = 0.0;
    double L = 0.0;
    double Lhat = 0.0;
};

struct FitDiagnostics {
    int cycles = 0;
    int full_sweeps = 0;
    /// Last cycle in which the support changed (0 if it never did).
    int support_stable_cycle = 0;
    bool converged = false;
    /// Local search bookkeeping; zero for plain coordinate descent.
    int search_rounds = 0;
    int swaps_accepted = 0;
    std::vector<UpdateRecord> trace;
};

/**
 * A coefficient vector together with its support and objective values.
 *
 * beta is stored densely (length p); support lists the indices of the
 * nonzero entries in increasing order and is kept in sync by from_beta().
 */
struct Solution {
    Vector beta;
    std::vector<Index> support;
    double objective_P = 0.0;
    double objective_G = 0.0;
    double objective_g = 0.0;
    FitDiagnostics diagnostics;

    static Solution from_beta(const LossKind& kind, const Dataset& d, Vector beta, const PenaltyParams& lambda);
    static Solution zero(const LossKind& kind, const Dataset& d, const PenaltyParams& lambda);

    Index support_size() const { return static_cast<Index>(support.size()); }
};

std::vector<Index> support_of(const Vector& beta);

/**
 * Minimizer of a -> (Lhat/2)(a - c)^2 + lambda0 1[a != 0] + lambda1 |a| + lambda2 a^2.
 *
 * Returns (Lhat |c| - lambda1)/(Lhat + 2 lambda2) * sign(c) when that
 * magnitude reaches sqrt(2 lambda0 / (Lhat + 2 lambda2)), else 0. A value
 * sitting exactly on the cut stays nonzero.
 */
double threshold(double c, const PenaltyParams& lambda, double Lhat);

/// Smallest magnitude a nonzero threshold() output can take.
double threshold_gap(const PenaltyParams& lambda, double Lhat);

/// Lhat_i = max(gamma L_i, 1e-12).
Vector scaled_lipschitz(const LossKind& kind, const Dataset& d, double gamma);

/// Cyclic coordinate descent with active sets. init may be empty (zero start).
Solution cd_fit(const Dataset& d, const LossKind& kind, const PenaltyParams& lambda, const Vector& init,
                const FitOptions& opts = {});

/// Smallest lambda0 at and above which the zero vector is a fixed point of cd_fit.
double lambda0_max(const Dataset& d, const LossKind& kind, double lambda1, double lambda2,
                   const FitOptions& opts = {});

struct StationarityReport {
    /// max_{i in S} |grad_i g + lambda1 sign(beta_i) + 2 lambda2 beta_i|
    double restricted_gradient = 0.0;
    /// max_{i in S} (sqrt(2 lambda0/(Lhat_i + 2 lambda2)) - |beta_i|), clamped at 0
    double magnitude_shortfall = 0.0;
    /// max_{i not in S} (|grad_i g| - lambda1 - sqrt(2 lambda0 (Lhat_i + 2 lambda2))), clamped at 0
    double outside_excess = 0.0;
    /// Slack of the outside condition at its tightest coordinate (negative means violated).
    double outside_margin = 0.0;
    bool restricted_ok = false;
    bool magnitude_ok = false;
    bool outside_ok = false;

    bool pass() const { return restricted_ok && magnitude_ok && outside_ok; }
};

/// Checks the coordinate-wise fixed point conditions of cd_fit. Pure.
StationarityReport check_stationarity(const Solution& sol, const Dataset& d, const LossKind& kind,
                                      const PenaltyParams& lambda, const FitOptions& opts, double tol);

namespace detail {

/**
 * Coefficients plus the score cache u = X beta and the derivative cache
 * r_k = f'(u_k, y_k). Coordinate changes update both caches in O(nnz(X_j)).
 */
class CoordinateState {
public:
    CoordinateState(const Dataset& d, const LossKind& kind, Vector beta);

    const Vector& beta() const { return beta_; }
    const Vector& scores() const { return scores_; }

    /// grad_j g(beta)
    double partial(Index j) const;
    /// Sets beta_j to value, updating caches; no-op if unchanged.
    void set(Index j, double value);
    double mean_loss() const;
    /// Recomputes the caches from scratch; returns max |u_old - u_new|.
    double refresh();

private:
    const Dataset* d_;
    LossKind kind_;
    Vector beta_;
    Vector scores_;
    Vector derivs_;
};

}  // namespace detail

}  // namespace sparseclf
