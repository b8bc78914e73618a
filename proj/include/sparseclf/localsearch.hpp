#pragma once

#include <optional>

#include "sparseclf/cd.hpp"

namespace sparseclf {

enum class SwapMode { heuristic, exhaustive };

struct SwapOptions {
    /// Size of the restricted candidate set J in heuristic mode; 0 means ceil(0.05 p).
    Index q = 0;
    int inner_prox_iters = 100;
    double inner_tol = 1e-8;
    SwapMode mode = SwapMode::heuristic;
    /// Evaluate every candidate and take the best move instead of the first improving one.
    bool best_of_round = false;
    /// Cap on (swap, re-polish) rounds in cd_with_local_search.
    int max_rounds = 1000;

    void validate() const;
    /// q actually used for a support of the given size (at least 1, at most p - |S|).
    Index effective_q(Index p, Index support_size) const;
};

/// Description of an accepted move: coordinate removed, coordinate added (or -1).
struct SwapMove {
    Index removed = -1;
    Index added = -1;
    double added_value = 0.0;
    double objective_before = 0.0;
    double objective_after = 0.0;
};

/**
 * One combinatorial search step with swaps of size one.
 *
 * Deletion candidates i in S are tried in ascending |beta_i|. For each one
 * the plain deletion is tested first, then every j in J (the q outside
 * coordinates with the largest |grad_j g| after deletion in heuristic mode,
 * all of S^c in exhaustive mode) receives a one-dimensional proximal solve
 * of G along e_j started at 0. Returns the improved solution, or nullopt
 * when nothing lowers P by more than 1e-12 max(1, |P|).
 */
std::optional<Solution> swap_step(const Solution& sol, const Dataset& d, const LossKind& kind,
                                  const PenaltyParams& lambda, const SwapOptions& opts,
                                  SwapMove* move = nullptr);

/// Coordinate descent alternated with swap_step until no swap improves.
Solution cd_with_local_search(const Dataset& d, const LossKind& kind, const PenaltyParams& lambda,
                              const Vector& init, const FitOptions& fit_opts = {},
                              const SwapOptions& swap_opts = {});

/// True when an exhaustive swap_step finds no improving deletion or swap.
bool swap_inescapable(const Solution& sol, const Dataset& d, const LossKind& kind, const PenaltyParams& lambda,
                      SwapOptions opts = {});

/// The restricted set J: the q indices outside the support with the largest
/// |grad_j|, ties to the lower index. Exposed for testing.
std::vector<Index> restricted_candidates(const Vector& outside_grad_abs, const std::vector<Index>& outside,
                                         Index q);

}  // namespace sparseclf
