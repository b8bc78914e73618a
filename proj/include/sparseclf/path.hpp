#pragma once

#include <vector>

#include "sparseclf/localsearch.hpp"

namespace sparseclf {

/// Which continuous penalty the second grid axis sweeps.
enum class SecondaryPenalty { l2, l1 };

struct GridSpec {
    int n_lambda0 = 100;
    /// Smallest lambda0 is lambda0_ratio * lambda0_max.
    double lambda0_ratio = 0.001;
    SecondaryPenalty secondary = SecondaryPenalty::l2;
    /// Values of lambda2 (or lambda1); the other continuous penalty is `fixed_other`.
    std::vector<double> lambda_q_values{0.0};
    double fixed_other = 0.0;
    /// Pick each next lambda0 so that at least one new coordinate becomes admissible.
    bool dynamic = true;
    /// Stop descending lambda0 in a slice once the support grows beyond this (0 = no cap).
    Index max_support = 0;

    void validate() const;
};

/// 10 log-spaced values from hi down to lo (inclusive).
std::vector<double> log_spaced(double hi, double lo, int count);

enum class PathAlgorithm { cd, cd_local_search };

struct PathEntry {
    PenaltyParams lambda;
    Solution solution;
    /// Index of the entry whose solution seeded this fit (-1 for a slice start).
    int warm_from = -1;
    /// Grid points that reproduced this entry's support and were not stored.
    int duplicates_skipped = 0;
};

struct PathResult {
    std::vector<PathEntry> entries;
    /// entries[slice_begin[s] .. slice_begin[s+1]) share one lambda_q value.
    std::vector<std::size_t> slice_begin;
};

struct PathOptions {
    PathAlgorithm algorithm = PathAlgorithm::cd;
    FitOptions fit;
    SwapOptions swap;
};

/// Warm-started regularization path; lambda_q is the outer loop, lambda0 the inner.
PathResult fit_path(const Dataset& d, const LossKind& kind, const GridSpec& grid, const PathOptions& opts = {});

/// Pure l1 path (lambda0 = 0) from lambda1_max down to ratio * lambda1_max.
PathResult fit_l1_path(const Dataset& d, const LossKind& kind, int n_lambda, double ratio, double lambda2,
                       const FitOptions& opts = {}, Index max_support = 0);

/// Next lambda0 under the dynamic rule, before clamping to the static grid.
double dynamic_next_lambda0(const Dataset& d, const LossKind& kind, const Solution& sol, const PenaltyParams& lambda,
                            const FitOptions& opts, double eps = 1e-3);

struct ValidationRow {
    std::size_t entry = 0;
    double val_loss = 0.0;
    double auc = 0.5;
    Index support_size = 0;
};

struct TuneResult {
    std::size_t best = 0;
    std::vector<ValidationRow> table;
};

/// Picks the entry with the smallest unregularized validation loss.
/// Ties: smaller support, then larger lambda0.
TuneResult tune_on_validation(const PathResult& path, const Dataset& validation, const LossKind& kind);

}  // namespace sparseclf
