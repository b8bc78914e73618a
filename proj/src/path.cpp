#include "sparseclf/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparseclf/metrics.hpp"

namespace sparseclf {

void GridSpec::validate() const {
    if (n_lambda0 < 1) throw std::invalid_argument("n_lambda0 must be at least 1");
    if (!(lambda0_ratio > 0.0 && lambda0_ratio <= 1.0)) throw std::invalid_argument("lambda0_ratio must lie in (0, 1]");
    if (lambda_q_values.empty()) throw std::invalid_argument("need at least one lambda_q value");
    for (double v : lambda_q_values) {
        if (!(v >= 0.0)) throw std::invalid_argument("lambda_q values must be non-negative");
    }
    if (!(fixed_other >= 0.0)) throw std::invalid_argument("fixed penalty must be non-negative");
    if (max_support < 0) throw std::invalid_argument("max_support must be non-negative");
}

std::vector<double> log_spaced(double hi, double lo, int count) {
    std::vector<double> out;
    if (count <= 0) return out;
    if (count == 1) return {hi};
    const double ratio = std::log(lo / hi);
    for (int t = 0; t < count; ++t) out.push_back(hi * std::exp(ratio * t / (count - 1)));
    out.back() = lo;
    return out;
}

double dynamic_next_lambda0(const Dataset& d, const LossKind& kind, const Solution& sol, const PenaltyParams& lambda,
                            const FitOptions& opts, double eps) {
    const Vector grad = gradient(kind, d, d.multiply(sol.beta));
    const Vector Lhat = scaled_lipschitz(kind, d, opts.gamma);
    double best = 0.0;
    for (Index j = 0; j < d.p(); ++j) {
        if (sol.beta[j] != 0.0) continue;
        const double excess = std::max(0.0, std::abs(grad[j]) - lambda.lambda1);
        best = std::max(best, excess * excess / (2.0 * (Lhat[j] + 2.0 * lambda.lambda2)));
    }
    return (1.0 - eps) * best;
}

namespace {

Solution run_fit(const Dataset& d, const LossKind& kind, const PenaltyParams& lam, const Vector& init,
                 const PathOptions& opts, bool first_solve) {
    FitOptions fit = opts.fit;
    fit.screening = opts.fit.screening && first_solve;
    if (opts.algorithm == PathAlgorithm::cd_local_search) return cd_with_local_search(d, kind, lam, init, fit, opts.swap);
    return cd_fit(d, kind, lam, init, fit);
}

}  // namespace

PathResult fit_path(const Dataset& d, const LossKind& kind, const GridSpec& grid, const PathOptions& opts) {
    grid.validate();
    opts.fit.validate();
    PathResult result;
    bool first_solve = true;
    for (double q : grid.lambda_q_values) {
        PenaltyParams lam;
        if (grid.secondary == SecondaryPenalty::l2) {
            lam.lambda2 = q;
            lam.lambda1 = grid.fixed_other;
        } else {
            lam.lambda1 = q;
            lam.lambda2 = grid.fixed_other;
        }
        const double lmax = lambda0_max(d, kind, lam.lambda1, lam.lambda2, opts.fit);
        const auto static_grid = log_spaced(lmax, lmax * grid.lambda0_ratio, grid.n_lambda0);

        result.slice_begin.push_back(result.entries.size());
        lam.lambda0 = lmax;
        PathEntry start;
        start.lambda = lam;
        start.solution = Solution::zero(kind, d, lam);
        result.entries.push_back(start);
        std::size_t last_stored = result.entries.size() - 1;
        Solution previous = start.solution;
        double current = lmax;
        if (lmax <= 0.0) continue;

        while (true) {
            auto it = std::find_if(static_grid.begin(), static_grid.end(), [&](double v) { return v < current; });
            if (it == static_grid.end()) break;
            double next = *it;
            if (grid.dynamic) {
                next = std::min(next, dynamic_next_lambda0(d, kind, previous, lam, opts.fit));
                next = std::max(next, static_grid.back());
            }
            if (!(next < current)) break;
            lam.lambda0 = next;
            Solution sol = run_fit(d, kind, lam, previous.beta, opts, first_solve);
            first_solve = false;
            if (sol.support == result.entries[last_stored].solution.support) {
                ++result.entries[last_stored].duplicates_skipped;
            } else {
                PathEntry e;
                e.lambda = lam;
                e.solution = sol;
                e.warm_from = static_cast<int>(last_stored);
                result.entries.push_back(std::move(e));
                last_stored = result.entries.size() - 1;
            }
            previous = std::move(sol);
            current = next;
            if (grid.max_support > 0 && previous.support_size() > grid.max_support) break;
        }
    }
    return result;
}

PathResult fit_l1_path(const Dataset& d, const LossKind& kind, int n_lambda, double ratio, double lambda2,
                       const FitOptions& opts, Index max_support) {
    if (n_lambda < 1 || !(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("invalid l1 grid");
    const Vector grad0 = gradient(kind, d, Vector::Zero(d.n()));
    const double lmax = grad0.cwiseAbs().maxCoeff();
    PathResult result;
    result.slice_begin.push_back(0);
    PenaltyParams lam{0.0, lmax, lambda2};
    PathEntry start;
    start.lambda = lam;
    start.solution = Solution::zero(kind, d, lam);
    result.entries.push_back(start);
    if (lmax <= 0.0) return result;
    const auto values = log_spaced(lmax, lmax * ratio, n_lambda);
    for (std::size_t t = 1; t < values.size(); ++t) {
        lam.lambda1 = values[t];
        PathEntry e;
        e.lambda = lam;
        e.solution = cd_fit(d, kind, lam, result.entries.back().solution.beta, opts);
        e.warm_from = static_cast<int>(result.entries.size() - 1);
        result.entries.push_back(std::move(e));
        if (max_support > 0 && result.entries.back().solution.support_size() > max_support) break;
    }
    return result;
}

TuneResult tune_on_validation(const PathResult& path, const Dataset& validation, const LossKind& kind) {
    if (path.entries.empty()) throw std::invalid_argument("cannot tune on an empty path");
    TuneResult out;
    bool both_classes = validation.y().maxCoeff() > 0 && validation.y().minCoeff() < 0;
    for (std::size_t e = 0; e < path.entries.size(); ++e) {
        const auto& sol = path.entries[e].solution;
        if (sol.beta.size() != validation.p()) throw std::invalid_argument("validation data has the wrong feature count");
        const Vector scores = validation.multiply(sol.beta);
        ValidationRow row;
        row.entry = e;
        row.val_loss = mean_loss(kind, scores, validation.y());
        row.auc = both_classes ? auc(scores, validation.y()) : 0.5;
        row.support_size = sol.support_size();
        out.table.push_back(row);
    }
    auto better = [&](const ValidationRow& a, const ValidationRow& b) {
        const double tol = 1e-12 * std::max(1.0, std::abs(b.val_loss));
        if (std::abs(a.val_loss - b.val_loss) > tol) return a.val_loss < b.val_loss;
        if (a.support_size != b.support_size) return a.support_size < b.support_size;
        return path.entries[a.entry].lambda.lambda0 > path.entries[b.entry].lambda.lambda0;
    };
    std::size_t best = 0;
    for (std::size_t e = 1; e < out.table.size(); ++e) {
        if (better(out.table[e], out.table[best])) best = e;
    }
    out.best = best;
    return out;
}

}  // namespace sparseclf
