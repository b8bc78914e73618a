#include "sparseclf/localsearch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>

namespace sparseclf {

void SwapOptions::validate() const {
    if (q < 0) throw std::invalid_argument("q must be non-negative");
    if (inner_prox_iters < 1) throw std::invalid_argument("inner_prox_iters must be positive");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be positive");
}

Index SwapOptions::effective_q(Index p, Index support_size) const {
    Index base = q > 0 ? q : static_cast<Index>(std::ceil(0.05 * static_cast<double>(p)));
    return std::max<Index>(0, std::min(std::max<Index>(base, 1), p - support_size));
}

std::vector<Index> restricted_candidates(const Vector& outside_grad_abs, const std::vector<Index>& outside,
                                         Index q) {
    std::vector<std::size_t> pos(outside.size());
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(q), pos.size());
    std::partial_sort(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(take), pos.end(),
                      [&](std::size_t a, std::size_t b) {
                          double ga = outside_grad_abs[static_cast<Index>(a)];
                          double gb = outside_grad_abs[static_cast<Index>(b)];
                          if (ga != gb) return ga > gb;
                          return outside[a] < outside[b];
                      });
    std::vector<Index> out;
    out.reserve(take);
    for (std::size_t t = 0; t < take; ++t) out.push_back(outside[pos[t]]);
    return out;
}

namespace {

/// Approximate argmin over b of G(beta + e_j b) by proximal steps with Lhat = L_j.
double one_dim_prox(const Dataset& d, const LossKind& kind, const Vector& scores, Index j, double first_grad,
                    double Lj, const PenaltyParams& lambda, const SwapOptions& opts) {
    PenaltyParams cont{0.0, lambda.lambda1, lambda.lambda2};
    const double n = static_cast<double>(d.n());
    const Vector& y = d.y();
    double b = 0.0;
    double grad = first_grad;
    for (int it = 0; it < opts.inner_prox_iters; ++it) {
        const double next = threshold(b - grad / Lj, cont, Lj);
        const double step = std::abs(next - b);
        b = next;
        if (step <= opts.inner_tol * std::max(1.0, std::abs(b))) break;
        // grad_j g at scores + b X_j
        double s = 0.0;
        if (d.is_sparse()) {
            for (SparseMatrix::InnerIterator it2(d.sparse_matrix(), j); it2; ++it2) {
                const Index k = it2.index();
                s += loss_derivative(kind, scores[k] + b * it2.value(), y[k]) * it2.value();
            }
            // rows where X_kj == 0 do not contribute
        } else {
            const auto col = d.dense_matrix().col(j);
            for (Index k = 0; k < d.n(); ++k) s += loss_derivative(kind, scores[k] + b * col[k], y[k]) * col[k];
        }
        grad = s / n;
    }
    return b;
}

double mean_loss_shifted(const Dataset& d, const LossKind& kind, const Vector& scores, Index j, double b) {
    if (b == 0.0) return mean_loss(kind, scores, d.y());
    Vector shifted = scores;
    d.col_axpy(j, b, shifted);
    return mean_loss(kind, shifted, d.y());
}

}  // namespace

std::optional<Solution> swap_step(const Solution& sol, const Dataset& d, const LossKind& kind,
                                  const PenaltyParams& lambda, const SwapOptions& opts, SwapMove* move) {
    opts.validate();
    const Index p = d.p();
    const Vector L = coordinate_lipschitz(kind, d).cwiseMax(1e-12);
    const double P0 = objective(kind, d, sol.beta, lambda).P;
    const double eps = 1e-12 * std::max(1.0, std::abs(P0));

    std::vector<Index> S = support_of(sol.beta);
    std::stable_sort(S.begin(), S.end(),
                     [&](Index a, Index b) { return std::abs(sol.beta[a]) < std::abs(sol.beta[b]); });
    std::vector<char> in_support(static_cast<std::size_t>(p), 0);
    for (Index i : S) in_support[static_cast<std::size_t>(i)] = 1;
    std::vector<Index> outside;
    for (Index j = 0; j < p; ++j) {
        if (!in_support[static_cast<std::size_t>(j)]) outside.push_back(j);
    }

    detail::CoordinateState state(d, kind, sol.beta);
    const double base_penalty = penalty_value(sol.beta, lambda);

    std::optional<SwapMove> best;
    auto consider = [&](const SwapMove& m) {
        if (!(m.objective_after < P0 - eps)) return false;
        if (!best || m.objective_after < best->objective_after) best = m;
        return !opts.best_of_round;
    };

    for (Index i : S) {
        const double bi = sol.beta[i];
        state.set(i, 0.0);
        const double pen_del = base_penalty - (lambda.lambda0 + lambda.lambda1 * std::abs(bi) + lambda.lambda2 * bi * bi);
        const double g_del = state.mean_loss();

        bool stop = consider({i, -1, 0.0, P0, g_del + pen_del});
        if (!stop && !outside.empty()) {
            std::vector<Index> J;
            Vector grads(static_cast<Index>(outside.size()));
            for (std::size_t t = 0; t < outside.size(); ++t) grads[static_cast<Index>(t)] = state.partial(outside[t]);
            if (opts.mode == SwapMode::exhaustive) {
                J = outside;
            } else {
                J = restricted_candidates(grads.cwiseAbs(), outside,
                                          opts.effective_q(p, static_cast<Index>(S.size())));
            }
            for (Index j : J) {
                const auto pos = std::lower_bound(outside.begin(), outside.end(), j) - outside.begin();
                const double bj = one_dim_prox(d, kind, state.scores(), j, grads[static_cast<Index>(pos)], L[j],
                                               lambda, opts);
                if (bj == 0.0) continue;
                const double P_new = mean_loss_shifted(d, kind, state.scores(), j, bj) + pen_del + lambda.lambda0 +
                                     lambda.lambda1 * std::abs(bj) + lambda.lambda2 * bj * bj;
                if (consider({i, j, bj, P0, P_new})) {
                    stop = true;
                    break;
                }
            }
        }
        state.set(i, bi);
        if (stop) break;
    }

    if (!best) return std::nullopt;
    Vector beta = sol.beta;
    beta[best->removed] = 0.0;
    if (best->added >= 0) beta[best->added] = best->added_value;
    Solution out = Solution::from_beta(kind, d, std::move(beta), lambda);
    // recomputed objective must still be a strict improvement
    if (!(out.objective_P < P0 - 0.5 * eps)) return std::nullopt;
    if (move) {
        *move = *best;
        move->objective_after = out.objective_P;
    }
    return out;
}

Solution cd_with_local_search(const Dataset& d, const LossKind& kind, const PenaltyParams& lambda,
                              const Vector& init, const FitOptions& fit_opts, const SwapOptions& swap_opts) {
    swap_opts.validate();
    Solution sol = cd_fit(d, kind, lambda, init, fit_opts);
    std::set<std::vector<Index>> visited{sol.support};
    int rounds = 0;
    int swaps = 0;
    bool finished = false;
    while (rounds < swap_opts.max_rounds) {
        ++rounds;
        auto improved = swap_step(sol, d, kind, lambda, swap_opts);
        if (!improved) {
            finished = true;
            break;
        }
        ++swaps;
        Solution next = cd_fit(d, kind, lambda, improved->beta, fit_opts);
        if (!(next.objective_P < sol.objective_P)) {
            throw std::logic_error("local search round did not decrease the objective");
        }
        if (!visited.insert(next.support).second) {
            // The objective strictly decreased, so a repeated support means the
            // coordinate descent polish stopped short on an earlier visit.
            sol = std::move(next);
            finished = false;
            break;
        }
        sol = std::move(next);
    }
    sol.diagnostics.search_rounds = rounds;
    sol.diagnostics.swaps_accepted = swaps;
    sol.diagnostics.converged = sol.diagnostics.converged && finished;
    return sol;
}

bool swap_inescapable(const Solution& sol, const Dataset& d, const LossKind& kind, const PenaltyParams& lambda,
                      SwapOptions opts) {
    opts.mode = SwapMode::exhaustive;
    opts.best_of_round = false;
    return !swap_step(sol, d, kind, lambda, opts).has_value();
}

}  // namespace sparseclf
