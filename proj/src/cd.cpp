#include "sparseclf/cd.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sparseclf {

void FitOptions::validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
    if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
    if (max_full_cycles < 1) throw std::invalid_argument("max_full_cycles must be at least 1");
    if (grad_tol < 0.0) throw std::invalid_argument("grad_tol must be non-negative");
}

std::vector<Index> support_of(const Vector& beta) {
    std::vector<Index> s;
    for (Index i = 0; i < beta.size(); ++i) {
        if (beta[i] != 0.0) s.push_back(i);
    }
    return s;
}

Solution Solution::from_beta(const LossKind& kind, const Dataset& d, Vector beta, const PenaltyParams& lambda) {
    if (beta.size() != d.p()) throw std::invalid_argument("coefficient vector length does not match p");
    Solution s;
    auto obj = objective(kind, d, beta, lambda);
    s.objective_P = obj.P;
    s.objective_G = obj.G;
    s.objective_g = obj.g;
    s.support = support_of(beta);
    s.beta = std::move(beta);
    return s;
}

Solution Solution::zero(const LossKind& kind, const Dataset& d, const PenaltyParams& lambda) {
    Solution s = from_beta(kind, d, Vector::Zero(d.p()), lambda);
    s.diagnostics.converged = true;
    return s;
}

double threshold(double c, const PenaltyParams& lambda, double Lhat) {
    const double denom = Lhat + 2.0 * lambda.lambda2;
    const double mag = (Lhat * std::abs(c) - lambda.lambda1) / denom;
    if (mag <= 0.0) return 0.0;
    if (lambda.lambda0 > 0.0 && mag < std::sqrt(2.0 * lambda.lambda0 / denom)) return 0.0;
    return c > 0.0 ? mag : -mag;
}

double threshold_gap(const PenaltyParams& lambda, double Lhat) {
    return std::sqrt(2.0 * lambda.lambda0 / (Lhat + 2.0 * lambda.lambda2));
}

Vector scaled_lipschitz(const LossKind& kind, const Dataset& d, double gamma) {
    return (gamma * coordinate_lipschitz(kind, d)).cwiseMax(1e-12);
}

// ---------------------------------------------------------------------------
// CoordinateState

namespace detail {

CoordinateState::CoordinateState(const Dataset& d, const LossKind& kind, Vector beta)
    : d_(&d), kind_(kind), beta_(std::move(beta)) {
    if (beta_.size() == 0) beta_ = Vector::Zero(d.p());
    if (beta_.size() != d.p()) throw std::invalid_argument("initial coefficients have the wrong length");
    refresh();
}

double CoordinateState::partial(Index j) const {
    return d_->col_dot(j, derivs_) / static_cast<double>(d_->n());
}

void CoordinateState::set(Index j, double value) {
    const double delta = value - beta_[j];
    if (delta == 0.0) return;
    beta_[j] = value;
    const Vector& y = d_->y();
    if (d_->is_sparse()) {
        const auto& X = d_->sparse_matrix();
        for (SparseMatrix::InnerIterator it(X, j); it; ++it) {
            const Index k = it.index();
            scores_[k] += delta * it.value();
            derivs_[k] = loss_derivative(kind_, scores_[k], y[k]);
        }
    } else {
        scores_.noalias() += delta * d_->dense_matrix().col(j);
        for (Index k = 0; k < scores_.size(); ++k) derivs_[k] = loss_derivative(kind_, scores_[k], y[k]);
    }
}

double CoordinateState::mean_loss() const {
    return sparseclf::mean_loss(kind_, scores_, d_->y());
}

double CoordinateState::refresh() {
    Vector fresh = d_->multiply(beta_);
    double drift = scores_.size() == fresh.size() ? (scores_ - fresh).cwiseAbs().maxCoeff() : 0.0;
    scores_ = std::move(fresh);
    derivs_ = score_derivatives(kind_, scores_, d_->y());
    return drift;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Coordinate descent

namespace {

Vector gradient_at_zero(const Dataset& d, const LossKind& kind) {
    return gradient(kind, d, Vector::Zero(d.n()));
}

std::vector<Index> greedy_order(const Vector& grad0) {
    std::vector<Index> order(static_cast<std::size_t>(grad0.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(grad0[a]) > std::abs(grad0[b]); });
    return order;
}

bool relative_change_small(double before, double after, double tol) {
    return std::abs(before - after) <= tol * std::max(std::abs(after), 1e-300);
}

}  // namespace

Solution cd_fit(const Dataset& d, const LossKind& kind, const PenaltyParams& lambda, const Vector& init,
                const FitOptions& opts) {
    opts.validate();
    lambda.validate();
    const Index p = d.p();
    const Vector L = coordinate_lipschitz(kind, d);
    const Vector Lhat = scaled_lipschitz(kind, d, opts.gamma);

    detail::CoordinateState state(d, kind, init);

    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    Vector grad0;
    if (opts.cycle_order == CycleOrder::partially_greedy || opts.screening) grad0 = gradient_at_zero(d, kind);
    if (opts.cycle_order == CycleOrder::partially_greedy) order = greedy_order(grad0);

    // Coordinates eligible during full sweeps. Screening narrows it until convergence.
    std::vector<char> in_universe(static_cast<std::size_t>(p), 1);
    bool screened = false;
    if (opts.screening) {
        const auto keep = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(p)));
        auto ranked = greedy_order(grad0);
        std::fill(in_universe.begin(), in_universe.end(), 0);
        for (std::size_t t = 0; t < keep && t < ranked.size(); ++t) in_universe[static_cast<std::size_t>(ranked[t])] = 1;
        for (Index i = 0; i < p; ++i) {
            if (state.beta()[i] != 0.0) in_universe[static_cast<std::size_t>(i)] = 1;
        }
        screened = keep < static_cast<std::size_t>(p);
    }

    auto current_P = [&]() { return state.mean_loss() + penalty_value(state.beta(), lambda); };

    FitDiagnostics diag;
    double P = current_P();
    bool full_next = true;
    int full_done = 0;

    while (diag.cycles < opts.max_full_cycles) {
        const bool full = !opts.active_set || full_done < 2 || full_next;
        ++diag.cycles;
        if (full) {
            ++full_done;
            const double drift = state.refresh();
            assert(drift <= 1e-8 * std::max(1.0, state.scores().cwiseAbs().maxCoeff()));
            (void)drift;
            P = current_P();
        }

        bool support_changed = false;
        double max_step = 0.0;
        const double P_before_cycle = P;
        double P_trace = P;  // P before the next logged update
        for (Index i : order) {
            const double bi = state.beta()[i];
            if (full) {
                if (!in_universe[static_cast<std::size_t>(i)]) continue;
            } else if (bi == 0.0) {
                continue;
            }
            const double c = bi - state.partial(i) / Lhat[i];
            const double next = threshold(c, lambda, Lhat[i]);
            if (next == bi) continue;
            state.set(i, next);
            if ((bi == 0.0) != (next == 0.0)) support_changed = true;
            max_step = std::max(max_step, Lhat[i] * std::abs(next - bi));
            if (opts.record_trace) {
                UpdateRecord rec;
                rec.coord = i;
                rec.before = bi;
                rec.after = next;
                rec.P_before = P_trace;
                rec.P_after = P_trace = current_P();
                rec.L = L[i];
                rec.Lhat = Lhat[i];
                diag.trace.push_back(rec);
            }
        }
        P = current_P();
        if (support_changed) diag.support_stable_cycle = diag.cycles;

        const bool settled = !support_changed && relative_change_small(P_before_cycle, P, opts.rel_tol) &&
                             (opts.grad_tol == 0.0 || max_step <= opts.grad_tol);
        if (full) {
            ++diag.full_sweeps;
            if (settled && full_done >= 2) {
                if (screened) {
                    std::fill(in_universe.begin(), in_universe.end(), 1);
                    screened = false;
                    full_next = true;
                    continue;
                }
                diag.converged = true;
                break;
            }
            full_next = false;
        } else if (settled) {
            full_next = true;
        }
    }

    Solution sol = Solution::from_beta(kind, d, state.beta(), lambda);
    diag.trace.shrink_to_fit();
    sol.diagnostics = std::move(diag);
    return sol;
}

double lambda0_max(const Dataset& d, const LossKind& kind, double lambda1, double lambda2, const FitOptions& opts) {
    const Vector grad0 = gradient_at_zero(d, kind);
    const Vector Lhat = scaled_lipschitz(kind, d, opts.gamma);
    double best = 0.0;
    for (Index i = 0; i < d.p(); ++i) {
        double excess = std::max(0.0, std::abs(grad0[i]) - lambda1);
        best = std::max(best, excess * excess / (2.0 * (Lhat[i] + 2.0 * lambda2)));
    }
    return best;
}

StationarityReport check_stationarity(const Solution& sol, const Dataset& d, const LossKind& kind,
                                      const PenaltyParams& lambda, const FitOptions& opts, double tol) {
    const Vector grad = gradient(kind, d, d.multiply(sol.beta));
    const Vector Lhat = scaled_lipschitz(kind, d, opts.gamma);
    StationarityReport rep;
    rep.outside_margin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < d.p(); ++i) {
        const double b = sol.beta[i];
        const double curv = Lhat[i] + 2.0 * lambda.lambda2;
        if (b != 0.0) {
            const double sign = b > 0.0 ? 1.0 : -1.0;
            rep.restricted_gradient =
                std::max(rep.restricted_gradient, std::abs(grad[i] + lambda.lambda1 * sign + 2.0 * lambda.lambda2 * b));
            rep.magnitude_shortfall =
                std::max(rep.magnitude_shortfall, std::sqrt(2.0 * lambda.lambda0 / curv) - std::abs(b));
        } else {
            const double slack = std::sqrt(2.0 * lambda.lambda0 * curv) - (std::abs(grad[i]) - lambda.lambda1);
            rep.outside_margin = std::min(rep.outside_margin, slack);
            rep.outside_excess = std::max(rep.outside_excess, -slack);
        }
    }
    rep.restricted_ok = rep.restricted_gradient <= tol;
    rep.magnitude_ok = rep.magnitude_shortfall <= tol;
    rep.outside_ok = rep.outside_excess <= tol;
    return rep;
}

}  // namespace sparseclf
