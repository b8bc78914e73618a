#include "sparseclf/iht.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sparseclf/path.hpp"

namespace sparseclf {

void ConstrainedSpec::validate(Index p) const {
    if (k < 0) throw std::invalid_argument("cardinality bound k must be non-negative");
    if (p < 1) throw std::invalid_argument("empty problem");
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw std::invalid_argument("penalties must be non-negative");
    if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
}

double iht_lipschitz(const Dataset& d, const LossKind& kind, double gamma) {
    return std::max(gamma * global_lipschitz(kind, d), 1e-12);
}

Vector iht_step(const Vector& beta, const ConstrainedSpec& spec, const Dataset& d, const LossKind& kind, double Lhat) {
    const Index p = d.p();
    const Index k = std::min(spec.k, p);
    Vector out = Vector::Zero(p);
    if (k <= 0) return out;
    const Vector grad = gradient(kind, d, d.multiply(beta));
    const Vector c = beta - grad / Lhat;

    std::vector<Index> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](Index a, Index b) {
        const double ca = std::abs(c[a]);
        const double cb = std::abs(c[b]);
        if (ca != cb) return ca > cb;
        return a < b;
    });
    const double tau = 1.0 / Lhat;
    for (Index t = 0; t < k; ++t) {
        const Index i = idx[static_cast<std::size_t>(t)];
        const double mag = std::max(0.0, std::abs(c[i]) - tau * spec.lambda1) / (1.0 + 2.0 * tau * spec.lambda2);
        out[i] = c[i] > 0.0 ? mag : -mag;
    }
    return out;
}

IhtResult iht_fit(const Dataset& d, const LossKind& kind, const ConstrainedSpec& spec, const Vector& init,
                  const IhtOptions& opts) {
    spec.validate(d.p());
    const PenaltyParams pen = spec.penalties();
    IhtResult res;
    if (spec.k == 0) {
        res.solution = Solution::zero(kind, d, pen);
        res.converged = true;
        return res;
    }
    const double Lhat = iht_lipschitz(d, kind, spec.gamma);
    Vector beta = init.size() == 0 ? Vector::Zero(d.p()) : init;
    if (beta.size() != d.p()) throw std::invalid_argument("initial coefficients have the wrong length");
    if (static_cast<Index>(support_of(beta).size()) > spec.k) {
        // project an infeasible start onto the constraint set
        beta = iht_step(beta, spec, d, kind, std::numeric_limits<double>::infinity());
    }
    double G = objective(kind, d, beta, pen).G;
    auto support = support_of(beta);
    for (res.iterations = 0; res.iterations < opts.max_iter;) {
        ++res.iterations;
        Vector next = iht_step(beta, spec, d, kind, Lhat);
        const double G_next = objective(kind, d, next, pen).G;
        auto next_support = support_of(next);
        const bool same_support = next_support == support;
        const bool small = std::abs(G - G_next) <= opts.rel_tol * std::max(std::abs(G_next), 1e-300);
        beta = std::move(next);
        support = std::move(next_support);
        G = G_next;
        if (same_support && small) {
            res.converged = true;
            break;
        }
    }
    res.solution = Solution::from_beta(kind, d, std::move(beta), pen);
    res.solution.diagnostics.converged = res.converged;
    res.solution.diagnostics.cycles = res.iterations;
    res.degenerate = res.solution.support_size() < std::min(spec.k, d.p());
    return res;
}

IhtFixedPointReport iht_fixed_point(const Solution& sol, const ConstrainedSpec& spec, const Dataset& d,
                                    const LossKind& kind, double Lhat, double tol) {
    const Vector grad = gradient(kind, d, d.multiply(sol.beta));
    IhtFixedPointReport rep;
    const Index p = d.p();
    std::vector<double> delta(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) delta[static_cast<std::size_t>(j)] = std::abs(Lhat * sol.beta[j] - grad[j]);
    const Index k = std::min(spec.k, p);
    if (k >= 1) {
        std::nth_element(delta.begin(), delta.begin() + (k - 1), delta.end(), std::greater<>());
        rep.delta_k = delta[static_cast<std::size_t>(k - 1)];
    }
    for (Index i = 0; i < p; ++i) {
        const double b = sol.beta[i];
        if (b != 0.0) {
            const double sign = b > 0.0 ? 1.0 : -1.0;
            rep.restricted_gradient =
                std::max(rep.restricted_gradient, std::abs(grad[i] + spec.lambda1 * sign + 2.0 * spec.lambda2 * b));
        } else {
            rep.outside_excess = std::max(rep.outside_excess, std::abs(grad[i]) - rep.delta_k);
        }
    }
    const bool feasible = static_cast<Index>(support_of(sol.beta).size()) <= spec.k;
    rep.pass = feasible && rep.restricted_gradient <= tol && rep.outside_excess <= tol;
    return rep;
}

std::vector<ConstrainedEntry> constrained_path(const Dataset& d, const LossKind& kind, double lambda1, double lambda2,
                                               const std::vector<Index>& wanted_k, const PathResult& path,
                                               double gamma, const IhtOptions& opts) {
    std::vector<std::size_t> slice;
    for (std::size_t e = 0; e < path.entries.size(); ++e) {
        const auto& lam = path.entries[e].lambda;
        if (lam.lambda1 == lambda1 && lam.lambda2 == lambda2) slice.push_back(e);
    }
    std::vector<ConstrainedEntry> out;
    for (Index k : wanted_k) {
        ConstrainedEntry entry;
        entry.k = k;
        int exact = -1;
        int below = -1;
        Index below_size = -1;
        for (std::size_t e : slice) {
            const Index s = path.entries[e].solution.support_size();
            if (s == k && exact < 0) exact = static_cast<int>(e);
            if (s < k && s > below_size) {
                below = static_cast<int>(e);
                below_size = s;
            }
        }
        if (exact >= 0) {
            entry.solution = path.entries[static_cast<std::size_t>(exact)].solution;
            entry.from_path = true;
            entry.source_index = exact;
        } else {
            ConstrainedSpec spec{k, lambda1, lambda2, gamma};
            Vector init = below >= 0 ? path.entries[static_cast<std::size_t>(below)].solution.beta : Vector();
            auto res = iht_fit(d, kind, spec, init, opts);
            entry.solution = std::move(res.solution);
            entry.degenerate = res.degenerate;
            entry.source_index = below;
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace sparseclf
