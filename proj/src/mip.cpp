#include "sparseclf/mip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

namespace sparseclf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// min over |b| <= M of a b + l |b| + q b^2
double box_min(double a, double l, double q, double M) {
    const double excess = std::abs(a) - l;
    if (excess <= 0.0) return 0.0;
    if (q > 0.0) {
        const double b = std::min(excess / (2.0 * q), M);
        return -excess * b + q * b * b;
    }
    return -excess * M;
}

double clip(double v, double M) { return std::clamp(v, -M, M); }

double l1_weight(const MipProblem& prob, Fix f) {
    return f == Fix::one ? prob.lambda.lambda1 : prob.lambda.lambda1 + prob.lambda.lambda0 / prob.big_m;
}

Vector indicators(const MipProblem& prob, const std::vector<Fix>& fixed, const Vector& beta) {
    Vector z(beta.size());
    for (Index i = 0; i < beta.size(); ++i) {
        const Fix f = fixed[static_cast<std::size_t>(i)];
        if (f == Fix::zero) z[i] = 0.0;
        else if (f == Fix::one) z[i] = 1.0;
        else z[i] = std::min(1.0, std::abs(beta[i]) / prob.big_m);
    }
    return z;
}

}  // namespace

void MipProblem::validate() const {
    if (data == nullptr) throw std::invalid_argument("MIP problem has no data");
    lambda.validate();
    if (!(big_m > 0.0) || !std::isfinite(big_m)) throw std::invalid_argument("big-M must be positive and finite");
    for (Index i : integral) {
        if (i < 0 || i >= data->p()) throw std::invalid_argument("integral index out of range");
    }
}

std::string to_string(MipStatus status) {
    switch (status) {
        case MipStatus::optimal: return "optimal";
        case MipStatus::gap_reached: return "gap-reached";
        case MipStatus::budget_exhausted: return "budget-exhausted";
    }
    return "unknown";
}

double optimality_gap(double upper, double lower) {
    if (upper == lower) return 0.0;
    if (!std::isfinite(upper) || !std::isfinite(lower)) return kInf;
    return std::max(0.0, upper - lower) / std::max(std::abs(lower), 1e-12);
}

BigMChoice choose_big_m(const Vector& warm) {
    const double m = warm.size() > 0 ? warm.cwiseAbs().maxCoeff() : 0.0;
    if (m > 0.0) return {1.2 * m, false};
    return {1.0, true};
}

RelaxationResult solve_relaxation(const MipProblem& prob, const std::vector<Fix>& fixed, const Vector& warm,
                                  const RelaxationOptions& opts) {
    const Dataset& d = *prob.data;
    const Index p = d.p();
    const double M = prob.big_m;
    const double l2 = prob.lambda.lambda2;
    if (static_cast<Index>(fixed.size()) != p) throw std::invalid_argument("fix vector has the wrong length");

    Vector start = warm.size() == p ? warm : Vector::Zero(p);
    double ones = 0.0;
    std::vector<Index> active;
    for (Index i = 0; i < p; ++i) {
        const Fix f = fixed[static_cast<std::size_t>(i)];
        if (f == Fix::zero) start[i] = 0.0;
        else {
            start[i] = clip(start[i], M);
            active.push_back(i);
        }
        if (f == Fix::one) ones += 1.0;
    }
    const Vector Lhat = scaled_lipschitz(prob.kind, d, opts.gamma);
    detail::CoordinateState st(d, prob.kind, std::move(start));

    auto update = [&](Index j) {
        const double b = st.beta()[j];
        const double c = b - st.partial(j) / Lhat[j];
        const PenaltyParams pen{0.0, l1_weight(prob, fixed[static_cast<std::size_t>(j)]), l2};
        const double next = clip(threshold(c, pen, Lhat[j]), M);
        st.set(j, next);
        return Lhat[j] * std::abs(next - b);
    };

    RelaxationResult res;
    auto evaluate = [&]() {
        const double g = st.mean_loss();
        const Vector grad = gradient(prob.kind, d, st.scores());
        double primal = g + prob.lambda.lambda0 * ones;
        double bound = g + prob.lambda.lambda0 * ones;
        for (Index i : active) {
            const double b = st.beta()[i];
            const double l = l1_weight(prob, fixed[static_cast<std::size_t>(i)]);
            primal += l * std::abs(b) + l2 * b * b;
            bound += -grad[i] * b + box_min(grad[i], l, l2, M);
        }
        res.primal = primal;
        res.bound = std::min(bound, primal);
    };

    const double step_floor = 1e-13;
    while (res.cycles < opts.max_cycles) {
        ++res.cycles;
        for (Index j : active) update(j);
        // polish the nonzeros before paying for a full gradient
        for (int inner = 0; inner < 200 && res.cycles < opts.max_cycles; ++inner) {
            ++res.cycles;
            double max_step = 0.0;
            for (Index j : active) {
                if (st.beta()[j] != 0.0) max_step = std::max(max_step, update(j));
            }
            if (max_step <= step_floor) break;
        }
        st.refresh();
        evaluate();
        if (res.primal - res.bound <= opts.rel_tol * std::max(std::abs(res.primal), 1e-12)) {
            res.converged = true;
            break;
        }
        if (res.bound >= opts.cutoff) break;
    }
    if (!res.converged) evaluate();
    res.beta = st.beta();
    res.z = indicators(prob, fixed, res.beta);
    return res;
}

double relaxation_objective_with_z(const MipProblem& prob, const Vector& beta, const Vector& z) {
    const auto v = objective(prob.kind, *prob.data, beta, PenaltyParams{0.0, prob.lambda.lambda1, prob.lambda.lambda2});
    return v.P + prob.lambda.lambda0 * z.sum();
}

namespace {

struct NodeOrder {
    bool operator()(const MipNode& a, const MipNode& b) const {
        if (a.lower_bound != b.lower_bound) return a.lower_bound > b.lower_bound;
        return a.depth < b.depth;
    }
};

class Incumbent {
public:
    explicit Incumbent(const MipProblem& prob) : prob_(prob) {}

    void offer(Vector beta) {
        for (Index i = 0; i < beta.size(); ++i) beta[i] = clip(beta[i], prob_.big_m);
        const double P = objective(prob_.kind, *prob_.data, beta, prob_.lambda).P;
        if (P < value) {
            value = P;
            beta_ = std::move(beta);
        }
    }

    // coordinate descent on the original problem, started from a relaxation point
    void polish(const Vector& start) {
        if (!tried_.insert(support_of(start)).second) return;
        FitOptions fo;
        fo.rel_tol = 1e-10;
        fo.max_full_cycles = 500;
        Solution s = cd_fit(*prob_.data, prob_.kind, prob_.lambda, start, fo);
        if (s.beta.cwiseAbs().maxCoeff() <= prob_.big_m) {
            if (s.objective_P < value) {
                value = s.objective_P;
                beta_ = s.beta;
            }
        } else {
            offer(s.beta);
        }
    }

    double value = kInf;
    const Vector& beta() const { return beta_; }

private:
    const MipProblem& prob_;
    Vector beta_;
    std::set<std::vector<Index>> tried_;
};

MipStatus classify(double gap, double gap_tol) {
    if (gap <= std::min(gap_tol, kOptimalGap)) return MipStatus::optimal;
    if (gap <= gap_tol) return MipStatus::gap_reached;
    return MipStatus::budget_exhausted;
}

enum class StopReason { gap, budget, leaf, exhausted };

/**
 * Best-bound-first tree over node relaxations. A node relaxation depends only
 * on its fixings, not on which indicators are declared binary, so the open
 * nodes stay valid when the binary set grows; integrality generation keeps
 * one tree and just widens the branching candidates.
 */
class Search {
public:
    Search(const MipProblem& prob, const Vector& incumbent, const Vector& root_warm, const BnbOptions& opts)
        : prob_(prob), opts_(opts), inc_(prob) {
        prob_.validate();
        const Index p = prob_.data->p();
        binary_.assign(static_cast<std::size_t>(p), 0);
        for (Index i : prob_.integral) binary_[static_cast<std::size_t>(i)] = 1;
        inc_.offer(incumbent.size() == p ? incumbent : Vector::Zero(p));
        open_.push(make_node(std::vector<Fix>(static_cast<std::size_t>(p), Fix::free), root_warm, 0, -kInf));
    }

    void add_binary(const std::vector<Index>& idx) {
        for (Index i : idx) binary_[static_cast<std::size_t>(i)] = 1;
    }

    bool is_binary(Index i) const { return binary_[static_cast<std::size_t>(i)] != 0; }

    /// Explores until the gap closes, the budget runs out, or a node with all
    /// binaries integral reaches the top of the queue (returned via `leaf`).
    StopReason run(long budget, MipNode* leaf) {
        while (!open_.empty()) {
            lower_ = std::min(open_.top().lower_bound, inc_.value);
            if (optimality_gap(inc_.value, lower_) <= opts_.gap_tol) return StopReason::gap;
            if (nodes_ >= budget) return StopReason::budget;
            MipNode node = open_.top();
            open_.pop();
            if (node.lower_bound >= inc_.value - 1e-9) continue;

            Index branch = -1;
            double best_frac = opts_.int_tol;
            for (Index i = 0; i < static_cast<Index>(node.fixed.size()); ++i) {
                if (!is_binary(i) || node.fixed[static_cast<std::size_t>(i)] != Fix::free) continue;
                const double frac = std::min(node.z[i], 1.0 - node.z[i]);
                if (frac > best_frac) {
                    best_frac = frac;
                    branch = i;
                }
            }
            if (branch < 0) {
                lower_ = std::min(node.lower_bound, inc_.value);
                if (leaf) *leaf = node;
                open_.push(std::move(node));  // may be branched later on newly added binaries
                return StopReason::leaf;
            }
            for (Fix v : {Fix::zero, Fix::one}) {
                std::vector<Fix> fixed = node.fixed;
                fixed[static_cast<std::size_t>(branch)] = v;
                MipNode child = make_node(std::move(fixed), node.beta, node.depth + 1, node.lower_bound);
                if (child.lower_bound < inc_.value - 1e-9) open_.push(std::move(child));
            }
        }
        lower_ = inc_.value;
        return StopReason::exhausted;
    }

    void offer(const Vector& beta) { inc_.offer(beta); }

    long nodes() const { return nodes_; }
    double upper() const { return inc_.value; }
    double lower() const { return std::min(lower_, inc_.value); }
    const Vector& best() const { return inc_.beta(); }

    MipResult result() const {
        MipResult r;
        r.beta = inc_.beta();
        r.z = Vector::Zero(r.beta.size());
        for (Index i = 0; i < r.beta.size(); ++i) r.z[i] = r.beta[i] != 0.0 ? 1.0 : 0.0;
        r.upper_bound = upper();
        r.lower_bound = lower();
        r.gap = optimality_gap(r.upper_bound, r.lower_bound);
        r.nodes_explored = nodes_;
        r.big_m = prob_.big_m;
        r.status = classify(r.gap, opts_.gap_tol);
        return r;
    }

private:
    MipNode make_node(std::vector<Fix> fixed, const Vector& warm, int depth, double parent_bound) {
        RelaxationOptions ro = opts_.relaxation;
        ro.cutoff = std::min(ro.cutoff, inc_.value - 1e-9);
        auto rel = solve_relaxation(prob_, fixed, warm, ro);
        ++nodes_;
        MipNode node;
        node.fixed = std::move(fixed);
        node.lower_bound = std::max(rel.bound, parent_bound);
        node.beta = std::move(rel.beta);
        node.z = std::move(rel.z);
        node.depth = depth;
        inc_.offer(node.beta);
        inc_.polish(node.beta);
        return node;
    }

    const MipProblem& prob_;
    BnbOptions opts_;
    Incumbent inc_;
    std::vector<char> binary_;
    std::priority_queue<MipNode, std::vector<MipNode>, NodeOrder> open_;
    long nodes_ = 0;
    double lower_ = -kInf;
};

}  // namespace

MipResult branch_and_bound(const MipProblem& prob, const Solution& incumbent, const BnbOptions& opts) {
    Search search(prob, incumbent.beta, incumbent.beta, opts);
    search.run(opts.node_budget, nullptr);
    return search.result();
}

MipResult iga_solve(const Dataset& d, const LossKind& kind, const PenaltyParams& lambda, const Solution& warm,
                    const IgaOptions& opts) {
    lambda.validate();
    if (!(opts.gap_tol >= 0.0)) throw std::invalid_argument("gap tolerance must be non-negative");
    if (opts.max_add_per_iter < 1) throw std::invalid_argument("must add at least one index per iteration");
    if (opts.max_iterations < 1) throw std::invalid_argument("need at least one iteration");
    const Index p = d.p();
    Vector start = warm.beta.size() == p ? warm.beta : Vector::Zero(p);

    std::vector<std::string> warnings;
    double big_m = opts.big_m;
    if (!(big_m > 0.0)) {
        const auto choice = choose_big_m(start);
        big_m = choice.value;
        if (choice.fallback) warnings.push_back("warm start is zero; using big-M = 1");
    }
    if (start.cwiseAbs().maxCoeff() > big_m) {
        warnings.push_back("warm start exceeds big-M; clipped");
        for (Index i = 0; i < p; ++i) start[i] = clip(start[i], big_m);
    }

    MipProblem prob;
    prob.data = &d;
    prob.kind = kind;
    prob.lambda = lambda;
    prob.big_m = big_m;
    prob.integral = support_of(start);

    BnbOptions bo;
    bo.gap_tol = opts.gap_tol;
    bo.node_budget = opts.node_budget;
    bo.int_tol = opts.int_tol;
    bo.relaxation = opts.relaxation;
    Search search(prob, start, start, bo);

    int iterations = 0;
    bool certified = false;
    double lower = -kInf;
    while (iterations < opts.max_iterations) {
        ++iterations;
        MipNode leaf;
        const StopReason why = search.run(opts.node_budget, &leaf);
        lower = std::max(lower, search.lower());
        if (why != StopReason::leaf) break;

        std::vector<Index> frac;
        for (Index i = 0; i < p; ++i) {
            if (search.is_binary(i)) continue;
            const double z = leaf.z[i];
            if (z > opts.int_tol && z < 1.0 - opts.int_tol) frac.push_back(i);
        }
        if (frac.empty()) {
            // integral indicators everywhere: the leaf relaxation is attained by a feasible point
            search.offer(leaf.beta);
            lower = std::max(lower, std::min(leaf.lower_bound, search.upper()));
            certified = true;
            break;
        }
        std::stable_sort(frac.begin(), frac.end(), [&](Index a, Index b) { return leaf.z[a] > leaf.z[b]; });
        std::vector<Index> add;
        if (opts.frac_cutoff) {
            for (Index i : frac) {
                if (leaf.z[i] >= *opts.frac_cutoff) add.push_back(i);
            }
            if (add.empty()) add.push_back(frac.front());
        } else {
            const auto take = std::min<std::size_t>(frac.size(), static_cast<std::size_t>(opts.max_add_per_iter));
            add.assign(frac.begin(), frac.begin() + static_cast<std::ptrdiff_t>(take));
        }
        search.add_binary(add);
    }

    MipResult result = search.result();
    result.lower_bound = std::min(lower, result.upper_bound);
    result.gap = optimality_gap(result.upper_bound, result.lower_bound);
    result.iga_iterations = iterations;
    result.big_m = big_m;
    result.warnings = std::move(warnings);
    result.status = certified && result.gap <= opts.gap_tol ? MipStatus::optimal : classify(result.gap, opts.gap_tol);
    if (result.beta.size() > 0 && result.beta.cwiseAbs().maxCoeff() >= big_m * (1.0 - 1e-9)) {
        result.warnings.push_back("a coefficient sits on the big-M bound; M may be binding");
    }
    return result;
}

BigMSensitivity big_m_sensitivity(const Dataset& d, const LossKind& kind, const PenaltyParams& lambda,
                                  const Solution& warm, const IgaOptions& opts) {
    BigMSensitivity out;
    const auto first = iga_solve(d, kind, lambda, warm, opts);
    IgaOptions doubled = opts;
    doubled.big_m = 2.0 * first.big_m;
    Solution from = Solution::from_beta(kind, d, first.beta, lambda);
    const auto second = iga_solve(d, kind, lambda, from, doubled);
    out.objective_at_m = first.upper_bound;
    out.objective_at_2m = second.upper_bound;
    out.active = out.objective_at_m - out.objective_at_2m > opts.gap_tol * std::max(std::abs(out.objective_at_m), 1e-12);
    return out;
}

}  // namespace sparseclf
