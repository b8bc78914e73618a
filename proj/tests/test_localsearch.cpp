#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "sparseclf/data.hpp"
#include "sparseclf/localsearch.hpp"

using namespace sparseclf;

namespace {

FitOptions tight() {
    FitOptions o;
    o.rel_tol = 1e-12;
    o.grad_tol = 1e-11;
    o.max_full_cycles = 100000;
    return o;
}

SwapOptions exhaustive() {
    SwapOptions s;
    s.mode = SwapMode::exhaustive;
    return s;
}

}  // namespace

TEST_CASE("restricted candidates break ties by index") {
    Vector g(5);
    g << 0.5, 0.9, 0.9, 0.1, 0.9;
    std::vector<Index> outside{2, 4, 7, 8, 9};
    auto J = restricted_candidates(g, outside, 2);
    REQUIRE(J.size() == 2);
    CHECK(J[0] == 4);
    CHECK(J[1] == 7);
    CHECK(restricted_candidates(g, outside, 10).size() == 5);
}

TEST_CASE("effective q") {
    SwapOptions s;
    CHECK(s.effective_q(100, 3) == 5);
    CHECK(s.effective_q(10, 3) == 1);
    CHECK(s.effective_q(10, 10) == 0);
    s.q = 4;
    CHECK(s.effective_q(10, 8) == 2);
}

TEST_CASE("global minimizer admits no improving swap") {
    auto in = oracle::random_instance(100, 8, 51, 3, 1.5);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    const double l2 = 1e-2;
    auto all = oracle::enumerate_supports(k, in.X, in.y, l2);
    for (double l0 : {0.005, 0.02, 0.05}) {
        const auto& best = oracle::best_support(all, l0);
        Solution sol = Solution::from_beta(k, d, best.beta, {l0, 0, l2});
        CHECK_FALSE(swap_step(sol, d, k, {l0, 0, l2}, exhaustive()).has_value());
        CHECK(swap_inescapable(sol, d, k, {l0, 0, l2}));
    }
}

TEST_CASE("a decoy in the optimal support is swapped out") {
    auto in = oracle::random_instance(200, 8, 52, 3, 2.0);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    const double l2 = 1e-2;
    auto all = oracle::enumerate_supports(k, in.X, in.y, l2, 3);
    const double l0 = 0.01;
    const auto& best = oracle::best_support(all, l0);
    REQUIRE(best.support.size() >= 2);
    // replace the first true coordinate with the first index outside the support
    std::vector<Index> decoy = best.support;
    Index outside = 0;
    while (std::find(decoy.begin(), decoy.end(), outside) != decoy.end()) ++outside;
    decoy.front() = outside;
    std::sort(decoy.begin(), decoy.end());
    Vector b = oracle::newton_on_support(k, in.X, in.y, decoy, l2);
    Solution sol = Solution::from_beta(k, d, b, {l0, 0, l2});
    REQUIRE(sol.objective_P > oracle::best_value(all, l0) + 1e-6);
    SwapMove m;
    auto improved = swap_step(sol, d, k, {l0, 0, l2}, exhaustive(), &m);
    REQUIRE(improved.has_value());
    CHECK(improved->objective_P < sol.objective_P);
    CHECK(m.objective_after == doctest::Approx(improved->objective_P));
}

TEST_CASE("convex case: the unrestricted minimizer is a local search fixed point") {
    auto in = oracle::random_instance(80, 6, 53);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    std::vector<Index> all{0, 1, 2, 3, 4, 5};
    Vector b = oracle::newton_on_support(k, in.X, in.y, all, 0.1);
    Solution sol = Solution::from_beta(k, d, b, {0, 0, 0.1});
    CHECK_FALSE(swap_step(sol, d, k, {0, 0, 0.1}, exhaustive()).has_value());
}

TEST_CASE("local search never does worse than coordinate descent") {
    for (std::uint64_t seed = 60; seed < 66; ++seed) {
        auto in = oracle::random_instance(100, 20, seed);
        Dataset d = oracle::to_dataset(in);
        for (const LossKind& k : {LossKind::logistic(), LossKind::squared_hinge()}) {
            const double lmax = lambda0_max(d, k, 0, 1e-3);
            const PenaltyParams lam{0.1 * lmax, 0, 1e-3};
            auto cd = cd_fit(d, k, lam, Vector(), tight());
            auto ls = cd_with_local_search(d, k, lam, Vector(), tight());
            CHECK(ls.objective_P <= cd.objective_P + 1e-12);
            CHECK(ls.diagnostics.search_rounds >= 1);
        }
    }
}

TEST_CASE("above lambda0_max local search stops after one round at zero") {
    auto in = oracle::random_instance(60, 10, 70);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    const PenaltyParams lam{2 * lambda0_max(d, k, 0, 0), 0, 0};
    auto sol = cd_with_local_search(d, k, lam, Vector());
    CHECK(sol.support.empty());
    CHECK(sol.diagnostics.search_rounds == 1);
    CHECK(sol.diagnostics.swaps_accepted == 0);
}

TEST_CASE("correlated instances where CD misses a true coordinate") {
    // exponential(0.9) design; wherever CD from zero leaves out a planted
    // coordinate, local search must reach the enumeration optimum.
    int cases = 0;
    for (std::uint64_t seed = 1; seed <= 40 && cases < 3; ++seed) {
        SyntheticSpec spec;
        spec.n = 100;
        spec.p = 10;
        spec.correlation = CorrelationKind::exponential;
        spec.correlation_param = 0.9;
        spec.k_dagger = 3;
        spec.response_param = 3.0;
        auto syn = gen_synthetic(spec, seed);
        const Dataset& d = syn.data;
        const LossKind k = LossKind::logistic();
        const double l2 = 1e-2;
        const oracle::Matrix X = d.dense_matrix();
        auto all = oracle::enumerate_supports(k, X, d.y(), l2, 4);
        // lambda0 in the middle of the range where the optimum has three nonzeros
        double lo = -1, hi = -1;
        for (double l0 = 1e-4; l0 < 0.2; l0 *= 1.05) {
            if (oracle::best_support(all, l0).support.size() == 3) {
                if (lo < 0) lo = l0;
                hi = l0;
            }
        }
        if (lo < 0) continue;
        const double l0 = std::sqrt(lo * hi);
        auto cd = cd_fit(d, k, {l0, 0, l2}, Vector(), tight());
        bool missed = false;
        for (Index t : {0, 3, 6}) missed = missed || cd.beta[t] == 0.0;
        if (!missed) continue;
        ++cases;
        auto ls = cd_with_local_search(d, k, {l0, 0, l2}, Vector(), tight());
        CHECK(ls.objective_P <= oracle::best_value(all, l0) + 1e-9);
    }
    CHECK(cases >= 1);
}
