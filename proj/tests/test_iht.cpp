#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "sparseclf/iht.hpp"
#include "sparseclf/path.hpp"

using namespace sparseclf;

namespace {

FitOptions tight() {
    FitOptions o;
    o.rel_tol = 1e-13;
    o.grad_tol = 1e-12;
    o.max_full_cycles = 100000;
    return o;
}

IhtOptions tight_iht() {
    IhtOptions o;
    o.rel_tol = 1e-15;
    o.max_iter = 200000;
    return o;
}

}  // namespace

TEST_CASE("iht_step without penalties and k = p is a gradient step") {
    auto in = oracle::random_instance(50, 6, 81);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    Vector b = Vector::LinSpaced(6, -1, 1);
    const double Lhat = 2.0;
    Vector expect = b - gradient(k, d, d.multiply(b)) / Lhat;
    CHECK((iht_step(b, {6, 0, 0}, d, k, Lhat) - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("iht_step keeps the largest magnitude") {
    Dataset d = Dataset::dense(DenseMatrix::Identity(3, 3), Vector::Ones(3));
    Vector b(3);
    b << 3, -5, 1;
    // infinite Lhat makes c = beta
    Vector out = iht_step(b, {1, 0, 0}, d, LossKind::logistic(), std::numeric_limits<double>::infinity());
    CHECK(out[0] == 0.0);
    CHECK(out[1] == -5.0);
    CHECK(out[2] == 0.0);
}

TEST_CASE("iht_step solves the constrained prox exactly") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto in = oracle::random_instance(60, 8, 90 + seed);
        Dataset d = oracle::to_dataset(in);
        const LossKind k = LossKind::logistic();
        const double l1 = 0.02 * static_cast<double>(seed % 3), l2 = 0.05 * static_cast<double>(seed % 4);
        Vector b = Vector::LinSpaced(8, -0.4, 0.6);
        const double Lhat = iht_lipschitz(d, k, 1.05);
        const Vector c = b - gradient(k, d, d.multiply(b)) / Lhat;
        auto prox_value = [&](const Vector& v) {
            return 0.5 * Lhat * (v - c).squaredNorm() + l1 * v.cwiseAbs().sum() + l2 * v.squaredNorm();
        };
        double best = std::numeric_limits<double>::infinity();
        for (int mask = 0; mask < 256; ++mask) {
            if (__builtin_popcount(mask) != 3) continue;
            Vector v = Vector::Zero(8);
            for (int j = 0; j < 8; ++j) {
                if (!(mask >> j & 1)) continue;
                // per-coordinate minimizer of Lhat/2 (v - c)^2 + l1 |v| + l2 v^2
                const double m = std::max(0.0, Lhat * std::abs(c[j]) - l1) / (Lhat + 2 * l2);
                v[j] = c[j] > 0 ? m : -m;
            }
            best = std::min(best, prox_value(v));
        }
        Vector out = iht_step(b, {3, l1, l2}, d, k, Lhat);
        CHECK(support_of(out).size() <= 3);
        CHECK(prox_value(out) == doctest::Approx(best).epsilon(1e-13));
    }
}

TEST_CASE("coordinate descent output of size k is an IHT fixed point") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto in = oracle::random_instance(100, 15, 100 + seed);
        Dataset d = oracle::to_dataset(in);
        const LossKind k = LossKind::logistic();
        const double lmax = lambda0_max(d, k, 0, 1e-3);
        const PenaltyParams lam{0.15 * lmax, 0.0, 1e-3};
        auto sol = cd_fit(d, k, lam, Vector(), tight());
        const Index size = sol.support_size();
        REQUIRE(size > 0);
        ConstrainedSpec spec{size, 0.0, 1e-3, 1.05};
        const double Lhat = iht_lipschitz(d, k, 1.05);
        Vector once = iht_step(sol.beta, spec, d, k, Lhat);
        CHECK((once - sol.beta).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(iht_fixed_point(sol, spec, d, k, Lhat, 1e-6).pass);

        auto ls = cd_with_local_search(d, k, lam, Vector(), tight());
        ConstrainedSpec spec2{ls.support_size(), 0.0, 1e-3, 1.05};
        CHECK(iht_fixed_point(ls, spec2, d, k, Lhat, 1e-6).pass);
    }
}

TEST_CASE("k >= p reduces to the ridge minimizer") {
    auto in = oracle::random_instance(80, 5, 120);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    auto res = iht_fit(d, k, {7, 0.0, 0.05}, Vector(), tight_iht());
    CHECK(res.converged);
    std::vector<Index> all{0, 1, 2, 3, 4};
    Vector ridge = oracle::newton_on_support(k, in.X, in.y, all, 0.05);
    CHECK((res.solution.beta - ridge).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("iht_fit edges and fixed point report") {
    auto in = oracle::random_instance(80, 10, 121);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    auto zero = iht_fit(d, k, {0, 0, 0.01}, Vector());
    CHECK(zero.solution.support.empty());
    CHECK(zero.converged);

    auto res = iht_fit(d, k, {3, 0.0, 0.01}, Vector(), tight_iht());
    CHECK(res.converged);
    CHECK(res.solution.support_size() <= 3);
    const double Lhat = iht_lipschitz(d, k, 1.05);
    CHECK(iht_fixed_point(res.solution, {3, 0.0, 0.01}, d, k, Lhat, 1e-6).pass);

    // zero vector with k >= 1: delta_(k) is the k-th largest |grad_j|, so the report is an honest evaluation
    Solution z = Solution::zero(k, d, {0, 0, 0.01});
    auto rep = iht_fixed_point(z, {1, 0.0, 0.01}, d, k, Lhat, 1e-6);
    const Vector g = gradient(k, d, Vector::Zero(80));
    CHECK(rep.delta_k == doctest::Approx(g.cwiseAbs().maxCoeff()));
    CHECK(rep.pass);
    auto rep2 = iht_fixed_point(z, {2, 0.0, 0.01}, d, k, Lhat, 1e-6);
    CHECK_FALSE(rep2.pass);

    // heavy l1 shrinkage zeroes part of the selected set
    auto deg = iht_fit(d, k, {5, 10.0, 0.0}, Vector());
    CHECK(deg.degenerate);
    CHECK(deg.solution.support_size() < 5);

    // infeasible start is projected first
    auto proj = iht_fit(d, k, {2, 0.0, 0.01}, Vector::Ones(10), tight_iht());
    CHECK(proj.solution.support_size() <= 2);
}

TEST_CASE("constrained path from a penalized path") {
    auto in = oracle::random_instance(100, 20, 130, 5);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    GridSpec grid;
    grid.n_lambda0 = 30;
    grid.lambda0_ratio = 0.01;
    grid.lambda_q_values = {1e-3};
    PathOptions po;
    po.fit = tight();
    auto path = fit_path(d, k, grid, po);
    std::vector<Index> sizes;
    for (const auto& e : path.entries) sizes.push_back(e.solution.support_size());

    // a size on the path and one missing from it
    Index present = sizes[1];
    Index missing = -1;
    for (Index s = 1; s <= 20; ++s) {
        if (std::find(sizes.begin(), sizes.end(), s) == sizes.end() &&
            std::any_of(sizes.begin(), sizes.end(), [&](Index t) { return t < s; })) {
            missing = s;
            break;
        }
    }
    std::vector<Index> wanted{present};
    if (missing > 0) wanted.push_back(missing);
    auto out = constrained_path(d, k, 0.0, 1e-3, wanted, path);
    REQUIRE(out.size() == wanted.size());
    CHECK(out[0].from_path);
    CHECK(out[0].solution.beta == path.entries[static_cast<std::size_t>(out[0].source_index)].solution.beta);
    if (missing > 0) {
        CHECK_FALSE(out[1].from_path);
        CHECK(out[1].solution.support_size() <= missing);
        REQUIRE(out[1].source_index >= 0);
        const auto& init = path.entries[static_cast<std::size_t>(out[1].source_index)].solution;
        CHECK(out[1].solution.objective_G <= init.objective_G + 1e-12);
    }
}
