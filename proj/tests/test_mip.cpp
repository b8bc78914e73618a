#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sparseclf/localsearch.hpp"
#include "sparseclf/mip.hpp"

using namespace sparseclf;

namespace {

MipProblem full_problem(const Dataset& d, const LossKind& k, const PenaltyParams& lam, double M) {
    MipProblem prob;
    prob.data = &d;
    prob.kind = k;
    prob.lambda = lam;
    prob.big_m = M;
    for (Index i = 0; i < d.p(); ++i) prob.integral.push_back(i);
    return prob;
}

// lambda0 in the middle (geometrically) of the range where the optimal support has 2-3 entries
double mid_lambda0(const std::vector<oracle::SupportValue>& all) {
    double lo = -1, hi = -1;
    for (double l0 = 1e-4; l0 < 1.0; l0 *= 1.02) {
        const auto s = oracle::best_support(all, l0).support.size();
        if (s >= 2 && s <= 3) {
            if (lo < 0) lo = l0;
            hi = l0;
        }
    }
    REQUIRE(lo > 0);
    return std::sqrt(lo * hi);
}

// projected proximal gradient on g + sum w|b| + l2 b^2 over the box |b| <= M
Vector box_prox_gradient(const LossKind& k, const oracle::Matrix& X, const Vector& y, double w, double l2, double M) {
    Eigen::JacobiSVD<oracle::Matrix> svd(X);
    const double s = svd.singularValues()[0];
    const double L = k.curvature_bound() * s * s / static_cast<double>(X.rows());
    const double t = 1.0 / L;
    Vector b = Vector::Zero(X.cols());
    for (int it = 0; it < 200000; ++it) {
        const Vector u = X * b;
        Vector r(u.size());
        for (Index i = 0; i < u.size(); ++i) r[i] = oracle::df(k, u[i], y[i]);
        const Vector c = b - t * X.transpose() * r / static_cast<double>(X.rows());
        Vector next(b.size());
        for (Index j = 0; j < b.size(); ++j) {
            const double m = std::max(0.0, std::abs(c[j]) - t * w) / (1 + 2 * t * l2);
            next[j] = std::clamp(c[j] > 0 ? m : -m, -M, M);
        }
        const double change = (next - b).cwiseAbs().maxCoeff();
        b = next;
        if (change <= 1e-13) break;
    }
    return b;
}

}  // namespace

TEST_CASE("big-M choice") {
    Vector w(3);
    w << 1.0, -2.5, 0.0;
    CHECK(choose_big_m(w).value == doctest::Approx(3.0));
    CHECK_FALSE(choose_big_m(w).fallback);
    auto z = choose_big_m(Vector::Zero(3));
    CHECK(z.value == 1.0);
    CHECK(z.fallback);
    Vector one = Vector::Zero(2);
    one[1] = -4;
    CHECK(choose_big_m(one).value == doctest::Approx(4.8));
}

TEST_CASE("gap helper") {
    CHECK(optimality_gap(1.0, 1.0) == 0.0);
    CHECK(optimality_gap(1.1, 1.0) == doctest::Approx(0.1));
    CHECK(std::isinf(optimality_gap(1.0, -INFINITY)));
}

TEST_CASE("node relaxation") {
    auto in = oracle::random_instance(60, 5, 200);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    const PenaltyParams lam{0.02, 0.01, 0.05};
    const double M = 0.8;
    MipProblem prob = full_problem(d, k, lam, M);

    SUBCASE("everything fixed to zero") {
        auto r = solve_relaxation(prob, std::vector<Fix>(5, Fix::zero), Vector());
        CHECK(r.beta.isZero(0));
        CHECK(r.bound == doctest::Approx(std::log(2.0)).epsilon(1e-14));
        CHECK(r.converged);
    }
    SUBCASE("no binaries: box-constrained l1 + l2 problem") {
        prob.integral.clear();
        auto r = solve_relaxation(prob, std::vector<Fix>(5, Fix::free), Vector());
        const Vector ref = box_prox_gradient(k, in.X, in.y, lam.lambda1 + lam.lambda0 / M, lam.lambda2, M);
        auto value = [&](const Vector& b) {
            return oracle::mean_loss(k, in.X, in.y, b) + (lam.lambda1 + lam.lambda0 / M) * b.cwiseAbs().sum() +
                   lam.lambda2 * b.squaredNorm();
        };
        CHECK(r.converged);
        CHECK(r.primal == doctest::Approx(value(ref)).epsilon(1e-6));
        CHECK(r.bound <= value(ref) + 1e-12);
        CHECK((r.beta - ref).cwiseAbs().maxCoeff() <= 1e-5);
        // the z form of the objective gives the same number
        CHECK(relaxation_objective_with_z(prob, r.beta, r.z) == doctest::Approx(r.primal).epsilon(1e-12));
        for (Index i = 0; i < 5; ++i) CHECK(r.z[i] == doctest::Approx(std::abs(r.beta[i]) / M));
    }
    SUBCASE("mixed fixings") {
        std::vector<Fix> f{Fix::one, Fix::zero, Fix::free, Fix::one, Fix::free};
        auto r = solve_relaxation(prob, f, Vector());
        CHECK(r.beta[1] == 0.0);
        CHECK(r.z[0] == 1.0);
        CHECK(r.z[1] == 0.0);
        CHECK(r.beta.cwiseAbs().maxCoeff() <= M);
        CHECK(r.bound <= r.primal);
        CHECK(r.primal - r.bound <= 1e-9 * std::abs(r.primal));
        CHECK(relaxation_objective_with_z(prob, r.beta, r.z) == doctest::Approx(r.primal).epsilon(1e-12));
    }
    SUBCASE("bound is valid even when stopped early") {
        RelaxationOptions ro;
        ro.max_cycles = 1;
        auto rough = solve_relaxation(prob, std::vector<Fix>(5, Fix::free), Vector(), ro);
        auto exact = solve_relaxation(prob, std::vector<Fix>(5, Fix::free), Vector());
        CHECK(rough.bound <= exact.primal + 1e-12);
    }
}

TEST_CASE("branch and bound matches support enumeration") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto in = oracle::random_instance(100, 12, 210 + seed);
        Dataset d = oracle::to_dataset(in);
        const LossKind k = seed % 2 ? LossKind::squared_hinge() : LossKind::logistic();
        const double l2 = 1e-2;
        auto all = oracle::enumerate_supports(k, in.X, in.y, l2);
        const double l0 = mid_lambda0(all);
        const double truth = oracle::best_value(all, l0);
        const auto& best = oracle::best_support(all, l0);
        const double M = 1.5 * best.beta.cwiseAbs().maxCoeff();
        auto warm = cd_fit(d, k, {l0, 0, l2}, Vector());
        auto r = branch_and_bound(full_problem(d, k, {l0, 0, l2}, M), warm);
        CHECK(r.status == MipStatus::optimal);
        CHECK(r.upper_bound == doctest::Approx(truth).epsilon(1e-8));
        CHECK(r.gap <= 1e-6);
        CHECK(r.lower_bound <= truth + 1e-9);
        CHECK(r.support() == best.support);

        // an optimal incumbent stays the answer
        auto opt = Solution::from_beta(k, d, best.beta, {l0, 0, l2});
        auto again = branch_and_bound(full_problem(d, k, {l0, 0, l2}, M), opt);
        CHECK(again.upper_bound <= opt.objective_P + 1e-9);
        CHECK(again.upper_bound >= truth - 1e-9);

        auto iga = iga_solve(d, k, {l0, 0, l2}, warm);
        CHECK(iga.upper_bound == doctest::Approx(r.upper_bound).epsilon(1e-6));
        CHECK(iga.gap <= 1e-6);
        CHECK(iga.status == MipStatus::optimal);
    }
}

TEST_CASE("huge lambda0 certifies zero at the root") {
    auto in = oracle::random_instance(80, 10, 220);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    const PenaltyParams lam{100.0, 0, 1e-3};
    auto r = branch_and_bound(full_problem(d, k, lam, 1.0), Solution::zero(k, d, lam));
    CHECK(r.support().empty());
    CHECK(r.upper_bound == doctest::Approx(std::log(2.0)));
    CHECK(r.lower_bound == doctest::Approx(std::log(2.0)));
    CHECK(r.nodes_explored == 1);
    CHECK(r.status == MipStatus::optimal);

    auto iga = iga_solve(d, k, lam, Solution::zero(k, d, lam));
    CHECK(iga.iga_iterations == 1);
    CHECK(iga.status == MipStatus::optimal);
    CHECK(iga.support().empty());
    CHECK(iga.big_m == 1.0);
    CHECK_FALSE(iga.warnings.empty());
}

TEST_CASE("node budget exhaustion reports honest bounds") {
    auto in = oracle::random_instance(100, 12, 230);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    auto all = oracle::enumerate_supports(k, in.X, in.y, 1e-2);
    const double l0 = mid_lambda0(all);
    const double truth = oracle::best_value(all, l0);
    BnbOptions bo;
    bo.node_budget = 1;
    auto r = branch_and_bound(full_problem(d, k, {l0, 0, 1e-2}, 5.0), Solution::zero(k, d, {l0, 0, 1e-2}), bo);
    CHECK(r.status == MipStatus::budget_exhausted);
    CHECK(r.lower_bound <= truth + 1e-12);
    CHECK(r.upper_bound >= truth - 1e-12);
    CHECK(r.gap > bo.gap_tol);
}

TEST_CASE("loose gap tolerance") {
    auto in = oracle::random_instance(100, 12, 231);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    auto all = oracle::enumerate_supports(k, in.X, in.y, 1e-2);
    const double l0 = mid_lambda0(all);
    IgaOptions io;
    io.gap_tol = 0.5;
    auto r = iga_solve(d, k, {l0, 0, 1e-2}, cd_fit(d, k, {l0, 0, 1e-2}, Vector()), io);
    CHECK(r.gap <= 0.5);
    CHECK((r.status == MipStatus::optimal || r.status == MipStatus::gap_reached));
    if (r.status == MipStatus::optimal) CHECK(r.gap <= kOptimalGap);
}

TEST_CASE("planted p = 200 instance") {
    SyntheticSpec spec;
    spec.n = 100;
    spec.p = 200;
    spec.k_dagger = 3;
    spec.response_param = 5.0;
    auto syn = gen_synthetic(spec, 240);
    const Dataset& d = syn.data;
    const LossKind k = LossKind::logistic();
    const double l2 = 1e-2;
    // smallest lambda0 on a coarse grid whose coordinate descent solution has three nonzeros
    const double lmax = lambda0_max(d, k, 0, l2);
    Solution warm;
    double l0 = lmax;
    for (double f = 0.9; f > 1e-3; f *= 0.9) {
        auto s = cd_with_local_search(d, k, {f * lmax, 0, l2}, Vector());
        if (s.support_size() == 3) {
            warm = s;
            l0 = f * lmax;
            break;
        }
    }
    REQUIRE(warm.support_size() == 3);
    auto r = iga_solve(d, k, {l0, 0, l2}, warm);
    CHECK(r.status == MipStatus::optimal);
    CHECK(r.gap <= 1e-4);
    CHECK(r.support() == support_of(syn.beta_dagger));

    // no support of size <= 2 does better (complete enumeration of those)
    const oracle::Matrix X = d.dense_matrix();
    auto small = oracle::enumerate_supports(k, X, d.y(), l2, 2);
    CHECK(oracle::best_value(small, l0) >= r.upper_bound - 1e-9);
}

TEST_CASE("big-M sensitivity") {
    auto in = oracle::random_instance(100, 8, 250, 3, 2.0);
    Dataset d = oracle::to_dataset(in);
    const LossKind k = LossKind::logistic();
    const double lmax = lambda0_max(d, k, 0, 1e-2);
    auto warm = cd_fit(d, k, {0.1 * lmax, 0, 1e-2}, Vector());
    IgaOptions io;
    io.big_m = 0.25 * warm.beta.cwiseAbs().maxCoeff();
    auto sens = big_m_sensitivity(d, k, {0.1 * lmax, 0, 1e-2}, warm, io);
    CHECK(sens.active);
    CHECK(sens.objective_at_2m < sens.objective_at_m);
    auto relaxed = big_m_sensitivity(d, k, {0.1 * lmax, 0, 1e-2}, warm, IgaOptions{});
    CHECK_FALSE(relaxed.active);
}
