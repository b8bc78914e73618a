#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sparseclf/loss.hpp"

using namespace sparseclf;

TEST_CASE("loss values at reference points") {
    CHECK(loss_value(LossKind::logistic(), 0.0, 1.0) == doctest::Approx(std::log(2.0)));
    CHECK(loss_value(LossKind::logistic(), 0.0, -1.0) == doctest::Approx(std::log(2.0)));
    CHECK(loss_value(LossKind::squared_hinge(), 2.0, 1.0) == 0.0);
    CHECK(loss_value(LossKind::squared_hinge(), 0.0, 1.0) == 1.0);
    // no overflow far out in the tails
    CHECK(std::isfinite(loss_value(LossKind::logistic(), -800.0, 1.0)));
    CHECK(loss_value(LossKind::logistic(), -800.0, 1.0) == doctest::Approx(800.0));
    CHECK(loss_value(LossKind::logistic(), 800.0, 1.0) >= 0.0);
}

TEST_CASE("smoothed hinge approaches the hinge") {
    for (double mu : {0.5, 0.2, 0.05, 0.01}) {
        const LossKind k = LossKind::smoothed_hinge(mu);
        for (double m = -3.0; m <= 3.0; m += 0.001) {
            const double hinge = std::max(0.0, 1.0 - m);
            CHECK(std::abs(loss_value(k, m, 1.0) - hinge) <= mu / 2 + 1e-15);
        }
    }
    CHECK_THROWS(LossKind::smoothed_hinge(0.0));
}

TEST_CASE("loss derivatives") {
    CHECK(loss_derivative(LossKind::logistic(), 0.0, 1.0) == doctest::Approx(-0.5));
    CHECK(loss_derivative(LossKind::squared_hinge(), 1.5, 1.0) == 0.0);
    CHECK(loss_derivative(LossKind::squared_hinge(), -1.5, -1.0) == 0.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4, 4);
    const LossKind kinds[] = {LossKind::logistic(), LossKind::squared_hinge(), LossKind::smoothed_hinge(0.3)};
    for (int t = 0; t < 3000; ++t) {
        const LossKind& k = kinds[t % 3];
        const double vhat = u(rng);
        const double v = t % 2 ? 1.0 : -1.0;
        const double h = 1e-6;
        const double fd = (loss_value(k, vhat + h, v) - loss_value(k, vhat - h, v)) / (2 * h);
        CHECK(loss_derivative(k, vhat, v) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("coordinate Lipschitz constants") {
    DenseMatrix X(1, 2);
    X << 2.0, 0.0;
    Dataset d = Dataset::dense(X, Vector::Ones(1));
    CHECK(coordinate_lipschitz(LossKind::logistic(), d)[0] == 1.0);
    CHECK(coordinate_lipschitz(LossKind::squared_hinge(), d)[0] == 8.0);
    CHECK(coordinate_lipschitz(LossKind::smoothed_hinge(0.5), d)[0] == 8.0);
    CHECK(coordinate_lipschitz(LossKind::logistic(), d)[1] == 0.0);
}

TEST_CASE("global Lipschitz constant") {
    SUBCASE("single column") {
        DenseMatrix X(4, 1);
        X << 1, -2, 0.5, 3;
        Dataset d = Dataset::dense(X, Vector::Ones(4));
        const double Li = coordinate_lipschitz(LossKind::logistic(), d)[0];
        CHECK(global_lipschitz(LossKind::logistic(), d) == doctest::Approx(1.01 * Li).epsilon(1e-6));
    }
    SUBCASE("SVD oracle") {
        std::mt19937_64 rng(9);
        std::normal_distribution<double> nd;
        DenseMatrix A(10, 5);
        for (Index i = 0; i < A.size(); ++i) A.data()[i] = nd(rng);
        // orthonormal columns scaled by 3
        Eigen::HouseholderQR<DenseMatrix> qr(A);
        DenseMatrix Q = qr.householderQ() * DenseMatrix::Identity(10, 5);
        DenseMatrix X = 3.0 * Q;
        Dataset d = Dataset::dense(X, Vector::Ones(10));
        Eigen::JacobiSVD<DenseMatrix> svd(X);
        const double smax = svd.singularValues()[0];
        for (const LossKind& k : {LossKind::logistic(), LossKind::squared_hinge()}) {
            const double oracle = 1.01 * k.curvature_bound() * smax * smax / 10.0;
            CHECK(global_lipschitz(k, d) == doctest::Approx(oracle).epsilon(1e-5));
            CHECK(oracle == doctest::Approx(1.01 * k.curvature_bound() * 9.0 / 10.0).epsilon(1e-12));
        }
        // generic matrix
        Dataset g = Dataset::dense(A, Vector::Ones(10));
        Eigen::JacobiSVD<DenseMatrix> svd2(A);
        const double s2 = svd2.singularValues()[0];
        CHECK(global_lipschitz(LossKind::logistic(), g) == doctest::Approx(1.01 * 0.25 * s2 * s2 / 10.0).epsilon(1e-5));
    }
    SUBCASE("zero matrix") {
        Dataset d = Dataset::dense(DenseMatrix::Zero(3, 2), Vector::Ones(3));
        CHECK(global_lipschitz(LossKind::logistic(), d) == 0.0);
    }
}

TEST_CASE("objective") {
    auto in = oracle::random_instance(30, 6, 2);
    Dataset d = oracle::to_dataset(in);
    auto zero = objective(LossKind::logistic(), d, Vector::Zero(6), {0.5, 0.1, 0.2});
    CHECK(zero.g == doctest::Approx(std::log(2.0)));
    CHECK(zero.G == doctest::Approx(std::log(2.0)));
    CHECK(zero.P == doctest::Approx(std::log(2.0)));

    Vector b = Vector::Zero(6);
    b[0] = 0.3;
    b[2] = -1.2;
    b[5] = 0.7;
    auto v = objective(LossKind::logistic(), d, b, {1.0, 0.0, 0.0});
    CHECK(v.P == doctest::Approx(v.g + 3.0).epsilon(1e-14));

    for (const LossKind& k : {LossKind::logistic(), LossKind::squared_hinge(), LossKind::smoothed_hinge(0.2)}) {
        const double naive = oracle::P(k, in.X, in.y, b, 0.05, 0.02, 0.3);
        CHECK(objective(k, d, b, {0.05, 0.02, 0.3}).P == doctest::Approx(naive).epsilon(1e-13));
    }
}

TEST_CASE("gradient matches finite differences") {
    auto in = oracle::random_instance(40, 5, 3);
    Dataset d = oracle::to_dataset(in);
    Vector b = Vector::LinSpaced(5, -0.5, 0.5);
    for (const LossKind& k : {LossKind::logistic(), LossKind::squared_hinge(), LossKind::smoothed_hinge(0.2)}) {
        const Vector g = gradient(k, d, d.multiply(b));
        for (Index j = 0; j < 5; ++j) {
            Vector e = Vector::Zero(5);
            e[j] = 1e-6;
            const double fd = (oracle::mean_loss(k, in.X, in.y, b + e) - oracle::mean_loss(k, in.X, in.y, b - e)) / 2e-6;
            CHECK(g[j] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("loss and penalty parsing") {
    CHECK(parse_loss("squared-hinge").type == LossType::squared_hinge);
    try {
        parse_loss("hinge");
        FAIL("expected throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("logistic") != std::string::npos);
    }
    PenaltyParams bad{-1, 0, 0};
    CHECK_THROWS(bad.validate());
}
