#include "sparseclf/loss.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sparseclf {

LossKind LossKind::smoothed_hinge(double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("smoothed hinge needs mu > 0");
    return {LossType::smoothed_hinge, mu};
}

double LossKind::curvature_bound() const {
    switch (type) {
    case LossType::logistic: return 0.25;
    case LossType::squared_hinge: return 2.0;
    case LossType::smoothed_hinge: return 1.0 / mu;
    }
    return 0.0;
}

std::string LossKind::name() const {
    switch (type) {
    case LossType::logistic: return "logistic";
    case LossType::squared_hinge: return "squared-hinge";
    case LossType::smoothed_hinge: return "smoothed-hinge";
    }
    return "unknown";
}

LossKind parse_loss(const std::string& name, double mu) {
    if (name == "logistic") return LossKind::logistic();
    if (name == "squared-hinge") return LossKind::squared_hinge();
    if (name == "smoothed-hinge") return LossKind::smoothed_hinge(mu);
    throw std::invalid_argument("unknown loss '" + name + "' (supported: logistic, squared-hinge, smoothed-hinge)");
}

void PenaltyParams::validate() const {
    if (!(lambda0 >= 0.0) || !(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
        throw std::invalid_argument("penalty parameters must be non-negative");
    }
}

double loss_value(const LossKind& kind, double vhat, double v) {
    const double m = vhat * v;
    switch (kind.type) {
    case LossType::logistic:
        // log(1 + e^{-m}) without overflow
        return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    case LossType::squared_hinge: {
        double r = std::max(0.0, 1.0 - m);
        return r * r;
    }
    case LossType::smoothed_hinge:
        if (m >= 1.0) return 0.0;
        if (m <= 1.0 - kind.mu) return 1.0 - m - kind.mu / 2.0;
        return (1.0 - m) * (1.0 - m) / (2.0 * kind.mu);
    }
    return 0.0;
}

double loss_derivative(const LossKind& kind, double vhat, double v) {
    const double m = vhat * v;
    switch (kind.type) {
    case LossType::logistic:
        // -v * sigmoid(-m)
        return m > 0.0 ? -v * std::exp(-m) / (1.0 + std::exp(-m)) : -v / (1.0 + std::exp(m));
    case LossType::squared_hinge:
        return -2.0 * v * std::max(0.0, 1.0 - m);
    case LossType::smoothed_hinge:
        if (m >= 1.0) return 0.0;
        if (m <= 1.0 - kind.mu) return -v;
        return -v * (1.0 - m) / kind.mu;
    }
    return 0.0;
}

Vector coordinate_lipschitz(const LossKind& kind, const Dataset& d) {
    return d.col_sq_norms() * (kind.curvature_bound() / static_cast<double>(d.n()));
}

double global_lipschitz(const LossKind& kind, const Dataset& d, const PowerIterationOptions& opts) {
    if (d.col_sq_norms().maxCoeff() == 0.0) return 0.0;
    // Power iteration on X^T X from a fixed pseudo-random start.
    std::mt19937_64 gen(0x5eed);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    Vector v(d.p());
    for (Index j = 0; j < d.p(); ++j) v[j] = unif(gen);
    v.normalize();
    double eig = 0.0;
    bool settled = false;
    for (int it = 0; it < opts.max_iter; ++it) {
        Vector w = d.multiply_transpose(d.multiply(v));
        double next = v.dot(w);
        double norm = w.norm();
        if (norm == 0.0) {
            settled = true;
            eig = 0.0;
            break;
        }
        v = w / norm;
        if (it > 0 && std::abs(next - eig) <= opts.rel_tol * std::abs(next)) {
            eig = std::max(next, norm);
            settled = true;
            break;
        }
        eig = next;
    }
    if (!settled) throw std::runtime_error("power iteration did not converge");
    return 1.01 * kind.curvature_bound() * eig / static_cast<double>(d.n());
}

double mean_loss(const LossKind& kind, const Vector& scores, const Vector& y) {
    double s = 0.0;
    for (Index i = 0; i < scores.size(); ++i) s += loss_value(kind, scores[i], y[i]);
    return s / static_cast<double>(scores.size());
}

double penalty_value(const Vector& beta, const PenaltyParams& lambda) {
    double l0 = 0.0;
    for (Index i = 0; i < beta.size(); ++i) l0 += beta[i] != 0.0 ? 1.0 : 0.0;
    return lambda.lambda0 * l0 + lambda.lambda1 * beta.lpNorm<1>() + lambda.lambda2 * beta.squaredNorm();
}

ObjectiveValue objective(const LossKind& kind, const Dataset& d, const Vector& beta, const PenaltyParams& lambda) {
    ObjectiveValue out;
    out.g = mean_loss(kind, d.multiply(beta), d.y());
    out.G = out.g + lambda.lambda1 * beta.lpNorm<1>() + lambda.lambda2 * beta.squaredNorm();
    double l0 = 0.0;
    for (Index i = 0; i < beta.size(); ++i) l0 += beta[i] != 0.0 ? 1.0 : 0.0;
    out.P = out.G + lambda.lambda0 * l0;
    return out;
}

Vector score_derivatives(const LossKind& kind, const Vector& scores, const Vector& y) {
    Vector r(scores.size());
    for (Index i = 0; i < scores.size(); ++i) r[i] = loss_derivative(kind, scores[i], y[i]);
    return r;
}

Vector gradient(const LossKind& kind, const Dataset& d, const Vector& scores) {
    return d.multiply_transpose(score_derivatives(kind, scores, d.y())) / static_cast<double>(d.n());
}

}  // namespace sparseclf
