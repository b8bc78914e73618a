#pragma once

#include <string>

#include "sparseclf/data.hpp"

namespace sparseclf {

enum class LossType { logistic, squared_hinge, smoothed_hinge };

/// A classification loss f(score, label). Smoothed hinge carries its width mu.
struct LossKind {
    LossType type = LossType::logistic;
    double mu = 0.2;

    static LossKind logistic() { return {LossType::logistic, 0.2}; }
    static LossKind squared_hinge() { return {LossType::squared_hinge, 0.2}; }
    static LossKind smoothed_hinge(double mu = 0.2);

    /// Gradient-Lipschitz factor of f in the score: 1/4, 2 or 1/mu.
    double curvature_bound() const;
    std::string name() const;
};

/// Accepts "logistic", "squared-hinge", "smoothed-hinge" (mu passed separately).
LossKind parse_loss(const std::string& name, double mu = 0.2);

/// The (lambda0, lambda1, lambda2) triple.
struct PenaltyParams {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;

    void validate() const;
};

double loss_value(const LossKind& kind, double vhat, double v);
/// Derivative of loss_value with respect to the score vhat.
double loss_derivative(const LossKind& kind, double vhat, double v);

/// L_i = c_f ||X_i||^2 / n for every column.
Vector coordinate_lipschitz(const LossKind& kind, const Dataset& d);

struct PowerIterationOptions {
    int max_iter = 1000;
    double rel_tol = 1e-6;
};

/// Upper estimate of the Lipschitz constant of grad g: 1.01 * c_f * sigma_max(X)^2 / n.
/// Throws std::runtime_error if power iteration does not settle.
double global_lipschitz(const LossKind& kind, const Dataset& d, const PowerIterationOptions& opts = {});

struct ObjectiveValue {
    double P = 0.0;  ///< G + lambda0 ||beta||_0
    double G = 0.0;  ///< g + lambda1 ||beta||_1 + lambda2 ||beta||_2^2
    double g = 0.0;  ///< mean loss
};

/// Mean loss of given scores u = X beta against labels y.
double mean_loss(const LossKind& kind, const Vector& scores, const Vector& y);

/// Recomputes everything from scratch.
ObjectiveValue objective(const LossKind& kind, const Dataset& d, const Vector& beta, const PenaltyParams& lambda);

/// Penalty part: lambda0 ||b||_0 + lambda1 ||b||_1 + lambda2 ||b||_2^2.
double penalty_value(const Vector& beta, const PenaltyParams& lambda);

/// r_k = f'(u_k, y_k) for all samples.
Vector score_derivatives(const LossKind& kind, const Vector& scores, const Vector& y);

/// Full gradient of g at the given scores.
Vector gradient(const LossKind& kind, const Dataset& d, const Vector& scores);

}  // namespace sparseclf
