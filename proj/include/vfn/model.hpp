#pragma once

#include "vfn/core.hpp"
#include "vfn/flow.hpp"

namespace vfn {

/// Everything trainable plus the flow hyperparameters.
struct ModelState {
    FieldParams theta;
    LinearHead head;
    FlowConfig flow;

    int dim() const { return head.dim(); }
};

/// Cost gradient with respect to every scalar parameter; shapes mirror
/// ModelState.
struct Gradients {
    std::vector<Vec> d_centers;     // S x n
    std::vector<Vec> d_directions;  // S x n
    Vec d_weights;                  // n
    double d_bias = 0.0;
};

Gradients zero_gradients(int num_gaussians, int dim);

/// Full-batch cost, training accuracy, and mean gradients from one pass.
struct BatchEval {
    double cost = 0.0;
    double accuracy = 0.0;
    Gradients grads;
};

/// Overflow-safe logistic function, branching on the sign of the logit.
/// The result is clamped to the largest open subinterval of (0,1)
/// representable in double, so callers never see exactly 0 or 1.
double sigmoid(double logit);

/// sigmoid(w . X_N + b) where X_N is the Euler endpoint of x.
double predict(const Vec& x, const ModelState& state);

/// Mean binary cross entropy plus (lambda/2) * sum_i ||V_i||^2.
/// Probabilities are clamped to [1e-12, 1-1e-12] inside the logs only.
double cost(const Dataset& dataset, const ModelState& state, double lambda);

/// Training accuracy at threshold 0.5.
double accuracy(const Dataset& dataset, const ModelState& state);

/// Per-sample closed-form gradients for the single-step h=1 architecture:
///   dC/dmu_{j,i} = 2 (yhat-y) G(x,mu_i) (x_j - mu_{j,i}) sum_k w_k V_{k,i}
///   dC/dV_{j,i}  =   (yhat-y) G(x,mu_i) w_j + lambda V_{j,i}
/// plus the standard logistic-head terms (yhat-y) X_N and (yhat-y).
/// Rejects any other flow configuration.
Gradients grad_analytic_n1(const Vec& x, int label, const ModelState& state,
                           double lambda);

/// Mean batch gradients by reverse-mode differentiation through all N
/// unrolled Euler steps. At N=1, h=1 this reduces to the closed form above.
Gradients grad_backprop(const Dataset& dataset, const ModelState& state,
                        double lambda);

/// Central finite differences of cost() over every scalar parameter.
/// The independent oracle for all gradient code; never reuses the
/// analytic path.
Gradients grad_numeric(const Dataset& dataset, const ModelState& state,
                       double lambda, double probe = 1e-6);

/// Cost, accuracy, and backprop gradients in a single fused pass; the
/// workhorse of the training loop. grad_backprop is this with the scalars
/// dropped.
BatchEval eval_batch(const Dataset& dataset, const ModelState& state,
                     double lambda);

}  // namespace vfn
