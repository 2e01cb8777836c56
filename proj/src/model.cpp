#include "vfn/model.hpp"

#include <cmath>
#include <limits>

#include "vfn/field.hpp"

namespace vfn {

namespace {

constexpr double kProbFloor = 1e-12;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

double bce_term(double yhat, int label) {
    double p = yhat;
    if (p < kProbFloor) p = kProbFloor;
    if (p > 1.0 - kProbFloor) p = 1.0 - kProbFloor;
    return label ? -std::log(p) : -std::log(1.0 - p);
}

double reg_term(const FieldParams& theta, double lambda) {
    if (lambda == 0.0) return 0.0;
    double v2 = 0.0;
    for (const Vec& dir : theta.directions) v2 += dot(dir, dir);
    return 0.5 * lambda * v2;
}

void check_state(const ModelState& state) {
    if (state.theta.dim() != state.head.dim()) {
        throw Error(ErrorKind::usage, "model: field dimension " +
                                          std::to_string(state.theta.dim()) +
                                          " != head dimension " +
                                          std::to_string(state.head.dim()));
    }
    if (!state.flow.valid()) {
        throw Error(ErrorKind::usage, "model: invalid flow config");
    }
}

}  // namespace

Gradients zero_gradients(int num_gaussians, int dim) {
    Gradients g;
    g.d_centers.assign(num_gaussians, Vec(dim, 0.0));
    g.d_directions.assign(num_gaussians, Vec(dim, 0.0));
    g.d_weights.assign(dim, 0.0);
    g.d_bias = 0.0;
    return g;
}

double sigmoid(double logit) {
    double s;
    if (logit >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-logit));
    } else {
        double e = std::exp(logit);
        s = e / (1.0 + e);
    }
    if (s <= 0.0) return std::numeric_limits<double>::min();
    if (s >= 1.0) return std::nextafter(1.0, 0.0);
    return s;
}

double predict(const Vec& x, const ModelState& state) {
    check_state(state);
    Vec endpoint = transport(x, state.theta, state.flow).states.back();
    return sigmoid(dot(state.head.weights, endpoint) + state.head.bias);
}

double cost(const Dataset& dataset, const ModelState& state, double lambda) {
    check_state(state);
    double total = 0.0;
    for (int s = 0; s < dataset.size(); ++s) {
        total += bce_term(predict(dataset.points[s], state), dataset.labels[s]);
    }
    return total / dataset.size() + reg_term(state.theta, lambda);
}

double accuracy(const Dataset& dataset, const ModelState& state) {
    int correct = 0;
    for (int s = 0; s < dataset.size(); ++s) {
        int predicted = predict(dataset.points[s], state) >= 0.5 ? 1 : 0;
        correct += predicted == dataset.labels[s];
    }
    return static_cast<double>(correct) / dataset.size();
}

Gradients grad_analytic_n1(const Vec& x, int label, const ModelState& state,
                           double lambda) {
    check_state(state);
    if (state.flow.num_steps != 1 || state.flow.step_size != 1.0) {
        throw Error(ErrorKind::usage,
                    "grad_analytic_n1: closed form only valid for N=1, h=1");
    }
    const int dim = state.dim();
    const int S = state.theta.num_gaussians();
    const Vec& w = state.head.weights;

    Vec endpoint = euler_step(x, state.theta, 1.0);
    double yhat = sigmoid(dot(w, endpoint) + state.head.bias);
    double delta = yhat - label;

    Gradients g = zero_gradients(S, dim);
    for (int i = 0; i < S; ++i) {
        double gauss_i = gaussian(x, state.theta.centers[i]);
        double wv = dot(w, state.theta.directions[i]);
        for (int j = 0; j < dim; ++j) {
            g.d_centers[i][j] =
                2.0 * delta * gauss_i * (x[j] - state.theta.centers[i][j]) * wv;
            g.d_directions[i][j] =
                delta * gauss_i * w[j] + lambda * state.theta.directions[i][j];
        }
    }
    for (int j = 0; j < dim; ++j) g.d_weights[j] = delta * endpoint[j];
    g.d_bias = delta;
    return g;
}

BatchEval eval_batch(const Dataset& dataset, const ModelState& state,
                     double lambda) {
    check_state(state);
    const int m = dataset.size();
    const int dim = state.dim();
    const int S = state.theta.num_gaussians();
    const int N = state.flow.num_steps;
    const double h = state.flow.step_size;
    const Vec& w = state.head.weights;

    BatchEval out;
    out.grads = zero_gradients(S, dim);
    if (m == 0) {
        throw Error(ErrorKind::data, "eval_batch: empty dataset");
    }

    // Scratch reused across samples: cached states X_0..X_N, cached Gaussian
    // factors per (step, gaussian), the running adjoint dL/dX_i, and the
    // per-gaussian backward coefficients.
    std::vector<Vec> states(N + 1, Vec(dim));
    std::vector<double> gauss_cache(static_cast<std::size_t>(N) * S);
    Vec adjoint(dim);
    Vec coeff(S);

    double total_loss = 0.0;
    int correct = 0;

    for (int s = 0; s < m; ++s) {
        const Vec& x = dataset.points[s];
        if (static_cast<int>(x.size()) != dim) {
            throw Error(ErrorKind::data, "eval_batch: point " + std::to_string(s) +
                                             " has wrong dimension");
        }
        const int y = dataset.labels[s];

        // Forward: unrolled Euler with all intermediates cached.
        states[0] = x;
        for (int i = 0; i < N; ++i) {
            const Vec& cur = states[i];
            Vec& next = states[i + 1];
            next = cur;
            for (int g = 0; g < S; ++g) {
                const Vec& mu = state.theta.centers[g];
                double dist2 = 0.0;
                for (int j = 0; j < dim; ++j) {
                    double d = cur[j] - mu[j];
                    dist2 += d * d;
                }
                double gauss = std::exp(-dist2);
                gauss_cache[static_cast<std::size_t>(i) * S + g] = gauss;
                const Vec& dir = state.theta.directions[g];
                for (int j = 0; j < dim; ++j) {
                    next[j] += h * dir[j] * gauss;
                }
            }
        }
        const Vec& final_state = states[N];
        for (int j = 0; j < dim; ++j) {
            if (!std::isfinite(final_state[j])) {
                throw Error(ErrorKind::numeric,
                            "eval_batch: non-finite state for sample " +
                                std::to_string(s));
            }
        }

        double yhat = sigmoid(dot(w, final_state) + state.head.bias);
        total_loss += bce_term(yhat, y);
        correct += (yhat >= 0.5 ? 1 : 0) == y;

        // Backward. delta is dL/dlogit for the mean loss.
        double delta = (yhat - y) / m;
        out.grads.d_bias += delta;
        for (int j = 0; j < dim; ++j) {
            out.grads.d_weights[j] += delta * final_state[j];
            adjoint[j] = delta * w[j];
        }
        for (int i = N - 1; i >= 0; --i) {
            const Vec& cur = states[i];
            for (int g = 0; g < S; ++g) {
                double gauss = gauss_cache[static_cast<std::size_t>(i) * S + g];
                const Vec& dir = state.theta.directions[g];
                double adj_dot_dir = dot(adjoint, dir);
                coeff[g] = 2.0 * h * adj_dot_dir * gauss;
                Vec& d_dir = out.grads.d_directions[g];
                for (int j = 0; j < dim; ++j) {
                    d_dir[j] += h * gauss * adjoint[j];
                }
            }
            // The center gradient and the state adjoint share the same term,
            // with opposite signs.
            for (int g = 0; g < S; ++g) {
                const Vec& mu = state.theta.centers[g];
                Vec& d_mu = out.grads.d_centers[g];
                for (int j = 0; j < dim; ++j) {
                    double t = coeff[g] * (cur[j] - mu[j]);
                    d_mu[j] += t;
                    adjoint[j] -= t;
                }
            }
        }
    }

    if (lambda != 0.0) {
        for (int g = 0; g < S; ++g) {
            for (int j = 0; j < dim; ++j) {
                out.grads.d_directions[g][j] += lambda * state.theta.directions[g][j];
            }
        }
    }

    out.cost = total_loss / m + reg_term(state.theta, lambda);
    out.accuracy = static_cast<double>(correct) / m;
    return out;
}

Gradients grad_backprop(const Dataset& dataset, const ModelState& state,
                        double lambda) {
    return eval_batch(dataset, state, lambda).grads;
}

Gradients grad_numeric(const Dataset& dataset, const ModelState& state,
                       double lambda, double probe) {
    if (!(probe > 0.0)) {
        throw Error(ErrorKind::usage, "grad_numeric: probe must be positive");
    }
    ModelState probed = state;
    auto central_diff = [&](double& param) {
        double saved = param;
        param = saved + probe;
        double above = cost(dataset, probed, lambda);
        param = saved - probe;
        double below = cost(dataset, probed, lambda);
        param = saved;
        return (above - below) / (2.0 * probe);
    };

    const int S = state.theta.num_gaussians();
    const int dim = state.dim();
    Gradients g = zero_gradients(S, dim);
    for (int i = 0; i < S; ++i) {
        for (int j = 0; j < dim; ++j) {
            g.d_centers[i][j] = central_diff(probed.theta.centers[i][j]);
            g.d_directions[i][j] = central_diff(probed.theta.directions[i][j]);
        }
    }
    for (int j = 0; j < dim; ++j) {
        g.d_weights[j] = central_diff(probed.head.weights[j]);
    }
    g.d_bias = central_diff(probed.head.bias);
    return g;
}

}  // namespace vfn
