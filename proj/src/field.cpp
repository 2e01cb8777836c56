#include "vfn/field.hpp"

#include <cmath>

namespace vfn {

double gaussian(const Vec& x, const Vec& mu) {
    if (x.size() != mu.size()) {
        throw Error(ErrorKind::usage, "gaussian: dimension mismatch (" +
                                          std::to_string(x.size()) + " vs " +
                                          std::to_string(mu.size()) + ")");
    }
    double dist2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        double d = x[j] - mu[j];
        dist2 += d * d;
    }
    return std::exp(-dist2);
}

Vec eval_field(const Vec& x, const FieldParams& theta) {
    const int dim = static_cast<int>(x.size());
    if (theta.dim() != dim) {
        throw Error(ErrorKind::usage, "eval_field: point dimension " +
                                          std::to_string(dim) +
                                          " does not match field dimension " +
                                          std::to_string(theta.dim()));
    }
    Vec velocity(dim, 0.0);
    for (int i = 0; i < theta.num_gaussians(); ++i) {
        double g = gaussian(x, theta.centers[i]);
        const Vec& dir = theta.directions[i];
        for (int j = 0; j < dim; ++j) {
            velocity[j] += dir[j] * g;
        }
    }
    return velocity;
}

std::vector<FieldSample> eval_field_grid(const Rect& bounds, int resolution,
                                         const FieldParams& theta) {
    if (bounds.degenerate()) {
        throw Error(ErrorKind::usage, "eval_field_grid: degenerate bounds");
    }
    if (resolution < 2) {
        throw Error(ErrorKind::usage, "eval_field_grid: resolution must be >= 2");
    }
    std::vector<FieldSample> samples;
    samples.reserve(static_cast<std::size_t>(resolution) * resolution);
    for (int row = 0; row < resolution; ++row) {
        double y = bounds.y_min + bounds.height() * row / (resolution - 1);
        for (int col = 0; col < resolution; ++col) {
            double x = bounds.x_min + bounds.width() * col / (resolution - 1);
            Vec pos = {x, y};
            FieldSample s;
            s.velocity = eval_field(pos, theta);
            s.position = std::move(pos);
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

}  // namespace vfn
