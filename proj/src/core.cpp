#include "vfn/core.hpp"

#include <cmath>

namespace vfn {

double SplitMix64::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // 1 - uniform() lies in (0,1], keeping the log argument nonzero.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::pair<FieldParams, LinearHead> init_params(int dim, int num_gaussians,
                                               std::uint64_t seed) {
    if (dim < 1) {
        throw Error(ErrorKind::usage, "init_params: dimension must be >= 1");
    }
    if (num_gaussians < 1) {
        throw Error(ErrorKind::usage, "init_params: number of Gaussians must be >= 1");
    }

    SplitMix64 rng(seed);
    FieldParams theta;
    theta.centers.assign(num_gaussians, Vec(dim));
    theta.directions.assign(num_gaussians, Vec(dim));
    for (auto& mu : theta.centers) {
        for (double& v : mu) v = rng.uniform();
    }
    for (auto& dir : theta.directions) {
        for (double& v : dir) v = rng.uniform();
    }

    LinearHead head;
    head.weights.resize(dim);
    for (double& v : head.weights) v = rng.uniform();
    head.bias = 0.0;

    return {std::move(theta), std::move(head)};
}

Validation validate(const Dataset& dataset) {
    if (dataset.points.empty()) {
        return {false, "dataset is empty"};
    }
    if (dataset.points.size() != dataset.labels.size()) {
        return {false, "point count " + std::to_string(dataset.points.size()) +
                           " != label count " + std::to_string(dataset.labels.size())};
    }
    const std::size_t dim = dataset.points[0].size();
    if (dim == 0) {
        return {false, "point 0 has dimension 0"};
    }
    for (std::size_t i = 0; i < dataset.points.size(); ++i) {
        const Vec& p = dataset.points[i];
        if (p.size() != dim) {
            return {false, "point " + std::to_string(i) + " has dimension " +
                               std::to_string(p.size()) + ", expected " +
                               std::to_string(dim)};
        }
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (!std::isfinite(p[j])) {
                return {false, "non-finite coordinate " + std::to_string(j) +
                                   " in point " + std::to_string(i)};
            }
        }
        if (dataset.labels[i] != 0 && dataset.labels[i] != 1) {
            return {false, "label " + std::to_string(dataset.labels[i]) +
                               " at index " + std::to_string(i) + " is not 0/1"};
        }
    }
    return {true, ""};
}

}  // namespace vfn
