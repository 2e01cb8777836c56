#include "vfn/flow.hpp"

#include <cmath>

namespace vfn {

namespace {

bool all_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

Vec euler_step(const Vec& x, const FieldParams& theta, double h) {
    if (!std::isfinite(h)) {
        throw Error(ErrorKind::usage, "euler_step: non-finite step size");
    }
    Vec velocity = eval_field(x, theta);
    Vec next(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        next[j] = x[j] + h * velocity[j];
    }
    if (!all_finite(next)) {
        std::string at = "(";
        for (std::size_t j = 0; j < x.size(); ++j) {
            at += (j ? "," : "") + std::to_string(x[j]);
        }
        throw Error(ErrorKind::numeric, "euler_step: non-finite result from input " + at + ")");
    }
    return next;
}

Trajectory transport(const Vec& x0, const FieldParams& theta,
                     const FlowConfig& flow) {
    if (!flow.valid()) {
        throw Error(ErrorKind::usage, "transport: invalid flow config");
    }
    Trajectory traj;
    traj.config = flow;
    traj.states.reserve(flow.num_steps + 1);
    traj.states.push_back(x0);
    for (int i = 0; i < flow.num_steps; ++i) {
        try {
            traj.states.push_back(euler_step(traj.states.back(), theta, flow.step_size));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::numeric) {
                throw Error(ErrorKind::numeric,
                            "transport: divergence at step " + std::to_string(i + 1));
            }
            throw;
        }
    }
    return traj;
}

std::vector<Vec> transport_batch(const std::vector<Vec>& points,
                                 const FieldParams& theta,
                                 const FlowConfig& flow) {
    std::vector<Vec> endpoints;
    endpoints.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        try {
            endpoints.push_back(transport(points[i], theta, flow).states.back());
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::numeric) {
                throw Error(ErrorKind::numeric,
                            "transport_batch: point " + std::to_string(i) + ": " + e.what());
            }
            throw;
        }
    }
    return endpoints;
}

std::vector<Vec> streamline(const Vec& x0, const FieldParams& theta, double h,
                            int max_steps, double stop_speed) {
    if (!(h > 0.0) || max_steps < 1 || stop_speed < 0.0) {
        throw Error(ErrorKind::usage, "streamline: need h > 0, max_steps >= 1, stop_speed >= 0");
    }
    std::vector<Vec> line;
    line.push_back(x0);
    for (int i = 0; i < max_steps; ++i) {
        Vec velocity = eval_field(line.back(), theta);
        double speed2 = 0.0;
        for (double v : velocity) speed2 += v * v;
        if (speed2 < stop_speed * stop_speed) break;
        Vec next(line.back());
        for (std::size_t j = 0; j < next.size(); ++j) {
            next[j] += h * velocity[j];
        }
        line.push_back(std::move(next));
    }
    return line;
}

}  // namespace vfn
