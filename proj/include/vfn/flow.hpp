#pragma once

#include "vfn/core.hpp"
#include "vfn/field.hpp"

namespace vfn {

/// All intermediate states X_0 .. X_N of one Euler integration.
struct Trajectory {
    std::vector<Vec> states;  // N+1 entries
    FlowConfig config;

    const Vec& endpoint() const { return states.back(); }
};

/// One explicit Euler step: x + h * K(x, theta).
Vec euler_step(const Vec& x, const FieldParams& theta, double h);

/// N Euler steps from x0; states[0] == x0, states[N] is the endpoint.
/// Throws a numeric Error naming the step index if a state goes non-finite.
Trajectory transport(const Vec& x0, const FieldParams& theta,
                     const FlowConfig& flow);

/// Endpoints only, order preserved; bit-identical to pointwise transport.
std::vector<Vec> transport_batch(const std::vector<Vec>& points,
                                 const FieldParams& theta,
                                 const FlowConfig& flow);

/// Euler polyline for visualization: stops after max_steps or once
/// ||K|| drops below stop_speed.
std::vector<Vec> streamline(const Vec& x0, const FieldParams& theta, double h,
                            int max_steps = 1000, double stop_speed = 1e-6);

}  // namespace vfn
