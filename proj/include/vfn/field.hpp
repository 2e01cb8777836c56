#pragma once

#include "vfn/core.hpp"

namespace vfn {

/// Axis-aligned 2-D rectangle used for grids and plots.
struct Rect {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;

    bool degenerate() const {
        return !(std::isfinite(x_min) && std::isfinite(x_max) &&
                 std::isfinite(y_min) && std::isfinite(y_max)) ||
               x_min >= x_max || y_min >= y_max;
    }
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
};

/// Field value at one grid position.
struct FieldSample {
    Vec position;
    Vec velocity;
};

/// G(x,mu) = exp(-||x-mu||^2), squared Euclidean norm, unit length scale.
/// Always in (0,1]; underflows to 0 only when exp itself flushes.
double gaussian(const Vec& x, const Vec& mu);

/// K(x) = sum_i V_i * G(x, mu_i). Linear in each direction vector.
Vec eval_field(const Vec& x, const FieldParams& theta);

/// Row-major resolution x resolution sampling of the field over bounds,
/// inclusive at both ends (row index varies y, column index varies x).
std::vector<FieldSample> eval_field_grid(const Rect& bounds, int resolution,
                                         const FieldParams& theta);

}  // namespace vfn
