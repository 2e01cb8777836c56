#pragma once

#include <cmath>

#include "vfn/core.hpp"

namespace vfn {

enum class DatasetKind { moons, circles, sine };

/// Generator parameters. radius_ratio applies to circles only; x-range,
/// amplitude, and margin apply to the sin set only.
struct GenSpec {
    DatasetKind kind = DatasetKind::moons;
    int samples = 200;
    double noise = 0.1;
    std::uint64_t seed = 0;
    double radius_ratio = 0.5;
    double x_min = 0.0;
    double x_max = 2.0 * M_PI;
    double amplitude = 1.0;
    double margin = 0.3;
};

/// "moons" | "circles" | "sin"
DatasetKind parse_kind(const std::string& name);
std::string kind_name(DatasetKind kind);

/// Dispatch on spec.kind.
Dataset generate(const GenSpec& spec);

/// Two interleaving half-circle arcs. Class 0 on (cos t, sin t), class 1 on
/// (1 - cos t, 0.5 - sin t), t drawn U[0,pi); i.i.d. Gaussian noise sigma on
/// each coordinate; class 0 gets ceil(m/2) samples.
Dataset gen_moons(const GenSpec& spec);

/// Class 0 on the unit circle, class 1 on the concentric circle of radius
/// radius_ratio; angles drawn U[0,2pi); same noise and balance rules.
Dataset gen_circles(const GenSpec& spec);

/// Points banded around amplitude*sin(x): class 1 at least margin above the
/// curve, class 0 at least margin below, cloud thickness 1; x drawn over
/// [x_min, x_max); noise applied to both coordinates afterward.
Dataset gen_sin(const GenSpec& spec);

/// CSV with header "x1,...,xn,label", floats at 17 significant digits,
/// labels 0/1, LF line endings. Round trips are value-exact.
void write_csv(const Dataset& dataset, const std::string& path);
Dataset read_csv(const std::string& path);

}  // namespace vfn
