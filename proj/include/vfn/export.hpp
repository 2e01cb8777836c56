#pragma once

#include "vfn/core.hpp"
#include "vfn/field.hpp"
#include "vfn/model.hpp"
#include "vfn/train.hpp"

namespace vfn {

enum class Space { original, transformed };

/// Grid of predicted probabilities over a rectangle, row-major with the row
/// index walking y and the column index walking x; every value is strictly
/// inside (0,1).
struct BoundaryMap {
    Rect bounds;
    int resolution = 0;
    std::vector<double> values;  // resolution * resolution
    Space space = Space::original;

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * resolution + col];
    }
};

/// Dataset bounding box padded by pad_fraction per side (the default plot
/// bounds everywhere).
Rect dataset_bounds(const Dataset& dataset, double pad_fraction = 0.2);
Rect points_bounds(const std::vector<Vec>& points, double pad_fraction = 0.2);

/// space == original: full model (flow + head) evaluated at each grid point.
/// space == transformed: head only, sigmoid(w . g + b), i.e. the map seen by
/// already-transported points.
BoundaryMap compute_boundary_map(const ModelState& state, Space space,
                                 const Rect& bounds, int resolution);

/// Color map plus the dataset overlaid (transported first when
/// space == transformed). Writes <path_base>.svg and <path_base>.csv with
/// rows "x,y,yhat".
void export_boundary_map(const ModelState& state, const Dataset& dataset,
                         Space space, const Rect& bounds, int resolution,
                         const std::string& path_base);

/// One file pair per learning rate: mean cost curve with a +-1 std band and
/// a CSV of rows "epoch,mean,std".
void export_cost_curves(const SweepResult& sweep, const std::string& dir);

/// Quiver plot of the field on a grid. Arrows share one scale factor chosen
/// so the longest arrow spans 0.85 grid cells. CSV rows "x,y,kx,ky".
void export_field_plot(const FieldParams& theta, const Rect& bounds,
                       int resolution, const std::string& path_base);

/// Regular grid lines pushed through the flow and drawn as polylines.
/// CSV rows "line,x,y" where consecutive rows with equal line id form one
/// polyline.
void export_meshgrid_distortion(const FieldParams& theta, const FlowConfig& flow,
                                const Rect& bounds, int resolution,
                                const std::string& path_base);

/// Labeled 2-D scatter. CSV rows "x1,x2,label".
void export_scatter(const std::vector<Vec>& points, const std::vector<int>& labels,
                    const std::string& title, const std::string& path_base);

/// Versioned human-readable checkpoint ("vfn-checkpoint 1"); floats at 17
/// significant digits, so save/load round trips bit-exactly.
void save_model(const ModelState& state, const std::string& path);
ModelState load_model(const std::string& path);

}  // namespace vfn
