#include "vfn/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "svg.hpp"
#include "vfn/flow.hpp"

namespace vfn {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error(ErrorKind::io, "export: cannot open '" + path + "'");
    }
    return file;
}

std::string rate_tag(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", rate);
    return buf;
}

Rect expand_degenerate(double x_lo, double x_hi, double y_lo, double y_hi,
                       double pad_fraction) {
    double wx = x_hi - x_lo;
    double wy = y_hi - y_lo;
    if (wx <= 0.0) {
        x_lo -= 0.5;
        x_hi += 0.5;
        wx = 1.0;
    }
    if (wy <= 0.0) {
        y_lo -= 0.5;
        y_hi += 0.5;
        wy = 1.0;
    }
    return Rect{x_lo - pad_fraction * wx, x_hi + pad_fraction * wx,
                y_lo - pad_fraction * wy, y_hi + pad_fraction * wy};
}

void draw_points(SvgWriter& svg, const PlotFrame& frame,
                 const std::vector<Vec>& points, const std::vector<int>& labels) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        svg.circle(frame.px(points[i][0]), frame.py(points[i][1]), 3.0,
                   class_color(labels[i]), "white");
    }
}

}  // namespace

Rect points_bounds(const std::vector<Vec>& points, double pad_fraction) {
    if (points.empty()) {
        throw Error(ErrorKind::usage, "points_bounds: no points");
    }
    double x_lo = points[0][0], x_hi = points[0][0];
    double y_lo = points[0][1], y_hi = points[0][1];
    for (const Vec& p : points) {
        x_lo = std::min(x_lo, p[0]);
        x_hi = std::max(x_hi, p[0]);
        y_lo = std::min(y_lo, p[1]);
        y_hi = std::max(y_hi, p[1]);
    }
    return expand_degenerate(x_lo, x_hi, y_lo, y_hi, pad_fraction);
}

Rect dataset_bounds(const Dataset& dataset, double pad_fraction) {
    return points_bounds(dataset.points, pad_fraction);
}

BoundaryMap compute_boundary_map(const ModelState& state, Space space,
                                 const Rect& bounds, int resolution) {
    if (resolution < 16) {
        throw Error(ErrorKind::usage, "boundary map: resolution must be >= 16");
    }
    if (bounds.degenerate()) {
        throw Error(ErrorKind::usage, "boundary map: degenerate bounds");
    }
    BoundaryMap map;
    map.bounds = bounds;
    map.resolution = resolution;
    map.space = space;
    map.values.reserve(static_cast<std::size_t>(resolution) * resolution);
    for (int row = 0; row < resolution; ++row) {
        double y = bounds.y_min + bounds.height() * row / (resolution - 1);
        for (int col = 0; col < resolution; ++col) {
            double x = bounds.x_min + bounds.width() * col / (resolution - 1);
            Vec g = {x, y};
            double yhat;
            if (space == Space::original) {
                yhat = predict(g, state);
            } else {
                yhat = sigmoid(g[0] * state.head.weights[0] +
                               g[1] * state.head.weights[1] + state.head.bias);
            }
            map.values.push_back(yhat);
        }
    }
    return map;
}

void export_boundary_map(const ModelState& state, const Dataset& dataset,
                         Space space, const Rect& bounds, int resolution,
                         const std::string& path_base) {
    BoundaryMap map = compute_boundary_map(state, space, bounds, resolution);

    std::vector<Vec> overlay = dataset.points;
    if (space == Space::transformed) {
        overlay = transport_batch(dataset.points, state.theta, state.flow);
    }

    PlotFrame frame;
    frame.data = bounds;
    SvgWriter svg(frame.canvas_w(), frame.canvas_h());
    double cell_w = frame.plot_w / (resolution - 1);
    double cell_h = frame.plot_h / (resolution - 1);
    for (int row = 0; row < resolution; ++row) {
        for (int col = 0; col < resolution; ++col) {
            double x = bounds.x_min + bounds.width() * col / (resolution - 1);
            double y = bounds.y_min + bounds.height() * row / (resolution - 1);
            svg.rect(frame.px(x) - cell_w / 2, frame.py(y) - cell_h / 2,
                     cell_w + 0.5, cell_h + 0.5, heat_color(map.at(row, col)));
        }
    }
    draw_points(svg, frame, overlay, dataset.labels);
    frame.draw_frame(svg,
                     space == Space::original ? "decision map, original space"
                                              : "decision map, transformed space",
                     "x1", "x2");
    svg.save(path_base + ".svg");

    auto csv = open_out(path_base + ".csv");
    csv << "x,y,yhat\n";
    for (int row = 0; row < resolution; ++row) {
        double y = bounds.y_min + bounds.height() * row / (resolution - 1);
        for (int col = 0; col < resolution; ++col) {
            double x = bounds.x_min + bounds.width() * col / (resolution - 1);
            csv << fmt17(x) << "," << fmt17(y) << "," << fmt17(map.at(row, col))
                << "\n";
        }
    }
}

void export_cost_curves(const SweepResult& sweep, const std::string& dir) {
    if (sweep.stats.empty()) {
        throw Error(ErrorKind::usage, "export_cost_curves: empty sweep");
    }
    for (std::size_t r = 0; r < sweep.stats.size(); ++r) {
        const RateStats& stats = sweep.stats[r];
        const std::string base = dir + "/cost_eta" + rate_tag(stats.rate);

        auto csv = open_out(base + ".csv");
        csv << "epoch,mean,std\n";
        for (std::size_t e = 0; e < stats.mean_cost.size(); ++e) {
            csv << e << "," << fmt17(stats.mean_cost[e]) << ","
                << fmt17(stats.std_cost[e]) << "\n";
        }

        double lo = stats.mean_cost[0], hi = stats.mean_cost[0];
        for (std::size_t e = 0; e < stats.mean_cost.size(); ++e) {
            lo = std::min(lo, stats.mean_cost[e] - stats.std_cost[e]);
            hi = std::max(hi, stats.mean_cost[e] + stats.std_cost[e]);
        }
        PlotFrame frame;
        frame.data = expand_degenerate(0.0, double(stats.mean_cost.size() - 1),
                                       lo, hi, 0.05);
        SvgWriter svg(frame.canvas_w(), frame.canvas_h());

        std::vector<std::pair<double, double>> band;
        band.reserve(stats.mean_cost.size() * 2);
        for (std::size_t e = 0; e < stats.mean_cost.size(); ++e) {
            band.emplace_back(frame.px(double(e)),
                              frame.py(stats.mean_cost[e] + stats.std_cost[e]));
        }
        for (std::size_t e = stats.mean_cost.size(); e-- > 0;) {
            band.emplace_back(frame.px(double(e)),
                              frame.py(stats.mean_cost[e] - stats.std_cost[e]));
        }
        svg.polygon(band, "#7f9fd0", 0.45);

        std::vector<std::pair<double, double>> mean_line;
        mean_line.reserve(stats.mean_cost.size());
        for (std::size_t e = 0; e < stats.mean_cost.size(); ++e) {
            mean_line.emplace_back(frame.px(double(e)), frame.py(stats.mean_cost[e]));
        }
        svg.polyline(mean_line, "#123a7d", 1.5);
        frame.draw_frame(svg, "cost vs epochs, eta=" + rate_tag(stats.rate),
                         "epoch", "cost");
        svg.save(base + ".svg");
    }
}

void export_field_plot(const FieldParams& theta, const Rect& bounds,
                       int resolution, const std::string& path_base) {
    std::vector<FieldSample> samples = eval_field_grid(bounds, resolution, theta);

    double max_speed = 0.0;
    for (const FieldSample& s : samples) {
        max_speed = std::max(max_speed,
                             std::hypot(s.velocity[0], s.velocity[1]));
    }
    double cell = std::min(bounds.width(), bounds.height()) / (resolution - 1);
    double scale = max_speed > 0.0 ? 0.85 * cell / max_speed : 0.0;

    PlotFrame frame;
    frame.data = bounds;
    SvgWriter svg(frame.canvas_w(), frame.canvas_h());
    for (const FieldSample& s : samples) {
        double x0 = s.position[0], y0 = s.position[1];
        double x1 = x0 + scale * s.velocity[0];
        double y1 = y0 + scale * s.velocity[1];
        double px0 = frame.px(x0), py0 = frame.py(y0);
        double px1 = frame.px(x1), py1 = frame.py(y1);
        svg.line(px0, py0, px1, py1, "#2a4d8f", 1.0);
        double dx = px1 - px0, dy = py1 - py0;
        double len = std::hypot(dx, dy);
        if (len > 1e-9) {
            // two short barbs for the arrow head
            double ux = dx / len, uy = dy / len;
            double head = std::min(4.0, 0.35 * len);
            svg.line(px1, py1, px1 - head * (ux + 0.45 * uy),
                     py1 - head * (uy - 0.45 * ux), "#2a4d8f", 1.0);
            svg.line(px1, py1, px1 - head * (ux - 0.45 * uy),
                     py1 - head * (uy + 0.45 * ux), "#2a4d8f", 1.0);
        }
    }
    frame.draw_frame(svg, "vector field", "x1", "x2");
    svg.save(path_base + ".svg");

    auto csv = open_out(path_base + ".csv");
    csv << "x,y,kx,ky\n";
    for (const FieldSample& s : samples) {
        csv << fmt17(s.position[0]) << "," << fmt17(s.position[1]) << ","
            << fmt17(s.velocity[0]) << "," << fmt17(s.velocity[1]) << "\n";
    }
}

void export_meshgrid_distortion(const FieldParams& theta, const FlowConfig& flow,
                                const Rect& bounds, int resolution,
                                const std::string& path_base) {
    if (resolution < 2) {
        throw Error(ErrorKind::usage, "meshgrid: resolution must be >= 2");
    }
    if (bounds.degenerate()) {
        throw Error(ErrorKind::usage, "meshgrid: degenerate bounds");
    }
    const int samples_per_line = 64;

    // Each grid line becomes one transported polyline.
    std::vector<std::vector<Vec>> lines;
    for (int i = 0; i < resolution; ++i) {
        double x = bounds.x_min + bounds.width() * i / (resolution - 1);
        std::vector<Vec> line;
        for (int k = 0; k < samples_per_line; ++k) {
            double y = bounds.y_min + bounds.height() * k / (samples_per_line - 1);
            line.push_back({x, y});
        }
        lines.push_back(transport_batch(line, theta, flow));
    }
    for (int i = 0; i < resolution; ++i) {
        double y = bounds.y_min + bounds.height() * i / (resolution - 1);
        std::vector<Vec> line;
        for (int k = 0; k < samples_per_line; ++k) {
            double x = bounds.x_min + bounds.width() * k / (samples_per_line - 1);
            line.push_back({x, y});
        }
        lines.push_back(transport_batch(line, theta, flow));
    }

    std::vector<Vec> all;
    for (const auto& line : lines) all.insert(all.end(), line.begin(), line.end());
    PlotFrame frame;
    frame.data = points_bounds(all, 0.05);
    SvgWriter svg(frame.canvas_w(), frame.canvas_h());
    for (const auto& line : lines) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(line.size());
        for (const Vec& p : line) {
            pts.emplace_back(frame.px(p[0]), frame.py(p[1]));
        }
        svg.polyline(pts, "#456", 0.8);
    }
    frame.draw_frame(svg, "transported meshgrid", "x1", "x2");
    svg.save(path_base + ".svg");

    auto csv = open_out(path_base + ".csv");
    csv << "line,x,y\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (const Vec& p : lines[i]) {
            csv << i << "," << fmt17(p[0]) << "," << fmt17(p[1]) << "\n";
        }
    }
}

void export_scatter(const std::vector<Vec>& points, const std::vector<int>& labels,
                    const std::string& title, const std::string& path_base) {
    if (points.size() != labels.size() || points.empty()) {
        throw Error(ErrorKind::usage, "export_scatter: bad input sizes");
    }
    PlotFrame frame;
    frame.data = points_bounds(points, 0.1);
    SvgWriter svg(frame.canvas_w(), frame.canvas_h());
    draw_points(svg, frame, points, labels);
    frame.draw_frame(svg, title, "x1", "x2");
    svg.save(path_base + ".svg");

    auto csv = open_out(path_base + ".csv");
    csv << "x1,x2,label\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        csv << fmt17(points[i][0]) << "," << fmt17(points[i][1]) << ","
            << labels[i] << "\n";
    }
}

// ------------------------------------------------------------
// Checkpoints
// ------------------------------------------------------------

void save_model(const ModelState& state, const std::string& path) {
    auto file = open_out(path);
    const int S = state.theta.num_gaussians();
    const int dim = state.dim();
    file << "vfn-checkpoint 1\n";
    file << "dim " << dim << "\n";
    file << "gaussians " << S << "\n";
    file << "step_size " << fmt17(state.flow.step_size) << "\n";
    file << "num_steps " << state.flow.num_steps << "\n";
    auto write_rows = [&](const char* key, const std::vector<Vec>& rows) {
        file << key;
        for (const Vec& row : rows) {
            for (double v : row) file << " " << fmt17(v);
        }
        file << "\n";
    };
    write_rows("centers", state.theta.centers);
    write_rows("directions", state.theta.directions);
    file << "weights";
    for (double v : state.head.weights) file << " " << fmt17(v);
    file << "\n";
    file << "bias " << fmt17(state.head.bias) << "\n";
    if (!file) {
        throw Error(ErrorKind::io, "save_model: write failed for '" + path + "'");
    }
}

namespace {

std::istringstream expect_line(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::data, "checkpoint: truncated before '" + key + "'");
    }
    std::istringstream ss(line);
    std::string got;
    ss >> got;
    if (got != key) {
        throw Error(ErrorKind::data,
                    "checkpoint: expected key '" + key + "', got '" + got + "'");
    }
    return ss;
}

double read_double(std::istringstream& ss, const std::string& key) {
    double v;
    if (!(ss >> v)) {
        throw Error(ErrorKind::data, "checkpoint: bad value for '" + key + "'");
    }
    return v;
}

}  // namespace

ModelState load_model(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw Error(ErrorKind::io, "load_model: cannot open '" + path + "'");
    }
    std::string magic;
    int version = -1;
    {
        std::string line;
        if (!std::getline(file, line)) {
            throw Error(ErrorKind::data, "checkpoint: empty file");
        }
        std::istringstream ss(line);
        ss >> magic >> version;
        if (magic != "vfn-checkpoint") {
            throw Error(ErrorKind::data, "checkpoint: not a checkpoint file");
        }
        if (version != 1) {
            throw Error(ErrorKind::data, "checkpoint: unsupported version " +
                                             std::to_string(version));
        }
    }
    auto ss_dim = expect_line(file, "dim");
    int dim = static_cast<int>(read_double(ss_dim, "dim"));
    auto ss_S = expect_line(file, "gaussians");
    int S = static_cast<int>(read_double(ss_S, "gaussians"));
    if (dim < 1 || S < 1) {
        throw Error(ErrorKind::data, "checkpoint: invalid shape");
    }

    ModelState state;
    auto ss_h = expect_line(file, "step_size");
    state.flow.step_size = read_double(ss_h, "step_size");
    auto ss_N = expect_line(file, "num_steps");
    state.flow.num_steps = static_cast<int>(read_double(ss_N, "num_steps"));

    auto read_rows = [&](const std::string& key) {
        auto ss = expect_line(file, key);
        std::vector<Vec> rows(S, Vec(dim));
        for (auto& row : rows) {
            for (double& v : row) v = read_double(ss, key);
        }
        return rows;
    };
    state.theta.centers = read_rows("centers");
    state.theta.directions = read_rows("directions");
    auto ss_w = expect_line(file, "weights");
    state.head.weights.resize(dim);
    for (double& v : state.head.weights) v = read_double(ss_w, "weights");
    auto ss_b = expect_line(file, "bias");
    state.head.bias = read_double(ss_b, "bias");
    return state;
}

}  // namespace vfn
