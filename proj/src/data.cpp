#include "vfn/data.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vfn {

namespace {

void check_common(const GenSpec& spec) {
    if (spec.samples < 2) {
        throw Error(ErrorKind::usage, "generator: need at least 2 samples");
    }
    if (!std::isfinite(spec.noise) || spec.noise < 0.0) {
        throw Error(ErrorKind::usage, "generator: noise must be finite and >= 0");
    }
}

void add_point(Dataset& out, double x, double y, int label, double sigma,
               SplitMix64& rng) {
    double nx = rng.gaussian();
    double ny = rng.gaussian();
    out.points.push_back({x + sigma * nx, y + sigma * ny});
    out.labels.push_back(label);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, int line_no) {
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v)) {
        throw Error(ErrorKind::data,
                    "line " + std::to_string(line_no) + ": invalid number '" + s + "'");
    }
    return v;
}

}  // namespace

DatasetKind parse_kind(const std::string& name) {
    if (name == "moons") return DatasetKind::moons;
    if (name == "circles") return DatasetKind::circles;
    if (name == "sin") return DatasetKind::sine;
    throw Error(ErrorKind::usage, "unknown dataset kind '" + name +
                                      "' (expected moons, circles, or sin)");
}

std::string kind_name(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::moons: return "moons";
        case DatasetKind::circles: return "circles";
        case DatasetKind::sine: return "sin";
    }
    return "?";
}

Dataset generate(const GenSpec& spec) {
    switch (spec.kind) {
        case DatasetKind::moons: return gen_moons(spec);
        case DatasetKind::circles: return gen_circles(spec);
        case DatasetKind::sine: return gen_sin(spec);
    }
    throw Error(ErrorKind::usage, "generate: unknown kind");
}

Dataset gen_moons(const GenSpec& spec) {
    check_common(spec);
    SplitMix64 rng(spec.seed);
    Dataset out;
    out.name = "moons";
    const int m0 = (spec.samples + 1) / 2;
    for (int k = 0; k < spec.samples; ++k) {
        double t = M_PI * rng.uniform();
        if (k < m0) {
            add_point(out, std::cos(t), std::sin(t), 0, spec.noise, rng);
        } else {
            add_point(out, 1.0 - std::cos(t), 0.5 - std::sin(t), 1, spec.noise, rng);
        }
    }
    return out;
}

Dataset gen_circles(const GenSpec& spec) {
    check_common(spec);
    if (!(spec.radius_ratio > 0.0) || !(spec.radius_ratio < 1.0)) {
        throw Error(ErrorKind::usage,
                    "gen_circles: radius_ratio must lie strictly in (0,1)");
    }
    SplitMix64 rng(spec.seed);
    Dataset out;
    out.name = "circles";
    const int m0 = (spec.samples + 1) / 2;
    for (int k = 0; k < spec.samples; ++k) {
        double angle = 2.0 * M_PI * rng.uniform();
        double r = k < m0 ? 1.0 : spec.radius_ratio;
        add_point(out, r * std::cos(angle), r * std::sin(angle), k < m0 ? 0 : 1,
                  spec.noise, rng);
    }
    return out;
}

Dataset gen_sin(const GenSpec& spec) {
    check_common(spec);
    if (!(spec.amplitude > 0.0) || spec.margin < 0.0 ||
        spec.margin >= spec.amplitude) {
        throw Error(ErrorKind::usage,
                    "gen_sin: need amplitude > 0 and 0 <= margin < amplitude");
    }
    if (!(spec.x_min < spec.x_max)) {
        throw Error(ErrorKind::usage, "gen_sin: empty x-range");
    }
    SplitMix64 rng(spec.seed);
    Dataset out;
    out.name = "sin";
    const int m0 = (spec.samples + 1) / 2;
    for (int k = 0; k < spec.samples; ++k) {
        double x = spec.x_min + (spec.x_max - spec.x_min) * rng.uniform();
        double offset = spec.margin + rng.uniform();
        int label = k < m0 ? 0 : 1;
        double y = spec.amplitude * std::sin(x) + (label ? offset : -offset);
        add_point(out, x, y, label, spec.noise, rng);
    }
    return out;
}

void write_csv(const Dataset& dataset, const std::string& path) {
    Validation v = validate(dataset);
    if (!v.ok) {
        throw Error(ErrorKind::data, "write_csv: " + v.message);
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error(ErrorKind::io, "write_csv: cannot open '" + path + "'");
    }
    const int dim = dataset.dim();
    for (int j = 0; j < dim; ++j) {
        file << "x" << (j + 1) << ",";
    }
    file << "label\n";
    char buf[64];
    for (int s = 0; s < dataset.size(); ++s) {
        for (int j = 0; j < dim; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", dataset.points[s][j]);
            file << buf << ",";
        }
        file << dataset.labels[s] << "\n";
    }
    if (!file) {
        throw Error(ErrorKind::io, "write_csv: write failed for '" + path + "'");
    }
}

Dataset read_csv(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw Error(ErrorKind::io, "read_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(file, line)) {
        throw Error(ErrorKind::data, "read_csv: '" + path + "' is empty");
    }
    const std::size_t columns = split_line(line).size();
    if (columns < 2) {
        throw Error(ErrorKind::data, "read_csv: header needs at least 2 columns");
    }
    const std::size_t dim = columns - 1;

    Dataset out;
    out.name = path;
    int line_no = 1;
    while (std::getline(file, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_line(line);
        if (fields.size() != columns) {
            throw Error(ErrorKind::data,
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(columns) + " columns, got " +
                            std::to_string(fields.size()));
        }
        Vec p(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            p[j] = parse_double(fields[j], line_no);
        }
        const std::string& label = fields[dim];
        if (label != "0" && label != "1") {
            throw Error(ErrorKind::data, "line " + std::to_string(line_no) +
                                             ": invalid label '" + label + "'");
        }
        out.points.push_back(std::move(p));
        out.labels.push_back(label == "1" ? 1 : 0);
    }
    if (out.points.empty()) {
        throw Error(ErrorKind::data, "read_csv: '" + path + "' has no data rows");
    }
    return out;
}

}  // namespace vfn
