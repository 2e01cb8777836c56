#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vfn/data.hpp"
#include "vfn/export.hpp"
#include "vfn/flow.hpp"
#include "vfn/gradcheck.hpp"
#include "vfn/model.hpp"
#include "vfn/train.hpp"

namespace fs = std::filesystem;
using namespace vfn;

namespace {

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage: return 2;
        case ErrorKind::data: return 3;
        case ErrorKind::numeric: return 4;
        case ErrorKind::io: return 5;
    }
    return 1;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// ------------------------------------------------------------
// Config files: "key value" lines mirroring the long flags, so a dumped
// file feeds straight back into --config. Explicit flags win over file
// values.
// ------------------------------------------------------------

template <typename T>
T parse_value(const std::string& s);

template <>
double parse_value<double>(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw Error(ErrorKind::data, "config: bad number '" + s + "'");
    }
    return v;
}

template <>
int parse_value<int>(const std::string& s) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw Error(ErrorKind::data, "config: bad integer '" + s + "'");
    }
    return static_cast<int>(v);
}

template <>
std::uint64_t parse_value<std::uint64_t>(const std::string& s) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw Error(ErrorKind::data, "config: bad integer '" + s + "'");
    }
    return v;
}

template <>
std::string parse_value<std::string>(const std::string& s) {
    return s;
}

template <>
bool parse_value<bool>(const std::string& s) {
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    throw Error(ErrorKind::data, "config: bad flag value '" + s + "'");
}

template <>
std::vector<double> parse_value<std::vector<double>>(const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(parse_value<double>(cell));
    }
    if (out.empty()) {
        throw Error(ErrorKind::data, "config: empty list '" + s + "'");
    }
    return out;
}

std::string render_value(double v) { return fmt17(v); }
std::string render_value(int v) { return std::to_string(v); }
std::string render_value(std::uint64_t v) { return std::to_string(v); }
std::string render_value(const std::string& v) { return v; }
std::string render_value(bool v) { return v ? "1" : "0"; }
std::string render_value(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt17(v[i]);
    }
    return out;
}

/// Ties each option to a config-file key. After parsing, file values fill
/// every option the user left at its default; dump() writes the effective
/// configuration back out in the same format.
class ConfigSync {
public:
    template <typename T>
    void bind(CLI::Option* opt, std::string key, T& var) {
        items_.push_back(Item{
            std::move(key), opt,
            [&var](const std::string& s) { var = parse_value<T>(s); },
            [&var]() { return render_value(var); }});
    }

    void apply(const std::string& path) const {
        std::ifstream file(path);
        if (!file) {
            throw Error(ErrorKind::io, "config: cannot open '" + path + "'");
        }
        std::map<std::string, std::string> values;
        std::string line;
        int line_no = 0;
        while (std::getline(file, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t start = line.find_first_not_of(" \t");
            if (start == std::string::npos || line[start] == '#') continue;
            std::size_t space = line.find_first_of(" \t", start);
            if (space == std::string::npos) {
                throw Error(ErrorKind::data,
                            "config: line " + std::to_string(line_no) +
                                ": expected 'key value'");
            }
            std::string key = line.substr(start, space - start);
            std::size_t vstart = line.find_first_not_of(" \t", space);
            if (vstart == std::string::npos) {
                throw Error(ErrorKind::data,
                            "config: line " + std::to_string(line_no) +
                                ": missing value for '" + key + "'");
            }
            values[key] = line.substr(vstart);
        }
        for (const auto& [key, value] : values) {
            bool known = false;
            for (const Item& item : items_) known |= item.key == key;
            if (!known) {
                throw Error(ErrorKind::data, "config: unknown key '" + key + "'");
            }
        }
        for (const Item& item : items_) {
            auto it = values.find(item.key);
            if (it != values.end() && item.opt->count() == 0) {
                item.apply(it->second);
            }
        }
    }

    void dump(std::ostream& out) const {
        for (const Item& item : items_) {
            std::string value = item.render();
            if (value.empty()) continue;  // absent key reads back as the default
            out << item.key << " " << value << "\n";
        }
    }

    void dump_file(const std::string& path) const {
        std::ofstream file(path, std::ios::binary);
        if (!file) {
            throw Error(ErrorKind::io, "config: cannot write '" + path + "'");
        }
        dump(file);
        if (!file) {
            throw Error(ErrorKind::io, "config: write failed for '" + path + "'");
        }
    }

private:
    struct Item {
        std::string key;
        CLI::Option* opt;
        std::function<void(const std::string&)> apply;
        std::function<std::string()> render;
    };
    std::vector<Item> items_;
};

// ------------------------------------------------------------
// Shared option bundles
// ------------------------------------------------------------

struct DataOpts {
    std::string dataset = "circles";  // kind name or CSV path
    int m = 200;
    double noise = 0.1;
    std::uint64_t data_seed = 0;
};

struct ModelOpts {
    int gaussians = 2;
    int steps = 1;
    double step_size = 1.0;
    double lambda = 0.0;
};

struct FitOpts {
    double rate = 0.3;
    int epochs = 10000;
    std::uint64_t seed = 0;
};

void add_data_flags(CLI::App* cmd, ConfigSync& sync, DataOpts& d) {
    sync.bind(cmd->add_option("--dataset", d.dataset,
                              "dataset kind (moons, circles, sin) or a CSV path")
                  ->capture_default_str(),
              "dataset", d.dataset);
    sync.bind(cmd->add_option("--m", d.m, "generated sample count")
                  ->capture_default_str(),
              "m", d.m);
    sync.bind(cmd->add_option("--noise", d.noise, "generator noise sigma")
                  ->capture_default_str(),
              "noise", d.noise);
    sync.bind(cmd->add_option("--data-seed", d.data_seed, "generator seed")
                  ->capture_default_str(),
              "data-seed", d.data_seed);
}

void add_model_flags(CLI::App* cmd, ConfigSync& sync, ModelOpts& m) {
    sync.bind(cmd->add_option("--gaussians", m.gaussians,
                              "Gaussian components in the field (S)")
                  ->capture_default_str(),
              "gaussians", m.gaussians);
    sync.bind(cmd->add_option("--steps", m.steps, "Euler steps (N)")
                  ->capture_default_str(),
              "steps", m.steps);
    sync.bind(cmd->add_option("--step-size", m.step_size, "Euler step size (h)")
                  ->capture_default_str(),
              "step-size", m.step_size);
    sync.bind(cmd->add_option("--lambda", m.lambda, "L2 penalty on directions")
                  ->capture_default_str(),
              "lambda", m.lambda);
}

void add_config_flags(CLI::App* cmd, std::string& config_path,
                      std::string& dump_path, bool& dry_run) {
    cmd->add_option("--config", config_path,
                    "read defaults from a 'key value' config file "
                    "(explicit flags win)");
    cmd->add_option("--dump-config", dump_path,
                    "write the effective configuration to this file");
    cmd->add_flag("--dry-run", dry_run,
                  "resolve the configuration, print it, and exit");
}

// prints the effective configuration and handles --config/--dump-config
// plumbing; returns true when the command should stop (dry run)
bool resolve_config(const ConfigSync& sync, const std::string& config_path,
                    const std::string& dump_path, bool dry_run) {
    if (!config_path.empty()) sync.apply(config_path);
    if (!dump_path.empty()) {
        sync.dump_file(dump_path);
        std::cout << "wrote config to " << dump_path << "\n";
    }
    if (dry_run) {
        sync.dump(std::cout);
        return true;
    }
    return false;
}

bool is_kind_name(const std::string& s) {
    return s == "moons" || s == "circles" || s == "sin";
}

Dataset resolve_dataset(const DataOpts& opts) {
    if (is_kind_name(opts.dataset)) {
        GenSpec spec;
        spec.kind = parse_kind(opts.dataset);
        spec.samples = opts.m;
        spec.noise = opts.noise;
        spec.seed = opts.data_seed;
        return generate(spec);
    }
    return read_csv(opts.dataset);
}

void describe_dataset(const Dataset& d, const DataOpts& opts) {
    int ones = 0;
    for (int label : d.labels) ones += label;
    std::cout << "dataset " << d.name << ": " << d.size() << " points, dim "
              << d.dim() << ", labels " << (d.size() - ones) << "/" << ones
              << " (class 0/1)";
    if (is_kind_name(opts.dataset)) {
        std::cout << ", noise " << fmt(opts.noise) << ", data-seed "
                  << opts.data_seed;
    }
    std::cout << "\n";
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorKind::io,
                    "cannot create directory '" + dir + "': " + ec.message());
    }
}

void write_history(const RunResult& run, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error(ErrorKind::io, "cannot open '" + path + "'");
    }
    file << "epoch,cost,accuracy\n";
    for (const EpochRecord& rec : run.history) {
        file << rec.epoch << "," << fmt17(rec.cost) << "," << fmt17(rec.accuracy)
             << "\n";
    }
    if (!file) {
        throw Error(ErrorKind::io, "write failed for '" + path + "'");
    }
}

// drops the unwanted half of an svg/csv plot pair ("both" keeps everything)
void apply_format(const std::string& base, const std::string& format) {
    if (format == "csv") {
        fs::remove(base + ".svg");
    } else if (format == "svg") {
        fs::remove(base + ".csv");
    }
}

double directions_norm2(const FieldParams& theta) {
    double total = 0.0;
    for (const Vec& row : theta.directions) {
        for (double v : row) total += v * v;
    }
    return total;
}

// ------------------------------------------------------------
// Subcommand bodies
// ------------------------------------------------------------

int run_gen(const DataOpts& data, const std::string& out) {
    if (!is_kind_name(data.dataset)) {
        throw Error(ErrorKind::usage,
                    "gen: --dataset must be moons, circles, or sin");
    }
    Dataset d = resolve_dataset(data);
    std::string path = out.empty() ? data.dataset + ".csv" : out;
    write_csv(d, path);
    describe_dataset(d, data);
    std::cout << "wrote " << path << "\n";
    return 0;
}

struct TrainCmdOpts {
    DataOpts data;
    ModelOpts model;
    FitOpts fit;
    std::string out = "out";
    std::string resume;
    std::string format = "both";
    int resolution = 96;
    bool plots = false;
};

int run_train(const TrainCmdOpts& o) {
    Dataset d = resolve_dataset(o.data);
    describe_dataset(d, o.data);

    TrainConfig config;
    config.learning_rate = o.fit.rate;
    config.reg_lambda = o.model.lambda;
    config.epochs = o.fit.epochs;
    config.seed = o.fit.seed;
    config.num_gaussians = o.model.gaussians;
    config.flow = {o.model.step_size, o.model.steps};

    std::cout << "train: eta " << fmt(config.learning_rate) << ", lambda "
              << fmt(config.reg_lambda) << ", epochs " << config.epochs
              << ", S " << config.num_gaussians << ", N "
              << config.flow.num_steps << ", h " << fmt(config.flow.step_size)
              << ", seed " << config.seed << "\n";

    RunResult run;
    if (!o.resume.empty()) {
        ModelState start = load_model(o.resume);
        std::cout << "resuming from " << o.resume << "\n";
        run = train_from(d, config, start);
    } else {
        run = train(d, config);
    }

    ensure_dir(o.out);
    const std::string model_path = o.out + "/model.txt";
    const std::string history_path = o.out + "/history.csv";
    save_model(run.final_state, model_path);
    write_history(run, history_path);
    std::cout << "wrote " << model_path << " and " << history_path << "\n";

    if (o.plots) {
        Rect bounds = dataset_bounds(d);
        export_boundary_map(run.final_state, d, Space::original, bounds,
                            o.resolution, o.out + "/boundary_original");
        apply_format(o.out + "/boundary_original", o.format);
        std::vector<Vec> moved =
            transport_batch(d.points, run.final_state.theta,
                            run.final_state.flow);
        export_boundary_map(run.final_state, d, Space::transformed,
                            points_bounds(moved), o.resolution,
                            o.out + "/boundary_transformed");
        apply_format(o.out + "/boundary_transformed", o.format);
        export_field_plot(run.final_state.theta, bounds, 20, o.out + "/field");
        apply_format(o.out + "/field", o.format);
        std::cout << "wrote boundary and field plots to " << o.out << "\n";
    }

    if (!run.history.empty()) {
        const EpochRecord& last = run.history.back();
        std::cout << "final: epoch " << last.epoch << ", cost "
                  << fmt(last.cost) << ", accuracy " << fmt(last.accuracy)
                  << "\n";
    }
    if (run.aborted) {
        std::cout << "aborted at epoch " << run.abort_epoch
                  << " (non-finite values); artifacts hold the last finite "
                     "state\n";
        return 4;
    }
    return 0;
}

struct SweepCmdOpts {
    DataOpts data;
    ModelOpts model;
    FitOpts fit;
    std::vector<double> rates = {0.03, 0.3, 3.0};
    int repeats = 30;
    std::string out = "out";
    std::string format = "both";
};

int run_sweep(const SweepCmdOpts& o) {
    Dataset d = resolve_dataset(o.data);
    describe_dataset(d, o.data);

    TrainConfig base;
    base.reg_lambda = o.model.lambda;
    base.epochs = o.fit.epochs;
    base.seed = o.fit.seed;
    base.num_gaussians = o.model.gaussians;
    base.flow = {o.model.step_size, o.model.steps};

    std::cout << "sweep: rates";
    for (double r : o.rates) std::cout << " " << fmt(r);
    std::cout << ", repeats " << o.repeats << ", epochs " << base.epochs
              << ", seeds " << base.seed << ".."
              << base.seed + static_cast<std::uint64_t>(o.repeats - 1)
              << ", threads " << thread_cap() << "\n";

    SweepResult result = sweep(d, base, o.rates, o.repeats);

    ensure_dir(o.out);
    export_cost_curves(result, o.out);
    for (std::size_t r = 0; r < result.rates.size(); ++r) {
        const RateStats& stats = result.stats[r];
        int aborted = 0;
        for (const RunResult& run : result.runs[r]) aborted += run.aborted;
        std::cout << "eta " << fmt(stats.rate) << ": final mean cost "
                  << fmt(stats.mean_cost.back()) << ", std "
                  << fmt(stats.std_cost.back()) << ", surviving runs "
                  << stats.run_count.back() << "/" << o.repeats;
        if (aborted) std::cout << " (" << aborted << " aborted)";
        std::cout << "\n";
        apply_format(o.out + "/cost_eta" + fmt(stats.rate), o.format);
    }
    std::cout << "wrote cost curves to " << o.out << "\n";
    return 0;
}

struct GradCheckCmdOpts {
    GradCheckRequest request;
};

int run_gradcheck_cmd(const GradCheckCmdOpts& o) {
    GradCheckReport report = run_gradcheck(o.request);
    std::cout << "gradcheck: dim " << o.request.dim << ", S "
              << o.request.num_gaussians << ", N " << o.request.num_steps
              << ", h " << fmt(o.request.step_size) << ", lambda "
              << fmt(o.request.lambda) << ", trials " << report.trials
              << ", seed " << o.request.seed << "\n";
    std::cout << "backprop vs finite differences: max rel "
              << fmt(report.max_rel) << " (tol " << fmt(o.request.tol_rel)
              << "), max abs near zero " << fmt(report.max_abs) << " (tol "
              << fmt(o.request.tol_abs) << ")\n";
    if (report.analytic_checked) {
        std::cout << "closed form vs backprop over " << report.analytic_pairs
                  << " samples: max rel " << fmt(report.analytic_max_rel)
                  << " (tol " << fmt(o.request.analytic_tol) << ")\n";
    }
    if (report.ok()) {
        std::cout << "gradcheck PASS\n";
        return 0;
    }
    std::cout << "gradcheck FAIL (" << report.failures << " mismatches)\n";
    return 1;
}

struct ReproduceCmdOpts {
    std::string figure;
    std::string out;
    int repeats = 30;
    int epochs = -1;  // -1: per-figure default
    std::uint64_t seed = 0;
    int resolution = 96;
    std::string format = "both";
};

RunResult quiet_train(const Dataset& d, const TrainConfig& config) {
    RunResult run = train(d, config);
    std::cout << "  seed " << config.seed << ", eta "
              << fmt(config.learning_rate) << ", lambda "
              << fmt(config.reg_lambda) << ": final cost "
              << fmt(run.history.back().cost) << ", accuracy "
              << fmt(run.history.back().accuracy)
              << (run.aborted ? " (aborted)" : "") << "\n";
    return run;
}

int run_reproduce(const ReproduceCmdOpts& o) {
    const std::string out = o.out.empty() ? "out/" + o.figure : o.out;
    ensure_dir(out);

    auto finish = [&](const std::string& base) { apply_format(base, o.format); };

    if (o.figure == "fig1") {
        // moons: inputs, learned field, distorted mesh, transformed inputs
        DataOpts data;
        data.dataset = "moons";
        data.data_seed = o.seed;
        Dataset d = resolve_dataset(data);
        describe_dataset(d, data);

        TrainConfig config;
        config.seed = o.seed;
        config.epochs = o.epochs > 0 ? o.epochs : 10000;
        RunResult run = quiet_train(d, config);

        Rect bounds = dataset_bounds(d);
        export_scatter(d.points, d.labels, "input data", out + "/scatter_original");
        finish(out + "/scatter_original");
        export_field_plot(run.final_state.theta, bounds, 20, out + "/field");
        finish(out + "/field");
        export_meshgrid_distortion(run.final_state.theta, run.final_state.flow,
                                   bounds, 15, out + "/meshgrid");
        finish(out + "/meshgrid");
        std::vector<Vec> moved = transport_batch(d.points, run.final_state.theta,
                                                 run.final_state.flow);
        export_scatter(moved, d.labels, "transformed data",
                       out + "/scatter_transformed");
        finish(out + "/scatter_transformed");
        save_model(run.final_state, out + "/model.txt");
        write_history(run, out + "/history.csv");
    } else if (o.figure == "fig3") {
        // circles: mean/std cost curves for the three learning rates
        DataOpts data;
        data.data_seed = o.seed;
        Dataset d = resolve_dataset(data);
        describe_dataset(d, data);

        TrainConfig base;
        base.seed = o.seed;
        base.epochs = o.epochs > 0 ? o.epochs : 10000;
        std::cout << "  sweep: rates 0.03 0.3 3, repeats " << o.repeats
                  << ", epochs " << base.epochs << ", threads " << thread_cap()
                  << "\n";
        SweepResult result = sweep(d, base, {0.03, 0.3, 3.0}, o.repeats);
        export_cost_curves(result, out);
        for (const RateStats& stats : result.stats) {
            std::cout << "  eta " << fmt(stats.rate) << ": final mean cost "
                      << fmt(stats.mean_cost.back()) << ", std "
                      << fmt(stats.std_cost.back()) << "\n";
            finish(out + "/cost_eta" + fmt(stats.rate));
        }
    } else if (o.figure == "fig4") {
        // circles: decision maps in both spaces plus the learned field
        DataOpts data;
        data.data_seed = o.seed;
        Dataset d = resolve_dataset(data);
        describe_dataset(d, data);

        TrainConfig config;
        config.seed = o.seed;
        config.epochs = o.epochs > 0 ? o.epochs : 10000;
        RunResult run = quiet_train(d, config);

        Rect bounds = dataset_bounds(d);
        export_boundary_map(run.final_state, d, Space::original, bounds,
                            o.resolution, out + "/boundary_original");
        finish(out + "/boundary_original");
        export_field_plot(run.final_state.theta, bounds, 20, out + "/field");
        finish(out + "/field");
        std::vector<Vec> moved = transport_batch(d.points, run.final_state.theta,
                                                 run.final_state.flow);
        export_boundary_map(run.final_state, d, Space::transformed,
                            points_bounds(moved), o.resolution,
                            out + "/boundary_transformed");
        finish(out + "/boundary_transformed");
        save_model(run.final_state, out + "/model.txt");
        write_history(run, out + "/history.csv");
    } else if (o.figure == "fig5") {
        // sin: transformed-space maps with and without the L2 damper
        DataOpts data;
        data.dataset = "sin";
        data.data_seed = o.seed;
        Dataset d = resolve_dataset(data);
        describe_dataset(d, data);

        for (double lambda : {0.0, 0.0005}) {
            TrainConfig config;
            config.seed = o.seed;
            config.epochs = o.epochs > 0 ? o.epochs : 5000;
            config.learning_rate = 3.0;
            config.reg_lambda = lambda;
            RunResult run = quiet_train(d, config);

            const std::string tag = "_lambda" + fmt(lambda);
            std::vector<Vec> moved = transport_batch(
                d.points, run.final_state.theta, run.final_state.flow);
            export_boundary_map(run.final_state, d, Space::transformed,
                                points_bounds(moved), o.resolution,
                                out + "/boundary" + tag);
            finish(out + "/boundary" + tag);
            save_model(run.final_state, out + "/model" + tag + ".txt");
            std::cout << "  lambda " << fmt(lambda) << ": sum ||V||^2 = "
                      << fmt(directions_norm2(run.final_state.theta)) << "\n";
        }
    } else {
        throw Error(ErrorKind::usage,
                    "reproduce: unknown figure '" + o.figure +
                        "' (expected fig1, fig3, fig4, or fig5)");
    }
    std::cout << "wrote " << o.figure << " artifacts to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "vfn: classify 2-D point sets by transporting them along a learned "
        "Gaussian-mixture vector field.\n"
        "Exit codes: 0 ok, 1 failed check, 2 usage, 3 bad data, "
        "4 numeric divergence, 5 I/O error.\n"
        "VFN_THREADS caps worker threads for repeated runs."};
    app.require_subcommand(1);
    int rc = 0;

    // gen
    DataOpts gen_data;
    std::string gen_out;
    std::string gen_config, gen_dump;
    bool gen_dry = false;
    ConfigSync gen_sync;
    {
        CLI::App* cmd = app.add_subcommand("gen", "generate a dataset CSV");
        add_data_flags(cmd, gen_sync, gen_data);
        // gen's generator seed doubles as its only seed
        gen_sync.bind(cmd->add_option("--seed", gen_data.data_seed,
                                      "alias for --data-seed"),
                      "seed", gen_data.data_seed);
        gen_sync.bind(cmd->add_option("--out", gen_out,
                                      "output CSV path (default <kind>.csv)"),
                      "out", gen_out);
        add_config_flags(cmd, gen_config, gen_dump, gen_dry);
        cmd->callback([&] {
            if (resolve_config(gen_sync, gen_config, gen_dump, gen_dry)) return;
            rc = run_gen(gen_data, gen_out);
        });
    }

    // train
    TrainCmdOpts tr;
    std::string tr_config, tr_dump;
    bool tr_dry = false;
    ConfigSync tr_sync;
    {
        CLI::App* cmd = app.add_subcommand(
            "train", "fit one model with full-batch gradient descent");
        add_data_flags(cmd, tr_sync, tr.data);
        add_model_flags(cmd, tr_sync, tr.model);
        tr_sync.bind(cmd->add_option("--rate", tr.fit.rate, "learning rate")
                         ->capture_default_str(),
                     "rate", tr.fit.rate);
        tr_sync.bind(cmd->add_option("--epochs", tr.fit.epochs, "epochs")
                         ->capture_default_str(),
                     "epochs", tr.fit.epochs);
        tr_sync.bind(cmd->add_option("--seed", tr.fit.seed,
                                     "parameter initialization seed")
                         ->capture_default_str(),
                     "seed", tr.fit.seed);
        tr_sync.bind(cmd->add_option("--out", tr.out, "output directory")
                         ->capture_default_str(),
                     "out", tr.out);
        tr_sync.bind(cmd->add_option("--resume", tr.resume,
                                     "checkpoint to continue from"),
                     "resume", tr.resume);
        tr_sync.bind(cmd->add_option("--resolution", tr.resolution,
                                     "boundary-map grid resolution")
                         ->capture_default_str(),
                     "resolution", tr.resolution);
        tr_sync.bind(cmd->add_option("--format", tr.format,
                                     "plot artifacts to keep")
                         ->check(CLI::IsMember({"both", "csv", "svg"}))
                         ->capture_default_str(),
                     "format", tr.format);
        tr_sync.bind(cmd->add_flag("--plots", tr.plots,
                                   "also write boundary and field plots"),
                     "plots", tr.plots);
        add_config_flags(cmd, tr_config, tr_dump, tr_dry);
        cmd->callback([&] {
            if (resolve_config(tr_sync, tr_config, tr_dump, tr_dry)) return;
            rc = run_train(tr);
        });
    }

    // sweep
    SweepCmdOpts sw;
    std::string sw_config, sw_dump;
    bool sw_dry = false;
    ConfigSync sw_sync;
    {
        CLI::App* cmd = app.add_subcommand(
            "sweep", "repeat training across learning rates and seeds");
        add_data_flags(cmd, sw_sync, sw.data);
        add_model_flags(cmd, sw_sync, sw.model);
        sw_sync.bind(cmd->add_option("--rates", sw.rates,
                                     "comma-separated learning rates")
                         ->delimiter(',')
                         ->capture_default_str(),
                     "rates", sw.rates);
        sw_sync.bind(cmd->add_option("--repeats", sw.repeats,
                                     "training runs per rate")
                         ->capture_default_str(),
                     "repeats", sw.repeats);
        sw_sync.bind(cmd->add_option("--epochs", sw.fit.epochs, "epochs")
                         ->capture_default_str(),
                     "epochs", sw.fit.epochs);
        sw_sync.bind(cmd->add_option("--seed", sw.fit.seed,
                                     "first seed; run r uses seed+r")
                         ->capture_default_str(),
                     "seed", sw.fit.seed);
        sw_sync.bind(cmd->add_option("--out", sw.out, "output directory")
                         ->capture_default_str(),
                     "out", sw.out);
        sw_sync.bind(cmd->add_option("--format", sw.format,
                                     "plot artifacts to keep")
                         ->check(CLI::IsMember({"both", "csv", "svg"}))
                         ->capture_default_str(),
                     "format", sw.format);
        add_config_flags(cmd, sw_config, sw_dump, sw_dry);
        cmd->callback([&] {
            if (resolve_config(sw_sync, sw_config, sw_dump, sw_dry)) return;
            rc = run_sweep(sw);
        });
    }

    // gradcheck
    GradCheckCmdOpts gc;
    std::string gc_config, gc_dump;
    bool gc_dry = false;
    ConfigSync gc_sync;
    {
        CLI::App* cmd = app.add_subcommand(
            "gradcheck",
            "verify backpropagated gradients against finite differences");
        GradCheckRequest& r = gc.request;
        gc_sync.bind(cmd->add_option("--dim", r.dim, "data dimension (n)")
                         ->capture_default_str(),
                     "dim", r.dim);
        gc_sync.bind(cmd->add_option("--gaussians", r.num_gaussians,
                                     "Gaussian components (S)")
                         ->capture_default_str(),
                     "gaussians", r.num_gaussians);
        gc_sync.bind(cmd->add_option("--steps", r.num_steps, "Euler steps (N)")
                         ->capture_default_str(),
                     "steps", r.num_steps);
        gc_sync.bind(cmd->add_option("--step-size", r.step_size,
                                     "Euler step size (h)")
                         ->capture_default_str(),
                     "step-size", r.step_size);
        gc_sync.bind(cmd->add_option("--lambda", r.lambda,
                                     "L2 penalty on directions")
                         ->capture_default_str(),
                     "lambda", r.lambda);
        gc_sync.bind(cmd->add_option("--trials", r.trials,
                                     "random configurations to test")
                         ->capture_default_str(),
                     "trials", r.trials);
        gc_sync.bind(cmd->add_option("--samples", r.samples,
                                     "dataset size per trial")
                         ->capture_default_str(),
                     "samples", r.samples);
        gc_sync.bind(cmd->add_option("--seed", r.seed, "random seed")
                         ->capture_default_str(),
                     "seed", r.seed);
        gc_sync.bind(cmd->add_option("--probe", r.probe,
                                     "finite-difference step")
                         ->capture_default_str(),
                     "probe", r.probe);
        gc_sync.bind(cmd->add_flag("--corrupt", r.corrupt,
                                   "negative control: break one gradient "
                                   "component on purpose"),
                     "corrupt", r.corrupt);
        add_config_flags(cmd, gc_config, gc_dump, gc_dry);
        cmd->callback([&] {
            if (resolve_config(gc_sync, gc_config, gc_dump, gc_dry)) return;
            rc = run_gradcheck_cmd(gc);
        });
    }

    // reproduce
    ReproduceCmdOpts rp;
    std::string rp_config, rp_dump;
    bool rp_dry = false;
    ConfigSync rp_sync;
    {
        CLI::App* cmd = app.add_subcommand(
            "reproduce", "run a canned experiment recipe end to end");
        cmd->add_option("figure", rp.figure, "fig1, fig3, fig4, or fig5")
            ->required()
            ->check(CLI::IsMember({"fig1", "fig3", "fig4", "fig5"}));
        rp_sync.bind(cmd->add_option("--out", rp.out,
                                     "output directory (default out/<figure>)"),
                     "out", rp.out);
        rp_sync.bind(cmd->add_option("--repeats", rp.repeats,
                                     "training runs per rate (fig3)")
                         ->capture_default_str(),
                     "repeats", rp.repeats);
        rp_sync.bind(cmd->add_option("--epochs", rp.epochs,
                                     "override the figure's epoch count"),
                     "epochs", rp.epochs);
        rp_sync.bind(cmd->add_option("--seed", rp.seed,
                                     "base seed for data and training")
                         ->capture_default_str(),
                     "seed", rp.seed);
        rp_sync.bind(cmd->add_option("--resolution", rp.resolution,
                                     "boundary-map grid resolution")
                         ->capture_default_str(),
                     "resolution", rp.resolution);
        rp_sync.bind(cmd->add_option("--format", rp.format,
                                     "plot artifacts to keep")
                         ->check(CLI::IsMember({"both", "csv", "svg"}))
                         ->capture_default_str(),
                     "format", rp.format);
        add_config_flags(cmd, rp_config, rp_dump, rp_dry);
        cmd->callback([&] {
            if (resolve_config(rp_sync, rp_config, rp_dump, rp_dry)) return;
            rc = run_reproduce(rp);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int cli_rc = app.exit(e);
        return cli_rc == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
