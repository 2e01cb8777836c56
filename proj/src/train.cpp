#include "vfn/train.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace vfn {

namespace {

void check_config(const TrainConfig& config) {
    if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
        throw Error(ErrorKind::usage, "train: learning rate must be finite and >= 0");
    }
    if (!(config.reg_lambda >= 0.0) || !std::isfinite(config.reg_lambda)) {
        throw Error(ErrorKind::usage, "train: lambda must be finite and >= 0");
    }
    if (config.epochs < 1) {
        throw Error(ErrorKind::usage, "train: epochs must be >= 1");
    }
    if (config.num_gaussians < 1) {
        throw Error(ErrorKind::usage, "train: need at least one Gaussian");
    }
    if (!config.flow.valid()) {
        throw Error(ErrorKind::usage, "train: invalid flow config");
    }
}

bool grads_finite(const Gradients& g) {
    auto rows_finite = [](const std::vector<Vec>& rows) {
        for (const Vec& row : rows) {
            for (double v : row) {
                if (!std::isfinite(v)) return false;
            }
        }
        return true;
    };
    if (!rows_finite(g.d_centers) || !rows_finite(g.d_directions)) return false;
    for (double v : g.d_weights) {
        if (!std::isfinite(v)) return false;
    }
    return std::isfinite(g.d_bias);
}

void apply_update(ModelState& state, const Gradients& g, double eta) {
    const int S = state.theta.num_gaussians();
    const int dim = state.dim();
    for (int i = 0; i < S; ++i) {
        for (int j = 0; j < dim; ++j) {
            state.theta.centers[i][j] -= eta * g.d_centers[i][j];
            state.theta.directions[i][j] -= eta * g.d_directions[i][j];
        }
    }
    for (int j = 0; j < dim; ++j) {
        state.head.weights[j] -= eta * g.d_weights[j];
    }
    state.head.bias -= eta * g.d_bias;
}

}  // namespace

RunResult train_from(const Dataset& dataset, const TrainConfig& config,
                     const ModelState& start) {
    Validation v = validate(dataset);
    if (!v.ok) {
        throw Error(ErrorKind::data, "train: " + v.message);
    }
    check_config(config);

    RunResult result;
    result.seed = config.seed;
    result.config = config;
    result.final_state = start;
    result.history.reserve(config.epochs + 1);

    ModelState& state = result.final_state;
    BatchEval ev;
    try {
        ev = eval_batch(dataset, state, config.reg_lambda);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::numeric) throw;
        result.aborted = true;
        result.abort_epoch = 0;
        return result;
    }
    result.history.push_back({0, ev.cost, ev.accuracy});

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        if (!grads_finite(ev.grads)) {
            result.aborted = true;
            result.abort_epoch = epoch;
            break;
        }
        ModelState backup = state;
        apply_update(state, ev.grads, config.learning_rate);
        bool ok = true;
        try {
            ev = eval_batch(dataset, state, config.reg_lambda);
            ok = std::isfinite(ev.cost);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numeric) throw;
            ok = false;
        }
        if (!ok) {
            state = backup;
            result.aborted = true;
            result.abort_epoch = epoch;
            break;
        }
        result.history.push_back({epoch, ev.cost, ev.accuracy});
    }
    return result;
}

RunResult train(const Dataset& dataset, const TrainConfig& config) {
    Validation v = validate(dataset);
    if (!v.ok) {
        throw Error(ErrorKind::data, "train: " + v.message);
    }
    check_config(config);
    auto [theta, head] = init_params(dataset.dim(), config.num_gaussians, config.seed);
    ModelState state{std::move(theta), std::move(head), config.flow};
    return train_from(dataset, config, state);
}

int thread_cap() {
    if (const char* env = std::getenv("VFN_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<RunResult> run_repeated(const Dataset& dataset,
                                    const TrainConfig& config, int repeats) {
    if (repeats < 1) {
        throw Error(ErrorKind::usage, "run_repeated: repeats must be >= 1");
    }
    Validation v = validate(dataset);
    if (!v.ok) {
        throw Error(ErrorKind::data, "run_repeated: " + v.message);
    }
    check_config(config);

    std::vector<RunResult> results(repeats);
    const int workers = std::min(thread_cap(), repeats);
    if (workers <= 1) {
        for (int r = 0; r < repeats; ++r) {
            TrainConfig c = config;
            c.seed = config.seed + static_cast<std::uint64_t>(r);
            results[r] = train(dataset, c);
        }
        return results;
    }

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int r = next.fetch_add(1);
            if (r >= repeats) return;
            TrainConfig c = config;
            c.seed = config.seed + static_cast<std::uint64_t>(r);
            results[r] = train(dataset, c);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

RateStats aggregate_stats(double rate, const std::vector<RunResult>& runs) {
    RateStats stats;
    stats.rate = rate;
    std::size_t longest = 0;
    for (const RunResult& run : runs) {
        longest = std::max(longest, run.history.size());
    }
    stats.mean_cost.resize(longest, 0.0);
    stats.std_cost.resize(longest, 0.0);
    stats.run_count.resize(longest, 0);
    for (std::size_t e = 0; e < longest; ++e) {
        double sum = 0.0;
        int count = 0;
        for (const RunResult& run : runs) {
            if (e < run.history.size()) {
                sum += run.history[e].cost;
                ++count;
            }
        }
        double mean = sum / count;
        double var = 0.0;
        if (count > 1) {
            for (const RunResult& run : runs) {
                if (e < run.history.size()) {
                    double d = run.history[e].cost - mean;
                    var += d * d;
                }
            }
            var /= count - 1;
        }
        stats.mean_cost[e] = mean;
        stats.std_cost[e] = std::sqrt(var);
        stats.run_count[e] = count;
    }
    return stats;
}

SweepResult sweep(const Dataset& dataset, const TrainConfig& base,
                  const std::vector<double>& rates, int repeats) {
    if (rates.empty()) {
        throw Error(ErrorKind::usage, "sweep: need at least one learning rate");
    }
    SweepResult out;
    out.rates = rates;
    for (double rate : rates) {
        TrainConfig config = base;
        config.learning_rate = rate;
        out.runs.push_back(run_repeated(dataset, config, repeats));
        out.stats.push_back(aggregate_stats(rate, out.runs.back()));
    }
    return out;
}

}  // namespace vfn
