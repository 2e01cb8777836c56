#pragma once

#include "vfn/core.hpp"
#include "vfn/model.hpp"

namespace vfn {

struct EpochRecord {
    int epoch = 0;
    double cost = 0.0;
    double accuracy = 0.0;
};

/// Outcome of one full-batch gradient-descent run. history has epochs+1
/// records (the initial cost at epoch 0, then one per update) unless the run
/// aborted on non-finite values, in which case it is shorter, aborted is set,
/// and final_state holds the last finite state.
struct RunResult {
    std::uint64_t seed = 0;
    TrainConfig config;
    std::vector<EpochRecord> history;
    ModelState final_state;
    bool aborted = false;
    int abort_epoch = -1;
};

/// Per-rate aggregate curves across repeats.
struct RateStats {
    double rate = 0.0;
    std::vector<double> mean_cost;
    std::vector<double> std_cost;   // sample std, 0 when fewer than 2 runs
    std::vector<int> run_count;     // runs still alive at each epoch
};

struct SweepResult {
    std::vector<double> rates;
    std::vector<std::vector<RunResult>> runs;  // [rate][repeat]
    std::vector<RateStats> stats;
};

/// Full-batch gradient descent from U[0,1) initial parameters keyed by
/// config.seed. Every parameter block updates simultaneously each epoch:
/// p <- p - eta * g. Deterministic given (dataset, config).
RunResult train(const Dataset& dataset, const TrainConfig& config);

/// Same loop from an explicit starting state (checkpoint resume); the
/// initialization draw is skipped.
RunResult train_from(const Dataset& dataset, const TrainConfig& config,
                     const ModelState& start);

/// repeats independent runs with seeds config.seed, config.seed+1, ...
/// Runs may execute concurrently (cap via VFN_THREADS); the result vector is
/// identical regardless of scheduling. Aborted runs are flagged, not fatal.
std::vector<RunResult> run_repeated(const Dataset& dataset,
                                    const TrainConfig& config, int repeats);

/// run_repeated once per learning rate over a single shared dataset, plus
/// mean/std cost curves per rate.
SweepResult sweep(const Dataset& dataset, const TrainConfig& base,
                  const std::vector<double>& rates, int repeats);

RateStats aggregate_stats(double rate, const std::vector<RunResult>& runs);

/// Worker-thread cap: VFN_THREADS if set, else hardware concurrency.
int thread_cap();

}  // namespace vfn
