#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vfn {

using Vec = std::vector<double>;

// ============================================================
// Errors
// ============================================================

// Error categories map 1:1 onto CLI exit codes (see tools/).
enum class ErrorKind {
    usage,    // bad arguments / malformed request
    data,     // invalid dataset or file content
    numeric,  // divergence to non-finite values
    io,       // filesystem failures
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// ============================================================
// Deterministic PRNG
// ============================================================

/// SplitMix64: fixed-constant 64-bit generator (Steele, Lea, Flood 2014).
/// Integer core is bit-identical across platforms for a given seed; doubles
/// are built from the top 53 bits, so uniform() lies in [0,1).
/// Gaussians come from Box-Muller with the sine partner cached.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0,1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw.
    double gaussian();

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// ============================================================
// Domain types
// ============================================================

/// Euler integration hyperparameters: step size h and step count N.
struct FlowConfig {
    double step_size = 1.0;
    int num_steps = 1;

    bool valid() const {
        return std::isfinite(step_size) && step_size > 0.0 && num_steps >= 1;
    }
};

/// Gaussian-mixture field parameters: S centers and S direction vectors,
/// each of the data dimension n.
struct FieldParams {
    std::vector<Vec> centers;     // S x n
    std::vector<Vec> directions;  // S x n

    int num_gaussians() const { return static_cast<int>(centers.size()); }
    int dim() const { return centers.empty() ? 0 : static_cast<int>(centers[0].size()); }
};

/// Logistic-head parameters: weight vector w and bias b.
struct LinearHead {
    Vec weights;
    double bias = 0.0;

    int dim() const { return static_cast<int>(weights.size()); }
};

/// Gradient-descent experiment configuration.
struct TrainConfig {
    double learning_rate = 0.3;
    double reg_lambda = 0.0;
    int epochs = 10000;
    std::uint64_t seed = 0;
    int num_gaussians = 2;
    FlowConfig flow;
};

/// Labeled binary-classification sample set; every point has the same
/// dimension and every label is 0 or 1.
struct Dataset {
    std::vector<Vec> points;
    std::vector<int> labels;
    std::string name;

    int size() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }
};

struct Validation {
    bool ok = true;
    std::string message;
};

// ============================================================
// Operations
// ============================================================

/// Random initial parameters, all components i.i.d. U[0,1) from SplitMix64
/// keyed by seed; bias starts at zero. Draw order is fixed: centers
/// row-major, then directions row-major, then weights. Identical
/// (dim, num_gaussians, seed) gives bit-identical output.
std::pair<FieldParams, LinearHead> init_params(int dim, int num_gaussians,
                                               std::uint64_t seed);

/// Checks every Dataset invariant and reports the first violation with the
/// offending index.
Validation validate(const Dataset& dataset);

}  // namespace vfn
