#pragma once

#include "vfn/core.hpp"
#include "vfn/model.hpp"

namespace vfn {

/// One gradient-verification job: a model shape plus how many random
/// (state, dataset) draws to push through it.
///
/// Comparison rule: components whose magnitude exceeds scale_floor must
/// agree relatively to tol_rel; smaller ones absolutely to tol_abs. The
/// floor sits at 1e-3 so the central-difference noise floor (about 1e-9
/// absolute at the default probe) stays orders of magnitude under both
/// bounds.
struct GradCheckRequest {
    int dim = 2;
    int num_gaussians = 2;
    int num_steps = 1;
    double step_size = 1.0;
    double lambda = 0.0;
    int trials = 20;
    int samples = 8;
    std::uint64_t seed = 0;
    double probe = 1e-6;
    double tol_rel = 1e-5;
    double tol_abs = 1e-8;
    double scale_floor = 1e-3;
    double analytic_tol = 1e-10;
    bool corrupt = false;  // negative control: breaks one component on purpose
};

struct GradCheckReport {
    int trials = 0;
    int failures = 0;
    double max_rel = 0.0;  // worst relative error above the scale floor
    double max_abs = 0.0;  // worst absolute error below it

    // closed-form agreement, only meaningful for N=1, h=1
    bool analytic_checked = false;
    int analytic_pairs = 0;
    double analytic_max_rel = 0.0;

    bool ok() const { return failures == 0; }
};

/// Backpropagated gradients vs central finite differences on random draws;
/// for N=1, h=1 every sample is additionally checked against the closed
/// form. Deterministic in request.seed.
GradCheckReport run_gradcheck(const GradCheckRequest& request);

}  // namespace vfn
