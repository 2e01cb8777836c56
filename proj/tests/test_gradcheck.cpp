#include "doctest.h"
#include "vfn/gradcheck.hpp"

using namespace vfn;

TEST_CASE("the default request passes with wide margins") {
    GradCheckRequest request;
    request.trials = 10;
    request.seed = 3;
    GradCheckReport report = run_gradcheck(request);
    CHECK(report.ok());
    CHECK(report.trials == 10);
    CHECK(report.failures == 0);
    CHECK(report.max_rel <= 1e-5);
    CHECK(report.max_abs <= 1e-8);
    // N=1, h=1: the closed form was checked on every sample
    CHECK(report.analytic_checked);
    CHECK(report.analytic_pairs == 80);
    CHECK(report.analytic_max_rel <= 1e-10);
}

TEST_CASE("multi-step shapes skip the closed form but still verify") {
    GradCheckRequest request;
    request.num_steps = 3;
    request.step_size = 0.5;
    request.num_gaussians = 4;
    request.lambda = 0.0005;
    request.trials = 8;
    request.seed = 5;
    GradCheckReport report = run_gradcheck(request);
    CHECK(report.ok());
    CHECK_FALSE(report.analytic_checked);
    CHECK(report.analytic_pairs == 0);
}

TEST_CASE("reports are deterministic in the seed") {
    GradCheckRequest request;
    request.trials = 5;
    request.seed = 11;
    GradCheckReport a = run_gradcheck(request);
    GradCheckReport b = run_gradcheck(request);
    CHECK(a.max_rel == b.max_rel);
    CHECK(a.max_abs == b.max_abs);
    CHECK(a.analytic_max_rel == b.analytic_max_rel);

    request.seed = 12;
    GradCheckReport c = run_gradcheck(request);
    CHECK(a.max_rel != c.max_rel);
}

TEST_CASE("a corrupted gradient is caught on every trial") {
    GradCheckRequest request;
    request.trials = 6;
    request.seed = 2;
    request.corrupt = true;
    GradCheckReport report = run_gradcheck(request);
    CHECK_FALSE(report.ok());
    CHECK(report.failures >= 6);  // the bias component is off by 1e-3
}

TEST_CASE("bad requests are rejected") {
    GradCheckRequest request;
    request.trials = 0;
    CHECK_THROWS_AS(run_gradcheck(request), Error);
    request.trials = 5;
    request.step_size = -1.0;
    CHECK_THROWS_AS(run_gradcheck(request), Error);
    request.step_size = 1.0;
    request.probe = 0.0;
    CHECK_THROWS_AS(run_gradcheck(request), Error);
}
