#include "vfn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace vfn {

namespace {

void check_request(const GradCheckRequest& r) {
    if (r.dim < 1 || r.num_gaussians < 1 || r.trials < 1 || r.samples < 1) {
        throw Error(ErrorKind::usage, "gradcheck: counts must be positive");
    }
    if (!FlowConfig{r.step_size, r.num_steps}.valid()) {
        throw Error(ErrorKind::usage, "gradcheck: invalid flow config");
    }
    if (!(r.probe > 0.0) || !(r.tol_rel > 0.0) || !(r.tol_abs > 0.0)) {
        throw Error(ErrorKind::usage, "gradcheck: tolerances must be positive");
    }
}

Vec draw_vec(SplitMix64& rng, int dim, double lo, double hi) {
    Vec v(dim);
    for (double& x : v) x = lo + (hi - lo) * rng.uniform();
    return v;
}

ModelState draw_state(SplitMix64& rng, const GradCheckRequest& r) {
    ModelState st;
    for (int i = 0; i < r.num_gaussians; ++i) {
        st.theta.centers.push_back(draw_vec(rng, r.dim, -1.0, 1.0));
    }
    for (int i = 0; i < r.num_gaussians; ++i) {
        st.theta.directions.push_back(draw_vec(rng, r.dim, -1.0, 1.0));
    }
    st.head.weights = draw_vec(rng, r.dim, -1.0, 1.0);
    st.head.bias = 2.0 * rng.uniform() - 1.0;
    st.flow = {r.step_size, r.num_steps};
    return st;
}

Dataset draw_dataset(SplitMix64& rng, const GradCheckRequest& r) {
    Dataset d;
    d.name = "gradcheck";
    for (int s = 0; s < r.samples; ++s) {
        d.points.push_back(draw_vec(rng, r.dim, -1.5, 1.5));
        d.labels.push_back(static_cast<int>(rng.next_u64() & 1));
    }
    return d;
}

struct PairCompare {
    const GradCheckRequest& request;
    double max_rel = 0.0;
    double max_abs = 0.0;
    bool within = true;

    void add(double a, double b) {
        double diff = std::abs(a - b);
        double scale = std::max(std::abs(a), std::abs(b));
        if (scale > request.scale_floor) {
            double rel = diff / scale;
            max_rel = std::max(max_rel, rel);
            if (rel > request.tol_rel) within = false;
        } else {
            max_abs = std::max(max_abs, diff);
            if (diff > request.tol_abs) within = false;
        }
    }

    void add_all(const Gradients& a, const Gradients& b) {
        for (std::size_t i = 0; i < a.d_centers.size(); ++i) {
            for (std::size_t j = 0; j < a.d_centers[i].size(); ++j) {
                add(a.d_centers[i][j], b.d_centers[i][j]);
                add(a.d_directions[i][j], b.d_directions[i][j]);
            }
        }
        for (std::size_t j = 0; j < a.d_weights.size(); ++j) {
            add(a.d_weights[j], b.d_weights[j]);
        }
        add(a.d_bias, b.d_bias);
    }
};

// pure relative comparison for two algebraically identical formulas
double relative_gap(const Gradients& a, const Gradients& b) {
    double worst = 0.0;
    auto add = [&worst](double x, double y) {
        double scale = std::max(std::abs(x), std::abs(y));
        if (scale > 1e-280) {
            worst = std::max(worst, std::abs(x - y) / scale);
        }
    };
    for (std::size_t i = 0; i < a.d_centers.size(); ++i) {
        for (std::size_t j = 0; j < a.d_centers[i].size(); ++j) {
            add(a.d_centers[i][j], b.d_centers[i][j]);
            add(a.d_directions[i][j], b.d_directions[i][j]);
        }
    }
    for (std::size_t j = 0; j < a.d_weights.size(); ++j) {
        add(a.d_weights[j], b.d_weights[j]);
    }
    add(a.d_bias, b.d_bias);
    return worst;
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckRequest& request) {
    check_request(request);
    SplitMix64 rng(request.seed);
    GradCheckReport report;
    const bool closed_form =
        request.num_steps == 1 && request.step_size == 1.0;

    for (int t = 0; t < request.trials; ++t) {
        ModelState state = draw_state(rng, request);
        Dataset data = draw_dataset(rng, request);

        Gradients backprop = grad_backprop(data, state, request.lambda);
        if (request.corrupt) {
            backprop.d_bias += 1e-3;
        }
        Gradients numeric =
            grad_numeric(data, state, request.lambda, request.probe);

        PairCompare cmp{request};
        cmp.add_all(backprop, numeric);
        report.max_rel = std::max(report.max_rel, cmp.max_rel);
        report.max_abs = std::max(report.max_abs, cmp.max_abs);
        ++report.trials;
        if (!cmp.within) ++report.failures;

        if (closed_form) {
            report.analytic_checked = true;
            Dataset single;
            single.name = data.name;
            for (int s = 0; s < data.size(); ++s) {
                single.points = {data.points[s]};
                single.labels = {data.labels[s]};
                Gradients per_sample =
                    grad_backprop(single, state, request.lambda);
                Gradients analytic = grad_analytic_n1(
                    data.points[s], data.labels[s], state, request.lambda);
                double gap = relative_gap(analytic, per_sample);
                report.analytic_max_rel = std::max(report.analytic_max_rel, gap);
                ++report.analytic_pairs;
                if (gap > request.analytic_tol) ++report.failures;
            }
        }
    }
    return report;
}

}  // namespace vfn
