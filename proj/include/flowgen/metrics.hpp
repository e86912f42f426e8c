#pragma once

// Flow evaluation: mean endpoint error and the KITTI outlier fraction
// (error > 3 px AND > 5% of ground-truth magnitude). Pixels invalid in the
// ground truth are excluded; pixels invalid only in the prediction count
// as outliers.

#include <cmath>

#include "flowgen/types.hpp"

namespace flowgen {

struct EvalReport {
    double epe = 0.0;      // mean endpoint error in pixels
    double f1_all = 0.0;   // outlier percentage, 0..100
    std::size_t n_valid = 0;  // pixels entering the EPE mean
};

inline EvalReport evaluate_flow(const FlowField& pred, const FlowField& gt) {
    if (!same_size(pred, gt)) throw std::invalid_argument("evaluate_flow: dimension mismatch");

    double err_sum = 0.0;
    std::size_t n_both = 0, n_gt = 0, n_outliers = 0;
    for (std::size_t i = 0; i < gt.valid.size(); ++i) {
        if (!gt.valid[i]) continue;
        ++n_gt;
        if (!pred.valid[i]) {
            ++n_outliers;  // missing prediction: infinite error
            continue;
        }
        const double du = pred.u[i] - gt.u[i];
        const double dv = pred.v[i] - gt.v[i];
        const double err = std::sqrt(du * du + dv * dv);
        err_sum += err;
        ++n_both;
        const double mag = std::sqrt(gt.u[i] * gt.u[i] + gt.v[i] * gt.v[i]);
        if (err > 3.0 && err > 0.05 * mag) ++n_outliers;
    }
    if (n_both == 0) throw std::runtime_error("evaluate_flow: empty overlap");

    EvalReport r;
    r.epe = err_sum / n_both;
    r.f1_all = 100.0 * static_cast<double>(n_outliers) / n_gt;
    r.n_valid = n_both;
    return r;
}

inline double epe(const FlowField& pred, const FlowField& gt) {
    return evaluate_flow(pred, gt).epe;
}

inline double f1_all(const FlowField& pred, const FlowField& gt) {
    return evaluate_flow(pred, gt).f1_all;
}

}  // namespace flowgen
