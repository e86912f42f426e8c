#pragma once

// Unifies monocular depth and stereo disparity inputs into horizontal-flow
// training pairs. The monocular path fabricates a virtual disparity from a
// sampled baseline-focal product s_c = B*f and splats a second view; the
// stereo path reads the real disparity as a horizontal flow.

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>

#include "flowgen/rng.hpp"
#include "flowgen/sample_tuple.hpp"
#include "flowgen/sampling.hpp"
#include "flowgen/warp.hpp"

namespace flowgen {

struct VirtualStereoConfig {
    // s_c = frac * width * (min valid depth); frac drawn uniformly from the
    // range below, so the max virtual disparity is frac * width pixels.
    double disp_frac_min = 0.02;
    double disp_frac_max = 0.30;
    // B*f used when converting real stereo disparity to depth.
    double bf_stereo_constant = 100.0;
    // Hard cap: max virtual disparity never exceeds this fraction of width.
    static constexpr double kMaxDispFrac = 0.30;
};

// disparity = bf / depth. Valid pixels with non-positive depth are
// invalidated; *n_invalidated (optional) receives their count.
inline ScalarField depth_to_disparity(const ScalarField& depth, double bf,
                                      std::size_t* n_invalidated = nullptr) {
    if (!(bf > 0.0)) throw std::invalid_argument("depth_to_disparity: bf must be positive");
    ScalarField out(depth.width, depth.height, 0.0, false);
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < depth.values.size(); ++i) {
        if (!depth.valid[i]) continue;
        const double z = depth.values[i];
        if (!(z > 0.0) || !std::isfinite(z)) {
            ++dropped;
            continue;
        }
        out.values[i] = bf / z;
        out.valid[i] = 1;
    }
    if (n_invalidated) *n_invalidated = dropped;
    return out;
}

// depth = bf / disparity; zero/negative disparity pixels become invalid.
inline ScalarField disparity_to_depth(const ScalarField& disp, double bf,
                                      std::size_t* n_invalidated = nullptr) {
    if (!(bf > 0.0)) throw std::invalid_argument("disparity_to_depth: bf must be positive");
    ScalarField out(disp.width, disp.height, 0.0, false);
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < disp.values.size(); ++i) {
        if (!disp.valid[i]) continue;
        const double d = disp.values[i];
        if (!(d > 0.0) || !std::isfinite(d)) {
            ++dropped;
            continue;
        }
        out.values[i] = bf / d;
        out.valid[i] = 1;
    }
    if (n_invalidated) *n_invalidated = dropped;
    return out;
}

// <d, 0>: disparity as a horizontal flow, u = sign * d, v = 0.
inline FlowField disparity_to_flow(const ScalarField& disp, int sign) {
    FlowField out(disp.width, disp.height, 0.0, 0.0, false);
    for (std::size_t i = 0; i < disp.values.size(); ++i) {
        if (!disp.valid[i]) continue;
        out.u[i] = sign * disp.values[i];
        out.valid[i] = 1;
    }
    return out;
}

struct VirtualStereoResult {
    SampleTuple tuple;         // (I_0, I~_1, F_0->1) with mask
    ScalarField target_depth;  // Z~_1, splatted onto the virtual view
    double s_c = 0.0;
    int s_i = 1;
    bool s_c_clamped = false;
    std::size_t nonpositive_depth_px = 0;
};

namespace detail {

inline double min_valid(const ScalarField& f) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (f.valid[i] && f.values[i] < m) m = f.values[i];
    return m;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Monocular path: fabricate a stereo partner for (image, depth).
// The emitted ground truth is exactly the flow used to splat, s_i * <d~, 0>.
inline VirtualStereoResult synth_virtual_stereo(const Image& image, const ScalarField& depth,
                                                const VirtualStereoConfig& cfg,
                                                RngStream& rng) {
    if (!same_size(image, depth))
        throw std::invalid_argument("synth_virtual_stereo: dimension mismatch");
    if (!(cfg.disp_frac_min > 0.0) || cfg.disp_frac_max < cfg.disp_frac_min)
        throw std::invalid_argument("synth_virtual_stereo: bad s_c range");

    VirtualStereoResult res;
    const double z_min = detail::min_valid(depth);
    if (!std::isfinite(z_min) || z_min <= 0.0) throw std::runtime_error("empty warp");

    double frac = rng.uniform(cfg.disp_frac_min, cfg.disp_frac_max);
    res.s_i = rng.sign();
    if (frac > VirtualStereoConfig::kMaxDispFrac) {
        frac = VirtualStereoConfig::kMaxDispFrac;
        res.s_c_clamped = true;
    }
    res.s_c = frac * image.width * z_min;

    const ScalarField disp = depth_to_disparity(depth, res.s_c, &res.nonpositive_depth_px);
    const FlowField flow = disparity_to_flow(disp, res.s_i);
    const WarpResult warped = forward_splat(image, depth, flow);

    res.tuple.source = image;
    res.tuple.target = warped.image;
    res.tuple.flow = flow;
    res.tuple.mask = visibility_mask(flow, depth, warped.depth);
    res.tuple.kind = "f01";
    res.tuple.modality = "mono";
    res.tuple.meta["s_c"] = detail::format_double(res.s_c);
    res.tuple.meta["s_i"] = std::to_string(res.s_i);
    res.target_depth = warped.depth;
    return res;
}

struct StereoIngestResult {
    SampleTuple tuple;         // (I_0, I_1, F_0->1) with mask
    ScalarField source_depth;  // Z~_0 = bf / d
    ScalarField target_depth;  // Z~_1, splatted
};

// Stereo path: the ground-truth disparity becomes the flow directly.
// flow_sign follows the dataset convention; -1 means `left` pixels move
// left in `right` (the usual rectified left->right case).
inline StereoIngestResult ingest_stereo(const Image& left, const Image& right,
                                        const ScalarField& disp, double bf,
                                        int flow_sign = -1) {
    if (!same_size(left, right) || !same_size(left, disp))
        throw std::invalid_argument("ingest_stereo: dimension mismatch");

    StereoIngestResult res;
    res.source_depth = disparity_to_depth(disp, bf);
    const FlowField flow = disparity_to_flow(disp, flow_sign);
    if (flow.count_valid() == 0) throw std::runtime_error("empty warp");

    // Z~_1 = W(Z~_0, F): splat the left depth into the right view so
    // occlusions can be detected against it.
    const WarpResult warped = forward_splat(left, res.source_depth, flow);
    res.target_depth = warped.depth;

    res.tuple.source = left;
    res.tuple.target = right;
    res.tuple.flow = flow;
    res.tuple.mask = visibility_mask(flow, res.source_depth, res.target_depth);
    res.tuple.kind = "f01";
    res.tuple.modality = "stereo";
    res.tuple.meta["bf"] = detail::format_double(bf);
    res.tuple.meta["flow_sign"] = std::to_string(flow_sign);
    return res;
}

}  // namespace flowgen
