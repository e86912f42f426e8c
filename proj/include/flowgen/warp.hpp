#pragma once

// Novel-view synthesis primitives: depth-aware forward splatting (scatter)
// and backward image warping (gather).
//
// forward_splat scatters every valid source pixel to its flow-displaced
// position, distributing bilinear weights over the 4 neighboring target
// pixels. Collisions are resolved by a depth buffer: contributions whose
// splatted depth exceeds the per-target minimum by more than a small
// relative slack are rejected as occluded; surviving contributions of the
// (near-)same surface blend by weight. Iteration is row-major over source
// pixels, so results are deterministic.

#include <cmath>
#include <limits>

#include "flowgen/sampling.hpp"
#include "flowgen/types.hpp"

namespace flowgen {

// Contributions within this relative depth band of the nearest one are
// treated as the same surface and blended; anything farther is occluded.
inline constexpr double kSplatDepthSlack = 0.02;

// Targets with accumulated weight below this are reported as holes.
inline constexpr double kSplatMinWeight = 1e-4;

struct WarpResult {
    Image image;
    ScalarField depth;                    // splatted depth, valid where image is
    std::vector<std::uint8_t> valid;      // target carries a surface
    std::vector<std::uint8_t> occluded;   // target rejected at least one farther contribution
    std::vector<std::uint8_t> holes;      // target received nothing
};

inline WarpResult forward_splat(const Image& source, const ScalarField& source_depth,
                                const FlowField& flow) {
    if (!same_size(source, flow) || !same_size(source_depth, flow))
        throw std::invalid_argument("forward_splat: dimension mismatch");

    const int w = source.width, h = source.height, ch = source.channels;
    const std::size_t n = source.n_pixels();

    // Pass 1: per-target nearest splatted depth.
    std::vector<double> zmin(n, std::numeric_limits<double>::infinity());
    std::size_t n_contributing = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = flow.idx(y, x);
            if (!flow.valid[i] || !source_depth.valid[i]) continue;
            ++n_contributing;
            const double tx = x + flow.u[i];
            const double ty = y + flow.v[i];
            if (!(tx > -1.0 && tx < w && ty > -1.0 && ty < h)) continue;  // whole footprint off-image
            const int x0 = static_cast<int>(std::floor(tx));
            const int y0 = static_cast<int>(std::floor(ty));
            const double fx = tx - x0, fy = ty - y0;
            const double z = source_depth.values[i];
            const double wts[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
            const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
            const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
            for (int k = 0; k < 4; ++k) {
                if (wts[k] <= 0.0 || xs[k] < 0 || xs[k] >= w || ys[k] < 0 || ys[k] >= h) continue;
                double& zm = zmin[static_cast<std::size_t>(ys[k]) * w + xs[k]];
                if (z < zm) zm = z;
            }
        }
    }
    if (n_contributing == 0) throw std::runtime_error("empty warp");

    // Pass 2: accumulate nearest-surface contributions.
    WarpResult res;
    res.image = Image(w, h, ch);
    res.depth = ScalarField(w, h, 0.0, false);
    res.valid.assign(n, 0);
    res.occluded.assign(n, 0);
    res.holes.assign(n, 0);
    std::vector<double> wsum(n, 0.0);
    std::vector<double> zacc(n, 0.0);
    std::vector<double> cacc(n * ch, 0.0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = flow.idx(y, x);
            if (!flow.valid[i] || !source_depth.valid[i]) continue;
            const double tx = x + flow.u[i];
            const double ty = y + flow.v[i];
            if (!(tx > -1.0 && tx < w && ty > -1.0 && ty < h)) continue;
            const int x0 = static_cast<int>(std::floor(tx));
            const int y0 = static_cast<int>(std::floor(ty));
            const double fx = tx - x0, fy = ty - y0;
            const double z = source_depth.values[i];
            const double wts[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
            const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
            const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
            for (int k = 0; k < 4; ++k) {
                if (wts[k] <= 0.0 || xs[k] < 0 || xs[k] >= w || ys[k] < 0 || ys[k] >= h) continue;
                const std::size_t t = static_cast<std::size_t>(ys[k]) * w + xs[k];
                if (z > zmin[t] * (1.0 + kSplatDepthSlack)) {
                    res.occluded[t] = 1;
                    continue;
                }
                wsum[t] += wts[k];
                zacc[t] += wts[k] * z;
                for (int c = 0; c < ch; ++c)
                    cacc[t * ch + c] += wts[k] * source.at(y, x, c);
            }
        }
    }

    for (std::size_t t = 0; t < n; ++t) {
        if (wsum[t] < kSplatMinWeight) {
            res.holes[t] = 1;
            continue;
        }
        res.valid[t] = 1;
        res.depth.values[t] = zacc[t] / wsum[t];
        res.depth.valid[t] = 1;
        for (int c = 0; c < ch; ++c)
            res.image.data[t * ch + c] = static_cast<float>(cacc[t * ch + c] / wsum[t]);
    }
    return res;
}

struct BackwardWarpResult {
    Image image;
    std::vector<std::uint8_t> valid;
};

// Gather: output(x) = source(x + flow(x)).
inline BackwardWarpResult backward_warp_image(const FlowField& flow, const Image& source) {
    if (!same_size(source, flow))
        throw std::invalid_argument("backward_warp_image: dimension mismatch");
    BackwardWarpResult res;
    res.image = Image(flow.width, flow.height, source.channels);
    res.valid.assign(flow.n_pixels(), 0);
    for (int y = 0; y < flow.height; ++y) {
        for (int x = 0; x < flow.width; ++x) {
            const std::size_t i = flow.idx(y, x);
            if (!flow.valid[i]) continue;
            const PixelSample s = bilinear_sample(source, x + flow.u[i], y + flow.v[i]);
            if (!s.valid) continue;
            res.valid[i] = 1;
            for (int c = 0; c < source.channels; ++c)
                res.image.data[i * source.channels + c] = s.value[c];
        }
    }
    return res;
}

// Source-side visibility test against a splatted target depth map.
// expected_depth holds, per source pixel, the depth that pixel should have
// in the target view; a source pixel survives when the target depth sampled
// at its landing point agrees within rel_tol (it won, or tied for, the
// z-buffer there).
inline std::vector<std::uint8_t> visibility_mask(const FlowField& flow,
                                                 const ScalarField& expected_depth,
                                                 const ScalarField& target_depth,
                                                 double rel_tol = 2.0 * kSplatDepthSlack) {
    if (!same_size(expected_depth, flow) || target_depth.width != flow.width ||
        target_depth.height != flow.height)
        throw std::invalid_argument("visibility_mask: dimension mismatch");
    std::vector<std::uint8_t> mask(flow.n_pixels(), 0);
    for (int y = 0; y < flow.height; ++y) {
        for (int x = 0; x < flow.width; ++x) {
            const std::size_t i = flow.idx(y, x);
            if (!flow.valid[i] || !expected_depth.valid[i]) continue;
            const ScalarSample s =
                bilinear_sample(target_depth, x + flow.u[i], y + flow.v[i]);
            if (!s.valid) continue;
            const double z = expected_depth.values[i];
            if (std::abs(s.value - z) <= rel_tol * std::abs(z)) mask[i] = 1;
        }
    }
    return mask;
}

}  // namespace flowgen
