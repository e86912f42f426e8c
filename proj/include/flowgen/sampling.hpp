#pragma once

// Bilinear sampling on dense fields, the backward-warp lookup
// beta(x + alpha(x)), and flow composition.
//
// The sampling domain is the full pixel-center rectangle
// [0, width-1] x [0, height-1]; coordinates on the right/bottom edge are
// handled by shifting the 2x2 neighborhood one pixel inward, which keeps
// the interpolation exact there (the fractional weight becomes 1).
// A sample is valid only when the coordinate is in bounds and all four
// contributing pixels are valid.

#include <array>
#include <cmath>

#include "flowgen/types.hpp"

namespace flowgen {

namespace detail {

// 2x2 interpolation stencil for a real-valued coordinate.
struct BilinearStencil {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    double fx = 0.0, fy = 0.0;
    bool in_bounds = false;
};

inline BilinearStencil make_stencil(int width, int height, double x, double y) {
    BilinearStencil s;
    if (!(x >= 0.0) || !(y >= 0.0) || x > width - 1 || y > height - 1) return s;  // NaN-safe
    s.x0 = static_cast<int>(std::floor(x));
    s.y0 = static_cast<int>(std::floor(y));
    if (s.x0 > width - 2) s.x0 = width > 1 ? width - 2 : 0;
    if (s.y0 > height - 2) s.y0 = height > 1 ? height - 2 : 0;
    s.x1 = s.x0 + 1 < width ? s.x0 + 1 : s.x0;
    s.y1 = s.y0 + 1 < height ? s.y0 + 1 : s.y0;
    s.fx = x - s.x0;
    s.fy = y - s.y0;
    s.in_bounds = true;
    return s;
}

// lerp(a, a, t) == a exactly, so constant fields interpolate bit-exact.
inline double lerp(double a, double b, double t) { return a + t * (b - a); }
inline float lerpf(float a, float b, double t) {
    return static_cast<float>(a + t * (static_cast<double>(b) - a));
}

}  // namespace detail

struct ScalarSample {
    double value = 0.0;
    bool valid = false;
};

struct FlowSample {
    double u = 0.0;
    double v = 0.0;
    bool valid = false;
};

struct PixelSample {
    std::array<float, 3> value{0.f, 0.f, 0.f};
    bool valid = false;
};

inline ScalarSample bilinear_sample(const ScalarField& f, double x, double y) {
    const auto s = detail::make_stencil(f.width, f.height, x, y);
    if (!s.in_bounds) return {};
    const std::size_t i00 = f.idx(s.y0, s.x0), i01 = f.idx(s.y0, s.x1);
    const std::size_t i10 = f.idx(s.y1, s.x0), i11 = f.idx(s.y1, s.x1);
    if (!(f.valid[i00] && f.valid[i01] && f.valid[i10] && f.valid[i11])) return {};
    const double top = detail::lerp(f.values[i00], f.values[i01], s.fx);
    const double bot = detail::lerp(f.values[i10], f.values[i11], s.fx);
    return {detail::lerp(top, bot, s.fy), true};
}

inline FlowSample bilinear_sample(const FlowField& f, double x, double y) {
    const auto s = detail::make_stencil(f.width, f.height, x, y);
    if (!s.in_bounds) return {};
    const std::size_t i00 = f.idx(s.y0, s.x0), i01 = f.idx(s.y0, s.x1);
    const std::size_t i10 = f.idx(s.y1, s.x0), i11 = f.idx(s.y1, s.x1);
    if (!(f.valid[i00] && f.valid[i01] && f.valid[i10] && f.valid[i11])) return {};
    FlowSample out;
    out.u = detail::lerp(detail::lerp(f.u[i00], f.u[i01], s.fx),
                         detail::lerp(f.u[i10], f.u[i11], s.fx), s.fy);
    out.v = detail::lerp(detail::lerp(f.v[i00], f.v[i01], s.fx),
                         detail::lerp(f.v[i10], f.v[i11], s.fx), s.fy);
    out.valid = true;
    return out;
}

inline PixelSample bilinear_sample(const Image& img, double x, double y) {
    const auto s = detail::make_stencil(img.width, img.height, x, y);
    if (!s.in_bounds) return {};
    PixelSample out;
    for (int c = 0; c < img.channels; ++c) {
        const float top = detail::lerpf(img.at(s.y0, s.x0, c), img.at(s.y0, s.x1, c), s.fx);
        const float bot = detail::lerpf(img.at(s.y1, s.x0, c), img.at(s.y1, s.x1, c), s.fx);
        out.value[c] = detail::lerpf(top, bot, s.fy);
    }
    out.valid = true;
    return out;
}

// Validity lookup through a mask: true only when the coordinate is in
// bounds and all four stencil pixels are flagged valid.
inline bool bilinear_mask_valid(const std::vector<std::uint8_t>& mask, int width, int height,
                                double x, double y) {
    const auto s = detail::make_stencil(width, height, x, y);
    if (!s.in_bounds) return false;
    const auto idx = [&](int yy, int xx) { return static_cast<std::size_t>(yy) * width + xx; };
    return mask[idx(s.y0, s.x0)] && mask[idx(s.y0, s.x1)] && mask[idx(s.y1, s.x0)] &&
           mask[idx(s.y1, s.x1)];
}

// W^-1(alpha, beta): per pixel x, sample beta at x + alpha(x).
// Output is valid where alpha is valid and the lookup lands on valid beta.
inline FlowField backward_sample(const FlowField& alpha, const FlowField& beta) {
    if (!same_size(alpha, beta))
        throw std::invalid_argument("backward_sample: dimension mismatch");
    FlowField out(alpha.width, alpha.height, 0.0, 0.0, false);
    for (int y = 0; y < alpha.height; ++y) {
        for (int x = 0; x < alpha.width; ++x) {
            const std::size_t i = alpha.idx(y, x);
            if (!alpha.valid[i]) continue;
            const FlowSample s = bilinear_sample(beta, x + alpha.u[i], y + alpha.v[i]);
            if (s.valid) out.set(y, x, s.u, s.v);
        }
    }
    return out;
}

// f_first followed by f_second: f_first + W^-1(f_first, f_second).
inline FlowField compose_flows(const FlowField& f_first, const FlowField& f_second) {
    if (!same_size(f_first, f_second))
        throw std::invalid_argument("compose_flows: dimension mismatch");
    FlowField out = backward_sample(f_first, f_second);
    for (std::size_t i = 0; i < out.valid.size(); ++i) {
        if (!out.valid[i]) continue;
        out.u[i] += f_first.u[i];
        out.v[i] += f_first.v[i];
    }
    return out;
}

}  // namespace flowgen
