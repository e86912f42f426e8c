#pragma once

// Flow color coding: hue from the flow direction, saturation from the
// magnitude normalized by its 99th percentile, full value. Zero flow comes
// out white, invalid pixels black.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "flowgen/types.hpp"

namespace flowgen {

namespace detail {

inline void hsv_to_rgb(double h_deg, double s, double v, float rgb[3]) {
    const double c = v * s;
    const double hp = h_deg / 60.0;
    const double xx = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = xx; }
    else if (hp < 2) { r = xx; g = c; }
    else if (hp < 3) { g = c; b = xx; }
    else if (hp < 4) { g = xx; b = c; }
    else if (hp < 5) { r = xx; b = c; }
    else { r = c; b = xx; }
    const double m = v - c;
    rgb[0] = static_cast<float>(r + m);
    rgb[1] = static_cast<float>(g + m);
    rgb[2] = static_cast<float>(b + m);
}

}  // namespace detail

inline Image visualize_flow(const FlowField& flow) {
    std::vector<double> mags;
    mags.reserve(flow.n_pixels());
    for (std::size_t i = 0; i < flow.valid.size(); ++i)
        if (flow.valid[i]) mags.push_back(std::hypot(flow.u[i], flow.v[i]));

    double norm = 1.0;
    if (!mags.empty()) {
        const std::size_t k = static_cast<std::size_t>(0.99 * (mags.size() - 1));
        std::nth_element(mags.begin(), mags.begin() + k, mags.end());
        norm = std::max(mags[k], 1e-9);
    }

    Image out(flow.width, flow.height, 3);
    for (int y = 0; y < flow.height; ++y) {
        for (int x = 0; x < flow.width; ++x) {
            const std::size_t i = flow.idx(y, x);
            if (!flow.valid[i]) continue;  // invalid stays black
            const double mag = std::hypot(flow.u[i], flow.v[i]);
            double hue = std::atan2(flow.v[i], flow.u[i]) * 180.0 / std::numbers::pi;
            if (hue < 0) hue += 360.0;
            const double sat = std::min(mag / norm, 1.0);
            detail::hsv_to_rgb(hue, sat, 1.0, &out.data[i * 3]);
        }
    }
    return out;
}

}  // namespace flowgen
