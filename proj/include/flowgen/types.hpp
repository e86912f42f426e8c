#pragma once

// Dense field containers shared by the whole pipeline.
//
// Pixel-grid convention: coordinates are zero-indexed pixel centers,
// x horizontal in [0, width-1], y vertical in [0, height-1]. The pixel
// in row i, column j of row-major storage sits at (x=j, y=i).
// Invalid pixels always carry value 0 so that serialized output is
// deterministic.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowgen {

struct PixelGrid {
    int width = 0;
    int height = 0;

    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
};

// Intensity image, 1 (gray) or 3 (rgb) channels, values in [0,1], row-major.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.f)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {
        if (w <= 0 || h <= 0 || (c != 1 && c != 3))
            throw std::invalid_argument("Image: bad dimensions");
    }

    float at(int y, int x, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float& at(int y, int x, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t n_pixels() const { return static_cast<std::size_t>(width) * height; }
    PixelGrid grid() const { return {width, height}; }
};

// One scalar per pixel (depth in meters or disparity in pixels) plus a
// validity mask. Depth fields must be > 0 at valid pixels.
struct ScalarField {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0, bool all_valid = true)
        : width(w), height(h),
          values(static_cast<std::size_t>(w) * h, fill),
          valid(static_cast<std::size_t>(w) * h, all_valid ? 1 : 0) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("ScalarField: bad dimensions");
    }

    std::size_t idx(int y, int x) const { return static_cast<std::size_t>(y) * width + x; }
    double at(int y, int x) const { return values[idx(y, x)]; }
    double& at(int y, int x) { return values[idx(y, x)]; }
    bool is_valid(int y, int x) const { return valid[idx(y, x)] != 0; }
    std::size_t n_pixels() const { return static_cast<std::size_t>(width) * height; }
    PixelGrid grid() const { return {width, height}; }

    std::size_t count_valid() const {
        std::size_t n = 0;
        for (auto v : valid) n += v != 0;
        return n;
    }
};

// Dense 2-channel displacement field (u horizontal, v vertical, in pixels)
// with validity mask.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<std::uint8_t> valid;

    FlowField() = default;
    FlowField(int w, int h, double fill_u = 0.0, double fill_v = 0.0, bool all_valid = true)
        : width(w), height(h),
          u(static_cast<std::size_t>(w) * h, fill_u),
          v(static_cast<std::size_t>(w) * h, fill_v),
          valid(static_cast<std::size_t>(w) * h, all_valid ? 1 : 0) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("FlowField: bad dimensions");
    }

    std::size_t idx(int y, int x) const { return static_cast<std::size_t>(y) * width + x; }
    bool is_valid(int y, int x) const { return valid[idx(y, x)] != 0; }
    std::size_t n_pixels() const { return static_cast<std::size_t>(width) * height; }
    PixelGrid grid() const { return {width, height}; }

    void set(int y, int x, double du, double dv, bool ok = true) {
        const std::size_t i = idx(y, x);
        u[i] = ok ? du : 0.0;
        v[i] = ok ? dv : 0.0;
        valid[i] = ok ? 1 : 0;
    }

    std::size_t count_valid() const {
        std::size_t n = 0;
        for (auto f : valid) n += f != 0;
        return n;
    }
};

inline bool same_size(const FlowField& a, const FlowField& b) {
    return a.width == b.width && a.height == b.height;
}
inline bool same_size(const ScalarField& a, const FlowField& b) {
    return a.width == b.width && a.height == b.height;
}
inline bool same_size(const Image& a, const FlowField& b) {
    return a.width == b.width && a.height == b.height;
}
inline bool same_size(const Image& a, const ScalarField& b) {
    return a.width == b.width && a.height == b.height;
}
inline bool same_size(const Image& a, const Image& b) {
    return a.width == b.width && a.height == b.height;
}

}  // namespace flowgen
