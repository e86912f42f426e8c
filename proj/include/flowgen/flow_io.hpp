#pragma once

// Flow and depth file codecs.
//
// .flo (Middlebury): 4-byte tag "PIEH" (the little-endian float 202021.25),
// int32 width, int32 height, then row-major interleaved (u,v) float32, all
// little-endian. The format has no mask channel; invalid pixels are stored
// with magnitude > 1e9.
//
// KITTI flow PNG: 16-bit RGB; R = round(u*64 + 2^15), G = round(v*64 + 2^15),
// B = 1 if valid else 0. Valid range |u|,|v| < 512.
//
// Depth PNG: 16-bit grayscale, depth = value / scale, value 0 means invalid.
//
// PFM: "Pf" grayscale header, scale line whose sign encodes endianness,
// rows stored bottom-up.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "flowgen/png_io.hpp"
#include "flowgen/types.hpp"

namespace flowgen {

inline constexpr float kFloMagic = 202021.25f;
inline constexpr double kFloInvalidThresh = 1e9;
inline constexpr double kFloInvalidSentinel = 1e10;

static_assert(std::endian::native == std::endian::little,
              "flow codecs assume a little-endian host");

namespace detail {

inline void fwrite_checked(const void* p, std::size_t n, std::FILE* f, const char* what) {
    if (std::fwrite(p, 1, n, f) != n) throw std::runtime_error(std::string("write failed: ") + what);
}

inline void fread_checked(void* p, std::size_t n, std::FILE* f, const char* what) {
    if (std::fread(p, 1, n, f) != n) throw std::runtime_error(std::string("truncated file: ") + what);
}

}  // namespace detail

inline void write_flo(const std::string& path, const FlowField& flow) {
    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("write_flo: cannot open " + path);

    detail::fwrite_checked(&kFloMagic, 4, fp.get(), path.c_str());
    const std::int32_t w = flow.width, h = flow.height;
    detail::fwrite_checked(&w, 4, fp.get(), path.c_str());
    detail::fwrite_checked(&h, 4, fp.get(), path.c_str());

    std::vector<float> row(static_cast<std::size_t>(flow.width) * 2);
    for (int y = 0; y < flow.height; ++y) {
        for (int x = 0; x < flow.width; ++x) {
            const std::size_t i = flow.idx(y, x);
            if (flow.valid[i]) {
                if (!std::isfinite(flow.u[i]) || !std::isfinite(flow.v[i]))
                    throw std::invalid_argument("write_flo: non-finite flow at a valid pixel");
                row[2 * x] = static_cast<float>(flow.u[i]);
                row[2 * x + 1] = static_cast<float>(flow.v[i]);
            } else {
                row[2 * x] = static_cast<float>(kFloInvalidSentinel);
                row[2 * x + 1] = static_cast<float>(kFloInvalidSentinel);
            }
        }
        detail::fwrite_checked(row.data(), row.size() * 4, fp.get(), path.c_str());
    }
}

inline FlowField read_flo(const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("read_flo: cannot open " + path);

    float tag = 0.f;
    std::int32_t w = 0, h = 0;
    detail::fread_checked(&tag, 4, fp.get(), path.c_str());
    if (tag != kFloMagic) throw std::runtime_error("read_flo: bad magic in " + path);
    detail::fread_checked(&w, 4, fp.get(), path.c_str());
    detail::fread_checked(&h, 4, fp.get(), path.c_str());
    if (w < 1 || w > 99999 || h < 1 || h > 99999)
        throw std::runtime_error("read_flo: implausible dimensions in " + path);

    FlowField flow(w, h, 0.0, 0.0, false);
    std::vector<float> row(static_cast<std::size_t>(w) * 2);
    for (int y = 0; y < h; ++y) {
        detail::fread_checked(row.data(), row.size() * 4, fp.get(), path.c_str());
        for (int x = 0; x < w; ++x) {
            const float u = row[2 * x], v = row[2 * x + 1];
            if (std::abs(u) > kFloInvalidThresh || std::abs(v) > kFloInvalidThresh ||
                std::isnan(u) || std::isnan(v))
                continue;
            flow.set(y, x, u, v);
        }
    }
    if (std::fgetc(fp.get()) != EOF) throw std::runtime_error("read_flo: trailing bytes in " + path);
    return flow;
}

inline void write_kitti_png(const std::string& path, const FlowField& flow) {
    PngImage img;
    img.width = flow.width;
    img.height = flow.height;
    img.channels = 3;
    img.bit_depth = 16;
    img.pixels.assign(static_cast<std::size_t>(flow.width) * flow.height * 3, 0);
    for (int y = 0; y < flow.height; ++y) {
        for (int x = 0; x < flow.width; ++x) {
            const std::size_t i = flow.idx(y, x);
            if (!flow.valid[i]) continue;  // all-zero channels, B=0 marks invalid
            if (std::abs(flow.u[i]) >= 512.0 || std::abs(flow.v[i]) >= 512.0)
                throw std::invalid_argument("write_kitti_png: flow exceeds +/-512 px");
            img.at(y, x, 0) = static_cast<std::uint16_t>(std::lround(flow.u[i] * 64.0 + 32768.0));
            img.at(y, x, 1) = static_cast<std::uint16_t>(std::lround(flow.v[i] * 64.0 + 32768.0));
            img.at(y, x, 2) = 1;
        }
    }
    write_png(path, img);
}

inline FlowField read_kitti_png(const std::string& path) {
    const PngImage img = read_png(path);
    if (img.channels != 3 || img.bit_depth != 16)
        throw std::runtime_error("read_kitti_png: expected 16-bit RGB: " + path);
    FlowField flow(img.width, img.height, 0.0, 0.0, false);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.at(y, x, 2) == 0) continue;
            flow.set(y, x, (img.at(y, x, 0) - 32768.0) / 64.0,
                     (img.at(y, x, 1) - 32768.0) / 64.0);
        }
    }
    return flow;
}

inline ScalarField read_depth_png(const std::string& path, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("read_depth_png: scale must be positive");
    const PngImage img = read_png(path);
    if (img.channels != 1)
        throw std::runtime_error("read_depth_png: expected single-channel PNG: " + path);
    ScalarField out(img.width, img.height, 0.0, false);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (img.pixels[i] == 0) continue;  // sentinel: no measurement
        out.values[i] = img.pixels[i] / scale;
        out.valid[i] = 1;
    }
    return out;
}

inline void write_depth_png(const std::string& path, const ScalarField& field, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("write_depth_png: scale must be positive");
    PngImage img;
    img.width = field.width;
    img.height = field.height;
    img.channels = 1;
    img.bit_depth = 16;
    img.pixels.assign(field.n_pixels(), 0);
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (!field.valid[i]) continue;
        const long v = std::lround(field.values[i] * scale);
        img.pixels[i] = static_cast<std::uint16_t>(std::clamp(v, 1l, 65535l));
    }
    write_png(path, img);
}

inline ScalarField read_pfm(const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("read_pfm: cannot open " + path);

    char kind[3] = {0, 0, 0};
    int w = 0, h = 0;
    double scale = 0.0;
    if (std::fscanf(fp.get(), "%2s %d %d %lf", kind, &w, &h, &scale) != 4)
        throw std::runtime_error("read_pfm: malformed header in " + path);
    if (std::strcmp(kind, "Pf") != 0)
        throw std::runtime_error("read_pfm: only grayscale Pf supported: " + path);
    if (w < 1 || h < 1 || scale == 0.0)
        throw std::runtime_error("read_pfm: malformed header in " + path);
    std::fgetc(fp.get());  // single whitespace byte after the scale

    const bool little_endian = scale < 0.0;
    std::vector<float> raw(static_cast<std::size_t>(w) * h);
    detail::fread_checked(raw.data(), raw.size() * 4, fp.get(), path.c_str());
    if (!little_endian) {
        for (auto& f : raw) {
            auto b = std::bit_cast<std::uint32_t>(f);
            b = ((b & 0xff) << 24) | ((b & 0xff00) << 8) | ((b >> 8) & 0xff00) | (b >> 24);
            f = std::bit_cast<float>(b);
        }
    }

    ScalarField out(w, h, 0.0, false);
    for (int y = 0; y < h; ++y) {
        const float* src = raw.data() + static_cast<std::size_t>(h - 1 - y) * w;  // bottom-up
        for (int x = 0; x < w; ++x) {
            const float v = src[x];
            if (!std::isfinite(v) || v <= 0.f) continue;
            out.values[out.idx(y, x)] = v;
            out.valid[out.idx(y, x)] = 1;
        }
    }
    return out;
}

inline void write_pfm(const std::string& path, const ScalarField& field) {
    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("write_pfm: cannot open " + path);
    std::fprintf(fp.get(), "Pf\n%d %d\n-1.0\n", field.width, field.height);
    std::vector<float> row(field.width);
    for (int y = field.height - 1; y >= 0; --y) {
        for (int x = 0; x < field.width; ++x) {
            const std::size_t i = field.idx(y, x);
            row[x] = field.valid[i] ? static_cast<float>(field.values[i]) : 0.f;
        }
        detail::fwrite_checked(row.data(), row.size() * 4, fp.get(), path.c_str());
    }
}

}  // namespace flowgen
