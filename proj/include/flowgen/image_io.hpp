#pragma once

// Intensity image and mask I/O on top of the PNG wrapper. Images are
// normalized to [0,1] on read (8-bit /255, 16-bit /65535) and written as
// 8-bit PNG. Masks are 8-bit grayscale, nonzero = valid.

#include <cmath>
#include <string>

#include "flowgen/png_io.hpp"
#include "flowgen/types.hpp"

namespace flowgen {

inline Image read_image(const std::string& path) {
    const PngImage png = read_png(path);
    Image img(png.width, png.height, png.channels);
    const float norm = png.bit_depth == 8 ? 255.f : 65535.f;
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = png.pixels[i] / norm;
    return img;
}

inline void write_image(const std::string& path, const Image& img) {
    PngImage png;
    png.width = img.width;
    png.height = img.height;
    png.channels = img.channels;
    png.bit_depth = 8;
    png.pixels.resize(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const float v = std::min(std::max(img.data[i], 0.f), 1.f);
        png.pixels[i] = static_cast<std::uint16_t>(std::lround(v * 255.f));
    }
    write_png(path, png);
}

inline void write_mask_png(const std::string& path, const std::vector<std::uint8_t>& mask,
                           int width, int height) {
    if (mask.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("write_mask_png: size mismatch");
    PngImage png;
    png.width = width;
    png.height = height;
    png.channels = 1;
    png.bit_depth = 8;
    png.pixels.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) png.pixels[i] = mask[i] ? 255 : 0;
    write_png(path, png);
}

inline std::vector<std::uint8_t> read_mask_png(const std::string& path, int* width = nullptr,
                                               int* height = nullptr) {
    const PngImage png = read_png(path);
    if (png.channels != 1) throw std::runtime_error("read_mask_png: expected grayscale: " + path);
    std::vector<std::uint8_t> mask(png.pixels.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = png.pixels[i] ? 1 : 0;
    if (width) *width = png.width;
    if (height) *height = png.height;
    return mask;
}

}  // namespace flowgen
