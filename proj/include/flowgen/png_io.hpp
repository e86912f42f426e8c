#pragma once

// Thin libpng wrapper: grayscale or RGB, 8- or 16-bit. Samples are kept as
// uint16 regardless of bit depth; 16-bit PNG byte order (big-endian) is
// handled here so callers never see it.

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "flowgen/types.hpp"

namespace flowgen {

struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 1;   // 1 or 3
    int bit_depth = 8;  // 8 or 16
    std::vector<std::uint16_t> pixels;  // row-major, interleaved

    std::uint16_t at(int y, int x, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint16_t& at(int y, int x, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace detail

inline PngImage read_png(const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("read_png: cannot open " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw std::runtime_error("read_png: not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_png: libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_png: decode error in " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    PngImage out;
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.bit_depth = png_get_bit_depth(png, info);
    out.channels = png_get_channels(png, info);
    if ((out.channels != 1 && out.channels != 3) || (out.bit_depth != 8 && out.bit_depth != 16)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("read_png: unsupported bit depth or channel count: " + path);
    }

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    std::vector<png_byte> raw(row_bytes * out.height);
    std::vector<png_bytep> rows(out.height);
    for (int y = 0; y < out.height; ++y) rows[y] = raw.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);
    if (out.bit_depth == 8) {
        for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = raw[i];
    } else {
        for (std::size_t i = 0; i < out.pixels.size(); ++i)
            out.pixels[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
    return out;
}

inline void write_png(const std::string& path, const PngImage& img) {
    if (img.width <= 0 || img.height <= 0 ||
        img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * img.channels)
        throw std::invalid_argument("write_png: inconsistent image");

    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("write_png: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png: libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png: encode error for " + path);
    }
    png_init_io(png, fp.get());
    const int color_type = img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.width, img.height, img.bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const std::size_t samples_per_row = static_cast<std::size_t>(img.width) * img.channels;
    std::vector<png_byte> row(samples_per_row * (img.bit_depth / 8));
    for (int y = 0; y < img.height; ++y) {
        if (img.bit_depth == 8) {
            for (std::size_t j = 0; j < samples_per_row; ++j)
                row[j] = static_cast<png_byte>(img.pixels[y * samples_per_row + j] & 0xff);
        } else {
            for (std::size_t j = 0; j < samples_per_row; ++j) {
                const std::uint16_t v = img.pixels[y * samples_per_row + j];
                row[2 * j] = static_cast<png_byte>(v >> 8);
                row[2 * j + 1] = static_cast<png_byte>(v & 0xff);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace flowgen
