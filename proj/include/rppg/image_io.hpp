#pragma once

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace rppg::img {

/// 8-bit interleaved RGB image buffer.
struct Image8 {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> rgb; // height * width * 3

    std::uint8_t& at(std::size_t y, std::size_t x, std::size_t c) {
        return rgb[(y * width + x) * 3 + c];
    }
    std::uint8_t at(std::size_t y, std::size_t x, std::size_t c) const {
        return rgb[(y * width + x) * 3 + c];
    }
};

namespace detail {
struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
} // namespace detail

inline Image8 read_png(const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open: " + path);

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("undecodable PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB.
    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    Image8 out;
    out.width = png_get_image_width(png, info);
    out.height = png_get_image_height(png, info);
    out.rgb.resize(out.width * out.height * 3);
    std::vector<png_bytep> rows(out.height);
    for (std::size_t y = 0; y < out.height; ++y)
        rows[y] = out.rgb.data() + y * out.width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

inline void write_png(const Image8& image, const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open for write: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              nullptr, nullptr);
    if (!png) throw std::runtime_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("PNG write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(image.height);
    for (std::size_t y = 0; y < image.height; ++y)
        rows[y] = const_cast<png_bytep>(image.rgb.data() + y * image.width * 3);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Uncompressed 24-bit BMP (bottom-up, BGR), enough for lossless frame dumps.

inline Image8 read_bmp(const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open: " + path);
    std::uint8_t header[54];
    if (std::fread(header, 1, 54, fp.get()) != 54 || header[0] != 'B' ||
        header[1] != 'M')
        throw std::runtime_error("undecodable BMP: " + path);
    auto u32 = [&](int off) {
        std::uint32_t v;
        std::memcpy(&v, header + off, 4);
        return v;
    };
    auto u16 = [&](int off) {
        std::uint16_t v;
        std::memcpy(&v, header + off, 2);
        return v;
    };
    const std::uint32_t data_off = u32(10);
    const std::int32_t w = static_cast<std::int32_t>(u32(18));
    const std::int32_t h = static_cast<std::int32_t>(u32(22));
    if (u16(28) != 24 || u32(30) != 0 || w <= 0 || h == 0)
        throw std::runtime_error("unsupported BMP (need uncompressed 24-bit): " +
                                 path);
    const bool bottom_up = h > 0;
    const std::size_t height = static_cast<std::size_t>(bottom_up ? h : -h);
    const std::size_t width = static_cast<std::size_t>(w);
    const std::size_t row_bytes = (width * 3 + 3) & ~std::size_t{3};

    if (std::fseek(fp.get(), static_cast<long>(data_off), SEEK_SET) != 0)
        throw std::runtime_error("undecodable BMP: " + path);
    Image8 out;
    out.width = width;
    out.height = height;
    out.rgb.resize(width * height * 3);
    std::vector<std::uint8_t> row(row_bytes);
    for (std::size_t r = 0; r < height; ++r) {
        if (std::fread(row.data(), 1, row_bytes, fp.get()) != row_bytes)
            throw std::runtime_error("truncated BMP: " + path);
        const std::size_t y = bottom_up ? height - 1 - r : r;
        for (std::size_t x = 0; x < width; ++x) {
            out.at(y, x, 0) = row[x * 3 + 2];
            out.at(y, x, 1) = row[x * 3 + 1];
            out.at(y, x, 2) = row[x * 3 + 0];
        }
    }
    return out;
}

inline void write_bmp(const Image8& image, const std::string& path) {
    detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open for write: " + path);
    const std::size_t row_bytes = (image.width * 3 + 3) & ~std::size_t{3};
    const std::uint32_t data_size =
        static_cast<std::uint32_t>(row_bytes * image.height);
    std::uint8_t header[54] = {};
    header[0] = 'B';
    header[1] = 'M';
    auto put32 = [&](int off, std::uint32_t v) {
        std::memcpy(header + off, &v, 4);
    };
    auto put16 = [&](int off, std::uint16_t v) {
        std::memcpy(header + off, &v, 2);
    };
    put32(2, 54 + data_size);
    put32(10, 54);
    put32(14, 40);
    put32(18, static_cast<std::uint32_t>(image.width));
    put32(22, static_cast<std::uint32_t>(image.height));
    put16(26, 1);
    put16(28, 24);
    put32(34, data_size);
    if (std::fwrite(header, 1, 54, fp.get()) != 54)
        throw std::runtime_error("BMP write failed: " + path);
    std::vector<std::uint8_t> row(row_bytes, 0);
    for (std::size_t r = 0; r < image.height; ++r) {
        const std::size_t y = image.height - 1 - r;
        for (std::size_t x = 0; x < image.width; ++x) {
            row[x * 3 + 0] = image.at(y, x, 2);
            row[x * 3 + 1] = image.at(y, x, 1);
            row[x * 3 + 2] = image.at(y, x, 0);
        }
        if (std::fwrite(row.data(), 1, row_bytes, fp.get()) != row_bytes)
            throw std::runtime_error("BMP write failed: " + path);
    }
}

} // namespace rppg::img
