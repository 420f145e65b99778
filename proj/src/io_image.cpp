#include "gsc/io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

namespace gsc {

uint8_t linear_to_srgb_u8(float linear) {
    float c = std::clamp(linear, 0.0f, 1.0f);
    c = c <= 0.0031308f ? 12.92f * c : 1.055f * std::pow(c, 1.0f / 2.4f) - 0.055f;
    // round half away from zero
    return static_cast<uint8_t>(std::lround(255.0f * c));
}

namespace {

std::vector<uint8_t> quantize(const Framebuffer& fb) {
    std::vector<uint8_t> bytes(fb.rgb.size());
    for (size_t i = 0; i < fb.rgb.size(); ++i) {
        bytes[i] = linear_to_srgb_u8(fb.rgb[i]);
    }
    return bytes;
}

void write_ppm(const std::vector<uint8_t>& bytes, int width, int height,
               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError(FormatErrorKind::IoError, "cannot open for writing: " + path.string());
    }
    out << "P6\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw FormatError(FormatErrorKind::IoError, "write failed: " + path.string());
    }
}

void write_png(const std::vector<uint8_t>& bytes, int width, int height,
               const std::filesystem::path& path) {
    FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) {
        throw FormatError(FormatErrorKind::IoError, "cannot open for writing: " + path.string());
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw FormatError(FormatErrorKind::IoError, "png write failed: " + path.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) {
        rows[y] = const_cast<png_bytep>(bytes.data() + static_cast<size_t>(y) * width * 3);
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

void write_image(const Framebuffer& fb, const std::filesystem::path& path,
                 ImageFormat format) {
    const std::vector<uint8_t> bytes = quantize(fb);
    if (format == ImageFormat::Ppm) {
        write_ppm(bytes, fb.width, fb.height, path);
    } else {
        write_png(bytes, fb.width, fb.height, path);
    }
}

}  // namespace gsc
