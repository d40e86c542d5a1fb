#include <png.h>

#include <algorithm>
#include <cmath>

#include "scatteropt/error.hpp"
#include "scatteropt/raster.hpp"

namespace scatteropt {

namespace {

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void no_flush(png_structp) {}

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;

    PngWriter() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png == nullptr) throw Error("png_create_write_struct failed");
        info = png_create_info_struct(png);
        if (info == nullptr) {
            png_destroy_write_struct(&png, nullptr);
            throw Error("png_create_info_struct failed");
        }
    }
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
    PngWriter(const PngWriter&) = delete;
    PngWriter& operator=(const PngWriter&) = delete;
};

}  // namespace

std::vector<std::uint8_t> encode_png(const CoverageBuffer& buffer) {
    const auto w = static_cast<std::size_t>(buffer.width);
    const auto h = static_cast<std::size_t>(buffer.height);
    // Buffer row 0 is y = 0 (bottom of the plot); PNG row 0 is the top.
    std::vector<std::uint8_t> pixels(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double c = buffer.coverage[y * w + x];
            pixels[(h - 1 - y) * w + x] = static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
        }
    }
    std::vector<png_bytep> rows(h);
    for (std::size_t y = 0; y < h; ++y) rows[y] = pixels.data() + y * w;

    std::vector<std::uint8_t> out;
    PngWriter writer;
    if (setjmp(png_jmpbuf(writer.png))) throw Error("PNG encoding failed");
    png_set_write_fn(writer.png, &out, append_bytes, no_flush);
    png_set_IHDR(writer.png, writer.info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(writer.png, 6);
    png_write_info(writer.png, writer.info);
    png_write_image(writer.png, rows.data());
    png_write_end(writer.png, nullptr);
    return out;
}

}  // namespace scatteropt
