#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cadsynth/texture.hpp"

namespace cadsynth {

/// Interleaved integer raster, row-major, top row first.
template <typename T>
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<T> pixels;

    Raster() = default;
    Raster(int w, int h, int c = 1, T fill = T{})
        : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w) * h * c, fill) {}

    T &at(int x, int y, int c = 0) { return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
    T at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool operator==(const Raster &) const = default;
};

using Image8 = Raster<std::uint8_t>;
using Image16 = Raster<std::uint16_t>;

void write_png(const std::filesystem::path &path, const Image8 &img);
void write_png(const std::filesystem::path &path, const Image16 &img);

/// Fails with FormatError unless the file stores 8-bit samples.
Image8 read_png8(const std::filesystem::path &path);
/// Fails with FormatError unless the file stores 16-bit samples.
Image16 read_png16(const std::filesystem::path &path);

/// Reads an 8- or 16-bit PNG normalized to [0,1] (palette and gray+alpha are expanded).
TextureMap read_png_texture(const std::filesystem::path &path, ColorSpace cs);

/// Radiance RGBE (.hdr), new-style RLE or flat scanlines, "-Y h +X w" orientation.
TextureMap read_hdr(const std::filesystem::path &path);
/// Writes flat (non-RLE) RGBE scanlines.
void write_hdr(const std::filesystem::path &path, const TextureMap &img);

/// Dispatches on extension: .hdr -> linear radiance, anything else -> PNG.
TextureMap load_texture(const std::filesystem::path &path, ColorSpace cs);

}  // namespace cadsynth
