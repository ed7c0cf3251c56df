#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cadsynth/math.hpp"

namespace cadsynth {

enum class ColorSpace { linear, srgb };
enum class WrapMode { repeat, clamp };

double srgb_to_linear(double v);
double linear_to_srgb(double v);

/// Row-major float image with 1, 3 or 4 interleaved channels.
class TextureMap {
public:
    TextureMap() = default;
    TextureMap(int width, int height, int channels, ColorSpace cs = ColorSpace::linear,
               WrapMode wrap = WrapMode::repeat);

    static TextureMap constant(int width, int height, std::span<const double> value,
                               ColorSpace cs = ColorSpace::linear);
    static TextureMap constant_rgb(const Vec3 &c, ColorSpace cs = ColorSpace::linear, int width = 1,
                                   int height = 1);
    static TextureMap constant_scalar(double v, int width = 1, int height = 1);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }
    std::size_t texel_count() const { return static_cast<std::size_t>(width_) * height_; }

    ColorSpace color_space() const { return color_space_; }
    void set_color_space(ColorSpace cs) { color_space_ = cs; }
    WrapMode wrap() const { return wrap_; }
    void set_wrap(WrapMode w) { wrap_ = w; }

    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }

    float &at(int x, int y, int c) { return data_[index(x, y, c)]; }
    float at(int x, int y, int c) const { return data_[index(x, y, c)]; }

    /// Texel fetch applying this map's wrap mode to out-of-range coordinates.
    float fetch(int x, int y, int c) const;
    Vec3 fetch_rgb(int x, int y) const;

    /// Bilinear lookup at texture coordinate (u, v); texel centers sit at (i + 0.5) / size.
    double sample(double u, double v, int c) const;
    Vec3 sample_rgb(double u, double v) const;

    /// sample_rgb decoded to linear when the map is sRGB-tagged.
    Vec3 sample_linear_rgb(double u, double v) const;

    /// Bilinear resize to (w, h); returns *this unchanged when the size already matches.
    TextureMap resized(int w, int h) const;

    float max_value() const;
    float min_value() const;

    bool operator==(const TextureMap &) const = default;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    ColorSpace color_space_ = ColorSpace::linear;
    WrapMode wrap_ = WrapMode::repeat;
    std::vector<float> data_;
};

inline int wrap_index(int i, int n) {
    const int r = i % n;
    return r < 0 ? r + n : r;
}

}  // namespace cadsynth
