#include "cadsynth/texture.hpp"

#include <algorithm>
#include <stdexcept>

namespace cadsynth {

double srgb_to_linear(double v) {
    if (v <= 0.04045) return v / 12.92;
    return std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    if (v <= 0.0031308) return 12.92 * v;
    return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

TextureMap::TextureMap(int width, int height, int channels, ColorSpace cs, WrapMode wrap)
    : width_(width), height_(height), channels_(channels), color_space_(cs), wrap_(wrap) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("TextureMap: size must be positive");
    if (channels != 1 && channels != 3 && channels != 4)
        throw std::invalid_argument("TextureMap: channels must be 1, 3 or 4");
    data_.assign(static_cast<std::size_t>(width) * height * channels, 0.0f);
}

TextureMap TextureMap::constant(int width, int height, std::span<const double> value, ColorSpace cs) {
    TextureMap t(width, height, static_cast<int>(value.size()), cs);
    for (std::size_t i = 0; i < t.texel_count(); ++i)
        for (std::size_t c = 0; c < value.size(); ++c)
            t.data_[i * value.size() + c] = static_cast<float>(value[c]);
    return t;
}

TextureMap TextureMap::constant_rgb(const Vec3 &c, ColorSpace cs, int width, int height) {
    const double v[3] = {c.x, c.y, c.z};
    return constant(width, height, v, cs);
}

TextureMap TextureMap::constant_scalar(double v, int width, int height) {
    const double vv[1] = {v};
    return constant(width, height, vv, ColorSpace::linear);
}

float TextureMap::fetch(int x, int y, int c) const {
    if (wrap_ == WrapMode::repeat) {
        x = wrap_index(x, width_);
        y = wrap_index(y, height_);
    } else {
        x = std::clamp(x, 0, width_ - 1);
        y = std::clamp(y, 0, height_ - 1);
    }
    return data_[index(x, y, c)];
}

Vec3 TextureMap::fetch_rgb(int x, int y) const {
    if (channels_ == 1) {
        const double v = fetch(x, y, 0);
        return Vec3(v);
    }
    return {fetch(x, y, 0), fetch(x, y, 1), fetch(x, y, 2)};
}

double TextureMap::sample(double u, double v, int c) const {
    const double fx = u * width_ - 0.5;
    const double fy = v * height_ - 0.5;
    const double x0f = std::floor(fx);
    const double y0f = std::floor(fy);
    const double tx = fx - x0f;
    const double ty = fy - y0f;
    const int x0 = static_cast<int>(x0f);
    const int y0 = static_cast<int>(y0f);
    const double a = fetch(x0, y0, c);
    const double b = fetch(x0 + 1, y0, c);
    const double d = fetch(x0, y0 + 1, c);
    const double e = fetch(x0 + 1, y0 + 1, c);
    return (a * (1 - tx) + b * tx) * (1 - ty) + (d * (1 - tx) + e * tx) * ty;
}

Vec3 TextureMap::sample_rgb(double u, double v) const {
    if (channels_ == 1) return Vec3(sample(u, v, 0));
    return {sample(u, v, 0), sample(u, v, 1), sample(u, v, 2)};
}

Vec3 TextureMap::sample_linear_rgb(double u, double v) const {
    Vec3 c = sample_rgb(u, v);
    if (color_space_ == ColorSpace::srgb) c = {srgb_to_linear(c.x), srgb_to_linear(c.y), srgb_to_linear(c.z)};
    return c;
}

TextureMap TextureMap::resized(int w, int h) const {
    if (w == width_ && h == height_) return *this;
    TextureMap out(w, h, channels_, color_space_, wrap_);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double u = (x + 0.5) / w;
            const double v = (y + 0.5) / h;
            for (int c = 0; c < channels_; ++c) out.at(x, y, c) = static_cast<float>(sample(u, v, c));
        }
    return out;
}

float TextureMap::max_value() const {
    return data_.empty() ? 0.0f : *std::max_element(data_.begin(), data_.end());
}

float TextureMap::min_value() const {
    return data_.empty() ? 0.0f : *std::min_element(data_.begin(), data_.end());
}

}  // namespace cadsynth
