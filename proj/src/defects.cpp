#include "cadsynth/defects.hpp"

#include <stdexcept>
#include <vector>

#include "cadsynth/parallel.hpp"

namespace cadsynth {

namespace {

Vec3 decode_albedo(const TextureMap &t, int x, int y) {
    Vec3 c{t.at(x, y, 0), t.at(x, y, 1), t.at(x, y, 2)};
    if (t.color_space() == ColorSpace::srgb) c = {srgb_to_linear(c.x), srgb_to_linear(c.y), srgb_to_linear(c.z)};
    return c;
}

void store_albedo(TextureMap &t, int x, int y, Vec3 c) {
    if (t.color_space() == ColorSpace::srgb) c = {linear_to_srgb(c.x), linear_to_srgb(c.y), linear_to_srgb(c.z)};
    t.at(x, y, 0) = static_cast<float>(clamp01(c.x));
    t.at(x, y, 1) = static_cast<float>(clamp01(c.y));
    t.at(x, y, 2) = static_cast<float>(clamp01(c.z));
}

float lerpf(float a, double b, double w) { return static_cast<float>(a + (b - a) * w); }

}  // namespace

MaterialMaps apply_rust(const MaterialMaps &mat, const TextureMap &mask, const Vec3 &rust_color_a,
                        const Vec3 &rust_color_b, const NoiseParams &color_noise) {
    if (mask.empty() || mask.max_value() <= 0.0f) return mat;
    const int w = mat.albedo.width(), h = mat.albedo.height();
    const TextureMap weight = mask.resized(w, h);

    MaterialMaps out = mat;
    out.roughness = mat.roughness.resized(w, h);
    out.metallic = mat.metallic.resized(w, h);
    const SimplexNoise noise(color_noise.seed);
    parallel_for(0, h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const double m = weight.at(x, y, 0);
            if (m <= 0) continue;
            const double t = 0.5 * (fbm_with(noise, (x + 0.5) / w, (y + 0.5) / h, color_noise) + 1.0);
            const Vec3 rust = lerp(rust_color_a, rust_color_b, t);
            store_albedo(out.albedo, x, y, lerp(decode_albedo(mat.albedo, x, y), rust, m));
            out.roughness.at(x, y, 0) = lerpf(out.roughness.at(x, y, 0), kRustRoughness, m);
            out.metallic.at(x, y, 0) = lerpf(out.metallic.at(x, y, 0), 0.0, m);
        }
    });
    return out;
}

MaterialMaps draw_scratches(const MaterialMaps &mat, std::span<const ScratchSegment> segments) {
    if (segments.empty()) return mat;
    const int w = mat.albedo.width(), h = mat.albedo.height();
    const bool wrap = mat.albedo.wrap() == WrapMode::repeat;

    MaterialMaps out = mat;
    out.roughness = mat.roughness.resized(w, h);
    out.normal = mat.normal.resized(w, h);

    std::vector<float> coverage(static_cast<std::size_t>(w) * h);
    std::vector<float> side(coverage.size());
    for (const ScratchSegment &s : segments) {
        std::fill(coverage.begin(), coverage.end(), 0.0f);
        const Vec2 p0{s.start.x * w, s.start.y * h};
        const Vec2 p1{s.end.x * w, s.end.y * h};
        const Vec2 d = p1 - p0;
        const double len2 = d.x * d.x + d.y * d.y;
        const double len = std::sqrt(len2);
        const Vec2 dir = len > 0 ? d * (1.0 / len) : Vec2{1, 0};
        const double half = 0.5 * s.width_px;
        const double pad = half + 1.0;
        const int x0 = static_cast<int>(std::floor(std::min(p0.x, p1.x) - pad));
        const int x1 = static_cast<int>(std::ceil(std::max(p0.x, p1.x) + pad));
        const int y0 = static_cast<int>(std::floor(std::min(p0.y, p1.y) - pad));
        const int y1 = static_cast<int>(std::ceil(std::max(p0.y, p1.y) + pad));
        for (int py = y0; py <= y1; ++py)
            for (int px = x0; px <= x1; ++px) {
                if (!wrap && (px < 0 || py < 0 || px >= w || py >= h)) continue;
                const Vec2 c{px + 0.5, py + 0.5};
                const Vec2 rel = c - p0;
                const double t = len2 > 0 ? std::clamp((rel.x * d.x + rel.y * d.y) / len2, 0.0, 1.0) : 0.0;
                const Vec2 q = rel - d * t;
                const double dist = std::sqrt(q.x * q.x + q.y * q.y);
                const double cov = clamp01(half + 0.5 - dist);
                if (cov <= 0) continue;
                const std::size_t i = static_cast<std::size_t>(wrap_index(py, h)) * w + wrap_index(px, w);
                if (cov > coverage[i]) {
                    coverage[i] = static_cast<float>(cov);
                    const double cr = dir.x * rel.y - dir.y * rel.x;
                    side[i] = static_cast<float>(cr > 0 ? 1 : (cr < 0 ? -1 : 0));
                }
            }
        // groove walls tilt the normal toward the scratch axis
        const Vec2 perp{-dir.y, dir.x};
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const double cov = coverage[i];
                if (cov <= 0) continue;
                out.roughness.at(x, y, 0) = lerpf(out.roughness.at(x, y, 0), kScratchRoughness, cov);
                store_albedo(out.albedo, x, y, decode_albedo(out.albedo, x, y) * (1.0 - s.depth * cov));
                if (side[i] != 0) {
                    Vec3 n{out.normal.at(x, y, 0) * 2.0 - 1.0, out.normal.at(x, y, 1) * 2.0 - 1.0,
                           out.normal.at(x, y, 2) * 2.0 - 1.0};
                    const double angle = s.depth * cov * (kPi / 3.0);
                    const double k = -side[i] * std::tan(angle) * std::max(n.z, 0.1);
                    n = normalize(n + Vec3(perp.x * k, perp.y * k, 0.0));
                    for (int c = 0; c < 3; ++c) out.normal.at(x, y, c) = static_cast<float>(n[c] * 0.5 + 0.5);
                }
            }
    }
    return out;
}

MaterialMaps apply_scratches(const MaterialMaps &mat, int count, Interval width_px, Interval depth,
                             RandomStream &rng, Interval length_uv) {
    if (count < 0) throw std::invalid_argument("apply_scratches: negative count");
    std::vector<ScratchSegment> segs;
    segs.reserve(count);
    for (int i = 0; i < count; ++i) {
        ScratchSegment s;
        s.start = {rng.uniform(), rng.uniform()};
        const double angle = rng.uniform(0.0, kPi);
        const double len = rng.uniform(length_uv.lo, length_uv.hi);
        s.end = s.start + Vec2{std::cos(angle), std::sin(angle)} * len;
        s.width_px = rng.uniform(width_px.lo, width_px.hi);
        s.depth = rng.uniform(depth.lo, depth.hi);
        segs.push_back(s);
    }
    return draw_scratches(mat, segs);
}

MaterialMaps apply_polish_lines(const MaterialMaps &mat, double direction, double anisotropy,
                                const NoiseParams &params, double strength) {
    if (anisotropy < 1) throw std::invalid_argument("apply_polish_lines: anisotropy must be >= 1");
    if (strength == 0) return mat;
    params.validate();
    const int w = std::max(mat.albedo.width(), mat.roughness.width());
    const int h = std::max(mat.albedo.height(), mat.roughness.height());
    MaterialMaps out = mat;
    out.roughness = mat.roughness.resized(w, h);
    const SimplexNoise noise(params.seed);
    const double c = std::cos(direction), s = std::sin(direction);
    parallel_for(0, h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const double u = (x + 0.5) / w, v = (y + 0.5) / h;
            const double along = c * u + s * v;
            const double across = -s * u + c * v;
            const double n = fbm_with(noise, along, across * anisotropy, params);
            out.roughness.at(x, y, 0) = static_cast<float>(clamp01(out.roughness.at(x, y, 0) + strength * n));
        }
    });
    return out;
}

Vec3 rgb_to_hsv(const Vec3 &rgb) {
    const double mx = max_component(rgb);
    const double mn = std::min({rgb.x, rgb.y, rgb.z});
    const double delta = mx - mn;
    double h = 0;
    if (delta > 0) {
        if (mx == rgb.x)
            h = 60.0 * std::fmod((rgb.y - rgb.z) / delta, 6.0);
        else if (mx == rgb.y)
            h = 60.0 * ((rgb.z - rgb.x) / delta + 2.0);
        else
            h = 60.0 * ((rgb.x - rgb.y) / delta + 4.0);
        if (h < 0) h += 360.0;
    }
    const double s = mx > 0 ? delta / mx : 0.0;
    return {h, s, mx};
}

Vec3 hsv_to_rgb(const Vec3 &hsv) {
    const double h = hsv.x, s = hsv.y, v = hsv.z;
    const double c = v * s;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    Vec3 rgb;
    if (hp < 1) rgb = {c, x, 0};
    else if (hp < 2) rgb = {x, c, 0};
    else if (hp < 3) rgb = {0, c, x};
    else if (hp < 4) rgb = {0, x, c};
    else if (hp < 5) rgb = {x, 0, c};
    else rgb = {c, 0, x};
    const double m = v - c;
    return rgb + Vec3(m);
}

TextureMap hsv_shift(const TextureMap &map, double dh, double ds, double dv) {
    if (map.channels() < 3) throw std::invalid_argument("hsv_shift: map needs RGB channels");
    if (dh == 0 && ds == 0 && dv == 0) return map;
    TextureMap out = map;
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x) {
            Vec3 hsv = rgb_to_hsv({map.at(x, y, 0), map.at(x, y, 1), map.at(x, y, 2)});
            hsv.x = std::fmod(hsv.x + dh, 360.0);
            if (hsv.x < 0) hsv.x += 360.0;
            hsv.y = clamp01(hsv.y + ds);
            hsv.z = clamp01(hsv.z + dv);
            const Vec3 rgb = hsv_to_rgb(hsv);
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = static_cast<float>(rgb[c]);
        }
    return out;
}

}  // namespace cadsynth
