#pragma once

#include <span>

#include "cadsynth/noise.hpp"
#include "cadsynth/random.hpp"
#include "cadsynth/scene.hpp"

namespace cadsynth {

/// Roughness rust converges to.
inline constexpr double kRustRoughness = 0.95;
/// Roughness inside a scratch groove.
inline constexpr double kScratchRoughness = 0.9;

/// Blends rust into `mat` with per-texel weight `mask` (resampled bilinearly to the albedo size when
/// needed). Texels with zero weight are left untouched. Rust colors are linear RGB.
MaterialMaps apply_rust(const MaterialMaps &mat, const TextureMap &mask, const Vec3 &rust_color_a,
                        const Vec3 &rust_color_b, const NoiseParams &color_noise);

/// One straight scratch; endpoints in UV, width in albedo pixels, depth in [0,1].
struct ScratchSegment {
    Vec2 start;
    Vec2 end;
    double width_px = 1;
    double depth = 0.5;
};

/// Rasterizes anti-aliased scratches. Segments wrap toroidally when the albedo wraps with `repeat`.
MaterialMaps draw_scratches(const MaterialMaps &mat, std::span<const ScratchSegment> segments);

/// `count` random segments: uniform start, uniform angle, length/width/depth uniform in their ranges.
MaterialMaps apply_scratches(const MaterialMaps &mat, int count, Interval width_px, Interval depth,
                             RandomStream &rng, Interval length_uv = {0.1, 0.5});

/// Roughness += strength * fbm of coordinates rotated by `direction` and scaled (1, anisotropy), clamped to
/// [0,1]. Streaks run along `direction` (radians from +u toward +v).
MaterialMaps apply_polish_lines(const MaterialMaps &mat, double direction, double anisotropy,
                                const NoiseParams &params, double strength = 0.25);

Vec3 rgb_to_hsv(const Vec3 &rgb);  // h in degrees [0,360)
Vec3 hsv_to_rgb(const Vec3 &hsv);

/// Per-texel hue rotation (degrees) and clamped saturation/value offsets on the first three channels.
TextureMap hsv_shift(const TextureMap &map, double dh, double ds, double dv);

}  // namespace cadsynth
