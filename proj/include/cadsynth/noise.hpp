#pragma once

#include <array>
#include <cstdint>

#include "cadsynth/texture.hpp"

namespace cadsynth {

struct NoiseParams {
    std::uint64_t seed = 0;
    double frequency = 4.0;  // cycles per UV unit
    int octaves = 4;
    double lacunarity = 2.0;
    double gain = 0.5;
    double threshold = 0.0;

    /// Throws SpecError when a field leaves its domain.
    void validate() const;
};

/// 2D simplex gradient noise over a permutation table shuffled by `seed`.
class SimplexNoise {
public:
    explicit SimplexNoise(std::uint64_t seed);

    /// In [-1, 1], continuous, deterministic in (x, y, seed).
    double operator()(double x, double y) const;

    const std::array<std::uint8_t, 512> &permutation() const { return perm_; }

private:
    std::array<std::uint8_t, 512> perm_;
};

double simplex2(double x, double y, std::uint64_t seed);

/// Normalized octave sum: Σ gainⁱ n(x·freq·lacⁱ, y·freq·lacⁱ) / Σ gainⁱ.
template <typename Noise>
double fbm_with(const Noise &noise, double x, double y, const NoiseParams &p) {
    double sum = 0, norm = 0, amp = 1, scale = p.frequency;
    for (int i = 0; i < p.octaves; ++i) {
        sum += amp * noise(x * scale, y * scale);
        norm += amp;
        amp *= p.gain;
        scale *= p.lacunarity;
    }
    return sum / norm;
}

double fbm(double x, double y, const NoiseParams &p);

/// Band half-width of the mask transition around the threshold (full band 0.05).
inline constexpr double kMaskBandHalfWidth = 0.025;

/// Single-channel {0,1} mask with a smooth band around params.threshold, sampled at texel centers in UV.
TextureMap defect_mask(int width, int height, const NoiseParams &params);

/// Fraction of mask mass (mean texel value).
double mask_coverage(const TextureMap &mask);

}  // namespace cadsynth
