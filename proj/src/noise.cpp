#include "cadsynth/noise.hpp"

#include <memory>
#include <numeric>

#include "cadsynth/errors.hpp"
#include "cadsynth/parallel.hpp"
#include "cadsynth/random.hpp"

namespace cadsynth {

namespace {

constexpr double kF2 = 0.36602540378443864676;  // (sqrt(3) - 1) / 2
constexpr double kG2 = 0.21132486540518711775;  // (3 - sqrt(3)) / 6

constexpr int kGrad[12][2] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}, {1, 0}, {-1, 0},
                              {1, 0}, {-1, 0}, {0, 1},  {0, -1},  {0, 1}, {0, -1}};

inline double corner(int g, double x, double y) {
    double t = 0.5 - x * x - y * y;
    if (t < 0) return 0.0;
    t *= t;
    return t * t * (kGrad[g][0] * x + kGrad[g][1] * y);
}

}  // namespace

void NoiseParams::validate() const {
    if (octaves < 1) throw SpecError("noise octaves must be >= 1");
    if (!(lacunarity > 1)) throw SpecError("noise lacunarity must be > 1");
    if (!(gain > 0 && gain < 1)) throw SpecError("noise gain must be in (0,1)");
    // thresholds slightly outside [-1,1] force an empty or full mask
    if (!std::isfinite(threshold) || std::abs(threshold) > 2.0)
        throw SpecError("noise threshold must lie in [-2,2]");
    if (!(frequency > 0)) throw SpecError("noise frequency must be > 0");
}

SimplexNoise::SimplexNoise(std::uint64_t seed) {
    std::array<std::uint8_t, 256> p;
    std::iota(p.begin(), p.end(), 0);
    RandomStream rng = RandomStream(seed).child(0x5e1f);
    for (int i = 255; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, i));
        std::swap(p[i], p[j]);
    }
    for (int i = 0; i < 512; ++i) perm_[i] = p[i & 255];
}

double SimplexNoise::operator()(double x, double y) const {
    const double s = (x + y) * kF2;
    const auto i = static_cast<long long>(std::floor(x + s));
    const auto j = static_cast<long long>(std::floor(y + s));
    const double t = static_cast<double>(i + j) * kG2;
    const double x0 = x - (static_cast<double>(i) - t);
    const double y0 = y - (static_cast<double>(j) - t);
    const int i1 = x0 > y0 ? 1 : 0;
    const int j1 = 1 - i1;
    const double x1 = x0 - i1 + kG2, y1 = y0 - j1 + kG2;
    const double x2 = x0 - 1.0 + 2.0 * kG2, y2 = y0 - 1.0 + 2.0 * kG2;
    const int ii = static_cast<int>(i & 255), jj = static_cast<int>(j & 255);
    const int g0 = perm_[ii + perm_[jj]] % 12;
    const int g1 = perm_[ii + i1 + perm_[jj + j1]] % 12;
    const int g2 = perm_[ii + 1 + perm_[jj + 1]] % 12;
    const double n = 70.0 * (corner(g0, x0, y0) + corner(g1, x1, y1) + corner(g2, x2, y2));
    return std::clamp(n, -1.0, 1.0);
}

double simplex2(double x, double y, std::uint64_t seed) {
    thread_local std::unique_ptr<SimplexNoise> cached;
    thread_local std::uint64_t cached_seed = 0;
    if (!cached || cached_seed != seed) {
        cached = std::make_unique<SimplexNoise>(seed);
        cached_seed = seed;
    }
    return (*cached)(x, y);
}

double fbm(double x, double y, const NoiseParams &p) {
    const SimplexNoise noise(p.seed);
    return fbm_with(noise, x, y, p);
}

TextureMap defect_mask(int width, int height, const NoiseParams &params) {
    params.validate();
    TextureMap mask(width, height, 1, ColorSpace::linear);
    const SimplexNoise noise(params.seed);
    parallel_for(0, height, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const double f = fbm_with(noise, (x + 0.5) / width, (y + 0.5) / height, params);
            mask.at(x, y, 0) =
                static_cast<float>(smoothstep(-kMaskBandHalfWidth, kMaskBandHalfWidth, f - params.threshold));
        }
    });
    return mask;
}

double mask_coverage(const TextureMap &mask) {
    double sum = 0;
    for (float v : mask.data()) sum += v;
    return mask.empty() ? 0.0 : sum / static_cast<double>(mask.data().size());
}

}  // namespace cadsynth
