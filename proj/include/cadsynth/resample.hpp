#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "cadsynth/random.hpp"
#include "cadsynth/scene.hpp"
#include "cadsynth/texture.hpp"

namespace cadsynth {

struct Int2 {
    int x = 0, y = 0;
    constexpr Int2 operator+(Int2 o) const { return {x + o.x, y + o.y}; }
    constexpr Int2 operator-(Int2 o) const { return {x - o.x, y - o.y}; }
    constexpr bool operator==(const Int2 &) const = default;
};

struct ResampleOptions {
    int iterations = 15;
    int patch_size = 32;
    int radius0 = 8;
};

/// Radius used at iteration i: max(1, round(radius0 * 2^(-i/3))).
int scheduled_radius(int radius0, int iteration);

struct IterationStats;

/// Output grid of exemplar coordinates. Every source coordinate lies inside the exemplar.
class ResampleState {
public:
    ResampleState(std::shared_ptr<const TextureMap> exemplar, int out_w, int out_h, std::vector<Int2> source,
                  int radius0, bool decay_radius = true);

    const TextureMap &exemplar() const { return *exemplar_; }
    const std::shared_ptr<const TextureMap> &exemplar_ptr() const { return exemplar_; }
    int width() const { return width_; }
    int height() const { return height_; }
    int iteration() const { return iteration_; }
    int radius() const { return radius_; }
    int radius0() const { return radius0_; }
    bool decays() const { return decay_; }

    Int2 source(int x, int y) const { return source_[static_cast<std::size_t>(y) * width_ + x]; }
    const std::vector<Int2> &source_field() const { return source_; }

    /// Output texel (p) = exemplar(source(p)), all channels.
    TextureMap realize() const;
    /// Applies this source field to another map registered with the exemplar (scaled if sizes differ).
    TextureMap realize(const TextureMap &map) const;

    bool operator==(const ResampleState &o) const {
        return width_ == o.width_ && height_ == o.height_ && iteration_ == o.iteration_ && radius_ == o.radius_ &&
               source_ == o.source_;
    }

private:
    friend ResampleState resample_iterate(const ResampleState &, IterationStats *);
    friend ResampleState with_fixed_radius(const ResampleState &);

    std::shared_ptr<const TextureMap> exemplar_;
    int width_, height_;
    std::vector<Int2> source_;
    int iteration_ = 0;
    int radius0_;
    int radius_;
    bool decay_;
};

/// Returns the exemplar offset for output block (bx, by).
using BlockOffsetFn = std::function<Int2(int bx, int by)>;

/// Tiles the output with patch_size blocks, each copying a contiguous (toroidal) exemplar patch at a random
/// offset.
ResampleState resample_init(const TextureMap &exemplar, int out_w, int out_h, int patch_size, RandomStream &rng,
                            int radius0 = 8);
ResampleState resample_init(const TextureMap &exemplar, int out_w, int out_h, int patch_size,
                            const BlockOffsetFn &offsets, int radius0 = 8);

/// Σ over the (2r+1)² square of squared RGB distance between the current output around p and the exemplar
/// around `candidate`; both lookups wrap.
double neighborhood_difference(const ResampleState &state, Int2 p, Int2 candidate, int radius);

struct IterationStats {
    int radius = 0;
    double mean_previous_difference = 0;  // each pixel's current source, before the update
    double mean_chosen_difference = 0;    // the argmin that was adopted
    std::vector<double> previous_difference;
    std::vector<double> chosen_difference;
};

/// One synchronous update: every pixel picks, among its own source and the sources suggested by neighbors
/// within the current radius, the one with the lowest neighborhood difference (first wins ties).
ResampleState resample_iterate(const ResampleState &state, IterationStats *stats = nullptr);

/// Disables the radius schedule; the state keeps its current radius on every iteration.
ResampleState with_fixed_radius(const ResampleState &state);

TextureMap resample(const TextureMap &exemplar, int out_w, int out_h, const ResampleOptions &options,
                    RandomStream &rng, std::vector<IterationStats> *trace = nullptr);

/// Resamples with the albedo as exemplar and applies the same field to every map.
MaterialMaps resample_material(const MaterialMaps &mat, int out_w, int out_h, const ResampleOptions &options,
                               RandomStream &rng);

}  // namespace cadsynth
