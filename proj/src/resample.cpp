#include "cadsynth/resample.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "cadsynth/parallel.hpp"

namespace cadsynth {

namespace {

/// Packed RGB (single-channel maps are replicated) for fast neighborhood sums.
std::vector<float> rgb_plane(const TextureMap &t) {
    std::vector<float> out(t.texel_count() * 3);
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x) {
            const std::size_t i = (static_cast<std::size_t>(y) * t.width() + x) * 3;
            for (int c = 0; c < 3; ++c) out[i + c] = t.at(x, y, t.channels() >= 3 ? c : 0);
        }
    return out;
}

/// Difference kernel shared by the public query and the iteration so both produce identical values.
/// Stops early (returning a value >= bound) once the partial sum reaches `bound`.
double window_difference(const float *out_rgb, int ow, int oh, Int2 p, const float *ex_rgb, int ew, int eh,
                         Int2 cand, int r, double bound) {
    double sum = 0;
    for (int dy = -r; dy <= r; ++dy) {
        const std::size_t orow = static_cast<std::size_t>(wrap_index(p.y + dy, oh)) * ow;
        const std::size_t erow = static_cast<std::size_t>(wrap_index(cand.y + dy, eh)) * ew;
        for (int dx = -r; dx <= r; ++dx) {
            const float *a = out_rgb + (orow + wrap_index(p.x + dx, ow)) * 3;
            const float *b = ex_rgb + (erow + wrap_index(cand.x + dx, ew)) * 3;
            const double d0 = static_cast<double>(a[0]) - b[0];
            const double d1 = static_cast<double>(a[1]) - b[1];
            const double d2 = static_cast<double>(a[2]) - b[2];
            sum += d0 * d0 + d1 * d1 + d2 * d2;
        }
        if (sum >= bound) return sum;
    }
    return sum;
}

std::vector<float> realized_rgb(const ResampleState &s, const std::vector<float> &ex_rgb) {
    const int ew = s.exemplar().width();
    std::vector<float> out(static_cast<std::size_t>(s.width()) * s.height() * 3);
    for (int y = 0; y < s.height(); ++y)
        for (int x = 0; x < s.width(); ++x) {
            const Int2 src = s.source(x, y);
            const std::size_t si = (static_cast<std::size_t>(src.y) * ew + src.x) * 3;
            const std::size_t oi = (static_cast<std::size_t>(y) * s.width() + x) * 3;
            out[oi] = ex_rgb[si];
            out[oi + 1] = ex_rgb[si + 1];
            out[oi + 2] = ex_rgb[si + 2];
        }
    return out;
}

}  // namespace

int scheduled_radius(int radius0, int iteration) {
    const double r = std::round(radius0 * std::exp2(-iteration / 3.0));
    return std::max(1, static_cast<int>(r));
}

ResampleState::ResampleState(std::shared_ptr<const TextureMap> exemplar, int out_w, int out_h,
                             std::vector<Int2> source, int radius0, bool decay_radius)
    : exemplar_(std::move(exemplar)),
      width_(out_w),
      height_(out_h),
      source_(std::move(source)),
      radius0_(radius0),
      radius_(radius0),
      decay_(decay_radius) {
    if (!exemplar_ || exemplar_->empty()) throw std::invalid_argument("ResampleState: empty exemplar");
    if (radius0 < 1) throw std::invalid_argument("ResampleState: radius must be >= 1");
    if (source_.size() != static_cast<std::size_t>(out_w) * out_h)
        throw std::invalid_argument("ResampleState: source field size mismatch");
    for (Int2 &s : source_) s = {wrap_index(s.x, exemplar_->width()), wrap_index(s.y, exemplar_->height())};
}

TextureMap ResampleState::realize() const { return realize(*exemplar_); }

TextureMap ResampleState::realize(const TextureMap &map) const {
    TextureMap out(width_, height_, map.channels(), map.color_space(), map.wrap());
    const int ew = exemplar_->width(), eh = exemplar_->height();
    const bool same = map.width() == ew && map.height() == eh;
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) {
            Int2 s = source(x, y);
            if (!same) {
                s.x = std::min(map.width() - 1, static_cast<int>((s.x + 0.5) * map.width() / ew));
                s.y = std::min(map.height() - 1, static_cast<int>((s.y + 0.5) * map.height() / eh));
            }
            for (int c = 0; c < map.channels(); ++c) out.at(x, y, c) = map.at(s.x, s.y, c);
        }
    return out;
}

ResampleState resample_init(const TextureMap &exemplar, int out_w, int out_h, int patch_size, RandomStream &rng,
                            int radius0) {
    const int ew = exemplar.width(), eh = exemplar.height();
    return resample_init(
        exemplar, out_w, out_h, patch_size,
        [&](int, int) {
            const int ox = static_cast<int>(rng.uniform_int(0, ew - 1));
            const int oy = static_cast<int>(rng.uniform_int(0, eh - 1));
            return Int2{ox, oy};
        },
        radius0);
}

ResampleState resample_init(const TextureMap &exemplar, int out_w, int out_h, int patch_size,
                            const BlockOffsetFn &offsets, int radius0) {
    if (patch_size < 1) throw std::invalid_argument("resample_init: patch_size must be >= 1");
    if (out_w < 1 || out_h < 1) throw std::invalid_argument("resample_init: output size must be positive");
    std::vector<Int2> source(static_cast<std::size_t>(out_w) * out_h);
    const int bw = (out_w + patch_size - 1) / patch_size;
    const int bh = (out_h + patch_size - 1) / patch_size;
    // offsets are drawn in row-major block order so the rng consumption is fixed
    for (int by = 0; by < bh; ++by)
        for (int bx = 0; bx < bw; ++bx) {
            const Int2 off = offsets(bx, by);
            for (int y = by * patch_size; y < std::min(out_h, (by + 1) * patch_size); ++y)
                for (int x = bx * patch_size; x < std::min(out_w, (bx + 1) * patch_size); ++x)
                    source[static_cast<std::size_t>(y) * out_w + x] =
                        off + Int2{x - bx * patch_size, y - by * patch_size};
        }
    return ResampleState(std::make_shared<const TextureMap>(exemplar), out_w, out_h, std::move(source), radius0);
}

double neighborhood_difference(const ResampleState &state, Int2 p, Int2 candidate, int radius) {
    if (radius < 1) throw std::invalid_argument("neighborhood_difference: radius must be >= 1");
    const std::vector<float> ex = rgb_plane(state.exemplar());
    const std::vector<float> out = realized_rgb(state, ex);
    const TextureMap &e = state.exemplar();
    return window_difference(out.data(), state.width(), state.height(), p, ex.data(), e.width(), e.height(),
                             candidate, radius, std::numeric_limits<double>::infinity());
}

ResampleState resample_iterate(const ResampleState &state, IterationStats *stats) {
    const TextureMap &e = state.exemplar();
    const int ew = e.width(), eh = e.height();
    const int w = state.width(), h = state.height();
    const int r = state.radius();
    const std::vector<float> ex = rgb_plane(e);
    const std::vector<float> cur = realized_rgb(state, ex);

    ResampleState next = state;
    std::vector<double> prev_diff(static_cast<std::size_t>(w) * h), chosen_diff(prev_diff.size());
    parallel_for(
        0, h,
        [&](int y) {
            std::vector<Int2> tried;
            tried.reserve(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1) + 1);
            for (int x = 0; x < w; ++x) {
                const Int2 p{x, y};
                tried.clear();
                Int2 best = state.source(x, y);
                double best_d = window_difference(cur.data(), w, h, p, ex.data(), ew, eh, best, r,
                                                  std::numeric_limits<double>::infinity());
                const double own_d = best_d;
                tried.push_back(best);
                for (int oy = -r; oy <= r; ++oy)
                    for (int ox = -r; ox <= r; ++ox) {
                        const Int2 q_src = state.source(wrap_index(x + ox, w), wrap_index(y + oy, h));
                        const Int2 cand{wrap_index(q_src.x - ox, ew), wrap_index(q_src.y - oy, eh)};
                        if (std::find(tried.begin(), tried.end(), cand) != tried.end()) continue;
                        tried.push_back(cand);
                        const double d = window_difference(cur.data(), w, h, p, ex.data(), ew, eh, cand, r, best_d);
                        if (d < best_d) {
                            best_d = d;
                            best = cand;
                        }
                    }
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                next.source_[i] = best;
                prev_diff[i] = own_d;
                chosen_diff[i] = best_d;
            }
        });

    next.iteration_ = state.iteration_ + 1;
    next.radius_ = state.decay_ ? scheduled_radius(state.radius0_, next.iteration_) : state.radius_;
    if (stats) {
        stats->radius = r;
        double sp = 0, sc = 0;
        for (std::size_t i = 0; i < prev_diff.size(); ++i) {
            sp += prev_diff[i];
            sc += chosen_diff[i];
        }
        stats->mean_previous_difference = sp / static_cast<double>(prev_diff.size());
        stats->mean_chosen_difference = sc / static_cast<double>(prev_diff.size());
        stats->previous_difference = std::move(prev_diff);
        stats->chosen_difference = std::move(chosen_diff);
    }
    return next;
}

ResampleState with_fixed_radius(const ResampleState &state) {
    ResampleState s = state;
    s.decay_ = false;
    return s;
}

TextureMap resample(const TextureMap &exemplar, int out_w, int out_h, const ResampleOptions &options,
                    RandomStream &rng, std::vector<IterationStats> *trace) {
    if (options.iterations < 0) throw std::invalid_argument("resample: iterations must be >= 0");
    ResampleState state = resample_init(exemplar, out_w, out_h, options.patch_size, rng, options.radius0);
    for (int i = 0; i < options.iterations; ++i) {
        IterationStats st;
        state = resample_iterate(state, trace ? &st : nullptr);
        if (trace) trace->push_back(std::move(st));
    }
    return state.realize();
}

MaterialMaps resample_material(const MaterialMaps &mat, int out_w, int out_h, const ResampleOptions &options,
                               RandomStream &rng) {
    ResampleState state = resample_init(mat.albedo, out_w, out_h, options.patch_size, rng, options.radius0);
    for (int i = 0; i < options.iterations; ++i) state = resample_iterate(state);
    MaterialMaps out = mat;
    out.albedo = state.realize();
    out.normal = state.realize(mat.normal);
    out.roughness = state.realize(mat.roughness);
    out.metallic = state.realize(mat.metallic);
    out.displacement = state.realize(mat.displacement);
    return out;
}

}  // namespace cadsynth
