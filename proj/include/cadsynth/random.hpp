#pragma once

#include <cstdint>
#include <initializer_list>

namespace cadsynth {

/// 64-bit finalizer (splitmix64 / Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) { return mix64(h ^ mix64(v)); }

/// Counter-based stream: value i is a hash of (key, path, i), so a stream's output depends only on its
/// identity and how many values were drawn from it, never on thread scheduling.
class RandomStream {
public:
    explicit constexpr RandomStream(std::uint64_t key) : key_(key), state_(mix64(key)) {}

    /// Sub-stream identified by appending `id` to this stream's path.
    constexpr RandomStream child(std::uint64_t id) const {
        RandomStream s(*this);
        s.state_ = hash_combine(state_, id);
        s.counter_ = 0;
        return s;
    }
    constexpr RandomStream child(std::initializer_list<std::uint64_t> ids) const {
        RandomStream s(*this);
        for (auto id : ids) s = s.child(id);
        return s;
    }

    constexpr std::uint64_t next_u64() { return mix64(state_ ^ mix64(counter_++ + 0x632be59bd9b4e019ULL)); }

    /// Uniform in [0, 1) with 53 random bits.
    constexpr double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in the closed interval [lo, hi]; returns lo exactly when lo == hi.
    constexpr double uniform(double lo, double hi) {
        const double u = uniform();
        if (lo == hi) return lo;
        const double v = lo + (hi - lo) * u;
        return v > hi ? hi : v;
    }

    /// Uniform integer in [lo, hi] (inclusive), unbiased.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t state_;
    std::uint64_t counter_ = 0;
};

}  // namespace cadsynth
