#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace cadsynth {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInvPi = std::numbers::inv_pi;

struct Vec2 {
    double x = 0, y = 0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2 &) const = default;
};

struct Vec3 {
    double x = 0, y = 0, z = 0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
    constexpr explicit Vec3(double s) : x(s), y(s), z(s) {}

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double &operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(const Vec3 &o) const { return {x * o.x, y * o.y, z * o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 &operator+=(const Vec3 &o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3 &operator*=(const Vec3 &o) {
        x *= o.x;
        y *= o.y;
        z *= o.z;
        return *this;
    }
    constexpr Vec3 &operator*=(double s) {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }
    constexpr bool operator==(const Vec3 &) const = default;
};

constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }

constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double length(const Vec3 &v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalize(const Vec3 &v) { return v / length(v); }

constexpr Vec3 min(const Vec3 &a, const Vec3 &b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}

constexpr Vec3 max(const Vec3 &a, const Vec3 &b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

constexpr Vec3 lerp(const Vec3 &a, const Vec3 &b, double t) { return a + (b - a) * t; }

constexpr double max_component(const Vec3 &v) { return std::max({v.x, v.y, v.z}); }

/// Rec. 709 luminance of a linear RGB triple.
constexpr double luminance(const Vec3 &c) { return 0.2126 * c.x + 0.7152 * c.y + 0.0722 * c.z; }

inline bool is_finite(const Vec3 &v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static constexpr Mat3 identity() { return {}; }
    static constexpr Mat3 from_rows(const Vec3 &r0, const Vec3 &r1, const Vec3 &r2) {
        return Mat3{{r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z}};
    }

    constexpr double operator()(int r, int c) const { return m[r * 3 + c]; }
    constexpr double &operator()(int r, int c) { return m[r * 3 + c]; }

    constexpr Vec3 row(int r) const { return {m[r * 3], m[r * 3 + 1], m[r * 3 + 2]}; }
    constexpr Vec3 col(int c) const { return {m[c], m[3 + c], m[6 + c]}; }

    constexpr Vec3 operator*(const Vec3 &v) const { return {dot(row(0), v), dot(row(1), v), dot(row(2), v)}; }

    constexpr Mat3 operator*(const Mat3 &o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = dot(row(i), o.col(j));
        return r;
    }

    constexpr Mat3 transposed() const {
        return Mat3{{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
    }

    constexpr double determinant() const { return dot(row(0), cross(row(1), row(2))); }

    constexpr bool operator==(const Mat3 &) const = default;
};

/// Largest absolute entry of R*R^T - I.
inline double orthonormality_error(const Mat3 &r) {
    const Mat3 p = r * r.transposed();
    double err = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) err = std::max(err, std::abs(p(i, j) - (i == j ? 1.0 : 0.0)));
    return err;
}

inline bool is_rotation(const Mat3 &r, double tol = 1e-6) {
    return orthonormality_error(r) <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

/// x' = R x + t. Translation in meters.
struct RigidTransform {
    Mat3 rotation;
    Vec3 translation;

    static constexpr RigidTransform identity() { return {}; }

    constexpr Vec3 apply(const Vec3 &p) const { return rotation * p + translation; }
    constexpr Vec3 apply_vector(const Vec3 &v) const { return rotation * v; }

    /// (this ∘ other)(p) = this(other(p))
    constexpr RigidTransform operator*(const RigidTransform &other) const {
        return {rotation * other.rotation, rotation * other.translation + translation};
    }

    constexpr RigidTransform inverse() const {
        const Mat3 rt = rotation.transposed();
        return {rt, -(rt * translation)};
    }

    constexpr bool operator==(const RigidTransform &) const = default;
};

struct Aabb {
    Vec3 lo{std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity()};

    constexpr void expand(const Vec3 &p) {
        lo = min(lo, p);
        hi = max(hi, p);
    }
    constexpr void expand(const Aabb &b) {
        lo = min(lo, b.lo);
        hi = max(hi, b.hi);
    }
    constexpr bool empty() const { return lo.x > hi.x || lo.y > hi.y || lo.z > hi.z; }
    constexpr Vec3 center() const { return (lo + hi) * 0.5; }
    constexpr Vec3 extent() const { return hi - lo; }
    constexpr bool contains(const Aabb &b) const {
        return lo.x <= b.lo.x && lo.y <= b.lo.y && lo.z <= b.lo.z && hi.x >= b.hi.x && hi.y >= b.hi.y &&
               hi.z >= b.hi.z;
    }
    constexpr bool overlaps(const Aabb &b) const {
        return lo.x <= b.hi.x && b.lo.x <= hi.x && lo.y <= b.hi.y && b.lo.y <= hi.y && lo.z <= b.hi.z &&
               b.lo.z <= hi.z;
    }
    constexpr int largest_axis() const {
        const Vec3 e = extent();
        return (e.x >= e.y && e.x >= e.z) ? 0 : (e.y >= e.z ? 1 : 2);
    }
};

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0, hi = 0;

    constexpr bool ordered() const { return lo <= hi; }
    constexpr bool contains(double v) const { return v >= lo && v <= hi; }
    constexpr bool operator==(const Interval &) const = default;
};

/// Builds an orthonormal basis (t, b, n) around unit vector n.
inline void orthonormal_basis(const Vec3 &n, Vec3 &t, Vec3 &b) {
    const double sign = std::copysign(1.0, n.z);
    const double a = -1.0 / (sign + n.z);
    const double c = n.x * n.y * a;
    t = {1.0 + sign * n.x * n.x * a, sign * c, -sign * n.x};
    b = {c, sign + n.y * n.y * a, -n.y};
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline double smoothstep(double e0, double e1, double x) {
    const double t = clamp01((x - e0) / (e1 - e0));
    return t * t * (3.0 - 2.0 * t);
}

}  // namespace cadsynth
