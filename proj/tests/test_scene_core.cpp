#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "cadsynth/camera.hpp"
#include "cadsynth/errors.hpp"
#include "cadsynth/mesh.hpp"
#include "cadsynth/random.hpp"
#include "cadsynth/randomize.hpp"
#include "test_support.hpp"

using namespace cadsynth;
using cadsynth::testing::TempDir;
using cadsynth::testing::write_file;

namespace {

double brute_area(const Mesh &m) {
    double a = 0;
    for (const auto &t : m.triangles) {
        const Vec3 &p = m.vertices[t[0]], &q = m.vertices[t[1]], &r = m.vertices[t[2]];
        const double ux = q.x - p.x, uy = q.y - p.y, uz = q.z - p.z;
        const double vx = r.x - p.x, vy = r.y - p.y, vz = r.z - p.z;
        const double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
        a += 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
    }
    return a;
}

const char *kCubeObj = R"(# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 4 8 7 3
f 1 5 8 4
f 2 3 7 6
)";

}  // namespace

TEST(Mesh, SingleTriangleObj) {
    TempDir dir;
    write_file(dir / "tri.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    const Mesh m = load_mesh(dir / "tri.obj");
    ASSERT_EQ(m.vertices.size(), 3u);
    ASSERT_EQ(m.triangles.size(), 1u);
    for (const Vec3 &n : m.normals) {
        EXPECT_NEAR(n.x, 0, 1e-12);
        EXPECT_NEAR(n.y, 0, 1e-12);
        EXPECT_NEAR(n.z, 1, 1e-12);
    }
    for (const Vec2 &uv : m.uvs) EXPECT_EQ(uv, Vec2(0, 0));
}

TEST(Mesh, PlyMatchesObj) {
    TempDir dir;
    write_file(dir / "tri.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    write_file(dir / "tri.ply",
               "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
               "element face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
    EXPECT_EQ(load_mesh(dir / "tri.obj"), load_mesh(dir / "tri.ply"));
}

TEST(Mesh, CubeAreaMatchesBruteForceSum) {
    TempDir dir;
    write_file(dir / "cube.obj", kCubeObj);
    const Mesh m = load_mesh(dir / "cube.obj");
    EXPECT_TRUE(m.vertices.size() == 8 || m.vertices.size() == 24);
    EXPECT_EQ(m.triangles.size(), 12u);
    EXPECT_NEAR(brute_area(m), 6.0, 1e-6);
    EXPECT_NEAR(m.surface_area(), 6.0, 1e-6);
}

TEST(Mesh, WriteReadRoundTripIsExact) {
    TempDir dir;
    const Mesh s = make_sphere(0.37, 13, 7);
    for (PlyEncoding enc : {PlyEncoding::ascii, PlyEncoding::binary_little_endian}) {
        write_ply(s, dir / "s.ply", enc);
        const Mesh back = load_mesh(dir / "s.ply");
        EXPECT_EQ(back.vertices, s.vertices);
        EXPECT_EQ(back.triangles, s.triangles);
    }
}

TEST(Mesh, ParseErrorsCarryLineNumbers) {
    TempDir dir;
    write_file(dir / "bad.obj", "v 0 0 0\nv 1 0 0\nv 0 one 0\nf 1 2 3\n");
    try {
        load_mesh(dir / "bad.obj");
        FAIL() << "expected FormatError";
    } catch (const FormatError &e) {
        EXPECT_EQ(e.line(), 3);
    }
    write_file(dir / "range.obj", "v 0 0 0\nv 1 0 0\nf 1 2 9\n");
    EXPECT_THROW(load_mesh(dir / "range.obj"), FormatError);
    EXPECT_THROW(load_mesh(dir / "missing.obj"), IoError);
}

TEST(Mesh, NonConvexPolygonRejected) {
    TempDir dir;
    // arrow-head quad, reflex vertex at (0.5, 0.3)
    write_file(dir / "arrow.obj", "v 0 0 0\nv 0.5 0.3 0\nv 1 0 0\nv 0.5 1 0\nf 1 2 3 4\n");
    EXPECT_THROW(load_mesh(dir / "arrow.obj"), FormatError);
}

TEST(Mesh, ValidateCatchesBrokenInvariants) {
    Mesh m = make_box(Vec3(0.5));
    EXPECT_NO_THROW(m.validate());
    m.triangles.push_back({0, 1, 999});
    EXPECT_THROW(m.validate(), FormatError);
}

TEST(Camera, SphericalExamples) {
    const Vec3 a = spherical_to_cartesian(0.0, 1.234, 2.0, {});
    EXPECT_NEAR(a.x, 0, 1e-12);
    EXPECT_NEAR(a.y, 2, 1e-12);
    EXPECT_NEAR(a.z, 0, 1e-12);
    const Vec3 b = spherical_to_cartesian(kPi / 2, 0.0, 1.0, {1, 0, 0});
    EXPECT_NEAR(b.x, 2, 1e-12);
    EXPECT_NEAR(b.y, 0, 1e-12);
    EXPECT_NEAR(b.z, 0, 1e-12);
}

TEST(Camera, SphericalNormProperty) {
    RandomStream rng(11);
    const Vec3 c{0.3, -1.2, 4.0};
    for (int i = 0; i < 10000; ++i) {
        const double r = rng.uniform(0.1, 5.0);
        const Vec3 p = spherical_to_cartesian(rng.uniform(0, kPi), rng.uniform(0, 2 * kPi), r, c);
        ASSERT_NEAR(length(p - c), r, 1e-9);
    }
}

TEST(Camera, LookAtCanonicalFrame) {
    // upright image: camera +Y is world down, so +X is world -X
    const RigidTransform t = look_at({0, 0, -1}, {}, {0, 1, 0});
    EXPECT_TRUE(is_rotation(t.rotation));
    const Vec3 fwd = t.rotation.row(2);
    EXPECT_NEAR(fwd.z, 1, 1e-12);
    EXPECT_NEAR(t.rotation.row(1).y, -1, 1e-12);
    EXPECT_NEAR(t.translation.x, 0, 1e-12);
    EXPECT_NEAR(t.translation.y, 0, 1e-12);
    EXPECT_NEAR(t.translation.z, 1, 1e-12);
    // world up projects above the image center
    const Vec2 up = project_point(CameraIntrinsics::from_fov(64, 64, 1.0), t.apply({0, 0.1, 0}));
    EXPECT_LT(up.y, 31.5);
}

TEST(Camera, LookAtFromAbove) {
    const RigidTransform t = look_at({0, 5, 0}, {}, {0, 1, 0});
    const Vec3 o = t.apply({});
    EXPECT_NEAR(o.x, 0, 1e-12);
    EXPECT_NEAR(o.y, 0, 1e-12);
    EXPECT_NEAR(o.z, 5, 1e-12);
    EXPECT_TRUE(is_rotation(t.rotation));
}

TEST(Camera, LookAtProperty) {
    RandomStream rng(5);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 e{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const Vec3 g{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const RigidTransform t = look_at(e, g, {0, 1, 0});
        ASSERT_TRUE(is_rotation(t.rotation));
        const Vec3 p = t.apply(g);
        ASSERT_NEAR(p.x, 0, 1e-9);
        ASSERT_NEAR(p.y, 0, 1e-9);
        ASSERT_NEAR(p.z, length(e - g), 1e-9);
    }
}

TEST(Camera, LookAtDegenerate) {
    EXPECT_THROW(look_at({1, 1, 1}, {1, 1, 1}, {0, 1, 0}), DegenerateViewError);
}

TEST(Camera, ProjectExamples) {
    CameraIntrinsics k{600, 600, 320, 240, 640, 480};
    const Vec2 c = project_point(k, {0, 0, 3.7});
    EXPECT_EQ(c, Vec2(320, 240));
    const Vec2 p = project_point(k, {0.1, 0, 1.0});
    EXPECT_NEAR(p.x, 380, 1e-12);
    EXPECT_NEAR(p.y, 240, 1e-12);
    EXPECT_THROW(project_point(k, {0, 0, 0}), BehindCameraError);
    EXPECT_THROW(project_point(k, {0, 0, -1}), BehindCameraError);
}

TEST(Camera, ProjectMatchesHomogeneousMatrixOracle) {
    const CameraIntrinsics k{612.5, 598.25, 311.0, 247.5, 640, 480};
    const RigidTransform w2c = look_at({0.4, 0.9, -1.3}, {0.05, 0.02, 0.0}, {0, 1, 0});
    // P = K [R | t] as a 3x4 matrix
    std::array<std::array<double, 4>, 3> rt{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) rt[r][c] = w2c.rotation(r, c);
        rt[r][3] = w2c.translation[r];
    }
    const double kk[3][3] = {{k.fx, 0, k.cx}, {0, k.fy, k.cy}, {0, 0, 1}};
    double p[3][4] = {};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
            for (int i = 0; i < 3; ++i) p[r][c] += kk[r][i] * rt[i][c];
    for (int corner = 0; corner < 8; ++corner) {
        const double x[4] = {corner & 1 ? 0.1 : -0.1, corner & 2 ? 0.1 : -0.1, corner & 4 ? 0.1 : -0.1, 1.0};
        double h[3] = {};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c) h[r] += p[r][c] * x[c];
        const Vec2 got = project_point(k, w2c.apply({x[0], x[1], x[2]}));
        EXPECT_NEAR(got.x, h[0] / h[2], 1e-6);
        EXPECT_NEAR(got.y, h[1] / h[2], 1e-6);
    }
}

TEST(Camera, ProjectionInvariantUnderRigidMotion) {
    RandomStream rng(77);
    const CameraIntrinsics k = CameraIntrinsics::from_fov(320, 240, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 e{rng.uniform(-2, 2), rng.uniform(0.5, 2), rng.uniform(-2, -1)};
        const Vec3 g{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
        const Vec3 u{0, 1, 0};
        const Vec3 p = g + Vec3(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05));
        RigidTransform m;
        m.rotation = sample_uniform_rotation(rng);
        m.translation = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const Vec2 a = project_point(k, look_at(e, g, u).apply(p));
        const Vec2 b = project_point(k, look_at(m.apply(e), m.apply(g), m.apply_vector(u)).apply(m.apply(p)));
        ASSERT_NEAR(a.x, b.x, 1e-6);
        ASSERT_NEAR(a.y, b.y, 1e-6);
    }
}

TEST(Camera, RayThroughPixelProjectsBack) {
    const CameraIntrinsics k{500, 480, 100.5, 60.25, 200, 120};
    for (double u : {0.0, 13.5, 100.5, 199.0})
        for (double v : {0.0, 60.25, 119.0}) {
            const Vec3 d = camera_ray_direction(k, u, v);
            EXPECT_NEAR(length(d), 1, 1e-12);
            const Vec2 p = project_point(k, d * 2.0);
            EXPECT_NEAR(p.x, u, 1e-9);
            EXPECT_NEAR(p.y, v, 1e-9);
        }
}

TEST(Transform, InverseAndComposition) {
    RandomStream rng(3);
    RigidTransform a, b;
    a.rotation = sample_uniform_rotation(rng);
    a.translation = {1, 2, 3};
    b.rotation = sample_uniform_rotation(rng);
    b.translation = {-0.5, 0.25, 4};
    const Vec3 p{0.3, -0.7, 1.1};
    const Vec3 q = (a * b).apply(p);
    const Vec3 r = a.apply(b.apply(p));
    EXPECT_NEAR(length(q - r), 0, 1e-12);
    EXPECT_NEAR(length(a.inverse().apply(a.apply(p)) - p), 0, 1e-12);
    EXPECT_TRUE(is_rotation((a * b).rotation));
}
