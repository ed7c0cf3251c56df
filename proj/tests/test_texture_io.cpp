#include <gtest/gtest.h>

#include <cmath>

#include "cadsynth/errors.hpp"
#include "cadsynth/image_io.hpp"
#include "cadsynth/random.hpp"
#include "cadsynth/scene.hpp"
#include "cadsynth/texture.hpp"
#include "test_support.hpp"

using namespace cadsynth;
using cadsynth::testing::TempDir;
using cadsynth::testing::write_file;

TEST(Texture, SrgbTransferRoundTrip) {
    EXPECT_DOUBLE_EQ(srgb_to_linear(0.0), 0.0);
    EXPECT_NEAR(srgb_to_linear(1.0), 1.0, 1e-12);
    EXPECT_NEAR(srgb_to_linear(0.5), std::pow((0.5 + 0.055) / 1.055, 2.4), 1e-12);
    EXPECT_NEAR(srgb_to_linear(0.02), 0.02 / 12.92, 1e-12);
    for (int i = 0; i <= 100; ++i) {
        const double v = i / 100.0;
        EXPECT_NEAR(linear_to_srgb(srgb_to_linear(v)), v, 1e-12);
    }
}

TEST(Texture, SampleAtTexelCentersIsExact) {
    TextureMap t(4, 3, 1);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) t.at(x, y, 0) = static_cast<float>(x + 10 * y);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) EXPECT_FLOAT_EQ(t.sample((x + 0.5) / 4, (y + 0.5) / 3, 0), x + 10 * y);
    // halfway between texel 1 and 2
    EXPECT_NEAR(t.sample(2.0 / 4, 0.5 / 3, 0), 1.5, 1e-6);
}

TEST(Texture, WrapModes) {
    TextureMap t(2, 1, 1);
    t.at(0, 0, 0) = 1;
    t.at(1, 0, 0) = 3;
    EXPECT_FLOAT_EQ(t.fetch(2, 0, 0), 1);
    EXPECT_FLOAT_EQ(t.fetch(-1, 0, 0), 3);
    t.set_wrap(WrapMode::clamp);
    EXPECT_FLOAT_EQ(t.fetch(2, 0, 0), 3);
    EXPECT_FLOAT_EQ(t.fetch(-1, 0, 0), 1);
}

TEST(Texture, LinearSampleDecodesSrgb) {
    const TextureMap t = TextureMap::constant_rgb({0.5, 0.5, 0.5}, ColorSpace::srgb);
    const Vec3 c = t.sample_linear_rgb(0.3, 0.7);
    EXPECT_NEAR(c.x, srgb_to_linear(0.5), 1e-6);
}

TEST(ImageIo, Png8RoundTrip) {
    TempDir dir;
    Image8 img(7, 5, 3);
    RandomStream rng(1);
    for (auto &p : img.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    write_png(dir / "a.png", img);
    EXPECT_EQ(read_png8(dir / "a.png"), img);
    EXPECT_THROW(read_png16(dir / "a.png"), FormatError);
}

TEST(ImageIo, Png16RoundTrip) {
    TempDir dir;
    Image16 img(9, 4, 1);
    RandomStream rng(2);
    for (auto &p : img.pixels) p = static_cast<std::uint16_t>(rng.uniform_int(0, 65535));
    write_png(dir / "d.png", img);
    EXPECT_EQ(read_png16(dir / "d.png"), img);
}

TEST(ImageIo, PngTextureNormalized) {
    TempDir dir;
    Image8 img(2, 1, 3);
    img.at(0, 0, 0) = 255;
    img.at(1, 0, 2) = 51;
    write_png(dir / "t.png", img);
    const TextureMap t = read_png_texture(dir / "t.png", ColorSpace::srgb);
    EXPECT_EQ(t.channels(), 3);
    EXPECT_EQ(t.color_space(), ColorSpace::srgb);
    EXPECT_FLOAT_EQ(t.at(0, 0, 0), 1.0f);
    EXPECT_NEAR(t.at(1, 0, 2), 0.2, 1e-6);
}

TEST(ImageIo, HdrRoundTripWithinRgbePrecision) {
    TempDir dir;
    TextureMap t(16, 8, 3);
    RandomStream rng(9);
    for (float &v : t.data()) v = static_cast<float>(std::exp(rng.uniform(-4, 4)));
    write_hdr(dir / "e.hdr", t);
    const TextureMap back = read_hdr(dir / "e.hdr");
    ASSERT_EQ(back.width(), 16);
    ASSERT_EQ(back.height(), 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 16; ++x) {
            const double m = std::max({t.at(x, y, 0), t.at(x, y, 1), t.at(x, y, 2)});
            for (int c = 0; c < 3; ++c) EXPECT_NEAR(back.at(x, y, c), t.at(x, y, c), m / 128.0);
        }
}

TEST(ImageIo, HdrRejectsGarbage) {
    TempDir dir;
    write_file(dir / "bad.hdr", "not a radiance file\n");
    EXPECT_THROW(read_hdr(dir / "bad.hdr"), FormatError);
    EXPECT_THROW(read_png8(dir / "nope.png"), IoError);
}

TEST(Environment, ConstantAndExposure) {
    EnvironmentLight env = EnvironmentLight::constant({0.5, 0.25, 1.0});
    const Vec3 l = env.radiance(normalize(Vec3(0.3, -0.2, 0.9)));
    EXPECT_NEAR(l.x, 0.5, 1e-7);
    EXPECT_NEAR(l.y, 0.25, 1e-7);
    env.exposure_ev = 1;
    EXPECT_NEAR(env.radiance({0, 1, 0}).z, 2.0, 1e-6);
    EXPECT_NEAR(env.mean_radiance().x, 1.0, 1e-6);
}

TEST(Environment, RotationShiftsAzimuth) {
    TextureMap img(8, 4, 3);
    img.at(2, 2, 0) = 10;  // a bright texel
    EnvironmentLight env;
    env.image = std::make_shared<const TextureMap>(img);
    // texel center u = 2.5/8 -> azimuth 2.5/8 * 2pi
    const double az = 2.5 / 8 * 2 * kPi;
    const double pol = 2.5 / 4 * kPi;
    const Vec3 d{std::sin(pol) * std::cos(az), std::cos(pol), std::sin(pol) * std::sin(az)};
    EXPECT_NEAR(env.radiance(d).x, 10, 1e-4);
    env.rotation_y = 0.5;
    const Vec3 d2{std::sin(pol) * std::cos(az - 0.5), std::cos(pol), std::sin(pol) * std::sin(az - 0.5)};
    EXPECT_NEAR(env.radiance(d2).x, 10, 1e-4);
}

TEST(Material, UniformStoresSrgbAlbedo) {
    const MaterialMaps m = MaterialMaps::uniform({0.2, 0.4, 0.6}, 0.3, 1.0);
    EXPECT_EQ(m.albedo.color_space(), ColorSpace::srgb);
    const Vec3 c = m.albedo.sample_linear_rgb(0.5, 0.5);
    EXPECT_NEAR(c.x, 0.2, 1e-6);
    EXPECT_NEAR(c.z, 0.6, 1e-6);
    EXPECT_NO_THROW(m.validate());
    MaterialMaps bad = m;
    bad.roughness = TextureMap::constant_scalar(1.5);
    EXPECT_THROW(bad.validate(), SpecError);
}
