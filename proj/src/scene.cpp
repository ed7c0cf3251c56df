#include "cadsynth/scene.hpp"

#include "cadsynth/errors.hpp"

namespace cadsynth {

MaterialMaps MaterialMaps::uniform(const Vec3 &albedo, double roughness, double metallic, double specular) {
    MaterialMaps m;
    m.albedo = TextureMap::constant_rgb({linear_to_srgb(albedo.x), linear_to_srgb(albedo.y), linear_to_srgb(albedo.z)},
                                        ColorSpace::srgb);
    m.normal = TextureMap::constant_rgb({0.5, 0.5, 1.0});
    m.roughness = TextureMap::constant_scalar(roughness);
    m.metallic = TextureMap::constant_scalar(metallic);
    m.displacement = TextureMap::constant_scalar(0.0);
    m.specular = specular;
    return m;
}

void MaterialMaps::validate() const {
    if (albedo.empty() || normal.empty() || roughness.empty() || metallic.empty() || displacement.empty())
        throw SpecError("material has an empty map");
    if (albedo.channels() < 3 || normal.channels() < 3) throw SpecError("albedo and normal maps need RGB");
    for (const TextureMap *t : {&roughness, &metallic})
        if (t->min_value() < 0.0f || t->max_value() > 1.0f) throw SpecError("scalar material map outside [0,1]");
    if (specular < 0 || specular > 1) throw SpecError("specular weight outside [0,1]");
}

EnvironmentLight EnvironmentLight::constant(const Vec3 &radiance) {
    EnvironmentLight env;
    env.image = std::make_shared<const TextureMap>(TextureMap::constant_rgb(radiance, ColorSpace::linear, 2, 1));
    return env;
}

Vec3 EnvironmentLight::radiance(const Vec3 &dir) const {
    if (!image) return {};
    const double phi = std::atan2(dir.z, dir.x) + rotation_y;
    double u = phi * (0.5 * kInvPi);
    u -= std::floor(u);
    const double v = std::acos(std::clamp(dir.y, -1.0, 1.0)) * kInvPi;
    // azimuth wraps, polar clamps
    const TextureMap &img = *image;
    const double fx = u * img.width() - 0.5;
    const double fy = std::clamp(v * img.height() - 0.5, 0.0, img.height() - 1.0);
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const double tx = fx - x0, ty = fy - y0;
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const int xa = wrap_index(x0, img.width()), xb = wrap_index(x0 + 1, img.width());
    const Vec3 c = (img.fetch_rgb(xa, y0) * (1 - tx) + img.fetch_rgb(xb, y0) * tx) * (1 - ty) +
                   (img.fetch_rgb(xa, y1) * (1 - tx) + img.fetch_rgb(xb, y1) * tx) * ty;
    return c * std::exp2(exposure_ev);
}

Vec3 EnvironmentLight::mean_radiance() const {
    if (!image) return {};
    const TextureMap &img = *image;
    Vec3 sum;
    double wsum = 0;
    for (int y = 0; y < img.height(); ++y) {
        const double theta0 = kPi * y / img.height(), theta1 = kPi * (y + 1) / img.height();
        const double w = std::cos(theta0) - std::cos(theta1);  // row solid angle / 2π
        for (int x = 0; x < img.width(); ++x) sum += img.fetch_rgb(x, y) * w;
        wsum += w * img.width();
    }
    return sum / wsum * std::exp2(exposure_ev);
}

}  // namespace cadsynth
