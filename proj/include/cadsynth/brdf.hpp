#pragma once

#include <optional>

#include "cadsynth/math.hpp"

namespace cadsynth {

/// Shading inputs at one surface point; albedo is linear RGB.
struct SurfaceParams {
    Vec3 albedo{1.0};
    double roughness = 0.5;
    double metallic = 0.0;
    double specular = 1.0;
};

/// Perceptual roughness to GGX alpha (squared, floored to keep the lobe finite).
double ggx_alpha(double roughness);

double ggx_d(double alpha, const Vec3 &h);
double ggx_lambda(double alpha, const Vec3 &w);
double ggx_g1(double alpha, const Vec3 &w);
/// Height-correlated Smith masking-shadowing.
double ggx_g2(double alpha, const Vec3 &wo, const Vec3 &wi);
/// Visible-normal sample for view direction `wo` (local frame, z up).
Vec3 sample_ggx_vndf(double alpha, const Vec3 &wo, double u1, double u2);

double schlick_weight(double cos_theta);

/// Directional albedo tables of the single-scattering GGX lobe, indexed by (cosθ, roughness) and
/// linearly interpolated. Computed once by deterministic quadrature.
class GgxEnergyTable {
public:
    static const GgxEnergyTable &get();

    /// Albedo with F = 1.
    double e1(double mu, double roughness) const;
    /// Part of the F = 1 albedo carried by the Schlick weight (1 - v·h)^5.
    double e_schlick(double mu, double roughness) const;
    /// 2∫ e1(μ) μ dμ, exact for the piecewise-linear table.
    double e1_avg(double roughness) const;
    double e_schlick_avg(double roughness) const;

    static constexpr int kSize = 32;

private:
    GgxEnergyTable();
    double lookup(const double (&t)[kSize][kSize], double mu, double roughness) const;
    double lookup_avg(const double (&t)[kSize], double roughness) const;

    double e1_[kSize][kSize];  // [roughness][mu]
    double es_[kSize][kSize];
    double e1_avg_[kSize];
    double es_avg_[kSize];
};

/// Metallic-roughness BRDF: GGX specular with Schlick Fresnel (F0 = lerp(0.04, albedo, metallic)) over a
/// Lambertian base, with multiple-scattering compensation so a white material reflects all energy.
/// Vectors are in the local shading frame (normal = +Z) and point away from the surface.
class Brdf {
public:
    explicit Brdf(const SurfaceParams &p);

    /// f(wo, wi), without the cosine.
    Vec3 eval(const Vec3 &wo, const Vec3 &wi) const;
    /// Solid-angle density of sample().
    double pdf(const Vec3 &wo, const Vec3 &wi) const;

    struct Sample {
        Vec3 wi;
        Vec3 weight;  // f * cos / pdf
        double pdf = 0;
    };
    std::optional<Sample> sample(const Vec3 &wo, double u_lobe, double u1, double u2) const;

    /// Probability of choosing the GGX lobe for view `wo`.
    double specular_probability(const Vec3 &wo) const;

    const SurfaceParams &params() const { return p_; }

private:
    Vec3 multiple_scatter(const Vec3 &f0, double mu_o, double mu_i) const;
    double dielectric_albedo(double mu) const;

    SurfaceParams p_;
    double alpha_;
    double e1_avg_;
    double fms_dielectric_;
    double dielectric_avg_;
};

}  // namespace cadsynth
