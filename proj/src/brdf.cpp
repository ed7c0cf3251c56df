#include "cadsynth/brdf.hpp"

namespace cadsynth {

namespace {

constexpr double kDielectricF0 = 0.04;

double radical_inverse2(std::uint32_t bits) {
    bits = (bits << 16u) | (bits >> 16u);
    bits = ((bits & 0x55555555u) << 1u) | ((bits & 0xAAAAAAAAu) >> 1u);
    bits = ((bits & 0x33333333u) << 2u) | ((bits & 0xCCCCCCCCu) >> 2u);
    bits = ((bits & 0x0F0F0F0Fu) << 4u) | ((bits & 0xF0F0F0F0u) >> 4u);
    bits = ((bits & 0x00FF00FFu) << 8u) | ((bits & 0xFF00FF00u) >> 8u);
    return bits * 0x1.0p-32;
}

Vec3 reflect(const Vec3 &w, const Vec3 &h) { return h * (2.0 * dot(w, h)) - w; }

double fresnel_avg(double f0) { return f0 + (1.0 - f0) / 21.0; }

double ms_fresnel(double f0, double e_avg) {
    const double f = fresnel_avg(f0);
    return f * f * e_avg / (1.0 - f * (1.0 - e_avg));
}

}  // namespace

double ggx_alpha(double roughness) {
    const double r = clamp01(roughness);
    return std::max(r * r, 1e-3);
}

double ggx_d(double alpha, const Vec3 &h) {
    if (h.z <= 0) return 0.0;
    const double a2 = alpha * alpha;
    const double k = h.z * h.z * (a2 - 1.0) + 1.0;
    return a2 / (kPi * k * k);
}

double ggx_lambda(double alpha, const Vec3 &w) {
    const double z2 = w.z * w.z;
    if (z2 <= 0) return std::numeric_limits<double>::infinity();
    const double tan2 = std::max(0.0, 1.0 - z2) / z2;
    return 0.5 * (-1.0 + std::sqrt(1.0 + alpha * alpha * tan2));
}

double ggx_g1(double alpha, const Vec3 &w) { return 1.0 / (1.0 + ggx_lambda(alpha, w)); }

double ggx_g2(double alpha, const Vec3 &wo, const Vec3 &wi) {
    return 1.0 / (1.0 + ggx_lambda(alpha, wo) + ggx_lambda(alpha, wi));
}

Vec3 sample_ggx_vndf(double alpha, const Vec3 &wo, double u1, double u2) {
    const Vec3 vh = normalize(Vec3(alpha * wo.x, alpha * wo.y, wo.z));
    const double lensq = vh.x * vh.x + vh.y * vh.y;
    const Vec3 t1 = lensq > 0 ? Vec3(-vh.y, vh.x, 0) / std::sqrt(lensq) : Vec3(1, 0, 0);
    const Vec3 t2 = cross(vh, t1);
    const double r = std::sqrt(u1);
    const double phi = 2.0 * kPi * u2;
    const double p1 = r * std::cos(phi);
    double p2 = r * std::sin(phi);
    const double s = 0.5 * (1.0 + vh.z);
    p2 = (1.0 - s) * std::sqrt(std::max(0.0, 1.0 - p1 * p1)) + s * p2;
    const Vec3 nh = t1 * p1 + t2 * p2 + vh * std::sqrt(std::max(0.0, 1.0 - p1 * p1 - p2 * p2));
    return normalize(Vec3(alpha * nh.x, alpha * nh.y, std::max(0.0, nh.z)));
}

double schlick_weight(double cos_theta) {
    const double m = clamp01(1.0 - cos_theta);
    const double m2 = m * m;
    return m2 * m2 * m;
}

const GgxEnergyTable &GgxEnergyTable::get() {
    static const GgxEnergyTable table;
    return table;
}

GgxEnergyTable::GgxEnergyTable() {
    constexpr int kSamples = 1024;
    for (int j = 0; j < kSize; ++j) {
        const double alpha = ggx_alpha(static_cast<double>(j) / (kSize - 1));
        for (int i = 0; i < kSize; ++i) {
            const double mu = std::max(static_cast<double>(i) / (kSize - 1), 1e-4);
            const Vec3 wo(std::sqrt(1.0 - mu * mu), 0.0, mu);
            const double g1 = ggx_g1(alpha, wo);
            double e1 = 0, es = 0;
            for (int k = 0; k < kSamples; ++k) {
                const double u1 = (k + 0.5) / kSamples;
                const double u2 = radical_inverse2(static_cast<std::uint32_t>(k));
                const Vec3 h = sample_ggx_vndf(alpha, wo, u1, u2);
                const Vec3 wi = reflect(wo, h);
                if (wi.z <= 0) continue;
                const double w = ggx_g2(alpha, wo, wi) / g1;
                e1 += w;
                es += w * schlick_weight(dot(wo, h));
            }
            e1_[j][i] = e1 / kSamples;
            es_[j][i] = es / kSamples;
        }
        // exact 2∫ E μ dμ of the piecewise-linear curve
        const double h = 1.0 / (kSize - 1);
        double a1 = 0, as = 0;
        for (int i = 0; i + 1 < kSize; ++i) {
            const double a = i * h, b = (i + 1) * h;
            a1 += h / 6.0 * (e1_[j][i] * (2 * a + b) + e1_[j][i + 1] * (a + 2 * b));
            as += h / 6.0 * (es_[j][i] * (2 * a + b) + es_[j][i + 1] * (a + 2 * b));
        }
        e1_avg_[j] = 2.0 * a1;
        es_avg_[j] = 2.0 * as;
    }
}

double GgxEnergyTable::lookup(const double (&t)[kSize][kSize], double mu, double roughness) const {
    const double fm = clamp01(mu) * (kSize - 1);
    const double fr = clamp01(roughness) * (kSize - 1);
    const int i = std::min(static_cast<int>(fm), kSize - 2);
    const int j = std::min(static_cast<int>(fr), kSize - 2);
    const double tm = fm - i, tr = fr - j;
    return (t[j][i] * (1 - tm) + t[j][i + 1] * tm) * (1 - tr) + (t[j + 1][i] * (1 - tm) + t[j + 1][i + 1] * tm) * tr;
}

double GgxEnergyTable::lookup_avg(const double (&t)[kSize], double roughness) const {
    const double fr = clamp01(roughness) * (kSize - 1);
    const int j = std::min(static_cast<int>(fr), kSize - 2);
    const double tr = fr - j;
    return t[j] * (1 - tr) + t[j + 1] * tr;
}

double GgxEnergyTable::e1(double mu, double roughness) const { return lookup(e1_, mu, roughness); }
double GgxEnergyTable::e_schlick(double mu, double roughness) const { return lookup(es_, mu, roughness); }
double GgxEnergyTable::e1_avg(double roughness) const { return lookup_avg(e1_avg_, roughness); }
double GgxEnergyTable::e_schlick_avg(double roughness) const { return lookup_avg(es_avg_, roughness); }

Brdf::Brdf(const SurfaceParams &p) : p_(p), alpha_(ggx_alpha(p.roughness)) {
    p_.roughness = clamp01(p_.roughness);
    p_.metallic = clamp01(p_.metallic);
    p_.specular = clamp01(p_.specular);
    const GgxEnergyTable &tab = GgxEnergyTable::get();
    e1_avg_ = tab.e1_avg(p_.roughness);
    fms_dielectric_ = ms_fresnel(kDielectricF0, e1_avg_);
    const double ess_avg = kDielectricF0 * (e1_avg_ - tab.e_schlick_avg(p_.roughness)) + tab.e_schlick_avg(p_.roughness);
    dielectric_avg_ = ess_avg + fms_dielectric_ * (1.0 - e1_avg_);
}

double Brdf::dielectric_albedo(double mu) const {
    const GgxEnergyTable &tab = GgxEnergyTable::get();
    const double e1 = tab.e1(mu, p_.roughness);
    const double es = tab.e_schlick(mu, p_.roughness);
    return kDielectricF0 * (e1 - es) + es + fms_dielectric_ * (1.0 - e1);
}

Vec3 Brdf::multiple_scatter(const Vec3 &f0, double mu_o, double mu_i) const {
    const double denom = 1.0 - e1_avg_;
    if (denom < 1e-6) return {};
    const GgxEnergyTable &tab = GgxEnergyTable::get();
    const double lobe = (1.0 - tab.e1(mu_o, p_.roughness)) * (1.0 - tab.e1(mu_i, p_.roughness)) / (kPi * denom);
    return Vec3(ms_fresnel(f0.x, e1_avg_), ms_fresnel(f0.y, e1_avg_), ms_fresnel(f0.z, e1_avg_)) * lobe;
}

Vec3 Brdf::eval(const Vec3 &wo, const Vec3 &wi) const {
    if (wo.z <= 0 || wi.z <= 0) return {};
    const Vec3 h = normalize(wo + wi);
    const double voh = dot(wo, h);
    const double sw = schlick_weight(voh);
    const double dg = ggx_d(alpha_, h) * ggx_g2(alpha_, wo, wi) / (4.0 * wo.z * wi.z);

    Vec3 f;
    const double m = p_.metallic;
    if (m > 0) {
        const Vec3 fres = p_.albedo + (Vec3(1.0) - p_.albedo) * sw;
        f += (fres * dg + multiple_scatter(p_.albedo, wo.z, wi.z)) * m;
    }
    if (m < 1) {
        const double s = p_.specular;
        const double fres = kDielectricF0 + (1.0 - kDielectricF0) * sw;
        Vec3 diel = Vec3(s * fres * dg) + multiple_scatter(Vec3(kDielectricF0), wo.z, wi.z) * s;
        const double diffuse = (1.0 - s * dielectric_albedo(wo.z)) * (1.0 - s * dielectric_albedo(wi.z)) /
                               (kPi * (1.0 - s * dielectric_avg_));
        diel += p_.albedo * diffuse;
        f += diel * (1.0 - m);
    }
    return f;
}

double Brdf::specular_probability(const Vec3 &wo) const {
    const GgxEnergyTable &tab = GgxEnergyTable::get();
    const double p = p_.metallic * tab.e1(wo.z, p_.roughness) +
                     (1.0 - p_.metallic) * p_.specular * dielectric_albedo(wo.z);
    return clamp01(p);
}

double Brdf::pdf(const Vec3 &wo, const Vec3 &wi) const {
    if (wo.z <= 0 || wi.z <= 0) return 0.0;
    const double ps = specular_probability(wo);
    double pdf = (1.0 - ps) * wi.z * kInvPi;
    if (ps > 0) {
        const Vec3 h = normalize(wo + wi);
        pdf += ps * ggx_g1(alpha_, wo) * ggx_d(alpha_, h) / (4.0 * wo.z);
    }
    return pdf;
}

std::optional<Brdf::Sample> Brdf::sample(const Vec3 &wo, double u_lobe, double u1, double u2) const {
    if (wo.z <= 0) return std::nullopt;
    const double ps = specular_probability(wo);
    Vec3 wi;
    if (u_lobe < ps) {
        wi = reflect(wo, sample_ggx_vndf(alpha_, wo, u1, u2));
    } else {
        const double r = std::sqrt(u1);
        const double phi = 2.0 * kPi * u2;
        wi = {r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u1))};
    }
    if (wi.z <= 0) return std::nullopt;
    const double density = pdf(wo, wi);
    if (!(density > 0)) return std::nullopt;
    return Sample{wi, eval(wo, wi) * (wi.z / density), density};
}

}  // namespace cadsynth
