#include "cadsynth/render.hpp"

#include <atomic>

#include "cadsynth/errors.hpp"
#include "cadsynth/parallel.hpp"

namespace cadsynth {

namespace {

Vec3 offset_origin(const Vec3 &p, const Vec3 &n, const Vec3 &dir) {
    const double scale = 1e-7 * std::max(1.0, max_component(Vec3(std::abs(p.x), std::abs(p.y), std::abs(p.z))));
    return p + n * (dot(dir, n) > 0 ? 4 * scale : -4 * scale);
}

/// Tangent-space normal from the normal map, perturbed by the displacement gradient.
Vec3 tangent_normal(const MaterialMaps &m, double u, double v) {
    Vec3 n(0, 0, 1);
    if (!m.normal.empty() && m.normal.texel_count() > 1) {
        n = m.normal.sample_rgb(u, v) * 2.0 - Vec3(1.0);
        if (!(n.z > 1e-3)) n.z = 1e-3;
        n = normalize(n);
    }
    if (m.displacement_scale != 0 && !m.displacement.empty() && m.displacement.texel_count() > 1) {
        const double du = 1.0 / m.displacement.width(), dv = 1.0 / m.displacement.height();
        const double gx = (m.displacement.sample(u + du, v, 0) - m.displacement.sample(u - du, v, 0)) / (2 * du);
        const double gy = (m.displacement.sample(u, v + dv, 0) - m.displacement.sample(u, v - dv, 0)) / (2 * dv);
        n = normalize(Vec3(n.x - m.displacement_scale * gx * n.z, n.y - m.displacement_scale * gy * n.z, n.z));
    }
    return n;
}

SurfaceParams surface_params(const MaterialMaps &m, double u, double v) {
    SurfaceParams p;
    p.albedo = m.albedo.empty() ? Vec3(0.0) : m.albedo.sample_linear_rgb(u, v);
    p.albedo = {clamp01(p.albedo.x), clamp01(p.albedo.y), clamp01(p.albedo.z)};
    p.roughness = m.roughness.empty() ? 0.5 : clamp01(m.roughness.sample(u, v, 0));
    p.metallic = m.metallic.empty() ? 0.0 : clamp01(m.metallic.sample(u, v, 0));
    p.specular = clamp01(m.specular);
    return p;
}

/// Shading normal from the tangent frame and a tangent-space normal; falls back to the geometric normal
/// when the perturbed normal would face away from the viewer.
Vec3 shade_normal(const Vec3 &ng, Vec3 ns, const Vec3 &tangent, const Vec3 &n_ts, const Vec3 &wo) {
    if (dot(ns, ng) < 0) ns = -ns;
    if (n_ts.x != 0 || n_ts.y != 0) {
        Vec3 t = tangent - ns * dot(ns, tangent);
        const double tl = length(t);
        Vec3 b;
        if (tl > 1e-12) {
            t = t / tl;
            b = cross(ns, t);
        } else {
            orthonormal_basis(ns, t, b);
        }
        ns = normalize(t * n_ts.x + b * n_ts.y + ns * n_ts.z);
    }
    if (dot(ns, wo) <= 1e-4) return ng;
    return ns;
}

Vec3 to_local(const Vec3 &v, const Vec3 &t, const Vec3 &b, const Vec3 &n) { return {dot(v, t), dot(v, b), dot(v, n)}; }

bool finite_nonnegative(const Vec3 &c) { return is_finite(c) && c.x >= 0 && c.y >= 0 && c.z >= 0; }

}  // namespace

RenderProfile RenderProfile::path_traced(int spp) {
    RenderProfile p;
    p.spp = spp;
    return p;
}

RenderProfile RenderProfile::preview() {
    RenderProfile p;
    p.mode = RenderMode::preview;
    p.spp = 1;
    return p;
}

void RenderProfile::validate() const {
    if (spp < 1) throw SpecError("render profile: spp must be >= 1");
    if (max_depth < 1) throw SpecError("render profile: max_depth must be >= 1");
    if (rr_start_depth < 0) throw SpecError("render profile: rr_start_depth must be >= 0");
    if (!std::isfinite(exposure_ev)) throw SpecError("render profile: exposure_ev must be finite");
    if (!is_finite(white_balance_gains) || white_balance_gains.x < 0 || white_balance_gains.y < 0 ||
        white_balance_gains.z < 0)
        throw SpecError("render profile: white balance gains must be finite and >= 0");
    if (!(gamma > 0) || !std::isfinite(gamma)) throw SpecError("render profile: gamma must be > 0");
}

FrameBuffers::FrameBuffers(int w, int h)
    : width(w),
      height(h),
      radiance(static_cast<std::size_t>(w) * h),
      instance_id(radiance.size(), 0),
      depth(radiance.size(), 0.0) {}

RenderScene::RenderScene(const Scene &scene)
    : scene_(scene), bvh_(Bvh::from_scene(scene)), camera_to_world_(scene.camera.world_to_camera.inverse()) {}

std::optional<double> RenderScene::plane_t(const Ray &ray) const {
    if (!scene_.support_plane || ray.dir.y == 0) return std::nullopt;
    const double t = (scene_.support_plane->height - ray.origin.y) / ray.dir.y;
    if (!(t > ray.tmin && t < ray.tmax)) return std::nullopt;
    return t;
}

std::optional<SurfaceHit> RenderScene::intersect(const Ray &ray) const {
    const std::optional<Hit> h = bvh_.intersect(ray);
    const std::optional<double> pt = plane_t(ray);
    const Vec3 wo = -ray.dir;
    SurfaceHit s;
    if (pt && (!h || *pt < h->t)) {
        s.t = *pt;
        s.position = ray.origin + ray.dir * *pt;
        s.position.y = scene_.support_plane->height;
        s.geometric_normal = ray.dir.y < 0 ? Vec3(0, 1, 0) : Vec3(0, -1, 0);
        const MaterialMaps &m = scene_.support_plane->material;
        const double u = s.position.x, v = -s.position.z;
        s.material = surface_params(m, u, v);
        s.shading_normal =
            shade_normal(s.geometric_normal, Vec3(0, 1, 0), Vec3(1, 0, 0), tangent_normal(m, u, v), wo);
        return s;
    }
    if (!h) return std::nullopt;

    const MeshInstance &inst = scene_.instances[h->instance];
    const Mesh &mesh = *inst.mesh;
    const auto &tri = mesh.triangles[h->triangle];
    const double b0 = 1.0 - h->b1 - h->b2;
    const Vec3 p0 = inst.model_to_world.apply(mesh.vertices[tri[0]]);
    const Vec3 p1 = inst.model_to_world.apply(mesh.vertices[tri[1]]);
    const Vec3 p2 = inst.model_to_world.apply(mesh.vertices[tri[2]]);
    s.t = h->t;
    s.instance = h->instance;
    s.position = p0 * b0 + p1 * h->b1 + p2 * h->b2;
    const Vec3 e1 = p1 - p0, e2 = p2 - p0;
    Vec3 ng = normalize(cross(e1, e2));
    if (dot(ng, wo) < 0) ng = -ng;
    s.geometric_normal = ng;

    const Vec3 ns_model = mesh.normals[tri[0]] * b0 + mesh.normals[tri[1]] * h->b1 + mesh.normals[tri[2]] * h->b2;
    Vec3 ns = inst.model_to_world.apply_vector(ns_model);
    ns = length(ns) > 0 ? normalize(ns) : ng;

    Vec2 uv0, uv1, uv2;
    if (mesh.uvs.size() == mesh.vertices.size()) {
        uv0 = mesh.uvs[tri[0]];
        uv1 = mesh.uvs[tri[1]];
        uv2 = mesh.uvs[tri[2]];
    }
    const Vec2 uv = uv0 * b0 + uv1 * h->b1 + uv2 * h->b2;
    const Vec2 d1 = uv1 - uv0, d2 = uv2 - uv0;
    const double det = d1.x * d2.y - d2.x * d1.y;
    Vec3 tangent;
    if (std::abs(det) > 1e-14) {
        tangent = (e1 * d2.y - e2 * d1.y) / det;
    } else {
        Vec3 b;
        orthonormal_basis(ns, tangent, b);
    }
    s.material = surface_params(inst.material, uv.x, uv.y);
    s.shading_normal = shade_normal(ng, ns, tangent, tangent_normal(inst.material, uv.x, uv.y), wo);
    return s;
}

bool RenderScene::occluded(const Ray &ray) const { return plane_t(ray).has_value() || bvh_.occluded(ray); }

Ray RenderScene::camera_ray(double u, double v) const {
    const Vec3 d = camera_ray_direction(scene_.camera.intrinsics, u, v);
    return Ray{camera_to_world_.translation, normalize(camera_to_world_.apply_vector(d))};
}

PrimaryHit RenderScene::primary_hit(int x, int y) const {
    const Ray ray = camera_ray(x, y);
    const std::optional<Hit> h = bvh_.intersect(ray);
    if (!h) return {};
    if (const auto pt = plane_t(ray); pt && *pt < h->t) return {};
    const Vec3 dcam = camera_ray_direction(scene_.camera.intrinsics, x, y);
    const double z = h->t * dcam.z / length(dcam);
    return {static_cast<std::uint32_t>(h->instance + 1), z};
}

Vec3 direct_lighting(const RenderScene &rs, const SurfaceHit &hit, const Vec3 &wo, RandomStream *rng) {
    Vec3 t, b;
    const Vec3 &n = hit.shading_normal;
    orthonormal_basis(n, t, b);
    const Brdf brdf(hit.material);
    const Vec3 wo_l = to_local(wo, t, b, n);
    Vec3 sum;
    for (const PointLight &light : rs.scene().point_lights) {
        if (max_component(light.intensity) <= 0) continue;
        const Vec3 to_light = light.position - hit.position;
        const double d2 = dot(to_light, to_light);
        const double d = std::sqrt(d2);
        if (d <= light.radius || d == 0) continue;
        const Vec3 axis = to_light / d;
        Vec3 wi = axis;
        double tmax = d;
        double scale = 1.0 / d2;  // I cos / d^2 for a point emitter
        if (light.radius > 0 && rng) {
            // uniform cone sampling of the subtended sphere, emitted radiance I / (π r²)
            const double sin2 = (light.radius * light.radius) / d2;
            const double one_minus_cos_max = sin2 / (1.0 + std::sqrt(std::max(0.0, 1.0 - sin2)));
            const double u1 = rng->uniform(), u2 = rng->uniform();
            const double one_minus_cos = u1 * one_minus_cos_max;
            const double cos_t = 1.0 - one_minus_cos;
            const double sin_t = std::sqrt(std::max(0.0, one_minus_cos * (2.0 - one_minus_cos)));
            const double phi = 2.0 * kPi * u2;
            Vec3 ta, tb;
            orthonormal_basis(axis, ta, tb);
            wi = normalize(ta * (sin_t * std::cos(phi)) + tb * (sin_t * std::sin(phi)) + axis * cos_t);
            const double proj = dot(wi, to_light);
            tmax = proj - std::sqrt(std::max(0.0, light.radius * light.radius - (d2 - proj * proj)));
            scale = 2.0 * one_minus_cos_max / (light.radius * light.radius);
        }
        if (dot(wi, hit.geometric_normal) <= 0) continue;
        const Vec3 wi_l = to_local(wi, t, b, n);
        if (wi_l.z <= 0) continue;
        const Vec3 f = brdf.eval(wo_l, wi_l);
        if (max_component(f) <= 0) continue;
        Ray shadow{offset_origin(hit.position, hit.geometric_normal, wi), wi, 0.0, tmax * (1.0 - 1e-9)};
        if (rs.occluded(shadow)) continue;
        sum += f * light.intensity * (wi_l.z * scale);
    }
    return sum;
}

PathSample trace_path(const RenderScene &rs, int x, int y, const RenderProfile &profile, RandomStream &rng) {
    PathSample out;
    const double ju = rng.uniform(-0.5, 0.5), jv = rng.uniform(-0.5, 0.5);
    Ray ray = rs.camera_ray(x + ju, y + jv);
    Vec3 throughput(1.0);
    for (int depth = 0;; ++depth) {
        const std::optional<SurfaceHit> hit = rs.intersect(ray);
        if (!hit) {
            out.radiance += throughput * rs.scene().environment.radiance(ray.dir);
            break;
        }
        if (depth == 0 && hit->instance) {
            out.primary.instance_id = static_cast<std::uint32_t>(*hit->instance + 1);
            out.primary.depth = rs.scene().camera.world_to_camera.apply(hit->position).z;
        }
        if (depth >= profile.max_depth) break;
        const Vec3 wo = -ray.dir;
        out.radiance += throughput * direct_lighting(rs, *hit, wo, &rng);

        Vec3 t, b;
        const Vec3 &n = hit->shading_normal;
        orthonormal_basis(n, t, b);
        const Brdf brdf(hit->material);
        const double ul = rng.uniform(), u1 = rng.uniform(), u2 = rng.uniform();
        const auto s = brdf.sample(to_local(wo, t, b, n), ul, u1, u2);
        if (!s) break;
        const Vec3 wi = t * s->wi.x + b * s->wi.y + n * s->wi.z;
        if (dot(wi, hit->geometric_normal) <= 0) break;
        throughput *= s->weight;
        if (depth + 1 >= profile.rr_start_depth) {
            const double q = std::min(1.0, luminance(throughput));
            if (!(q > 0) || rng.uniform() >= q) break;
            throughput = throughput / q;
        }
        ray = Ray{offset_origin(hit->position, hit->geometric_normal, wi), wi};
    }
    return out;
}

PathSample shade_preview(const RenderScene &rs, double u, double v) {
    PathSample out;
    const Ray ray = rs.camera_ray(u, v);
    const std::optional<SurfaceHit> hit = rs.intersect(ray);
    if (!hit) {
        out.radiance = rs.scene().environment.radiance(ray.dir);
        return out;
    }
    if (hit->instance) {
        out.primary.instance_id = static_cast<std::uint32_t>(*hit->instance + 1);
        out.primary.depth = rs.scene().camera.world_to_camera.apply(hit->position).z;
    }
    out.radiance = direct_lighting(rs, *hit, -ray.dir, nullptr) +
                   rs.scene().environment.mean_radiance() * hit->material.albedo;
    return out;
}

RandomStream pixel_stream(std::uint64_t seed, std::uint64_t frame, int x, int y, int sample) {
    return RandomStream(seed).child({0x7a11ULL, frame, static_cast<std::uint64_t>(y), static_cast<std::uint64_t>(x),
                                     static_cast<std::uint64_t>(sample)});
}

FrameBuffers render_frame(const Scene &scene, const RenderProfile &profile, std::uint64_t frame_index,
                          std::uint64_t seed, RenderStats *stats) {
    profile.validate();
    if (!scene.camera.intrinsics.valid()) throw RenderError("render_frame: invalid camera intrinsics");
    const RenderScene rs(scene);
    const int w = scene.camera.intrinsics.width, h = scene.camera.intrinsics.height;
    FrameBuffers fb(w, h);
    std::atomic<std::uint64_t> rejected{0};
    parallel_for(0, h, [&](int y) {
        std::uint64_t local_rejected = 0;
        for (int x = 0; x < w; ++x) {
            const std::size_t i = fb.index(x, y);
            const PrimaryHit ph = rs.primary_hit(x, y);
            fb.instance_id[i] = ph.instance_id;
            fb.depth[i] = ph.depth;
            Vec3 sum;
            int accepted = 0;
            for (int s = 0; s < profile.spp; ++s) {
                Vec3 c;
                if (profile.mode == RenderMode::preview) {
                    double u = x, v = y;
                    if (profile.spp > 1) {
                        RandomStream rng = pixel_stream(seed, frame_index, x, y, s);
                        u += rng.uniform(-0.5, 0.5);
                        v += rng.uniform(-0.5, 0.5);
                    }
                    c = shade_preview(rs, u, v).radiance;
                } else {
                    RandomStream rng = pixel_stream(seed, frame_index, x, y, s);
                    c = trace_path(rs, x, y, profile, rng).radiance;
                }
                if (!finite_nonnegative(c)) {
                    ++local_rejected;
                    continue;
                }
                sum += c;
                ++accepted;
            }
            if (accepted == 0)
                throw RenderError("render_frame: every sample of pixel (" + std::to_string(x) + ", " +
                                  std::to_string(y) + ") was non-finite");
            fb.radiance[i] = sum / accepted;
        }
        rejected += local_rejected;
    });
    if (stats) {
        stats->samples += static_cast<std::uint64_t>(w) * h * profile.spp;
        stats->rejected_samples += rejected.load();
    }
    return fb;
}

std::array<std::uint8_t, 3> post_process_pixel(const Vec3 &radiance, const RenderProfile &profile) {
    Vec3 c = radiance * std::exp2(profile.exposure_ev) * profile.white_balance_gains;
    if (profile.tonemap == Tonemap::reinhard) c = c / (1.0 + std::max(0.0, luminance(c)));
    std::array<std::uint8_t, 3> out{};
    for (int k = 0; k < 3; ++k) {
        double v = std::max(0.0, c[k]);
        if (profile.gamma != 1.0) v = std::pow(v, 1.0 / profile.gamma);
        out[k] = static_cast<std::uint8_t>(std::floor(clamp01(v) * 255.0 + 0.5));
    }
    return out;
}

Image8 post_process(const FrameBuffers &frame, const RenderProfile &profile) {
    Image8 img(frame.width, frame.height, 3);
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x) {
            const auto px = post_process_pixel(frame.radiance[frame.index(x, y)], profile);
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = px[c];
        }
    return img;
}

}  // namespace cadsynth
