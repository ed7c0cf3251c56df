#include "cadsynth/config.hpp"

#include <fstream>
#include <set>

namespace cadsynth {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string> &errors) {
    std::string s = "invalid configuration:";
    for (const auto &e : errors) s += "\n  " + e;
    return s;
}

class Ctx {
public:
    explicit Ctx(fs::path base) : base_(std::move(base)) {}

    void error(const std::string &path, const std::string &msg) { errors_.push_back(path + ": " + msg); }
    std::vector<std::string> &errors() { return errors_; }

    /// Reports keys outside `allowed`; returns false when `j` is not an object.
    bool object(const json &j, const std::string &path, std::initializer_list<const char *> allowed) {
        if (!j.is_object()) {
            error(path, "expected an object");
            return false;
        }
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto &[k, v] : j.items())
            if (!ok.contains(k)) error(path.empty() ? k : path + "." + k, "unknown key");
        return true;
    }

    bool number(const json &j, const std::string &path, double &out) {
        if (!j.is_number()) {
            error(path, "expected a number");
            return false;
        }
        out = j.get<double>();
        if (!std::isfinite(out)) {
            error(path, "must be finite");
            return false;
        }
        return true;
    }

    bool integer(const json &j, const std::string &path, int &out) {
        if (!j.is_number_integer()) {
            error(path, "expected an integer");
            return false;
        }
        out = j.get<int>();
        return true;
    }

    void boolean(const json &j, const std::string &path, bool &out) {
        if (!j.is_boolean())
            error(path, "expected true or false");
        else
            out = j.get<bool>();
    }

    void interval(const json &j, const std::string &path, Interval &out) {
        if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
            error(path, "expected [min, max]");
            return;
        }
        const Interval v{j[0].get<double>(), j[1].get<double>()};
        if (!std::isfinite(v.lo) || !std::isfinite(v.hi))
            error(path, "bounds must be finite");
        else if (!v.ordered())
            error(path, "range min " + j[0].dump() + " > max " + j[1].dump());
        else
            out = v;
    }

    void int_range(const json &j, const std::string &path, IntRange &out) {
        if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
            error(path, "expected [min, max] integers");
            return;
        }
        const IntRange v{j[0].get<int>(), j[1].get<int>()};
        if (!v.ordered())
            error(path, "range min " + std::to_string(v.lo) + " > max " + std::to_string(v.hi));
        else
            out = v;
    }

    void vec3(const json &j, const std::string &path, Vec3 &out) {
        if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
            error(path, "expected [x, y, z]");
            return;
        }
        out = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    }

    void box(const json &j, const std::string &path, Aabb &out) {
        if (!object(j, path, {"min", "max"})) return;
        Vec3 lo = out.lo, hi = out.hi;
        if (j.contains("min")) vec3(j["min"], path + ".min", lo);
        if (j.contains("max")) vec3(j["max"], path + ".max", hi);
        if (lo.x > hi.x || lo.y > hi.y || lo.z > hi.z)
            error(path, "min exceeds max");
        else
            out = Aabb{lo, hi};
    }

    std::optional<fs::path> file(const json &j, const std::string &path) {
        if (!j.is_string() || j.get<std::string>().empty()) {
            error(path, "expected a file path");
            return std::nullopt;
        }
        fs::path p = j.get<std::string>();
        if (p.is_relative()) p = base_ / p;
        p = p.lexically_normal();
        if (!fs::exists(p)) {
            error(path, "file not found: " + p.string());
            return std::nullopt;
        }
        return p;
    }

    const fs::path &base() const { return base_; }

private:
    fs::path base_;
    std::vector<std::string> errors_;
};

template <typename F>
void with(const json &obj, const char *key, const std::string &path, F &&fn) {
    if (obj.is_object() && obj.contains(key)) fn(obj[key], path.empty() ? std::string(key) : path + "." + key);
}

void parse_profile(Ctx &c, const json &j, const std::string &path, RenderProfile &p) {
    if (!c.object(j, path, {"mode", "spp", "max_depth", "rr_start_depth", "exposure_ev", "white_balance", "tonemap",
                            "gamma"}))
        return;
    with(j, "mode", path, [&](const json &v, const std::string &q) {
        if (v == "path_traced")
            p.mode = RenderMode::path_traced;
        else if (v == "preview")
            p.mode = RenderMode::preview;
        else
            c.error(q, "expected \"path_traced\" or \"preview\"");
    });
    p.spp = p.mode == RenderMode::preview ? 1 : 500;
    with(j, "spp", path, [&](const json &v, const std::string &q) {
        if (c.integer(v, q, p.spp) && p.spp < 1) c.error(q, "must be >= 1");
    });
    with(j, "max_depth", path, [&](const json &v, const std::string &q) {
        if (c.integer(v, q, p.max_depth) && p.max_depth < 1) c.error(q, "must be >= 1");
    });
    with(j, "rr_start_depth", path, [&](const json &v, const std::string &q) {
        if (c.integer(v, q, p.rr_start_depth) && p.rr_start_depth < 0) c.error(q, "must be >= 0");
    });
    with(j, "exposure_ev", path, [&](const json &v, const std::string &q) { c.number(v, q, p.exposure_ev); });
    with(j, "white_balance", path, [&](const json &v, const std::string &q) {
        c.vec3(v, q, p.white_balance_gains);
        if (p.white_balance_gains.x < 0 || p.white_balance_gains.y < 0 || p.white_balance_gains.z < 0)
            c.error(q, "gains must be >= 0");
    });
    with(j, "tonemap", path, [&](const json &v, const std::string &q) {
        if (v == "reinhard")
            p.tonemap = Tonemap::reinhard;
        else if (v == "none")
            p.tonemap = Tonemap::none;
        else
            c.error(q, "expected \"reinhard\" or \"none\"");
    });
    with(j, "gamma", path, [&](const json &v, const std::string &q) {
        if (c.number(v, q, p.gamma) && !(p.gamma > 0)) c.error(q, "must be > 0");
    });
}

void parse_camera(Ctx &c, const json &j, const std::string &path, DatasetConfig &cfg) {
    if (!c.object(j, path, {"theta", "phi", "r", "target", "hfov_deg", "intrinsics"})) return;
    CameraRangeSpec &s = cfg.camera;
    with(j, "theta", path, [&](const json &v, const std::string &q) {
        c.interval(v, q, s.theta);
        if (s.theta.lo < 0 || s.theta.hi > kPi) c.error(q, "must lie inside [0, pi]");
    });
    with(j, "phi", path, [&](const json &v, const std::string &q) { c.interval(v, q, s.phi); });
    with(j, "r", path, [&](const json &v, const std::string &q) {
        c.interval(v, q, s.r);
        if (!(s.r.lo > 0)) c.error(q, "minimum must be > 0");
    });
    with(j, "target", path, [&](const json &v, const std::string &q) { c.vec3(v, q, s.target); });
    with(j, "hfov_deg", path, [&](const json &v, const std::string &q) {
        if (c.number(v, q, cfg.hfov_deg) && !(cfg.hfov_deg > 0 && cfg.hfov_deg < 180)) c.error(q, "must be in (0, 180)");
    });
    with(j, "intrinsics", path, [&](const json &v, const std::string &q) {
        if (!c.object(v, q, {"fx", "fy", "cx", "cy"})) return;
        CameraIntrinsics k;
        bool ok = true;
        for (const char *key : {"fx", "fy", "cx", "cy"}) {
            if (!v.contains(key)) {
                c.error(q + "." + key, "missing");
                ok = false;
            }
        }
        if (!ok) return;
        ok = c.number(v["fx"], q + ".fx", k.fx) && c.number(v["fy"], q + ".fy", k.fy) &&
             c.number(v["cx"], q + ".cx", k.cx) && c.number(v["cy"], q + ".cy", k.cy);
        if (ok) cfg.intrinsics = k;
    });
}

void parse_spawn(Ctx &c, const json &j, const std::string &path, DatasetConfig &cfg) {
    if (!c.object(j, path, {"models", "count", "unique_models", "rest_on_plane", "volume", "max_placement_attempts"}))
        return;
    with(j, "models", path, [&](const json &v, const std::string &q) {
        if (!v.is_array()) {
            c.error(q, "expected an array");
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string qi = q + "[" + std::to_string(i) + "]";
            ModelSource m;
            m.obj_id = static_cast<int>(i) + 1;
            if (v[i].is_string()) {
                if (auto p = c.file(v[i], qi)) m.path = *p;
            } else if (c.object(v[i], qi, {"path", "obj_id", "scale"})) {
                if (v[i].contains("path")) {
                    if (auto p = c.file(v[i]["path"], qi + ".path")) m.path = *p;
                } else {
                    c.error(qi + ".path", "missing");
                }
                with(v[i], "obj_id", qi, [&](const json &x, const std::string &qq) {
                    if (c.integer(x, qq, m.obj_id) && m.obj_id < 1) c.error(qq, "must be >= 1");
                });
                with(v[i], "scale", qi, [&](const json &x, const std::string &qq) {
                    if (c.number(x, qq, m.scale) && !(m.scale > 0)) c.error(qq, "must be > 0");
                });
            }
            cfg.models.push_back(m);
        }
    });
    with(j, "count", path, [&](const json &v, const std::string &q) {
        c.int_range(v, q, cfg.count);
        if (cfg.count.lo < 0) c.error(q, "minimum must be >= 0");
    });
    with(j, "unique_models", path, [&](const json &v, const std::string &q) { c.boolean(v, q, cfg.unique_models); });
    with(j, "rest_on_plane", path, [&](const json &v, const std::string &q) { c.boolean(v, q, cfg.rest_on_plane); });
    with(j, "volume", path, [&](const json &v, const std::string &q) { c.box(v, q, cfg.spawn_volume); });
    with(j, "max_placement_attempts", path, [&](const json &v, const std::string &q) {
        if (c.integer(v, q, cfg.max_placement_attempts) && cfg.max_placement_attempts < 1) c.error(q, "must be >= 1");
    });
}

void parse_support_plane(Ctx &c, const json &j, const std::string &path, DatasetConfig &cfg) {
    if (j.is_null() || j == false) {
        cfg.support_plane.reset();
        return;
    }
    SupportPlaneConfig s;
    if (!c.object(j, path, {"height", "albedo", "roughness", "metallic"})) return;
    with(j, "height", path, [&](const json &v, const std::string &q) { c.number(v, q, s.height); });
    with(j, "albedo", path, [&](const json &v, const std::string &q) { c.vec3(v, q, s.albedo); });
    with(j, "roughness", path, [&](const json &v, const std::string &q) {
        if (c.number(v, q, s.roughness) && (s.roughness < 0 || s.roughness > 1)) c.error(q, "must be in [0,1]");
    });
    with(j, "metallic", path, [&](const json &v, const std::string &q) {
        if (c.number(v, q, s.metallic) && (s.metallic < 0 || s.metallic > 1)) c.error(q, "must be in [0,1]");
    });
    cfg.support_plane = s;
}

void parse_lights(Ctx &c, const json &j, const std::string &path, DatasetConfig &cfg) {
    if (!c.object(j, path, {"environments", "exposure_ev", "rotation", "extra_light_count", "intensity", "radius",
                            "position_volume"}))
        return;
    LightSpec &l = cfg.lights;
    with(j, "environments", path, [&](const json &v, const std::string &q) {
        if (!v.is_array()) {
            c.error(q, "expected an array");
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string qi = q + "[" + std::to_string(i) + "]";
            EnvironmentSource e;
            if (v[i].is_string()) {
                e.path = c.file(v[i], qi);
            } else if (c.object(v[i], qi, {"path", "constant"})) {
                if (v[i].contains("path") == v[i].contains("constant"))
                    c.error(qi, "give exactly one of \"path\" or \"constant\"");
                with(v[i], "path", qi, [&](const json &x, const std::string &qq) { e.path = c.file(x, qq); });
                with(v[i], "constant", qi, [&](const json &x, const std::string &qq) {
                    c.vec3(x, qq, e.constant);
                    if (e.constant.x < 0 || e.constant.y < 0 || e.constant.z < 0) c.error(qq, "must be >= 0");
                });
            }
            cfg.environments.push_back(e);
        }
    });
    with(j, "exposure_ev", path, [&](const json &v, const std::string &q) { c.interval(v, q, l.exposure_ev); });
    with(j, "rotation", path, [&](const json &v, const std::string &q) { c.interval(v, q, l.rotation); });
    with(j, "extra_light_count", path, [&](const json &v, const std::string &q) {
        c.int_range(v, q, l.extra_light_count);
        if (l.extra_light_count.lo < 0) c.error(q, "minimum must be >= 0");
    });
    with(j, "intensity", path, [&](const json &v, const std::string &q) {
        c.interval(v, q, l.intensity);
        if (l.intensity.lo < 0) c.error(q, "must be >= 0");
    });
    with(j, "radius", path, [&](const json &v, const std::string &q) {
        c.interval(v, q, l.radius);
        if (l.radius.lo < 0) c.error(q, "must be >= 0");
    });
    with(j, "position_volume", path, [&](const json &v, const std::string &q) { c.box(v, q, l.position_volume); });
}

void parse_map(Ctx &c, const json &j, const std::string &path, MapSource &m, std::size_t components) {
    if (j.is_string()) {
        m.path = c.file(j, path);
        m.value.clear();
        return;
    }
    if (j.is_number()) {
        m.path.reset();
        m.value.assign(components, j.get<double>());
        return;
    }
    if (j.is_array() && j.size() == components) {
        std::vector<double> v;
        for (const auto &x : j) {
            if (!x.is_number()) {
                c.error(path, "expected numbers");
                return;
            }
            v.push_back(x.get<double>());
        }
        m.path.reset();
        m.value = v;
        return;
    }
    c.error(path, components == 1 ? "expected a file path or a number"
                                  : "expected a file path or " + std::to_string(components) + " numbers");
}

void parse_materials(Ctx &c, const json &j, const std::string &path, DatasetConfig &cfg) {
    if (!c.object(j, path, {"catalog", "hsv", "probabilities", "rust", "scratches", "polish", "resample",
                            "defect_texture_size"}))
        return;
    MaterialSpec &s = cfg.material_params;
    with(j, "catalog", path, [&](const json &v, const std::string &q) {
        if (!v.is_array()) {
            c.error(q, "expected an array");
            return;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string qi = q + "[" + std::to_string(i) + "]";
            MaterialSource m;
            if (c.object(v[i], qi, {"albedo", "normal", "roughness", "metallic", "displacement",
                                    "displacement_scale", "specular"})) {
                with(v[i], "albedo", qi, [&](const json &x, const std::string &qq) { parse_map(c, x, qq, m.albedo, 3); });
                with(v[i], "normal", qi, [&](const json &x, const std::string &qq) { parse_map(c, x, qq, m.normal, 3); });
                with(v[i], "roughness", qi,
                     [&](const json &x, const std::string &qq) { parse_map(c, x, qq, m.roughness, 1); });
                with(v[i], "metallic", qi,
                     [&](const json &x, const std::string &qq) { parse_map(c, x, qq, m.metallic, 1); });
                with(v[i], "displacement", qi,
                     [&](const json &x, const std::string &qq) { parse_map(c, x, qq, m.displacement, 1); });
                with(v[i], "displacement_scale", qi,
                     [&](const json &x, const std::string &qq) { c.number(x, qq, m.displacement_scale); });
                with(v[i], "specular", qi, [&](const json &x, const std::string &qq) {
                    if (c.number(x, qq, m.specular) && (m.specular < 0 || m.specular > 1)) c.error(qq, "must be in [0,1]");
                });
                for (const MapSource *ms : {&m.roughness, &m.metallic})
                    for (double x : ms->value)
                        if (x < 0 || x > 1) c.error(qi, "roughness and metallic values must be in [0,1]");
            }
            cfg.materials.push_back(m);
        }
    });
    with(j, "hsv", path, [&](const json &v, const std::string &q) {
        if (!c.object(v, q, {"hue", "saturation", "value"})) return;
        with(v, "hue", q, [&](const json &x, const std::string &qq) { c.interval(x, qq, s.hue); });
        with(v, "saturation", q, [&](const json &x, const std::string &qq) { c.interval(x, qq, s.saturation); });
        with(v, "value", q, [&](const json &x, const std::string &qq) { c.interval(x, qq, s.value); });
    });
    with(j, "probabilities", path, [&](const json &v, const std::string &q) {
        if (!c.object(v, q, {"rust", "scratches", "polish", "resample"})) return;
        auto prob = [&](const char *key, double &out) {
            with(v, key, q, [&](const json &x, const std::string &qq) {
                if (c.number(x, qq, out) && (out < 0 || out > 1)) c.error(qq, "probability must be in [0,1]");
            });
        };
        prob("rust", s.probabilities.rust);
        prob("scratches", s.probabilities.scratches);
        prob("polish", s.probabilities.polish);
        prob("resample", s.probabilities.resample);
    });
    with(j, "rust", path, [&](const json &v, const std::string &q) {
        if (!c.object(v, q, {"threshold", "frequency", "octaves", "color_a", "color_b"})) return;
        with(v, "threshold", q, [&](const json &x, const std::string &qq) {
            c.interval(x, qq, s.rust.threshold);
            if (s.rust.threshold.lo < -2 || s.rust.threshold.hi > 2) c.error(qq, "must lie inside [-2, 2]");
        });
        with(v, "frequency", q, [&](const json &x, const std::string &qq) {
            c.interval(x, qq, s.rust.frequency);
            if (!(s.rust.frequency.lo > 0)) c.error(qq, "must be > 0");
        });
        with(v, "octaves", q, [&](const json &x, const std::string &qq) {
            if (c.integer(x, qq, s.rust.octaves) && s.rust.octaves < 1) c.error(qq, "must be >= 1");
        });
        with(v, "color_a", q, [&](const json &x, const std::string &qq) { c.vec3(x, qq, s.rust.color_a); });
        with(v, "color_b", q, [&](const json &x, const std::string &qq) { c.vec3(x, qq, s.rust.color_b); });
    });
    with(j, "scratches", path, [&](const json &v, const std::string &q) {
        if (!c.object(v, q, {"count", "width_px", "depth", "length_uv"})) return;
        with(v, "count", q, [&](const json &x, const std::string &qq) {
            c.int_range(x, qq, s.scratches.count);
            if (s.scratches.count.lo < 0) c.error(qq, "minimum must be >= 0");
        });
        with(v, "width_px", q, [&](const json &x, const std::string &qq) { c.interval(x, qq, s.scratches.width_px); });
        with(v, "depth", q, [&](const json &x, const std::string &qq) { c.interval(x, qq, s.scratches.depth); });
        with(v, "length_uv", q, [&](const json &x, const std::string &qq) { c.interval(x, qq, s.scratches.length_uv); });
    });
    with(j, "polish", path, [&](const json &v, const std::string &q) {
        if (!c.object(v, q, {"direction", "anisotropy", "strength", "frequency"})) return;
        with(v, "direction", q, [&](const json &x, const std::string &qq) { c.interval(x, qq, s.polish.direction); });
        with(v, "anisotropy", q, [&](const json &x, const std::string &qq) {
            c.interval(x, qq, s.polish.anisotropy);
            if (s.polish.anisotropy.lo < 1) c.error(qq, "must be >= 1");
        });
        with(v, "strength", q, [&](const json &x, const std::string &qq) { c.interval(x, qq, s.polish.strength); });
        with(v, "frequency", q, [&](const json &x, const std::string &qq) {
            c.interval(x, qq, s.polish.frequency);
            if (!(s.polish.frequency.lo > 0)) c.error(qq, "must be > 0");
        });
    });
    with(j, "resample", path, [&](const json &v, const std::string &q) {
        if (!c.object(v, q, {"iterations", "patch_size", "radius0"})) return;
        with(v, "iterations", q, [&](const json &x, const std::string &qq) {
            if (c.integer(x, qq, s.resample.iterations) && s.resample.iterations < 0) c.error(qq, "must be >= 0");
        });
        with(v, "patch_size", q, [&](const json &x, const std::string &qq) {
            if (c.integer(x, qq, s.resample.patch_size) && s.resample.patch_size < 1) c.error(qq, "must be >= 1");
        });
        with(v, "radius0", q, [&](const json &x, const std::string &qq) {
            if (c.integer(x, qq, s.resample.radius0) && s.resample.radius0 < 1) c.error(qq, "must be >= 1");
        });
    });
    with(j, "defect_texture_size", path, [&](const json &v, const std::string &q) {
        if (c.integer(v, q, s.defect_texture_size) && s.defect_texture_size < 1) c.error(q, "must be >= 1");
    });
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors) : SpecError(join_errors(errors)), errors_(std::move(errors)) {}

CameraIntrinsics DatasetConfig::camera_intrinsics() const {
    if (intrinsics) {
        CameraIntrinsics k = *intrinsics;
        k.width = width;
        k.height = height;
        return k;
    }
    return CameraIntrinsics::from_fov(width, height, hfov_deg * kPi / 180.0);
}

DatasetConfig parse_config(const json &doc, const fs::path &base_dir) {
    Ctx c(base_dir);
    DatasetConfig cfg;
    if (!c.object(doc, "", {"seed", "num_images", "resolution", "profile", "camera", "spawn", "support_plane", "lights",
                            "materials", "output_root", "scene_id", "depth_scale"}))
        throw ConfigError({"config: top level must be a JSON object"});

    with(doc, "seed", "", [&](const json &v, const std::string &q) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            c.error(q, "expected a non-negative integer");
        else
            cfg.seed = v.get<std::uint64_t>();
    });
    with(doc, "num_images", "", [&](const json &v, const std::string &q) {
        if (c.integer(v, q, cfg.num_images) && cfg.num_images < 1) c.error(q, "must be >= 1");
    });
    with(doc, "resolution", "", [&](const json &v, const std::string &q) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer() ||
            v[0].get<int>() < 1 || v[1].get<int>() < 1)
            c.error(q, "expected [width, height] positive integers");
        else {
            cfg.width = v[0].get<int>();
            cfg.height = v[1].get<int>();
        }
    });
    if (doc.contains("profile"))
        parse_profile(c, doc["profile"], "profile", cfg.profile);
    if (doc.contains("camera")) parse_camera(c, doc["camera"], "camera", cfg);
    if (doc.contains("spawn"))
        parse_spawn(c, doc["spawn"], "spawn", cfg);
    else
        c.error("spawn", "missing (at least one model is required)");
    if (doc.contains("support_plane")) parse_support_plane(c, doc["support_plane"], "support_plane", cfg);
    if (doc.contains("lights"))
        parse_lights(c, doc["lights"], "lights", cfg);
    else
        c.error("lights", "missing (at least one environment is required)");
    if (doc.contains("materials")) parse_materials(c, doc["materials"], "materials", cfg);
    with(doc, "output_root", "", [&](const json &v, const std::string &q) {
        if (!v.is_string() || v.get<std::string>().empty())
            c.error(q, "expected a directory path");
        else {
            fs::path p = v.get<std::string>();
            cfg.output_root = p.is_relative() ? (base_dir / p).lexically_normal() : p;
        }
    });
    if (!doc.contains("output_root")) cfg.output_root = (base_dir / cfg.output_root).lexically_normal();
    with(doc, "scene_id", "", [&](const json &v, const std::string &q) {
        if (c.integer(v, q, cfg.scene_id) && cfg.scene_id < 0) c.error(q, "must be >= 0");
    });
    with(doc, "depth_scale", "", [&](const json &v, const std::string &q) {
        if (c.number(v, q, cfg.depth_scale) && !(cfg.depth_scale > 0)) c.error(q, "must be > 0");
    });

    if (doc.contains("spawn") && cfg.models.empty()) c.error("spawn.models", "at least one model is required");
    if (doc.contains("lights") && cfg.environments.empty())
        c.error("lights.environments", "at least one environment is required");
    if (cfg.unique_models && cfg.count.hi > static_cast<int>(cfg.models.size()))
        c.error("spawn.count", "maximum exceeds the number of models with unique_models");
    if (cfg.materials.empty()) cfg.materials.push_back(MaterialSource{});
    if (cfg.support_plane && cfg.rest_on_plane && cfg.spawn_volume.lo.y < cfg.support_plane->height)
        cfg.spawn_volume.lo.y = cfg.support_plane->height;
    if (cfg.intrinsics) {
        const CameraIntrinsics k = cfg.camera_intrinsics();
        if (!k.valid()) c.error("camera.intrinsics", "need fx, fy > 0 and the principal point inside the image");
    }
    {
        std::set<int> ids;
        for (const auto &m : cfg.models)
            if (!ids.insert(m.obj_id).second) c.error("spawn.models", "duplicate obj_id " + std::to_string(m.obj_id));
    }

    if (!c.errors().empty()) throw ConfigError(std::move(c.errors()));
    return cfg;
}

DatasetConfig validate_config(const fs::path &file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError({file.string() + ": cannot read config file"});
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError({file.string() + ": " + e.what()});
    }
    return parse_config(doc, fs::absolute(file).parent_path());
}

}  // namespace cadsynth
