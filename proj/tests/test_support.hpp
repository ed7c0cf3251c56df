#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <unistd.h>

#include "cadsynth/errors.hpp"
#include "cadsynth/mesh.hpp"
#include "cadsynth/scene.hpp"

namespace cadsynth::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string &tag = "t") {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("cadsynth_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const std::filesystem::path &path() const { return path_; }
    std::filesystem::path operator/(const std::string &s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path &p, const std::string &text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

inline Camera camera_at(const RigidTransform &w2c, int w, int h, double hfov = 0.8) {
    return Camera{CameraIntrinsics::from_fov(w, h, hfov), w2c};
}

/// Camera at (0, 0, -dist) looking at the origin, upright.
inline RigidTransform front_view(double dist) {
    RigidTransform t;
    t.rotation = Mat3::from_rows({-1, 0, 0}, {0, -1, 0}, {0, 0, 1});
    t.translation = {0, 0, dist};
    return t;
}

inline MeshInstance instance_of(const Mesh &m, const RigidTransform &m2w = {},
                                MaterialMaps mat = MaterialMaps::uniform(Vec3(0.5), 0.5, 0.0)) {
    return {std::make_shared<const Mesh>(m), m2w, std::move(mat)};
}

inline RigidTransform translation(const Vec3 &t) {
    RigidTransform r;
    r.translation = t;
    return r;
}

}  // namespace cadsynth::testing
