#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "cadsynth/math.hpp"

namespace cadsynth {

/// Triangle mesh in meters. Invariants: indices < vertex count, unit normals, one normal and uv per vertex.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Vec3> normals;
    std::vector<Vec2> uvs;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    int object_id = 1;

    Aabb bounds() const;
    double surface_area() const;
    Vec3 centroid() const;  // vertex average

    /// Throws FormatError when an invariant is violated.
    void validate() const;

    bool operator==(const Mesh &) const = default;
};

enum class MeshFormat { obj, ply };
enum class PlyEncoding { ascii, binary_little_endian };

/// Area-weighted vertex normals; zero-area neighborhoods fall back to +Z.
std::vector<Vec3> compute_vertex_normals(const std::vector<Vec3> &vertices,
                                         const std::vector<std::array<std::uint32_t, 3>> &triangles);

Mesh load_mesh(const std::filesystem::path &path, MeshFormat format);
/// Picks the format from the file extension (.obj / .ply).
Mesh load_mesh(const std::filesystem::path &path);

/// Writes x y z nx ny nz texture_u texture_v as doubles, faces as uchar/int lists.
void write_ply(const Mesh &mesh, const std::filesystem::path &path,
               PlyEncoding encoding = PlyEncoding::binary_little_endian);

/// Uniformly scales positions (e.g. 1000 for m -> mm).
Mesh scaled(const Mesh &mesh, double factor);

/// Closed axis-aligned box with 24 vertices (flat-shaded faces), 12 triangles.
Mesh make_box(const Vec3 &half_extent, int object_id = 1);
/// UV sphere of the given radius centered at the origin.
Mesh make_sphere(double radius, int slices = 48, int stacks = 24, int object_id = 1);

}  // namespace cadsynth
