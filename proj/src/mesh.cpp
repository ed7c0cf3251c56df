#include "cadsynth/mesh.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>

#include "cadsynth/errors.hpp"

namespace cadsynth {

Aabb Mesh::bounds() const {
    Aabb b;
    for (const Vec3 &v : vertices) b.expand(v);
    return b;
}

double Mesh::surface_area() const {
    double area = 0;
    for (const auto &t : triangles)
        area += 0.5 * length(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
    return area;
}

Vec3 Mesh::centroid() const {
    Vec3 c;
    for (const Vec3 &v : vertices) c += v;
    return vertices.empty() ? c : c / static_cast<double>(vertices.size());
}

void Mesh::validate() const {
    if (normals.size() != vertices.size() || uvs.size() != vertices.size())
        throw FormatError("mesh attribute arrays differ in length");
    for (const auto &t : triangles)
        for (std::uint32_t i : t)
            if (i >= vertices.size()) throw FormatError(fmt::format("triangle index {} out of range", i));
    for (const Vec3 &n : normals)
        if (std::abs(length(n) - 1.0) > 1e-4) throw FormatError("mesh normal is not unit length");
    if (object_id <= 0) throw FormatError("object_id must be positive");
}

std::vector<Vec3> compute_vertex_normals(const std::vector<Vec3> &vertices,
                                         const std::vector<std::array<std::uint32_t, 3>> &triangles) {
    std::vector<Vec3> acc(vertices.size());
    for (const auto &t : triangles) {
        // unnormalized cross product is already area weighted
        const Vec3 n = cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
        for (std::uint32_t i : t) acc[i] += n;
    }
    for (Vec3 &n : acc) {
        const double len = length(n);
        n = len > 0 ? n / len : Vec3(0, 0, 1);
    }
    return acc;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<long long> parse_int(std::string_view s) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Splits a planar polygon into a triangle fan; throws for non-convex outlines.
std::vector<std::array<std::uint32_t, 3>> fan_triangulate(const std::vector<std::uint32_t> &poly,
                                                         const std::vector<Vec3> &pos, int line) {
    std::vector<std::array<std::uint32_t, 3>> tris;
    if (poly.size() == 3) {
        tris.push_back({poly[0], poly[1], poly[2]});
        return tris;
    }
    Vec3 normal;  // Newell
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec3 &a = pos[poly[i]];
        const Vec3 &b = pos[poly[(i + 1) % poly.size()]];
        normal += Vec3((a.y - b.y) * (a.z + b.z), (a.z - b.z) * (a.x + b.x), (a.x - b.x) * (a.y + b.y));
    }
    const double scale = length(normal);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec3 &a = pos[poly[i]];
        const Vec3 &b = pos[poly[(i + 1) % poly.size()]];
        const Vec3 &c = pos[poly[(i + 2) % poly.size()]];
        if (dot(cross(b - a, c - b), normal) < -1e-12 * scale * scale)
            throw FormatError("non-convex polygon face cannot be fan-triangulated", line);
    }
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) tris.push_back({poly[0], poly[i], poly[i + 1]});
    return tris;
}

Mesh load_obj(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    std::vector<Vec3> positions, file_normals;
    std::vector<Vec2> file_uvs;
    std::map<std::tuple<long long, long long, long long>, std::uint32_t> corner_index;
    Mesh mesh;
    std::vector<std::optional<Vec3>> corner_normals;
    bool missing_normal = false;

    auto resolve = [](long long idx, std::size_t count, int line) -> long long {
        if (idx < 0) idx += static_cast<long long>(count) + 1;
        if (idx < 1 || idx > static_cast<long long>(count))
            throw FormatError(fmt::format("index {} out of range", idx), line);
        return idx - 1;
    };

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto tok = split_ws(line);
        const std::string_view key = tok[0];
        if (key == "v" || key == "vn") {
            if (tok.size() < 4) throw FormatError(fmt::format("'{}' record needs 3 components", key), line_no);
            Vec3 v;
            for (int i = 0; i < 3; ++i) {
                auto d = parse_double(tok[1 + i]);
                if (!d) throw FormatError(fmt::format("bad number '{}'", tok[1 + i]), line_no);
                v[i] = *d;
            }
            (key == "v" ? positions : file_normals).push_back(v);
        } else if (key == "vt") {
            if (tok.size() < 2) throw FormatError("'vt' record needs components", line_no);
            auto u = parse_double(tok[1]);
            auto v = tok.size() > 2 ? parse_double(tok[2]) : std::optional<double>(0.0);
            if (!u || !v) throw FormatError("bad texture coordinate", line_no);
            file_uvs.push_back({*u, *v});
        } else if (key == "f") {
            if (tok.size() < 4) throw FormatError("face needs at least 3 vertices", line_no);
            std::vector<std::uint32_t> poly;
            for (std::size_t i = 1; i < tok.size(); ++i) {
                std::string_view c = tok[i];
                long long vi = 0, ti = -1, ni = -1;
                const std::size_t s1 = c.find('/');
                auto head = parse_int(c.substr(0, s1));
                if (!head) throw FormatError(fmt::format("bad face corner '{}'", c), line_no);
                vi = resolve(*head, positions.size(), line_no);
                if (s1 != std::string_view::npos) {
                    std::string_view rest = c.substr(s1 + 1);
                    const std::size_t s2 = rest.find('/');
                    std::string_view ts = rest.substr(0, s2);
                    if (!ts.empty()) {
                        auto t = parse_int(ts);
                        if (!t) throw FormatError(fmt::format("bad face corner '{}'", c), line_no);
                        ti = resolve(*t, file_uvs.size(), line_no);
                    }
                    if (s2 != std::string_view::npos) {
                        auto n = parse_int(rest.substr(s2 + 1));
                        if (!n) throw FormatError(fmt::format("bad face corner '{}'", c), line_no);
                        ni = resolve(*n, file_normals.size(), line_no);
                    }
                }
                const auto key3 = std::make_tuple(vi, ti, ni);
                auto it = corner_index.find(key3);
                if (it == corner_index.end()) {
                    const auto idx = static_cast<std::uint32_t>(mesh.vertices.size());
                    mesh.vertices.push_back(positions[vi]);
                    mesh.uvs.push_back(ti >= 0 ? file_uvs[ti] : Vec2{});
                    if (ni >= 0) {
                        corner_normals.push_back(normalize(file_normals[ni]));
                    } else {
                        corner_normals.push_back(std::nullopt);
                        missing_normal = true;
                    }
                    it = corner_index.emplace(key3, idx).first;
                }
                poly.push_back(it->second);
            }
            for (const auto &t : fan_triangulate(poly, mesh.vertices, line_no)) mesh.triangles.push_back(t);
        }
        // o, g, s, usemtl, mtllib and friends carry nothing we need
    }
    if (missing_normal) {
        mesh.normals = compute_vertex_normals(mesh.vertices, mesh.triangles);
    } else {
        for (const auto &n : corner_normals) mesh.normals.push_back(*n);
    }
    return mesh;
}

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<PlyType> ply_type(std::string_view s) {
    if (s == "char" || s == "int8") return PlyType::i8;
    if (s == "uchar" || s == "uint8") return PlyType::u8;
    if (s == "short" || s == "int16") return PlyType::i16;
    if (s == "ushort" || s == "uint16") return PlyType::u16;
    if (s == "int" || s == "int32") return PlyType::i32;
    if (s == "uint" || s == "uint32") return PlyType::u32;
    if (s == "float" || s == "float32") return PlyType::f32;
    if (s == "double" || s == "float64") return PlyType::f64;
    return std::nullopt;
}

std::size_t ply_size(PlyType t) {
    switch (t) {
        case PlyType::i8:
        case PlyType::u8: return 1;
        case PlyType::i16:
        case PlyType::u16: return 2;
        case PlyType::i32:
        case PlyType::u32:
        case PlyType::f32: return 4;
        case PlyType::f64: return 8;
    }
    return 0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::f32;
    bool is_list = false;
    PlyType count_type = PlyType::u8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> props;
};

/// Pulls scalar values from either an ASCII token stream or little-endian binary.
class PlyReader {
public:
    PlyReader(std::istream &in, bool binary, int line) : in_(in), binary_(binary), line_(line) {}

    double read(PlyType t) {
        if (!binary_) return read_ascii();
        unsigned char buf[8];
        if (!in_.read(reinterpret_cast<char *>(buf), static_cast<std::streamsize>(ply_size(t))))
            throw FormatError("unexpected end of binary PLY data");
        switch (t) {
            case PlyType::i8: return static_cast<std::int8_t>(buf[0]);
            case PlyType::u8: return buf[0];
            case PlyType::i16: return load<std::int16_t>(buf);
            case PlyType::u16: return load<std::uint16_t>(buf);
            case PlyType::i32: return load<std::int32_t>(buf);
            case PlyType::u32: return load<std::uint32_t>(buf);
            case PlyType::f32: return load<float>(buf);
            case PlyType::f64: return load<double>(buf);
        }
        return 0;
    }

    void end_element() {
        if (binary_) return;
        if (pos_ < tokens_.size()) throw FormatError("trailing values on PLY element line", line_);
        tokens_.clear();
        pos_ = 0;
    }

private:
    template <typename T>
    static T load(const unsigned char *b) {
        T v;
        std::memcpy(&v, b, sizeof(T));
        return v;
    }

    double read_ascii() {
        while (pos_ >= tokens_.size()) {
            if (!std::getline(in_, buffer_)) throw FormatError("unexpected end of ASCII PLY data", line_);
            ++line_;
            tokens_ = split_ws(buffer_);
            pos_ = 0;
        }
        auto v = parse_double(tokens_[pos_++]);
        if (!v) throw FormatError("bad PLY number", line_);
        return *v;
    }

    std::istream &in_;
    bool binary_;
    int line_;
    std::string buffer_;
    std::vector<std::string_view> tokens_;
    std::size_t pos_ = 0;
};

Mesh load_ply(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> std::string_view {
        if (!std::getline(in, line)) throw FormatError("unexpected end of PLY header", line_no);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };
    if (trim(next_line()) != "ply") throw FormatError("missing 'ply' magic", 1);

    bool binary = false;
    bool have_format = false;
    std::vector<PlyElement> elements;
    for (;;) {
        const auto tok = split_ws(next_line());
        if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "end_header") break;
        if (tok[0] == "format") {
            if (tok.size() < 3 || tok[2] != "1.0") throw FormatError("unsupported PLY version", line_no);
            if (tok[1] == "ascii")
                binary = false;
            else if (tok[1] == "binary_little_endian")
                binary = true;
            else
                throw FormatError(fmt::format("unsupported PLY format '{}'", tok[1]), line_no);
            have_format = true;
        } else if (tok[0] == "element") {
            auto n = tok.size() == 3 ? parse_int(tok[2]) : std::nullopt;
            if (!n || *n < 0) throw FormatError("bad element declaration", line_no);
            elements.push_back({std::string(tok[1]), static_cast<std::size_t>(*n), {}});
        } else if (tok[0] == "property") {
            if (elements.empty()) throw FormatError("property before element", line_no);
            PlyProperty p;
            if (tok.size() == 5 && tok[1] == "list") {
                auto ct = ply_type(tok[2]);
                auto vt = ply_type(tok[3]);
                if (!ct || !vt) throw FormatError("bad list property types", line_no);
                p = {std::string(tok[4]), *vt, true, *ct};
            } else if (tok.size() == 3) {
                auto t = ply_type(tok[1]);
                if (!t) throw FormatError(fmt::format("unknown PLY type '{}'", tok[1]), line_no);
                p = {std::string(tok[2]), *t, false, PlyType::u8};
            } else {
                throw FormatError("bad property declaration", line_no);
            }
            elements.back().props.push_back(p);
        } else {
            throw FormatError(fmt::format("unexpected header keyword '{}'", tok[0]), line_no);
        }
    }
    if (!have_format) throw FormatError("PLY header lacks a format line", line_no);

    Mesh mesh;
    std::vector<Vec3> normals;
    bool has_normals = false;
    PlyReader reader(in, binary, line_no);
    for (const PlyElement &el : elements) {
        const bool is_vertex = el.name == "vertex";
        const bool is_face = el.name == "face";
        for (std::size_t i = 0; i < el.count; ++i) {
            Vec3 p, n;
            Vec2 uv;
            for (const PlyProperty &prop : el.props) {
                if (prop.is_list) {
                    const auto count = static_cast<long long>(reader.read(prop.count_type));
                    std::vector<std::uint32_t> poly;
                    for (long long k = 0; k < count; ++k) {
                        const double idx = reader.read(prop.type);
                        if (idx < 0 || idx >= static_cast<double>(mesh.vertices.size()))
                            throw FormatError(fmt::format("face index {} out of range", idx));
                        poly.push_back(static_cast<std::uint32_t>(idx));
                    }
                    if (is_face && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
                        if (poly.size() < 3) throw FormatError("face with fewer than 3 vertices");
                        for (const auto &t : fan_triangulate(poly, mesh.vertices, 0)) mesh.triangles.push_back(t);
                    }
                    continue;
                }
                const double v = reader.read(prop.type);
                if (!is_vertex) continue;
                const std::string &nm = prop.name;
                if (nm == "x") p.x = v;
                else if (nm == "y") p.y = v;
                else if (nm == "z") p.z = v;
                else if (nm == "nx") { n.x = v; has_normals = true; }
                else if (nm == "ny") n.y = v;
                else if (nm == "nz") n.z = v;
                else if (nm == "u" || nm == "s" || nm == "texture_u") uv.x = v;
                else if (nm == "v" || nm == "t" || nm == "texture_v") uv.y = v;
            }
            reader.end_element();
            if (is_vertex) {
                mesh.vertices.push_back(p);
                normals.push_back(n);
                mesh.uvs.push_back(uv);
            }
        }
    }
    if (has_normals) {
        for (Vec3 &n : normals) n = length(n) > 0 ? normalize(n) : Vec3(0, 0, 1);
        mesh.normals = std::move(normals);
    } else {
        mesh.normals = compute_vertex_normals(mesh.vertices, mesh.triangles);
    }
    return mesh;
}

}  // namespace

Mesh load_mesh(const std::filesystem::path &path, MeshFormat format) {
    Mesh m = format == MeshFormat::obj ? load_obj(path) : load_ply(path);
    m.validate();
    return m;
}

Mesh load_mesh(const std::filesystem::path &path) {
    std::string ext = path.extension().string();
    for (auto &c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".obj") return load_mesh(path, MeshFormat::obj);
    if (ext == ".ply") return load_mesh(path, MeshFormat::ply);
    throw FormatError("unsupported mesh extension '" + ext + "' for '" + path.string() + "'");
}

void write_ply(const Mesh &mesh, const std::filesystem::path &path, PlyEncoding encoding) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    const bool binary = encoding == PlyEncoding::binary_little_endian;
    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
        << "element vertex " << mesh.vertices.size() << "\n";
    for (const char *p : {"x", "y", "z", "nx", "ny", "nz", "texture_u", "texture_v"})
        out << "property double " << p << "\n";
    out << "element face " << mesh.triangles.size() << "\nproperty list uchar int vertex_indices\nend_header\n";

    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3 &p = mesh.vertices[i];
        const Vec3 &n = mesh.normals[i];
        const Vec2 &uv = mesh.uvs[i];
        const double vals[8] = {p.x, p.y, p.z, n.x, n.y, n.z, uv.x, uv.y};
        if (binary) {
            out.write(reinterpret_cast<const char *>(vals), sizeof(vals));
        } else {
            out << fmt::format("{} {} {} {} {} {} {} {}\n", vals[0], vals[1], vals[2], vals[3], vals[4], vals[5],
                               vals[6], vals[7]);
        }
    }
    for (const auto &t : mesh.triangles) {
        if (binary) {
            const unsigned char n = 3;
            const std::int32_t idx[3] = {static_cast<std::int32_t>(t[0]), static_cast<std::int32_t>(t[1]),
                                         static_cast<std::int32_t>(t[2])};
            out.write(reinterpret_cast<const char *>(&n), 1);
            out.write(reinterpret_cast<const char *>(idx), sizeof(idx));
        } else {
            out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
        }
    }
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Mesh scaled(const Mesh &mesh, double factor) {
    Mesh m = mesh;
    for (Vec3 &v : m.vertices) v *= factor;
    return m;
}

Mesh make_box(const Vec3 &h, int object_id) {
    Mesh m;
    m.object_id = object_id;
    // each face: normal axis, sign
    for (int axis = 0; axis < 3; ++axis)
        for (int sign : {-1, 1}) {
            Vec3 n;
            n[axis] = sign;
            const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
            const auto base = static_cast<std::uint32_t>(m.vertices.size());
            const double corners[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
            for (const auto &c : corners) {
                Vec3 p;
                p[axis] = sign * h[axis];
                p[a1] = c[0] * h[a1];
                p[a2] = c[1] * h[a2];
                m.vertices.push_back(p);
                m.normals.push_back(n);
                m.uvs.push_back({(c[0] + 1) * 0.5, (c[1] + 1) * 0.5});
            }
            // (a1, a2, axis) is right handed, so ccw in (a1, a2) faces +axis
            if (sign > 0) {
                m.triangles.push_back({base, base + 1, base + 2});
                m.triangles.push_back({base, base + 2, base + 3});
            } else {
                m.triangles.push_back({base, base + 2, base + 1});
                m.triangles.push_back({base, base + 3, base + 2});
            }
        }
    return m;
}

Mesh make_sphere(double radius, int slices, int stacks, int object_id) {
    Mesh m;
    m.object_id = object_id;
    for (int i = 0; i <= stacks; ++i) {
        const double theta = kPi * i / stacks;
        for (int j = 0; j <= slices; ++j) {
            const double phi = 2 * kPi * j / slices;
            const Vec3 n(std::sin(theta) * std::cos(phi), std::cos(theta), std::sin(theta) * std::sin(phi));
            m.vertices.push_back(n * radius);
            m.normals.push_back(n);
            m.uvs.push_back({static_cast<double>(j) / slices, static_cast<double>(i) / stacks});
        }
    }
    const auto row = static_cast<std::uint32_t>(slices + 1);
    for (int i = 0; i < stacks; ++i)
        for (int j = 0; j < slices; ++j) {
            const std::uint32_t a = i * row + j, b = a + 1, c = a + row, d = c + 1;
            if (i != 0) m.triangles.push_back({a, b, c});
            if (i != stacks - 1) m.triangles.push_back({b, d, c});
        }
    return m;
}

}  // namespace cadsynth
