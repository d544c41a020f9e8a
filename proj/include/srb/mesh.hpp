#ifndef SRB_MESH_HPP
#define SRB_MESH_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "srb/error.hpp"
#include "srb/geometry.hpp"

namespace srb {

struct MeshData {
    std::vector<Vec3> vertices;
    std::vector<std::array<uint32_t, 3>> triangles;

    bool empty() const { return triangles.empty(); }

    // Signed volume via the divergence theorem; meaningful for closed meshes.
    double volume() const {
        double v = 0.0;
        for (const auto& t : triangles) {
            const Vec3& a = vertices[t[0]];
            const Vec3& b = vertices[t[1]];
            const Vec3& c = vertices[t[2]];
            v += a.dot(b.cross(c)) / 6.0;
        }
        return v;
    }
};

namespace detail {

// Quantize to 1e-9 so near-identical STL vertices share one index.
struct VertexMerger {
    std::map<std::array<int64_t, 3>, uint32_t> index;
    std::vector<Vec3> vertices;

    uint32_t insert(const Vec3& v) {
        std::array<int64_t, 3> key{static_cast<int64_t>(std::llround(v.x * 1e9)),
                                   static_cast<int64_t>(std::llround(v.y * 1e9)),
                                   static_cast<int64_t>(std::llround(v.z * 1e9))};
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        uint32_t id = static_cast<uint32_t>(vertices.size());
        vertices.push_back(v);
        index.emplace(key, id);
        return id;
    }
};

inline float read_f32_le(const uint8_t* p) {
    uint32_t u = static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
                 (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

inline MeshData load_stl_ascii(const std::string& text) {
    std::istringstream in(text);
    std::string tok;
    in >> tok; // "solid"
    std::getline(in, tok); // rest of the name line
    VertexMerger merger;
    MeshData mesh;
    std::string word;
    while (in >> word) {
        if (word == "endsolid") break;
        if (word != "facet") {
            throw Error(errc::parse, "expected 'facet' or 'endsolid', got '" + word + "'");
        }
        std::string normal_kw;
        double nx, ny, nz;
        if (!(in >> normal_kw >> nx >> ny >> nz) || normal_kw != "normal") {
            throw Error(errc::parse, "malformed facet normal");
        }
        std::string outer, loop;
        if (!(in >> outer >> loop) || outer != "outer" || loop != "loop") {
            throw Error(errc::parse, "expected 'outer loop'");
        }
        std::array<uint32_t, 3> tri{};
        for (int i = 0; i < 3; ++i) {
            std::string vkw;
            double x, y, z;
            if (!(in >> vkw >> x >> y >> z) || vkw != "vertex") {
                throw Error(errc::parse, "expected vertex line");
            }
            tri[static_cast<size_t>(i)] = merger.insert({x, y, z});
        }
        std::string endloop, endfacet;
        if (!(in >> endloop >> endfacet) || endloop != "endloop" || endfacet != "endfacet") {
            throw Error(errc::parse, "expected 'endloop' and 'endfacet'");
        }
        if (tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2]) {
            mesh.triangles.push_back(tri);
        }
    }
    mesh.vertices = std::move(merger.vertices);
    return mesh;
}

inline MeshData load_stl_binary(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 84) {
        throw Error(errc::truncation, "binary STL shorter than header + count");
    }
    uint32_t count = static_cast<uint32_t>(bytes[80]) | (static_cast<uint32_t>(bytes[81]) << 8) |
                     (static_cast<uint32_t>(bytes[82]) << 16) |
                     (static_cast<uint32_t>(bytes[83]) << 24);
    size_t expected = 84 + static_cast<size_t>(count) * 50;
    if (bytes.size() < expected) {
        throw Error(errc::truncation, "binary STL truncated mid-record");
    }
    if (bytes.size() > expected) {
        throw Error(errc::parse, "binary STL triangle count mismatch (trailing bytes)");
    }
    VertexMerger merger;
    MeshData mesh;
    for (uint32_t i = 0; i < count; ++i) {
        const uint8_t* rec = bytes.data() + 84 + static_cast<size_t>(i) * 50;
        std::array<uint32_t, 3> tri{};
        for (int v = 0; v < 3; ++v) {
            const uint8_t* p = rec + 12 + v * 12; // skip the normal
            Vec3 vert{read_f32_le(p), read_f32_le(p + 4), read_f32_le(p + 8)};
            tri[static_cast<size_t>(v)] = merger.insert(vert);
        }
        if (tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2]) {
            mesh.triangles.push_back(tri);
        }
    }
    mesh.vertices = std::move(merger.vertices);
    return mesh;
}

} // namespace detail

// Binary or ASCII STL. ASCII is detected by the "solid" prefix followed by
// a valid facet grammar; 84+ byte files that merely start with "solid" but
// carry a consistent binary layout are treated as binary.
inline MeshData load_stl(const std::vector<uint8_t>& bytes) {
    bool starts_solid = bytes.size() >= 5 && std::memcmp(bytes.data(), "solid", 5) == 0;
    if (starts_solid) {
        std::string text(bytes.begin(), bytes.end());
        if (text.find("facet") != std::string::npos || text.find("endsolid") != std::string::npos) {
            return detail::load_stl_ascii(text);
        }
    }
    return detail::load_stl_binary(bytes);
}

inline MeshData tessellate_box(const Vec3& size) {
    if (size.x <= 0.0 || size.y <= 0.0 || size.z <= 0.0) {
        throw Error(errc::invalid_input, "box dimensions must be positive");
    }
    double hx = size.x / 2, hy = size.y / 2, hz = size.z / 2;
    MeshData m;
    for (int i = 0; i < 8; ++i) {
        m.vertices.push_back({(i & 1) ? hx : -hx, (i & 2) ? hy : -hy, (i & 4) ? hz : -hz});
    }
    // Outward-facing winding per face.
    const std::array<std::array<uint32_t, 3>, 12> tris{{{0, 2, 1}, {1, 2, 3},   // -z
                                                        {4, 5, 6}, {5, 7, 6},   // +z
                                                        {0, 1, 4}, {1, 5, 4},   // -y
                                                        {2, 6, 3}, {3, 6, 7},   // +y
                                                        {0, 4, 2}, {2, 4, 6},   // -x
                                                        {1, 3, 5}, {3, 7, 5}}}; // +x
    m.triangles.assign(tris.begin(), tris.end());
    return m;
}

inline MeshData tessellate_cylinder(double radius, double length, int segments = 32) {
    if (radius <= 0.0 || length <= 0.0) {
        throw Error(errc::invalid_input, "cylinder dimensions must be positive");
    }
    MeshData m;
    double hz = length / 2;
    for (int i = 0; i < segments; ++i) {
        double a = 2.0 * std::numbers::pi * i / segments;
        m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), -hz});
        m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), hz});
    }
    uint32_t bottom_center = static_cast<uint32_t>(m.vertices.size());
    m.vertices.push_back({0, 0, -hz});
    uint32_t top_center = static_cast<uint32_t>(m.vertices.size());
    m.vertices.push_back({0, 0, hz});
    for (int i = 0; i < segments; ++i) {
        uint32_t b0 = static_cast<uint32_t>(2 * i);
        uint32_t t0 = b0 + 1;
        uint32_t b1 = static_cast<uint32_t>(2 * ((i + 1) % segments));
        uint32_t t1 = b1 + 1;
        m.triangles.push_back({b0, b1, t0});
        m.triangles.push_back({t0, b1, t1});
        m.triangles.push_back({bottom_center, b1, b0});
        m.triangles.push_back({top_center, t0, t1});
    }
    return m;
}

inline MeshData tessellate_sphere(double radius, int stacks = 16, int slices = 32) {
    if (radius <= 0.0) {
        throw Error(errc::invalid_input, "sphere radius must be positive");
    }
    MeshData m;
    uint32_t south = 0;
    m.vertices.push_back({0, 0, -radius});
    // Interior rings of the UV grid.
    for (int i = 1; i < stacks; ++i) {
        double phi = std::numbers::pi * i / stacks - std::numbers::pi / 2;
        for (int j = 0; j < slices; ++j) {
            double theta = 2.0 * std::numbers::pi * j / slices;
            m.vertices.push_back({radius * std::cos(phi) * std::cos(theta),
                                  radius * std::cos(phi) * std::sin(theta),
                                  radius * std::sin(phi)});
        }
    }
    uint32_t north = static_cast<uint32_t>(m.vertices.size());
    m.vertices.push_back({0, 0, radius});
    auto ring = [&](int i, int j) {
        return static_cast<uint32_t>(1 + (i - 1) * slices + (j % slices));
    };
    for (int j = 0; j < slices; ++j) {
        m.triangles.push_back({south, ring(1, j + 1), ring(1, j)});
        m.triangles.push_back({north, ring(stacks - 1, j), ring(stacks - 1, j + 1)});
    }
    for (int i = 1; i < stacks - 1; ++i) {
        for (int j = 0; j < slices; ++j) {
            m.triangles.push_back({ring(i, j), ring(i, j + 1), ring(i + 1, j)});
            m.triangles.push_back({ring(i, j + 1), ring(i + 1, j + 1), ring(i + 1, j)});
        }
    }
    return m;
}

inline MeshData transform_mesh(const MeshData& mesh, const Mat4& t) {
    MeshData r = mesh;
    for (auto& v : r.vertices) {
        v = t.transform_point(v);
    }
    return r;
}

inline MeshData scale_mesh(const MeshData& mesh, const Vec3& s) {
    MeshData r = mesh;
    for (auto& v : r.vertices) {
        v = {v.x * s.x, v.y * s.y, v.z * s.z};
    }
    return r;
}

} // namespace srb

#endif
