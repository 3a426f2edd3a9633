#include "geomag/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace geomag {

double TriMesh::total_area() const {
    double s = 0.0;
    for (double a : area) s += a;
    return s;
}

double TriMesh::volume() const {
    double v = 0.0;
    for (size_t i = 0; i < area.size(); ++i) {
        v += centroid[i].dot(normal[i]) * area[i];
    }
    return v / 3.0;
}

double TriMesh::max_panel_diameter() const {
    double d = 0.0;
    for (const auto& f : faces) {
        const Vec3& a = vertices[f(0)];
        const Vec3& b = vertices[f(1)];
        const Vec3& c = vertices[f(2)];
        d = std::max({d, (a - b).norm(), (b - c).norm(), (c - a).norm()});
    }
    return d;
}

TriMesh finalize_mesh(std::vector<Vec3> vertices,
                      std::vector<Eigen::Vector3i> faces) {
    TriMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.faces = std::move(faces);

    const int nv = static_cast<int>(mesh.vertices.size());
    // Closed orientable surface: every directed edge appears exactly once,
    // and its reverse exactly once.
    std::map<std::pair<int, int>, int> directed;
    for (const auto& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            const int i = f(e);
            const int j = f((e + 1) % 3);
            if (i < 0 || j < 0 || i >= nv || j >= nv) {
                throw MeshError("face references vertex out of range");
            }
            if (i == j) throw MeshError("degenerate face edge");
            if (++directed[{i, j}] > 1) {
                throw MeshError("non-orientable mesh: repeated directed edge");
            }
        }
    }
    for (const auto& [edge, count] : directed) {
        auto rev = directed.find({edge.second, edge.first});
        if (rev == directed.end()) {
            throw MeshError("open surface: boundary edge found");
        }
    }

    auto build_panels = [&mesh]() {
        const size_t nf = mesh.faces.size();
        mesh.centroid.resize(nf);
        mesh.normal.resize(nf);
        mesh.area.resize(nf);
        for (size_t i = 0; i < nf; ++i) {
            const Vec3& a = mesh.vertices[mesh.faces[i](0)];
            const Vec3& b = mesh.vertices[mesh.faces[i](1)];
            const Vec3& c = mesh.vertices[mesh.faces[i](2)];
            const Vec3 cross = (b - a).cross(c - a);
            const double two_area = cross.norm();
            if (two_area < 2e-14) throw MeshError("degenerate panel (area ~ 0)");
            mesh.centroid[i] = (a + b + c) / 3.0;
            mesh.normal[i] = cross / two_area;
            mesh.area[i] = 0.5 * two_area;
        }
    };

    build_panels();
    if (mesh.volume() < 0.0) {
        for (auto& f : mesh.faces) std::swap(f(1), f(2));
        build_panels();
        mesh.warnings.push_back("mesh orientation was inward; normals flipped");
    }
    return mesh;
}

TriMesh make_unit_sphere_mesh(int refinement) {
    if (refinement < 0 || refinement > 6) {
        throw DomainError("make_unit_sphere_mesh: refinement must be in [0, 6]");
    }

    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : verts) v.normalize();
    std::vector<Eigen::Vector3i> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int level = 0; level < refinement; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int i, int j) {
            const auto key = std::minmax(i, j);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int idx = static_cast<int>(verts.size());
            verts.push_back((verts[i] + verts[j]).normalized());
            midpoint[key] = idx;
            return idx;
        };
        std::vector<Eigen::Vector3i> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f(0), f(1));
            const int bc = mid(f(1), f(2));
            const int ca = mid(f(2), f(0));
            next.push_back({f(0), ab, ca});
            next.push_back({f(1), bc, ab});
            next.push_back({f(2), ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    return finalize_mesh(std::move(verts), std::move(faces));
}

TriMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file: " + path);

    auto next_token_line = [&in]() {
        std::string line;
        while (std::getline(in, line)) {
            const auto pos = line.find_first_not_of(" \t\r\n");
            if (pos == std::string::npos) continue;
            if (line[pos] == '#') continue;
            return line;
        }
        return std::string();
    };

    std::string header = next_token_line();
    std::istringstream hs(header);
    std::string magic;
    hs >> magic;
    if (magic != "OFF") throw IoError("OFF parse error: missing OFF header");

    long nv = -1, nf = -1, ne = -1;
    // counts may share the header line or occupy the next one
    if (!(hs >> nv >> nf >> ne)) {
        std::istringstream cs(next_token_line());
        if (!(cs >> nv >> nf >> ne)) {
            throw IoError("OFF parse error: bad counts line");
        }
    }
    if (nv <= 0 || nf <= 0) throw IoError("OFF parse error: nonpositive counts");

    std::vector<Vec3> verts(static_cast<size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        std::istringstream vs(next_token_line());
        if (!(vs >> verts[i].x() >> verts[i].y() >> verts[i].z())) {
            throw IoError("OFF parse error: bad vertex line " + std::to_string(i));
        }
    }
    std::vector<Eigen::Vector3i> faces(static_cast<size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        std::istringstream fs(next_token_line());
        int cnt = 0;
        if (!(fs >> cnt >> faces[i](0) >> faces[i](1) >> faces[i](2)) || cnt != 3) {
            throw IoError("OFF parse error: bad (non-triangle?) face line " +
                          std::to_string(i));
        }
    }
    return finalize_mesh(std::move(verts), std::move(faces));
}

TriMesh scale_mesh(const TriMesh& mesh, double s) {
    if (s <= 0.0) throw DomainError("scale_mesh: scale must be positive");
    std::vector<Vec3> verts = mesh.vertices;
    for (auto& v : verts) v *= s;
    return finalize_mesh(std::move(verts), mesh.faces);
}

} // namespace geomag
