#ifndef GEOMAG_MESH_HPP
#define GEOMAG_MESH_HPP

// Triangulated closed surfaces with per-panel collocation data.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geomag/errors.hpp"
#include "geomag/types.hpp"

namespace geomag {

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Eigen::Vector3i> faces;

    // per-panel collocation data
    std::vector<Vec3> centroid;
    std::vector<Vec3> normal; // outward unit normal
    std::vector<double> area;

    std::vector<std::string> warnings;

    int panel_count() const { return static_cast<int>(faces.size()); }
    double total_area() const;
    double volume() const;          // from the divergence theorem
    double max_panel_diameter() const;
};

// Builds panel data and checks the closed/orientable/outward invariants.
// Flips orientation (with a warning) if the signed volume is negative.
TriMesh finalize_mesh(std::vector<Vec3> vertices,
                      std::vector<Eigen::Vector3i> faces);

// Icosphere: 20 * 4^refinement panels, vertices on the unit sphere.
TriMesh make_unit_sphere_mesh(int refinement);

// ASCII OFF subset: "OFF" header, "V F 0" counts, V vertex lines,
// F lines of the form "3 i j k" (0-based).
TriMesh load_mesh(const std::string& path);

TriMesh scale_mesh(const TriMesh& mesh, double s);

} // namespace geomag

#endif
