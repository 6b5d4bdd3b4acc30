#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace carreau {

using Vec2 = Eigen::Vector2d;

/// Triangle as a counterclockwise vertex-index triple.
struct Tri {
    std::array<int, 3> v;
};

/// Boundary edge (vertex pair) with an integer tag. The whole boundary of
/// the unit square carries tag 0 (Dirichlet everywhere).
struct BoundaryEdge {
    int a = 0;
    int b = 0;
    int tag = 0;
};

/// Conforming triangulation of the unit square. Immutable after
/// construction; safe to share across threads.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<Tri> triangles;
    std::vector<BoundaryEdge> boundary_edges;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
};

struct MeshMetrics {
    double h_max = 0.0;
    int n_vertices = 0;
    int n_triangles = 0;
};

/// Structured mesh of n x n cells, each split into two triangles by the
/// lower-left to upper-right diagonal. (n+1)^2 vertices, 2n^2 triangles.
/// Throws std::invalid_argument for n < 1.
Mesh unit_square_mesh(int n);

/// Red refinement: each triangle split into 4 congruent children via edge
/// midpoints. Halves h_max exactly and preserves conformity.
Mesh refine_uniform(const Mesh& m);

/// h_max is the maximum edge length over all triangles.
MeshMetrics metrics(const Mesh& m);

double triangle_area(const Mesh& m, int t);

/// Plain-text dump: "v x y" / "t i j k" / "b i j" lines.
std::string mesh_dump(const Mesh& m);

} // namespace carreau
