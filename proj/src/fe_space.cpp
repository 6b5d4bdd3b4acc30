#include "carreau/fe_space.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace carreau {

FeSpace::FeSpace(const Mesh& mesh, int degree, int components)
    : mesh_(&mesh), degree_(degree), components_(components) {
    if (degree < 1 || degree > 3)
        throw std::invalid_argument("FeSpace: degree must be 1, 2 or 3");
    if (components != 1 && components != 2)
        throw std::invalid_argument("FeSpace: components must be 1 or 2");
    n_local_ = (degree + 1) * (degree + 2) / 2;

    const int nv = mesh.n_vertices();
    const int nt = mesh.n_triangles();
    const int per_edge = degree - 1;

    // Canonical edge numbering shared by adjacent elements.
    std::map<std::pair<int, int>, int> edge_id;
    auto edge_of = [&](int a, int b) {
        auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = edge_id.find(key);
        if (it != edge_id.end()) return it->second;
        int id = static_cast<int>(edge_id.size());
        edge_id.emplace(key, id);
        return id;
    };

    std::vector<std::array<int, 3>> tri_edges(nt);
    std::vector<std::array<bool, 3>> tri_edge_fwd(nt);
    for (int e = 0; e < nt; ++e) {
        const auto& v = mesh.triangles[e].v;
        const int pair_v[3][2] = {{v[0], v[1]}, {v[1], v[2]}, {v[2], v[0]}};
        for (int k = 0; k < 3; ++k) {
            tri_edges[e][k] = edge_of(pair_v[k][0], pair_v[k][1]);
            tri_edge_fwd[e][k] = pair_v[k][0] < pair_v[k][1];
        }
    }
    const int ne = static_cast<int>(edge_id.size());

    const int interior_per_tri = (degree == 3) ? 1 : 0;
    n_scalar_ = nv + per_edge * ne + interior_per_tri * nt;

    dof_coords_.assign(n_scalar_, Vec2::Zero());
    for (int i = 0; i < nv; ++i) dof_coords_[i] = mesh.vertices[i];
    for (const auto& [key, id] : edge_id) {
        const Vec2 a = mesh.vertices[key.first];
        const Vec2 b = mesh.vertices[key.second];
        for (int k = 0; k < per_edge; ++k) {
            const double t = double(k + 1) / degree;
            dof_coords_[nv + per_edge * id + k] = a + t * (b - a);
        }
    }

    elem_dofs_.assign(static_cast<size_t>(nt) * n_local_, -1);
    for (int e = 0; e < nt; ++e) {
        int* dst = &elem_dofs_[e * n_local_];
        for (int k = 0; k < 3; ++k) dst[k] = mesh.triangles[e].v[k];
        for (int k = 0; k < 3; ++k) {
            const int base = nv + per_edge * tri_edges[e][k];
            if (per_edge == 1) {
                dst[3 + k] = base;
            } else if (per_edge == 2) {
                // Local edge nodes walk the edge in local orientation; the
                // global pair is stored from the lower vertex index.
                if (tri_edge_fwd[e][k]) {
                    dst[3 + 2 * k] = base;
                    dst[3 + 2 * k + 1] = base + 1;
                } else {
                    dst[3 + 2 * k] = base + 1;
                    dst[3 + 2 * k + 1] = base;
                }
            }
        }
        if (interior_per_tri == 1) {
            const int id = nv + per_edge * ne + e;
            dst[n_local_ - 1] = id;
            const auto& v = mesh.triangles[e].v;
            dof_coords_[id] = (mesh.vertices[v[0]] + mesh.vertices[v[1]] +
                               mesh.vertices[v[2]]) / 3.0;
        }
    }

    boundary_mask_.assign(n_scalar_, 0);
    for (const BoundaryEdge& be : mesh.boundary_edges) {
        boundary_mask_[be.a] = 1;
        boundary_mask_[be.b] = 1;
        if (per_edge > 0) {
            const int id = edge_of(be.a, be.b);
            for (int k = 0; k < per_edge; ++k) boundary_mask_[nv + per_edge * id + k] = 1;
        }
    }
    for (int s = 0; s < n_scalar_; ++s)
        if (boundary_mask_[s]) boundary_scalar_.push_back(s);
}

} // namespace carreau
