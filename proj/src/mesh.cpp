#include "carreau/mesh.hpp"

#include <cstdio>
#include <map>
#include <stdexcept>
#include <utility>

namespace carreau {

namespace {

// Boundary edges are recovered generically: an edge incident to exactly one
// triangle is on the boundary. Keeps generation and refinement consistent.
std::vector<BoundaryEdge> find_boundary_edges(const std::vector<Tri>& tris) {
    std::map<std::pair<int, int>, int> count;
    for (const Tri& t : tris) {
        for (int k = 0; k < 3; ++k) {
            int a = t.v[k];
            int b = t.v[(k + 1) % 3];
            count[{std::min(a, b), std::max(a, b)}] += 1;
        }
    }
    std::vector<BoundaryEdge> out;
    for (const auto& [e, c] : count) {
        if (c == 1) out.push_back({e.first, e.second, 0});
    }
    return out;
}

} // namespace

Mesh unit_square_mesh(int n) {
    if (n < 1) throw std::invalid_argument("unit_square_mesh: n must be >= 1");

    Mesh m;
    const int np = n + 1;
    m.vertices.reserve(static_cast<size_t>(np) * np);
    for (int j = 0; j < np; ++j) {
        for (int i = 0; i < np; ++i) {
            m.vertices.emplace_back(double(i) / n, double(j) / n);
        }
    }

    auto vid = [np](int i, int j) { return j * np + i; };

    m.triangles.reserve(2u * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = vid(i, j);
            const int v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1);
            const int v11 = vid(i + 1, j + 1);
            // diagonal fixed as lower-left -> upper-right
            m.triangles.push_back({{v00, v10, v11}});
            m.triangles.push_back({{v00, v11, v01}});
        }
    }

    m.boundary_edges = find_boundary_edges(m.triangles);
    return m;
}

Mesh refine_uniform(const Mesh& m) {
    Mesh out;
    out.vertices = m.vertices;

    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        int id = static_cast<int>(out.vertices.size());
        out.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
        midpoint.emplace(key, id);
        return id;
    };

    out.triangles.reserve(4 * m.triangles.size());
    for (const Tri& t : m.triangles) {
        const int v0 = t.v[0], v1 = t.v[1], v2 = t.v[2];
        const int m01 = mid(v0, v1);
        const int m12 = mid(v1, v2);
        const int m02 = mid(v0, v2);
        out.triangles.push_back({{v0, m01, m02}});
        out.triangles.push_back({{m01, v1, m12}});
        out.triangles.push_back({{m02, m12, v2}});
        out.triangles.push_back({{m01, m12, m02}});
    }

    out.boundary_edges = find_boundary_edges(out.triangles);
    return out;
}

double triangle_area(const Mesh& m, int t) {
    const Vec2& a = m.vertices[m.triangles[t].v[0]];
    const Vec2& b = m.vertices[m.triangles[t].v[1]];
    const Vec2& c = m.vertices[m.triangles[t].v[2]];
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

MeshMetrics metrics(const Mesh& m) {
    MeshMetrics mm;
    mm.n_vertices = m.n_vertices();
    mm.n_triangles = m.n_triangles();
    for (const Tri& t : m.triangles) {
        for (int k = 0; k < 3; ++k) {
            const Vec2 d = m.vertices[t.v[k]] - m.vertices[t.v[(k + 1) % 3]];
            mm.h_max = std::max(mm.h_max, d.norm());
        }
    }
    return mm;
}

std::string mesh_dump(const Mesh& m) {
    std::string s;
    char buf[128];
    for (const Vec2& v : m.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g\n", v.x(), v.y());
        s += buf;
    }
    for (const Tri& t : m.triangles) {
        std::snprintf(buf, sizeof(buf), "t %d %d %d\n", t.v[0], t.v[1], t.v[2]);
        s += buf;
    }
    for (const BoundaryEdge& e : m.boundary_edges) {
        std::snprintf(buf, sizeof(buf), "b %d %d\n", e.a, e.b);
        s += buf;
    }
    return s;
}

} // namespace carreau
