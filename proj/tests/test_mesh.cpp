#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "carreau/mesh.hpp"

using namespace carreau;

namespace {

double total_area(const Mesh& m) {
    double sum = 0.0;
    for (int t = 0; t < m.n_triangles(); ++t) sum += triangle_area(m, t);
    return sum;
}

bool on_boundary(const Vec2& v) {
    return v.x() == 0.0 || v.x() == 1.0 || v.y() == 0.0 || v.y() == 1.0;
}

} // namespace

TEST_CASE("unit_square_mesh counts and h_max") {
    const Mesh m1 = unit_square_mesh(1);
    CHECK(m1.n_vertices() == 4);
    CHECK(m1.n_triangles() == 2);

    const Mesh m2 = unit_square_mesh(2);
    CHECK(m2.n_vertices() == 9);
    CHECK(m2.n_triangles() == 8);

    const Mesh m4 = unit_square_mesh(4);
    CHECK(metrics(m4).h_max == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-14));

    CHECK(metrics(unit_square_mesh(8)).h_max ==
          doctest::Approx(std::sqrt(2.0) / 8.0).epsilon(1e-14));
}

TEST_CASE("unit_square_mesh rejects n = 0") {
    CHECK_THROWS_AS(unit_square_mesh(0), std::invalid_argument);
    CHECK_THROWS_AS(unit_square_mesh(-3), std::invalid_argument);
}

TEST_CASE("triangles are positively oriented and cover the square") {
    for (int n : {1, 2, 3, 8}) {
        const Mesh m = unit_square_mesh(n);
        for (int t = 0; t < m.n_triangles(); ++t) CHECK(triangle_area(m, t) > 0.0);
        CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("boundary edges exactly cover the boundary") {
    for (int n : {1, 2, 5}) {
        const Mesh m = unit_square_mesh(n);
        CHECK(static_cast<int>(m.boundary_edges.size()) == 4 * n);
        for (const BoundaryEdge& e : m.boundary_edges) {
            CHECK(on_boundary(m.vertices[e.a]));
            CHECK(on_boundary(m.vertices[e.b]));
            // midpoint check rules out interior diagonals whose endpoints
            // both happen to lie on the boundary
            CHECK(on_boundary(0.5 * (m.vertices[e.a] + m.vertices[e.b])));
        }
    }
}

TEST_CASE("mesh is conforming: interior edges shared by exactly two triangles") {
    const Mesh m = unit_square_mesh(4);
    std::map<std::pair<int, int>, int> count;
    for (const Tri& t : m.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = t.v[k], b = t.v[(k + 1) % 3];
            count[{std::min(a, b), std::max(a, b)}]++;
        }
    for (const auto& [e, c] : count) {
        CHECK(c >= 1);
        CHECK(c <= 2);
    }
}

TEST_CASE("refine_uniform quadruples triangles and halves h_max") {
    const Mesh m = unit_square_mesh(1);
    const Mesh r = refine_uniform(m);
    CHECK(r.n_triangles() == 8);
    CHECK(metrics(r).h_max == metrics(m).h_max / 2.0);

    const Mesh m8 = unit_square_mesh(8);
    CHECK(metrics(refine_uniform(m8)).h_max ==
          doctest::Approx(std::sqrt(2.0) / 16.0).epsilon(1e-14));

    CHECK(std::abs(total_area(r) - total_area(m)) <= 1e-15);
}

TEST_CASE("refine(unit_square_mesh(2)) matches unit_square_mesh(4) vertex set") {
    auto sorted_coords = [](const Mesh& m) {
        std::vector<std::pair<double, double>> v;
        for (const Vec2& p : m.vertices) v.push_back({p.x(), p.y()});
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto a = sorted_coords(refine_uniform(unit_square_mesh(2)));
    const auto b = sorted_coords(unit_square_mesh(4));
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == doctest::Approx(b[i].first).epsilon(1e-15));
        CHECK(a[i].second == doctest::Approx(b[i].second).epsilon(1e-15));
    }
}

TEST_CASE("reference triangle metrics") {
    Mesh m;
    m.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    m.triangles = {{{0, 1, 2}}};
    CHECK(metrics(m).h_max == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("mesh dump format") {
    const Mesh m = unit_square_mesh(1);
    const std::string dump = mesh_dump(m);
    CHECK(dump.find("v 0 0\n") == 0);
    CHECK(dump.find("t 0 1 3\n") != std::string::npos);
    CHECK(dump.find("b 0 1\n") != std::string::npos);
    size_t nv = 0, nt = 0, nb = 0;
    for (size_t i = 0; i < dump.size(); ++i) {
        if (i == 0 || dump[i - 1] == '\n') {
            if (dump[i] == 'v') ++nv;
            if (dump[i] == 't') ++nt;
            if (dump[i] == 'b') ++nb;
        }
    }
    CHECK(nv == 4);
    CHECK(nt == 2);
    CHECK(nb == 4);
}
