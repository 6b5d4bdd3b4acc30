#include <doctest.h>

#include <random>

#include "carreau/fe_basis.hpp"
#include "test_util.hpp"

using namespace carreau;

namespace {

// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double monomial_integral(int a, int b) {
    double num = 1.0;
    for (int k = 2; k <= a; ++k) num *= k;
    for (int k = 2; k <= b; ++k) num *= k;
    double den = 1.0;
    for (int k = 2; k <= a + b + 2; ++k) den *= k;
    return num / den;
}

Vec2 random_ref_point(std::mt19937& rng) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    double x = d(rng), y = d(rng);
    if (x + y > 1.0) {
        x = 1.0 - x;
        y = 1.0 - y;
    }
    return Vec2(x, y);
}

} // namespace

TEST_CASE("lagrange basis: degree 1 at barycenter") {
    std::vector<double> vals;
    std::vector<Vec2> grads;
    lagrange_basis(1, Vec2(1.0 / 3.0, 1.0 / 3.0), vals, grads);
    REQUIRE(vals.size() == 3);
    for (double v : vals) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("lagrange basis: node counts and Lagrange property") {
    for (int degree : {1, 2, 3}) {
        const ReferenceBasis& basis = reference_basis(degree);
        CHECK(basis.n_nodes() == (degree + 1) * (degree + 2) / 2);
        std::vector<double> vals;
        for (int j = 0; j < basis.n_nodes(); ++j) {
            basis.eval(basis.node_coords[j], vals);
            for (int i = 0; i < basis.n_nodes(); ++i)
                CHECK(vals[i] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("lagrange basis: partition of unity and zero gradient sum") {
    auto rng = test::seeded_rng();
    std::vector<double> vals;
    std::vector<Vec2> grads;
    for (int degree : {1, 2, 3}) {
        for (int k = 0; k < 25; ++k) {
            const Vec2 p = random_ref_point(rng);
            lagrange_basis(degree, p, vals, grads);
            double sum = 0.0;
            Vec2 gsum = Vec2::Zero();
            for (size_t i = 0; i < vals.size(); ++i) {
                sum += vals[i];
                gsum += grads[i];
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(gsum.norm() <= 1e-12);
        }
    }
}

TEST_CASE("lagrange basis: degree 2 vertex value") {
    std::vector<double> vals;
    std::vector<Vec2> grads;
    lagrange_basis(2, Vec2(0.0, 0.0), vals, grads);
    CHECK(vals[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (size_t i = 1; i < vals.size(); ++i) CHECK(std::abs(vals[i]) <= 1e-15);
}

TEST_CASE("lagrange basis rejects unsupported degrees") {
    std::vector<double> vals;
    std::vector<Vec2> grads;
    CHECK_THROWS_AS(lagrange_basis(0, Vec2(0.2, 0.2), vals, grads), std::invalid_argument);
    CHECK_THROWS_AS(lagrange_basis(4, Vec2(0.2, 0.2), vals, grads), std::invalid_argument);
}

TEST_CASE("interpolating a degree-d polynomial reproduces it") {
    auto rng = test::seeded_rng(7);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (int degree : {1, 2, 3}) {
        // random polynomial of total degree `degree`
        std::vector<std::array<int, 2>> terms;
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) terms.push_back({a, b});
        std::vector<double> cts;
        for (size_t i = 0; i < terms.size(); ++i) cts.push_back(coeff(rng));
        auto poly = [&](const Vec2& p) {
            double v = 0.0;
            for (size_t i = 0; i < terms.size(); ++i)
                v += cts[i] * std::pow(p.x(), terms[i][0]) * std::pow(p.y(), terms[i][1]);
            return v;
        };

        const ReferenceBasis& basis = reference_basis(degree);
        std::vector<double> nodal;
        for (const Vec2& nc : basis.node_coords) nodal.push_back(poly(nc));

        std::vector<double> vals;
        for (int k = 0; k < 20; ++k) {
            const Vec2 p = random_ref_point(rng);
            basis.eval(p, vals);
            double interp = 0.0;
            for (size_t i = 0; i < vals.size(); ++i) interp += nodal[i] * vals[i];
            CHECK(interp == doctest::Approx(poly(p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("quadrature: weights, positivity, and monomial exactness") {
    for (int d = 0; d <= kMaxQuadratureExactness; ++d) {
        const QuadratureRule& rule = quadrature(d);
        double wsum = 0.0;
        for (int q = 0; q < rule.n_points(); ++q) {
            CHECK(rule.weights[q] > 0.0);
            const Vec2& p = rule.points[q];
            CHECK(p.x() > 0.0);
            CHECK(p.y() > 0.0);
            CHECK(p.x() + p.y() < 1.0);
            wsum += rule.weights[q];
        }
        CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));

        for (int a = 0; a + 0 <= d; ++a) {
            for (int b = 0; a + b <= d; ++b) {
                double integral = 0.0;
                for (int q = 0; q < rule.n_points(); ++q)
                    integral += rule.weights[q] * std::pow(rule.points[q].x(), a) *
                                std::pow(rule.points[q].y(), b);
                CHECK(integral == doctest::Approx(monomial_integral(a, b)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("quadrature: frozen reference values") {
    // int xy = 1/24, int x^4 = 1/30 on the reference triangle
    const QuadratureRule& r2 = quadrature(2);
    double ixy = 0.0;
    for (int q = 0; q < r2.n_points(); ++q)
        ixy += r2.weights[q] * r2.points[q].x() * r2.points[q].y();
    CHECK(ixy == doctest::Approx(1.0 / 24.0).epsilon(1e-13));

    const QuadratureRule& r4 = quadrature(4);
    double ix4 = 0.0;
    for (int q = 0; q < r4.n_points(); ++q)
        ix4 += r4.weights[q] * std::pow(r4.points[q].x(), 4);
    CHECK(ix4 == doctest::Approx(1.0 / 30.0).epsilon(1e-13));
}

TEST_CASE("quadrature rejects out-of-range exactness") {
    CHECK_THROWS_AS(quadrature(kMaxQuadratureExactness + 1), std::invalid_argument);
    CHECK_THROWS_AS(quadrature(-1), std::invalid_argument);
}

TEST_CASE("affine map: identity on the reference triangle") {
    const AffineMap map = affine_map(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
    CHECK(map.det == doctest::Approx(1.0));
    CHECK((map.jac - Mat2::Identity()).norm() <= 1e-15);
    CHECK((map.apply(Vec2(0.3, 0.4)) - Vec2(0.3, 0.4)).norm() <= 1e-15);
}

TEST_CASE("affine map: determinant of a scaled corner triangle") {
    const double h = 0.25;
    const AffineMap map = affine_map(Vec2(0, 0), Vec2(h, 0), Vec2(0, h));
    CHECK(map.det == doctest::Approx(h * h).epsilon(1e-15));
}

TEST_CASE("affine map rejects degenerate triangles") {
    CHECK_THROWS_AS(affine_map(Vec2(0, 0), Vec2(1, 1), Vec2(2, 2)), std::invalid_argument);
    // clockwise orientation has negative determinant
    CHECK_THROWS_AS(affine_map(Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)), std::invalid_argument);
}

TEST_CASE("affine map round trip at random points") {
    auto rng = test::seeded_rng(11);
    std::uniform_real_distribution<double> d(-1.0, 2.0);
    const AffineMap map = affine_map(Vec2(0.1, 0.2), Vec2(0.9, 0.3), Vec2(0.4, 1.1));
    for (int k = 0; k < 20; ++k) {
        const Vec2 p(d(rng), d(rng));
        CHECK((map.pull_back(map.apply(p)) - p).norm() <= 1e-13);
        CHECK((map.apply(map.pull_back(p)) - p).norm() <= 1e-13);
    }
}

TEST_CASE("grad-grad quadrature matrix is symmetric") {
    for (int degree : {1, 2, 3}) {
        const ReferenceBasis& basis = reference_basis(degree);
        const QuadratureRule& rule = quadrature(2 * degree);
        const int n = basis.n_nodes();
        std::vector<double> K(n * n, 0.0);
        std::vector<Vec2> grads;
        for (int q = 0; q < rule.n_points(); ++q) {
            basis.grad(rule.points[q], grads);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    K[i * n + j] += rule.weights[q] * grads[i].dot(grads[j]);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(K[i * n + j] == doctest::Approx(K[j * n + i]).epsilon(1e-13));
    }
}
