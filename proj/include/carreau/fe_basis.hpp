#pragma once

#include <vector>

#include <Eigen/Dense>

#include "carreau/mesh.hpp"

namespace carreau {

using Mat2 = Eigen::Matrix2d;

/// Lagrange basis on the reference triangle (0,0)-(1,0)-(0,1).
///
/// Node ordering: the three vertices, then the nodes of edges
/// (0,1), (1,2), (2,0) walked from first to second endpoint, then the
/// interior node (degree 3 only).
struct ReferenceBasis {
    int degree = 1;
    std::vector<Vec2> node_coords;

    int n_nodes() const { return static_cast<int>(node_coords.size()); }

    /// Basis values at a reference point, one per node.
    void eval(const Vec2& p, std::vector<double>& values) const;

    /// Reference-coordinate gradients at a point, one per node.
    void grad(const Vec2& p, std::vector<Vec2>& gradients) const;
};

/// Returns the shared basis object for degree 1, 2 or 3.
/// Throws std::invalid_argument for other degrees.
const ReferenceBasis& reference_basis(int degree);

/// Convenience form of the basis evaluation used by tests.
void lagrange_basis(int degree, const Vec2& p, std::vector<double>& values,
                    std::vector<Vec2>& gradients);

/// Quadrature rule on the reference triangle. Weights are positive, all
/// points strictly inside, and the weights sum to the triangle area 1/2.
struct QuadratureRule {
    int exactness = 0;
    std::vector<Vec2> points;
    std::vector<double> weights;

    int n_points() const { return static_cast<int>(points.size()); }
};

constexpr int kMaxQuadratureExactness = 16;

/// Rule integrating all polynomials of total degree <= exactness_degree
/// exactly. Rules are collapsed Gauss-Legendre products, built once and
/// cached. Throws std::invalid_argument above kMaxQuadratureExactness.
const QuadratureRule& quadrature(int exactness_degree);

/// Affine reference-to-physical map of a triangle with positive area.
struct AffineMap {
    Vec2 v0;
    Mat2 jac;        // columns are v1-v0, v2-v0
    double det = 0;  // = 2*area
    Mat2 jac_inv_t;  // physical gradient = jac_inv_t * reference gradient

    Vec2 apply(const Vec2& ref) const { return v0 + jac * ref; }
    Vec2 pull_back(const Vec2& phys) const {
        return jac_inv_t.transpose() * (phys - v0);
    }
};

/// Throws std::invalid_argument for degenerate (non-positive area) triangles.
AffineMap affine_map(const Vec2& a, const Vec2& b, const Vec2& c);

AffineMap affine_map(const Mesh& m, int tri);

} // namespace carreau
