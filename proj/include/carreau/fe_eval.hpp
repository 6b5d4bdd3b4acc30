#pragma once

#include <vector>

#include <Eigen/Dense>

#include "carreau/fe_basis.hpp"
#include "carreau/fe_space.hpp"

namespace carreau {

using Vector = Eigen::VectorXd;

/// Reference-element basis data tabulated at the points of one quadrature
/// rule. Shared and immutable; built once per (degree, exactness) pair.
struct BasisCache {
    const QuadratureRule* rule = nullptr;
    int degree = 0;
    int n_local = 0;
    std::vector<double> values;   // [q * n_local + i]
    std::vector<Vec2> ref_grads;  // [q * n_local + i]

    double value(int q, int i) const { return values[q * n_local + i]; }
    const Vec2& ref_grad(int q, int i) const { return ref_grads[q * n_local + i]; }

    static const BasisCache& get(int degree, int exactness);
};

/// Per-element scratch: affine map plus physical basis gradients at the
/// quadrature points of the bound cache.
struct ElementBasis {
    const BasisCache* cache = nullptr;
    AffineMap map;
    std::vector<Vec2> phys_grads;  // [q * n_local + i]

    void bind(const Mesh& mesh, int elem, const BasisCache& c);

    double value(int q, int i) const { return cache->value(q, i); }
    const Vec2& grad(int q, int i) const { return phys_grads[q * cache->n_local + i]; }
    Vec2 point(int q) const { return map.apply(cache->rule->points[q]); }
    double weight(int q) const { return cache->rule->weights[q] * map.det; }
    int n_points() const { return cache->rule->n_points(); }
    int n_local() const { return cache->n_local; }
};

/// Uniform-bin point location for evaluating FE fields at arbitrary points
/// (used to carry a state across mesh levels).
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh);

    /// Element containing p (barycentric tolerance 1e-10), or -1.
    int locate(const Vec2& p) const;

    const Mesh& mesh() const { return *mesh_; }

private:
    const Mesh* mesh_;
    int nbins_;
    std::vector<std::vector<int>> bins_;
};

double eval_scalar_at(const FeSpace& space, const Vector& coeffs,
                      const PointLocator& loc, const Vec2& p);
Vec2 eval_velocity_at(const FeSpace& space, const Vector& coeffs,
                      const PointLocator& loc, const Vec2& p);

/// FE function evaluation on a bound element; coefficients are global.
double eval_scalar(const FeSpace& space, const Vector& coeffs, int elem,
                   const ElementBasis& eb, int q);
Vec2 grad_scalar(const FeSpace& space, const Vector& coeffs, int elem,
                 const ElementBasis& eb, int q);
Vec2 eval_velocity(const FeSpace& space, const Vector& coeffs, int elem,
                   const ElementBasis& eb, int q);
/// Velocity gradient J(c, k) = d u_c / d x_k.
Eigen::Matrix2d grad_velocity(const FeSpace& space, const Vector& coeffs, int elem,
                              const ElementBasis& eb, int q);

} // namespace carreau
