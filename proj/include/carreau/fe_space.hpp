#pragma once

#include <vector>

#include "carreau/fe_basis.hpp"
#include "carreau/mesh.hpp"

namespace carreau {

/// Continuous Lagrange space of degree 1-3 on a triangulation, scalar or
/// 2-vector valued. Scalar degrees of freedom are numbered vertices first,
/// then (degree-1) per mesh edge ordered from the lower to the higher
/// vertex index, then one interior node per triangle for degree 3.
///
/// Vector-valued spaces interleave components: global dof = 2*scalar + c.
class FeSpace {
public:
    FeSpace(const Mesh& mesh, int degree, int components);

    const Mesh& mesh() const { return *mesh_; }
    int degree() const { return degree_; }
    int components() const { return components_; }
    int n_local() const { return n_local_; }
    int n_scalar_dofs() const { return n_scalar_; }
    int n_dofs() const { return components_ * n_scalar_; }

    /// Scalar dof of local node `loc` of element `e`.
    int scalar_dof(int e, int loc) const { return elem_dofs_[e * n_local_ + loc]; }

    /// Global dof of (element, local node, component).
    int dof(int e, int loc, int comp) const {
        return components_ * scalar_dof(e, loc) + comp;
    }

    /// Support point of a scalar dof (Dirichlet data is interpolated there).
    const Vec2& dof_coord(int s) const { return dof_coords_[s]; }

    /// Scalar dofs whose support point lies on the boundary, sorted.
    const std::vector<int>& boundary_scalar_dofs() const { return boundary_scalar_; }

    bool is_boundary_scalar(int s) const { return boundary_mask_[s]; }

private:
    const Mesh* mesh_;
    int degree_;
    int components_;
    int n_local_;
    int n_scalar_;
    std::vector<int> elem_dofs_;
    std::vector<Vec2> dof_coords_;
    std::vector<int> boundary_scalar_;
    std::vector<char> boundary_mask_;
};

/// The mixed velocity/pressure/temperature spaces of one solve:
/// P_degree velocity and temperature with P_(degree-1) pressure.
struct DiscreteSpaces {
    FeSpace velocity;
    FeSpace pressure;
    FeSpace temperature;

    DiscreteSpaces(const Mesh& mesh, int degree)
        : velocity(mesh, degree, 2),
          pressure(mesh, degree - 1, 1),
          temperature(mesh, degree, 1) {}
};

} // namespace carreau
