#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "carreau/constitutive.hpp"
#include "carreau/fe_eval.hpp"
#include "carreau/fe_space.hpp"

namespace carreau {

using SpMat = Eigen::SparseMatrix<double>;

/// Square sparse system with right-hand side. Block offsets record the
/// saddle-point layout [velocity | pressure | mean multiplier].
struct SparseSystem {
    SpMat A;
    Vector rhs;
    std::vector<int> block_offsets;
};

/// Coefficients frozen from the previous fixed-point iterate: the velocity
/// w entering eta(|eps(w)|^2) and the sigma-term, and the temperature
/// entering nu. Null vectors mean the zero field.
struct FrozenCoefficients {
    const FeSpace* velocity_space = nullptr;
    const Vector* w = nullptr;
    const FeSpace* temperature_space = nullptr;
    const Vector* theta = nullptr;
    double sigma = 0.0;
    double r_reg = 2.0;
};

/// Default over-integration for the non-polynomial Carreau coefficient.
inline int default_assembly_exactness(int velocity_degree) {
    return 2 * velocity_degree + 4;
}

/// Momentum block of the frozen subproblem:
///   A_ij = int 2 nu(theta) [eta(|eps(w)|^2) + sigma |eps(w)|^(r-2)]
///              eps(phi_j) : eps(phi_i).
/// The convention at eps(w) = 0 is |eps|^0 = 1 for r = 2 and 0 for r > 2.
SpMat assemble_a1_frozen(const FrozenCoefficients& frozen, const FeSpace& V,
                         const ViscosityModel& viscosity, const CarreauParams& params,
                         int exactness);

/// Kernel behind assemble_a1_frozen: a symmetric eps-eps form with an
/// arbitrary pointwise coefficient. coeff(elem, q, x) multiplies
/// eps(phi_j) : eps(phi_i).
SpMat assemble_eps_form(const FeSpace& V,
                        const std::function<double(int, int, const Vec2&)>& coeff,
                        int exactness);

/// Divergence coupling B_(l,j) = -int q_l div(phi_j); dimensions np x nu.
SpMat assemble_b(const FeSpace& V, const FeSpace& Q, int exactness);

/// kappa-scaled scalar stiffness; symmetric positive semidefinite with the
/// constants in its kernel. Rejects kappa <= 0.
SpMat assemble_a2(const FeSpace& T, double kappa, int exactness);

/// Antisymmetrized convection
///   C_ij = 1/2 [ int (u . grad psi_j) psi_i - int (u . grad psi_i) psi_j ],
/// exactly skew-symmetric regardless of the discrete divergence of u.
SpMat assemble_ch(const FeSpace& V, const Vector& u, const FeSpace& T, int exactness);

/// Load vectors int f . phi_i and int g psi_i.
Vector assemble_load_velocity(const FeSpace& V,
                              const std::function<Vec2(const Vec2&)>& f, int exactness);
Vector assemble_load_scalar(const FeSpace& T,
                            const std::function<double(const Vec2&)>& g, int exactness);

/// Nodal Dirichlet data: system dof indices plus interpolated values.
struct DirichletBC {
    std::vector<int> dofs;
    std::vector<double> values;
};

DirichletBC velocity_dirichlet(const FeSpace& V,
                               const std::function<Vec2(const Vec2&)>& rule,
                               int dof_offset = 0);
DirichletBC scalar_dirichlet(const FeSpace& T,
                             const std::function<double(const Vec2&)>& rule,
                             int dof_offset = 0);

/// Replaces constrained rows by identity rows with the prescribed values
/// and eliminates the matching columns into the right-hand side, so a
/// symmetric matrix stays symmetric.
void apply_dirichlet(SparseSystem& system, const DirichletBC& bc);

/// m_l = int q_l; appended to the saddle-point system as the
/// zero-mean Lagrange multiplier row/column.
Vector zero_mean_constraint(const FeSpace& Q, int exactness);

/// Coordinate text dump "row col value", one entry per line.
std::string dump_matrix_coo(const SpMat& A);

} // namespace carreau
