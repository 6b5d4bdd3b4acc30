#pragma once

#include <functional>
#include <string>
#include <vector>

#include "carreau/assembly.hpp"
#include "carreau/constitutive.hpp"
#include "carreau/fe_eval.hpp"
#include "carreau/fe_space.hpp"

namespace carreau {

/// Second derivatives of one scalar component.
struct Hess2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

/// Closed-form exact fields (u, pi, theta) together with the constitutive
/// parameters they are solved under. The forcings f and g follow from the
/// strong equations by the chain rule (forcing_f / forcing_g below); the
/// expressions are validated against finite-difference oracles in the test
/// suite and by the validate-forcing command.
struct ManufacturedCase {
    std::string id;
    CarreauParams params;
    ViscosityModel viscosity;
    double kappa = 1.0;

    std::function<Vec2(const Vec2&)> velocity;
    /// J(i, k) = d u_i / d x_k
    std::function<Mat2(const Vec2&)> grad_velocity;
    std::function<void(const Vec2&, Hess2&, Hess2&)> hess_velocity;
    std::function<double(const Vec2&)> pressure;
    std::function<Vec2(const Vec2&)> grad_pressure;
    std::function<double(const Vec2&)> temperature;
    std::function<Vec2(const Vec2&)> grad_temperature;
    std::function<double(const Vec2&)> laplacian_temperature;
};

/// Momentum forcing f = -div(2 nu(theta) eta(|eps(u)|^2) eps(u)) + grad pi.
Vec2 forcing_f(const Vec2& x, const ManufacturedCase& c);

/// Heat forcing g = -kappa lap(theta) + u . grad(theta).
double forcing_g(const Vec2& x, const ManufacturedCase& c);

/// The trigonometric benchmark: u = (5y sin(x^2+y^2) + 4y sin(x^2-y^2),
/// -5x sin(x^2+y^2) + 4x sin(x^2-y^2)), pi = sin(x+y), theta = cos(xy),
/// with nu(xi) = e^(-xi).
ManufacturedCase test1_case(double p, double eta_inf, double eta0, double lambda,
                            double kappa);

/// Linear fields u = (y, -x), pi = x + y - 1, theta = 1 + x/2 - y/4 with
/// constant nu and p = 2; every field lies in the discrete spaces, so the
/// solver must reproduce them to solver precision.
ManufacturedCase linear_case(double kappa);

/// Case registry lookup: "test1", "test2" (test1 fields with eta_inf = 0)
/// or "linear". Parameters override the registry defaults.
ManufacturedCase make_case(const std::string& id, double p, double eta_inf,
                           double eta0, double lambda, double kappa);

/// Coefficient vectors of one coupled iterate / solution.
struct CoupledState {
    Vector u;
    Vector pi;
    Vector theta;
};

struct ErrorReport {
    double err_u_l2 = 0.0;       // ||u - u_h||_L2
    double err_u_w1s = 0.0;      // ||eps(u - u_h)||_Ls, s = 2 or p
    double err_u_grad_ls = 0.0;  // ||grad(u - u_h)||_Ls (also reported)
    double err_pi = 0.0;         // ||pi - pi_h||_Ls' between mean-free parts
    double err_theta_h1 = 0.0;   // ||grad(theta - theta_h)||_L2
    int quadrature_exactness = 0;
    double s = 2.0;
};

/// Norm index of the stopping rule and error norms: 2 if eta_inf > 0,
/// otherwise p.
double norm_index_s(const CarreauParams& params);

/// Element-wise quadrature error norms; exactness is the assembly default
/// raised by quadrature_boost.
ErrorReport error_norms(const CoupledState& state, const DiscreteSpaces& spaces,
                        const ManufacturedCase& c, int quadrature_boost = 4);

/// Experimental orders of convergence between consecutive levels:
/// order_k = log(e_k/e_(k+1)) / log(h_k/h_(k+1)).
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs);

/// Nodal interpolation into a space.
Vector interpolate_velocity(const FeSpace& V, const std::function<Vec2(const Vec2&)>& f);
Vector interpolate_scalar(const FeSpace& S, const std::function<double(const Vec2&)>& f);

/// L^s norms of FE fields (pointwise Euclidean norm for vector fields).
double fe_ls_norm_scalar(const FeSpace& S, const Vector& coeffs, double s, int exactness);
double fe_ls_norm_velocity(const FeSpace& V, const Vector& coeffs, double s, int exactness);
double fe_eps_ls_norm(const FeSpace& V, const Vector& coeffs, double s, int exactness);
double fe_h1_seminorm_scalar(const FeSpace& S, const Vector& coeffs, int exactness);

} // namespace carreau
