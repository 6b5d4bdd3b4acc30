#include "carreau/manufactured.hpp"

#include <cmath>
#include <stdexcept>

namespace carreau {

Vec2 forcing_f(const Vec2& x, const ManufacturedCase& c) {
    const Mat2 J = c.grad_velocity(x);
    Hess2 hx, hy;
    c.hess_velocity(x, hx, hy);

    // Strain rate and its first derivatives.
    const double exx = J(0, 0);
    const double eyy = J(1, 1);
    const double exy = 0.5 * (J(0, 1) + J(1, 0));
    const double exx_x = hx.xx, exx_y = hx.xy;
    const double eyy_x = hy.xy, eyy_y = hy.yy;
    const double exy_x = 0.5 * (hx.xy + hy.xx);
    const double exy_y = 0.5 * (hx.yy + hy.xy);

    const double E = exx * exx + 2.0 * exy * exy + eyy * eyy;
    const double E_x = 2.0 * (exx * exx_x + 2.0 * exy * exy_x + eyy * eyy_x);
    const double E_y = 2.0 * (exx * exx_y + 2.0 * exy * exy_y + eyy * eyy_y);

    const double h = eta(E, c.params);
    const double hp = eta_prime(E, c.params);
    const double nv = nu(c.temperature(x), c.viscosity);
    const double nvp = nu_prime(c.temperature(x), c.viscosity);
    const Vec2 gt = c.grad_temperature(x);

    // div(2 nu(theta) eta(E) eps)_i = 2 [ nu' d_j(theta) eta eps_ij
    //   + nu eta'(E) d_j(E) eps_ij + nu eta d_j(eps_ij) ]
    const double div_x =
        2.0 * (nvp * h * (gt.x() * exx + gt.y() * exy) +
               nv * hp * (E_x * exx + E_y * exy) + nv * h * (exx_x + exy_y));
    const double div_y =
        2.0 * (nvp * h * (gt.x() * exy + gt.y() * eyy) +
               nv * hp * (E_x * exy + E_y * eyy) + nv * h * (exy_x + eyy_y));

    const Vec2 gp = c.grad_pressure(x);
    return Vec2(-div_x + gp.x(), -div_y + gp.y());
}

double forcing_g(const Vec2& x, const ManufacturedCase& c) {
    return -c.kappa * c.laplacian_temperature(x) + c.velocity(x).dot(c.grad_temperature(x));
}

ManufacturedCase test1_case(double p, double eta_inf, double eta0, double lambda,
                            double kappa) {
    ManufacturedCase c;
    c.id = (eta_inf == 0.0) ? "test2" : "test1";
    c.params = {eta_inf, eta0, lambda, p};
    c.params.validate();
    // theta = cos(xy) ranges over [cos(1), 1] on the unit square.
    c.viscosity = ViscosityModel::exp_decay(std::cos(1.0), 1.0);
    c.kappa = kappa;

    c.velocity = [](const Vec2& x) {
        const double A = x.x() * x.x() + x.y() * x.y();
        const double B = x.x() * x.x() - x.y() * x.y();
        return Vec2(5.0 * x.y() * std::sin(A) + 4.0 * x.y() * std::sin(B),
                    -5.0 * x.x() * std::sin(A) + 4.0 * x.x() * std::sin(B));
    };
    c.grad_velocity = [](const Vec2& pt) {
        const double x = pt.x(), y = pt.y();
        const double A = x * x + y * y, B = x * x - y * y;
        const double sA = std::sin(A), cA = std::cos(A);
        const double sB = std::sin(B), cB = std::cos(B);
        Mat2 J;
        J(0, 0) = 2.0 * x * y * (5.0 * cA + 4.0 * cB);
        J(0, 1) = 5.0 * sA + 4.0 * sB + 10.0 * y * y * cA - 8.0 * y * y * cB;
        J(1, 0) = -5.0 * sA + 4.0 * sB - 10.0 * x * x * cA + 8.0 * x * x * cB;
        J(1, 1) = -2.0 * x * y * (5.0 * cA + 4.0 * cB);
        return J;
    };
    c.hess_velocity = [](const Vec2& pt, Hess2& hx, Hess2& hy) {
        const double x = pt.x(), y = pt.y();
        const double A = x * x + y * y, B = x * x - y * y;
        const double sA = std::sin(A), cA = std::cos(A);
        const double sB = std::sin(B), cB = std::cos(B);
        hx.xx = 2.0 * y * (5.0 * cA + 4.0 * cB) - 4.0 * x * x * y * (5.0 * sA + 4.0 * sB);
        hx.xy = 2.0 * x * (5.0 * cA + 4.0 * cB) - 4.0 * x * y * y * (5.0 * sA - 4.0 * sB);
        hx.yy = 30.0 * y * cA - 20.0 * y * y * y * sA - 24.0 * y * cB -
                16.0 * y * y * y * sB;
        hy.xx = -30.0 * x * cA + 20.0 * x * x * x * sA + 24.0 * x * cB -
                16.0 * x * x * x * sB;
        hy.xy = -10.0 * y * cA + 20.0 * x * x * y * sA - 8.0 * y * cB +
                16.0 * x * x * y * sB;
        hy.yy = -2.0 * x * (5.0 * cA + 4.0 * cB) + 20.0 * x * y * y * sA -
                16.0 * x * y * y * sB;
    };
    c.pressure = [](const Vec2& x) { return std::sin(x.x() + x.y()); };
    c.grad_pressure = [](const Vec2& x) {
        const double cxy = std::cos(x.x() + x.y());
        return Vec2(cxy, cxy);
    };
    c.temperature = [](const Vec2& x) { return std::cos(x.x() * x.y()); };
    c.grad_temperature = [](const Vec2& x) {
        const double s = std::sin(x.x() * x.y());
        return Vec2(-x.y() * s, -x.x() * s);
    };
    c.laplacian_temperature = [](const Vec2& x) {
        return -(x.x() * x.x() + x.y() * x.y()) * std::cos(x.x() * x.y());
    };
    return c;
}

ManufacturedCase linear_case(double kappa) {
    ManufacturedCase c;
    c.id = "linear";
    c.params = {0.5, 2.0, 1.0, 2.0};
    c.viscosity = ViscosityModel::constant(1.0);
    c.kappa = kappa;

    c.velocity = [](const Vec2& x) { return Vec2(x.y(), -x.x()); };
    c.grad_velocity = [](const Vec2&) {
        Mat2 J;
        J << 0.0, 1.0, -1.0, 0.0;
        return J;
    };
    c.hess_velocity = [](const Vec2&, Hess2& hx, Hess2& hy) {
        hx = {};
        hy = {};
    };
    c.pressure = [](const Vec2& x) { return x.x() + x.y() - 1.0; };
    c.grad_pressure = [](const Vec2&) { return Vec2(1.0, 1.0); };
    c.temperature = [](const Vec2& x) { return 1.0 + 0.5 * x.x() - 0.25 * x.y(); };
    c.grad_temperature = [](const Vec2&) { return Vec2(0.5, -0.25); };
    c.laplacian_temperature = [](const Vec2&) { return 0.0; };
    return c;
}

ManufacturedCase make_case(const std::string& id, double p, double eta_inf,
                           double eta0, double lambda, double kappa) {
    if (id == "test1") return test1_case(p, eta_inf, eta0, lambda, kappa);
    if (id == "test2") return test1_case(p, 0.0, eta0, lambda, kappa);
    if (id == "linear") return linear_case(kappa);
    throw std::invalid_argument("make_case: unknown case id '" + id + "'");
}

double norm_index_s(const CarreauParams& params) {
    return params.eta_inf > 0.0 ? 2.0 : params.p;
}

namespace {

double conjugate(double s) { return s / (s - 1.0); }

struct NormAccumulator {
    double sum = 0.0;
    void add(double integrand_pow, double w) { sum += integrand_pow * w; }
};

} // namespace

ErrorReport error_norms(const CoupledState& state, const DiscreteSpaces& spaces,
                        const ManufacturedCase& c, int quadrature_boost) {
    if (state.u.size() != spaces.velocity.n_dofs() ||
        state.pi.size() != spaces.pressure.n_dofs() ||
        state.theta.size() != spaces.temperature.n_dofs())
        throw std::invalid_argument("error_norms: state/space dimension mismatch");

    const int exactness = std::min(
        kMaxQuadratureExactness,
        default_assembly_exactness(spaces.velocity.degree()) + quadrature_boost);
    const double s = norm_index_s(c.params);
    const double sp = conjugate(s);

    const Mesh& mesh = spaces.velocity.mesh();
    const BasisCache& vcache = BasisCache::get(spaces.velocity.degree(), exactness);
    const BasisCache& pcache = BasisCache::get(spaces.pressure.degree(), exactness);
    const BasisCache& tcache = BasisCache::get(spaces.temperature.degree(), exactness);

    // Mean-free comparison: both pressures are shifted by their means.
    double mean_exact = 0.0, mean_disc = 0.0;
    {
        ElementBasis peb;
        for (int e = 0; e < mesh.n_triangles(); ++e) {
            peb.bind(mesh, e, pcache);
            for (int q = 0; q < peb.n_points(); ++q) {
                const double w = peb.weight(q);
                mean_exact += w * c.pressure(peb.point(q));
                mean_disc += w * eval_scalar(spaces.pressure, state.pi, e, peb, q);
            }
        }
        // |Omega| = 1
    }

    NormAccumulator u_l2, u_w1s, u_grad, pi_lsp, th_h1;
    ElementBasis veb, peb, teb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        veb.bind(mesh, e, vcache);
        peb.bind(mesh, e, pcache);
        teb.bind(mesh, e, tcache);
        for (int q = 0; q < veb.n_points(); ++q) {
            const double w = veb.weight(q);
            const Vec2 x = veb.point(q);

            const Vec2 du = c.velocity(x) - eval_velocity(spaces.velocity, state.u, e, veb, q);
            u_l2.add(du.squaredNorm(), w);

            const Mat2 dJ = c.grad_velocity(x) -
                            grad_velocity(spaces.velocity, state.u, e, veb, q);
            const SymTensor2 deps{dJ(0, 0), 0.5 * (dJ(0, 1) + dJ(1, 0)), dJ(1, 1)};
            u_w1s.add(std::pow(deps.frobenius_sq(), 0.5 * s), w);
            u_grad.add(std::pow(dJ.squaredNorm(), 0.5 * s), w);

            const double dpi = (c.pressure(x) - mean_exact) -
                               (eval_scalar(spaces.pressure, state.pi, e, peb, q) - mean_disc);
            pi_lsp.add(std::pow(std::abs(dpi), sp), w);

            const Vec2 dgt = c.grad_temperature(x) -
                             grad_scalar(spaces.temperature, state.theta, e, teb, q);
            th_h1.add(dgt.squaredNorm(), w);
        }
    }

    ErrorReport r;
    r.err_u_l2 = std::sqrt(u_l2.sum);
    r.err_u_w1s = std::pow(u_w1s.sum, 1.0 / s);
    r.err_u_grad_ls = std::pow(u_grad.sum, 1.0 / s);
    r.err_pi = std::pow(pi_lsp.sum, 1.0 / sp);
    r.err_theta_h1 = std::sqrt(th_h1.sum);
    r.quadrature_exactness = exactness;
    r.s = s;
    return r;
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs) {
    if (errors.size() != hs.size() || errors.size() < 2)
        throw std::invalid_argument("eoc: need matching lists of length >= 2");
    for (size_t k = 0; k + 1 < hs.size(); ++k)
        if (!(hs[k] > hs[k + 1]))
            throw std::invalid_argument("eoc: mesh sizes must strictly decrease");
    for (double e : errors)
        if (!(e > 0.0)) throw std::invalid_argument("eoc: errors must be positive");

    std::vector<double> orders;
    for (size_t k = 0; k + 1 < errors.size(); ++k)
        orders.push_back(std::log(errors[k] / errors[k + 1]) / std::log(hs[k] / hs[k + 1]));
    return orders;
}

Vector interpolate_velocity(const FeSpace& V, const std::function<Vec2(const Vec2&)>& f) {
    Vector out = Vector::Zero(V.n_dofs());
    for (int s = 0; s < V.n_scalar_dofs(); ++s) {
        const Vec2 v = f(V.dof_coord(s));
        out[2 * s] = v.x();
        out[2 * s + 1] = v.y();
    }
    return out;
}

Vector interpolate_scalar(const FeSpace& S, const std::function<double(const Vec2&)>& f) {
    Vector out = Vector::Zero(S.n_dofs());
    for (int s = 0; s < S.n_scalar_dofs(); ++s) out[s] = f(S.dof_coord(s));
    return out;
}

double fe_ls_norm_scalar(const FeSpace& S, const Vector& coeffs, double s, int exactness) {
    const Mesh& mesh = S.mesh();
    const BasisCache& cache = BasisCache::get(S.degree(), exactness);
    double sum = 0.0;
    ElementBasis eb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        eb.bind(mesh, e, cache);
        for (int q = 0; q < eb.n_points(); ++q)
            sum += eb.weight(q) *
                   std::pow(std::abs(eval_scalar(S, coeffs, e, eb, q)), s);
    }
    return std::pow(sum, 1.0 / s);
}

double fe_ls_norm_velocity(const FeSpace& V, const Vector& coeffs, double s, int exactness) {
    const Mesh& mesh = V.mesh();
    const BasisCache& cache = BasisCache::get(V.degree(), exactness);
    double sum = 0.0;
    ElementBasis eb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        eb.bind(mesh, e, cache);
        for (int q = 0; q < eb.n_points(); ++q)
            sum += eb.weight(q) *
                   std::pow(eval_velocity(V, coeffs, e, eb, q).squaredNorm(), 0.5 * s);
    }
    return std::pow(sum, 1.0 / s);
}

double fe_eps_ls_norm(const FeSpace& V, const Vector& coeffs, double s, int exactness) {
    const Mesh& mesh = V.mesh();
    const BasisCache& cache = BasisCache::get(V.degree(), exactness);
    double sum = 0.0;
    ElementBasis eb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        eb.bind(mesh, e, cache);
        for (int q = 0; q < eb.n_points(); ++q) {
            const Mat2 J = grad_velocity(V, coeffs, e, eb, q);
            const SymTensor2 eps{J(0, 0), 0.5 * (J(0, 1) + J(1, 0)), J(1, 1)};
            sum += eb.weight(q) * std::pow(eps.frobenius_sq(), 0.5 * s);
        }
    }
    return std::pow(sum, 1.0 / s);
}

double fe_h1_seminorm_scalar(const FeSpace& S, const Vector& coeffs, int exactness) {
    const Mesh& mesh = S.mesh();
    const BasisCache& cache = BasisCache::get(S.degree(), exactness);
    double sum = 0.0;
    ElementBasis eb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        eb.bind(mesh, e, cache);
        for (int q = 0; q < eb.n_points(); ++q)
            sum += eb.weight(q) * grad_scalar(S, coeffs, e, eb, q).squaredNorm();
    }
    return std::sqrt(sum);
}

} // namespace carreau
