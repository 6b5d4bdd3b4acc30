#include "carreau/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace carreau {

namespace {

using Triplet = Eigen::Triplet<double>;

// eps(phi_i e_c) : eps(phi_j e_d) from the scalar gradients.
inline double eps_dot(const Vec2& gi, int c, const Vec2& gj, int d) {
    if (c == 0 && d == 0) return gi.x() * gj.x() + 0.5 * gi.y() * gj.y();
    if (c == 1 && d == 1) return gi.y() * gj.y() + 0.5 * gi.x() * gj.x();
    if (c == 0 && d == 1) return 0.5 * gi.y() * gj.x();
    return 0.5 * gi.x() * gj.y();
}

inline SymTensor2 strain_from_grad(const Eigen::Matrix2d& J) {
    return {J(0, 0), 0.5 * (J(0, 1) + J(1, 0)), J(1, 1)};
}

SpMat assemble_eps_form_impl(const FeSpace& V,
                             const std::function<void(int)>& bind_elem,
                             const std::function<double(int, int, const Vec2&)>& coeff,
                             int exactness) {
    const Mesh& mesh = V.mesh();
    const BasisCache& cache = BasisCache::get(V.degree(), exactness);
    const int nloc = cache.n_local;

    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(mesh.n_triangles()) * 4 * nloc * nloc);
    ElementBasis eb;
    std::vector<double> local(static_cast<size_t>(2 * nloc) * (2 * nloc));

    for (int e = 0; e < mesh.n_triangles(); ++e) {
        eb.bind(mesh, e, cache);
        if (bind_elem) bind_elem(e);
        std::fill(local.begin(), local.end(), 0.0);
        for (int q = 0; q < eb.n_points(); ++q) {
            const double wq = eb.weight(q) * coeff(e, q, eb.point(q));
            for (int i = 0; i < nloc; ++i) {
                const Vec2& gi = eb.grad(q, i);
                for (int j = 0; j < nloc; ++j) {
                    const Vec2& gj = eb.grad(q, j);
                    for (int c = 0; c < 2; ++c)
                        for (int d = 0; d < 2; ++d)
                            local[(2 * i + c) * 2 * nloc + 2 * j + d] +=
                                wq * eps_dot(gi, c, gj, d);
                }
            }
        }
        for (int i = 0; i < nloc; ++i)
            for (int c = 0; c < 2; ++c)
                for (int j = 0; j < nloc; ++j)
                    for (int d = 0; d < 2; ++d)
                        trips.emplace_back(V.dof(e, i, c), V.dof(e, j, d),
                                           local[(2 * i + c) * 2 * nloc + 2 * j + d]);
    }

    SpMat A(V.n_dofs(), V.n_dofs());
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

} // namespace

SpMat assemble_eps_form(const FeSpace& V,
                        const std::function<double(int, int, const Vec2&)>& coeff,
                        int exactness) {
    return assemble_eps_form_impl(V, nullptr, coeff, exactness);
}

SpMat assemble_a1_frozen(const FrozenCoefficients& frozen, const FeSpace& V,
                         const ViscosityModel& viscosity, const CarreauParams& params,
                         int exactness) {
    params.validate();
    if (frozen.sigma < 0.0)
        throw std::invalid_argument("assemble_a1_frozen: sigma must be >= 0");
    if (frozen.r_reg < 2.0)
        throw std::invalid_argument("assemble_a1_frozen: r_reg must be >= 2");
    if (frozen.w && frozen.velocity_space &&
        frozen.w->size() != frozen.velocity_space->n_dofs())
        throw std::invalid_argument("assemble_a1_frozen: frozen velocity size mismatch");
    if (frozen.theta && frozen.temperature_space &&
        frozen.theta->size() != frozen.temperature_space->n_dofs())
        throw std::invalid_argument("assemble_a1_frozen: frozen temperature size mismatch");
    if ((frozen.w && frozen.velocity_space &&
         &frozen.velocity_space->mesh() != &V.mesh()) ||
        (frozen.theta && frozen.temperature_space &&
         &frozen.temperature_space->mesh() != &V.mesh()))
        throw std::invalid_argument("assemble_a1_frozen: frozen fields on a different mesh");

    // Precompute the law's constants once; eta() itself revalidates per call.
    const double eta_inf = params.eta_inf;
    const double deta = params.eta0 - params.eta_inf;
    const double lam = params.lambda;
    const double expo = 0.5 * (params.p - 2.0);
    const double sigma = frozen.sigma;
    const double r_reg = frozen.r_reg;

    const BasisCache* wcache = nullptr;
    const BasisCache* tcache = nullptr;
    if (frozen.w) wcache = &BasisCache::get(frozen.velocity_space->degree(), exactness);
    if (frozen.theta)
        tcache = &BasisCache::get(frozen.temperature_space->degree(), exactness);

    ElementBasis web, teb;

    auto coeff = [&](int e, int q, const Vec2&) {
        double eps_sq = 0.0;
        if (frozen.w) {
            const Eigen::Matrix2d J =
                grad_velocity(*frozen.velocity_space, *frozen.w, e, web, q);
            eps_sq = strain_from_grad(J).frobenius_sq();
        }
        double theta_val = 0.0;
        if (frozen.theta)
            theta_val = eval_scalar(*frozen.temperature_space, *frozen.theta, e, teb, q);

        double c = eta_inf + deta * std::pow(1.0 + lam * eps_sq, expo);
        if (sigma > 0.0) {
            if (r_reg == 2.0) {
                c += sigma;
            } else if (eps_sq > 0.0) {
                c += sigma * std::pow(eps_sq, 0.5 * (r_reg - 2.0));
            }
        }
        return 2.0 * nu(theta_val, viscosity) * c;
    };

    const Mesh& mesh = V.mesh();
    auto bind_elem = [&](int e) {
        if (frozen.w) web.bind(mesh, e, *wcache);
        if (frozen.theta) teb.bind(mesh, e, *tcache);
    };

    return assemble_eps_form_impl(V, bind_elem, coeff, exactness);
}

SpMat assemble_b(const FeSpace& V, const FeSpace& Q, int exactness) {
    if (&V.mesh() != &Q.mesh())
        throw std::invalid_argument("assemble_b: spaces live on different meshes");
    const Mesh& mesh = V.mesh();
    const BasisCache& vcache = BasisCache::get(V.degree(), exactness);
    const BasisCache& qcache = BasisCache::get(Q.degree(), exactness);

    std::vector<Triplet> trips;
    ElementBasis veb, qeb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        veb.bind(mesh, e, vcache);
        qeb.bind(mesh, e, qcache);
        for (int q = 0; q < veb.n_points(); ++q) {
            const double wq = veb.weight(q);
            for (int l = 0; l < qeb.n_local(); ++l) {
                const double ql = qeb.value(q, l);
                for (int j = 0; j < veb.n_local(); ++j) {
                    const Vec2& gj = veb.grad(q, j);
                    trips.emplace_back(Q.scalar_dof(e, l), V.dof(e, j, 0),
                                       -wq * ql * gj.x());
                    trips.emplace_back(Q.scalar_dof(e, l), V.dof(e, j, 1),
                                       -wq * ql * gj.y());
                }
            }
        }
    }

    SpMat B(Q.n_dofs(), V.n_dofs());
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

SpMat assemble_a2(const FeSpace& T, double kappa, int exactness) {
    if (!(kappa > 0.0)) throw std::invalid_argument("assemble_a2: kappa must be > 0");
    const Mesh& mesh = T.mesh();
    const BasisCache& cache = BasisCache::get(T.degree(), exactness);

    std::vector<Triplet> trips;
    ElementBasis eb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        eb.bind(mesh, e, cache);
        for (int q = 0; q < eb.n_points(); ++q) {
            const double wq = kappa * eb.weight(q);
            for (int i = 0; i < eb.n_local(); ++i)
                for (int j = 0; j < eb.n_local(); ++j)
                    trips.emplace_back(T.scalar_dof(e, i), T.scalar_dof(e, j),
                                       wq * eb.grad(q, i).dot(eb.grad(q, j)));
        }
    }

    SpMat K(T.n_dofs(), T.n_dofs());
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

SpMat assemble_ch(const FeSpace& V, const Vector& u, const FeSpace& T, int exactness) {
    if (&V.mesh() != &T.mesh())
        throw std::invalid_argument("assemble_ch: spaces live on different meshes");
    if (u.size() != V.n_dofs())
        throw std::invalid_argument("assemble_ch: velocity coefficient size mismatch");
    const Mesh& mesh = T.mesh();
    const BasisCache& tcache = BasisCache::get(T.degree(), exactness);
    const BasisCache& vcache = BasisCache::get(V.degree(), exactness);

    std::vector<Triplet> trips;
    ElementBasis teb, veb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        teb.bind(mesh, e, tcache);
        veb.bind(mesh, e, vcache);
        for (int q = 0; q < teb.n_points(); ++q) {
            const Vec2 uq = eval_velocity(V, u, e, veb, q);
            const double wq = teb.weight(q);
            for (int i = 0; i < teb.n_local(); ++i) {
                const double pi = teb.value(q, i);
                for (int j = 0; j < teb.n_local(); ++j)
                    trips.emplace_back(T.scalar_dof(e, i), T.scalar_dof(e, j),
                                       wq * pi * uq.dot(teb.grad(q, j)));
            }
        }
    }

    SpMat M(T.n_dofs(), T.n_dofs());
    M.setFromTriplets(trips.begin(), trips.end());
    // The half-difference is exactly skew entry by entry.
    SpMat Mt = SpMat(M.transpose());
    return 0.5 * (M - Mt).eval();
}

Vector assemble_load_velocity(const FeSpace& V,
                              const std::function<Vec2(const Vec2&)>& f, int exactness) {
    const Mesh& mesh = V.mesh();
    const BasisCache& cache = BasisCache::get(V.degree(), exactness);
    Vector out = Vector::Zero(V.n_dofs());
    ElementBasis eb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        eb.bind(mesh, e, cache);
        for (int q = 0; q < eb.n_points(); ++q) {
            const Vec2 fq = f(eb.point(q));
            const double wq = eb.weight(q);
            for (int i = 0; i < eb.n_local(); ++i) {
                const double phi = eb.value(q, i);
                out[V.dof(e, i, 0)] += wq * fq.x() * phi;
                out[V.dof(e, i, 1)] += wq * fq.y() * phi;
            }
        }
    }
    return out;
}

Vector assemble_load_scalar(const FeSpace& T,
                            const std::function<double(const Vec2&)>& g, int exactness) {
    const Mesh& mesh = T.mesh();
    const BasisCache& cache = BasisCache::get(T.degree(), exactness);
    Vector out = Vector::Zero(T.n_dofs());
    ElementBasis eb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        eb.bind(mesh, e, cache);
        for (int q = 0; q < eb.n_points(); ++q) {
            const double gw = g(eb.point(q)) * eb.weight(q);
            for (int i = 0; i < eb.n_local(); ++i)
                out[T.scalar_dof(e, i)] += gw * eb.value(q, i);
        }
    }
    return out;
}

DirichletBC velocity_dirichlet(const FeSpace& V,
                               const std::function<Vec2(const Vec2&)>& rule,
                               int dof_offset) {
    DirichletBC bc;
    for (int s : V.boundary_scalar_dofs()) {
        const Vec2 val = rule(V.dof_coord(s));
        bc.dofs.push_back(dof_offset + 2 * s);
        bc.values.push_back(val.x());
        bc.dofs.push_back(dof_offset + 2 * s + 1);
        bc.values.push_back(val.y());
    }
    return bc;
}

DirichletBC scalar_dirichlet(const FeSpace& T,
                             const std::function<double(const Vec2&)>& rule,
                             int dof_offset) {
    DirichletBC bc;
    for (int s : T.boundary_scalar_dofs()) {
        bc.dofs.push_back(dof_offset + s);
        bc.values.push_back(rule(T.dof_coord(s)));
    }
    return bc;
}

void apply_dirichlet(SparseSystem& system, const DirichletBC& bc) {
    const int n = static_cast<int>(system.A.rows());
    std::vector<char> mask(n, 0);
    std::vector<double> value(n, 0.0);
    for (size_t k = 0; k < bc.dofs.size(); ++k) {
        mask[bc.dofs[k]] = 1;
        value[bc.dofs[k]] = bc.values[k];
    }

    std::vector<Triplet> trips;
    trips.reserve(system.A.nonZeros() + bc.dofs.size());
    for (int col = 0; col < system.A.outerSize(); ++col) {
        for (SpMat::InnerIterator it(system.A, col); it; ++it) {
            const int i = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            if (mask[i]) continue;
            if (mask[j]) {
                system.rhs[i] -= it.value() * value[j];
            } else {
                trips.emplace_back(i, j, it.value());
            }
        }
    }
    for (int d : bc.dofs) trips.emplace_back(d, d, 1.0);
    for (size_t k = 0; k < bc.dofs.size(); ++k) system.rhs[bc.dofs[k]] = bc.values[k];

    SpMat A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    system.A = std::move(A);
}

Vector zero_mean_constraint(const FeSpace& Q, int exactness) {
    const Mesh& mesh = Q.mesh();
    const BasisCache& cache = BasisCache::get(Q.degree(), exactness);
    Vector m = Vector::Zero(Q.n_dofs());
    ElementBasis eb;
    for (int e = 0; e < mesh.n_triangles(); ++e) {
        eb.bind(mesh, e, cache);
        for (int q = 0; q < eb.n_points(); ++q)
            for (int l = 0; l < eb.n_local(); ++l)
                m[Q.scalar_dof(e, l)] += eb.weight(q) * eb.value(q, l);
    }
    return m;
}

std::string dump_matrix_coo(const SpMat& A) {
    std::string s;
    char buf[96];
    for (int col = 0; col < A.outerSize(); ++col) {
        for (SpMat::InnerIterator it(A, col); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", long(it.row()),
                          long(it.col()), it.value());
            s += buf;
        }
    }
    return s;
}

} // namespace carreau
