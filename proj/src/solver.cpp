#include "carreau/solver.hpp"

#include <Eigen/SparseLU>
#ifdef CARREAU_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace carreau {

namespace {

// Single-threaded BLAS keeps factorizations bit-reproducible and avoids
// oversubscription when study workers run concurrently.
struct BlasThreadGuard {
    BlasThreadGuard() { setenv("OPENBLAS_NUM_THREADS", "1", /*overwrite=*/0); }
};
const BlasThreadGuard blas_thread_guard;

} // namespace

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    if (sigma < 0.0) throw std::invalid_argument("SolverConfig: sigma must be >= 0");
    if (r_reg < 2.0) throw std::invalid_argument("SolverConfig: r_reg must be >= 2");
    if (!(kappa > 0.0)) throw std::invalid_argument("SolverConfig: kappa must be > 0");
}

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterReached: return "max_iter";
    case SolveStatus::Diverged: return "diverged";
    }
    return "unknown";
}

std::string IterationLog::to_csv() const {
    std::string s = "iter,du,dpi,dtheta,eps_norm_diag,grad_theta_diag\n";
    char buf[256];
    for (const IterationRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter,
                      r.du, r.dpi, r.dtheta, r.eps_norm_diag, r.grad_theta_diag);
        s += buf;
    }
    return s;
}

namespace {

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double matrix_inf_norm(const SpMat& A) {
    Vector rowsum = Vector::Zero(A.rows());
    for (int col = 0; col < A.outerSize(); ++col)
        for (SpMat::InnerIterator it(A, col); it; ++it)
            rowsum[it.row()] += std::abs(it.value());
    return inf_norm(rowsum);
}

} // namespace

namespace {

void check_residual(const SpMat& A, const Vector& x, const Vector& rhs) {
    const double resid = inf_norm(A * x - rhs);
    const double bound = 1e-9 * (matrix_inf_norm(A) * inf_norm(x) + inf_norm(rhs));
    if (!(resid <= bound) || !x.allFinite())
        throw SingularSystem("saddle_solve: residual " + std::to_string(resid) +
                             " exceeds bound " + std::to_string(bound));
}

} // namespace

struct ReusableLu::Impl {
#ifdef CARREAU_HAVE_UMFPACK
    Eigen::UmfPackLU<SpMat> lu;
#else
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
#endif
    // UmfPackLU keeps a reference to the factorized matrix, so it must
    // outlive solve calls.
    SpMat mat;
    bool analyzed = false;
    Eigen::Index rows = 0;
    Eigen::Index nnz = 0;

    void factorize_pattern_reuse(const SpMat& A) {
        mat = A;
        mat.makeCompressed();
        if (!analyzed || rows != mat.rows() || nnz != mat.nonZeros()) {
            lu.analyzePattern(mat);
            analyzed = true;
            rows = mat.rows();
            nnz = mat.nonZeros();
        }
        lu.factorize(mat);
        if (lu.info() != Eigen::Success)
            throw SingularSystem(
                "saddle_solve: factorization failed, n = " + std::to_string(mat.rows()) +
                ", nnz = " + std::to_string(mat.nonZeros()));
    }
};

ReusableLu::ReusableLu() : impl_(std::make_unique<Impl>()) {}
ReusableLu::~ReusableLu() = default;
ReusableLu::ReusableLu(ReusableLu&&) noexcept = default;
ReusableLu& ReusableLu::operator=(ReusableLu&&) noexcept = default;

Vector ReusableLu::solve(const SparseSystem& system) {
    impl_->factorize_pattern_reuse(system.A);
    Vector x = impl_->lu.solve(system.rhs);
    check_residual(impl_->mat, x, system.rhs);
    return x;
}

void ReusableLu::factorize(const SpMat& A) { impl_->factorize_pattern_reuse(A); }

Vector ReusableLu::apply(const Vector& rhs) const { return impl_->lu.solve(rhs); }

Vector saddle_solve(const SparseSystem& system) {
    ReusableLu lu;
    return lu.solve(system);
}

StokesOperators make_stokes_operators(const DiscreteSpaces& spaces,
                                      const ManufacturedCase& c, int exactness) {
    StokesOperators ops;
    ops.B = assemble_b(spaces.velocity, spaces.pressure, exactness);
    ops.m = zero_mean_constraint(spaces.pressure, exactness);
    ops.f_load = assemble_load_velocity(
        spaces.velocity, [&c](const Vec2& x) { return forcing_f(x, c); }, exactness);
    ops.velocity_bc = velocity_dirichlet(spaces.velocity, c.velocity);
    return ops;
}

TemperatureOperators make_temperature_operators(const DiscreteSpaces& spaces,
                                                const ManufacturedCase& c,
                                                double kappa, int exactness) {
    TemperatureOperators ops;
    ops.a2 = assemble_a2(spaces.temperature, kappa, exactness);
    ops.g_load = assemble_load_scalar(
        spaces.temperature, [&c](const Vec2& x) { return forcing_g(x, c); }, exactness);
    ops.theta_bc = scalar_dirichlet(spaces.temperature, c.temperature);
    return ops;
}

StokesStepResult stokes_step(const Vector& theta_k, const Vector& u_k,
                             const DiscreteSpaces& spaces, const ManufacturedCase& c,
                             const SolverConfig& config, const StokesOperators* ops,
                             ReusableLu* lu) {
    config.validate();
    if (!u_k.allFinite() || !theta_k.allFinite())
        throw SolverError("stokes_step: non-finite input iterate");

    const int exactness = config.exactness_for(spaces.velocity.degree());
    StokesOperators local_ops;
    if (!ops) {
        local_ops = make_stokes_operators(spaces, c, exactness);
        ops = &local_ops;
    }

    FrozenCoefficients frozen;
    frozen.velocity_space = &spaces.velocity;
    frozen.w = &u_k;
    frozen.temperature_space = &spaces.temperature;
    frozen.theta = &theta_k;
    frozen.sigma = config.sigma;
    frozen.r_reg = config.r_reg;

    const SpMat A =
        assemble_a1_frozen(frozen, spaces.velocity, c.viscosity, c.params, exactness);

    const int nu_dofs = spaces.velocity.n_dofs();
    const int np = spaces.pressure.n_dofs();
    const int n = nu_dofs + np;

    // The full system is [M c; c^T 0] with M = [A B^T; B 0] and c = [0; m]
    // (the zero-mean multiplier). The dense multiplier column would wreck
    // the fill-in of a direct factorization, so the solve is bordered: M
    // shifted by e0 e0^T (e0 the first pressure dof) is nonsingular and
    // sparse, and a 2x2 correction recovers the exact bordered solution.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(A.nonZeros() + 2 * ops->B.nonZeros() + 1);
    for (int col = 0; col < A.outerSize(); ++col)
        for (SpMat::InnerIterator it(A, col); it; ++it)
            trips.emplace_back(it.row(), it.col(), it.value());
    for (int col = 0; col < ops->B.outerSize(); ++col)
        for (SpMat::InnerIterator it(ops->B, col); it; ++it) {
            trips.emplace_back(nu_dofs + it.row(), it.col(), it.value());
            trips.emplace_back(it.col(), nu_dofs + it.row(), it.value());
        }

    SparseSystem base;
    base.A.resize(n, n);
    base.A.setFromTriplets(trips.begin(), trips.end());
    base.rhs = Vector::Zero(n);
    base.rhs.head(nu_dofs) = ops->f_load;
    base.block_offsets = {0, nu_dofs, n};
    apply_dirichlet(base, ops->velocity_bc);

    const int i0 = nu_dofs;  // shifted pressure dof
    SpMat shift(n, n);
    shift.insert(i0, i0) = 1.0;
    const SpMat Mt = base.A + shift;

    ReusableLu local_lu;
    ReusableLu& solver = lu ? *lu : local_lu;
    solver.factorize(Mt);

    Vector cvec = Vector::Zero(n);
    cvec.tail(np) = ops->m;
    Vector e0 = Vector::Zero(n);
    e0[i0] = 1.0;

    const Vector y0 = solver.apply(base.rhs);
    const Vector y1 = solver.apply(e0);
    const Vector y2 = solver.apply(cvec);

    // s = e0^T y and alpha solve the 2x2 correction system.
    const double t10 = y0[i0], t11 = y1[i0], t12 = y2[i0];
    const double t20 = cvec.dot(y0), t21 = cvec.dot(y1), t22 = cvec.dot(y2);
    const double det = (1.0 - t11) * (-t22) - t12 * t21;
    if (!(std::abs(det) > 1e-300) || !std::isfinite(det))
        throw SingularSystem("stokes_step: singular bordered correction");
    const double s = (t10 * (-t22) + t12 * t20) / det;
    const double alpha_mult = ((1.0 - t11) * (-t20) - t21 * t10) / det;

    const Vector y = y0 + s * y1 - alpha_mult * y2;

    // Residual of the full bordered system.
    {
        const Vector My = Mt * y - e0 * y[i0];
        const double r_main = inf_norm(My + alpha_mult * cvec - base.rhs);
        const double r_last = std::abs(cvec.dot(y));
        Vector rowsum = Vector::Zero(n);
        for (int col = 0; col < Mt.outerSize(); ++col)
            for (SpMat::InnerIterator it(Mt, col); it; ++it)
                rowsum[it.row()] += std::abs(it.value());
        rowsum[i0] -= 1.0;  // remove the shift from the norm estimate
        rowsum.tail(np) += ops->m.cwiseAbs();
        const double k_norm = std::max(rowsum.maxCoeff(), ops->m.cwiseAbs().sum());
        const double x_norm = std::max(inf_norm(y), std::abs(alpha_mult));
        const double bound = 1e-9 * (k_norm * x_norm + inf_norm(base.rhs));
        if (!(std::max(r_main, r_last) <= bound) || !y.allFinite())
            throw SingularSystem("stokes_step: bordered residual " +
                                 std::to_string(std::max(r_main, r_last)) +
                                 " exceeds bound " + std::to_string(bound));
    }

    StokesStepResult result;
    result.u = y.head(nu_dofs);
    result.pi = y.segment(nu_dofs, np);
    // Shift to exact zero mean; |Omega| = 1.
    result.pi.array() -= ops->m.dot(result.pi);

    const Vector Bu = ops->B * result.u;
    result.div_residual_raw = inf_norm(Bu);
    const double proj = ops->m.dot(Bu) / ops->m.squaredNorm();
    result.div_residual = inf_norm(Bu - proj * ops->m);
    return result;
}

Vector temperature_step(const Vector& u_next, const DiscreteSpaces& spaces,
                        const ManufacturedCase& c, const SolverConfig& config,
                        const TemperatureOperators* ops, ReusableLu* lu) {
    config.validate();
    if (!u_next.allFinite())
        throw SolverError("temperature_step: non-finite velocity");

    const int exactness = config.exactness_for(spaces.velocity.degree());
    TemperatureOperators local_ops;
    if (!ops) {
        local_ops = make_temperature_operators(spaces, c, config.kappa, exactness);
        ops = &local_ops;
    }

    const SpMat C = assemble_ch(spaces.velocity, u_next, spaces.temperature, exactness);

    SparseSystem system;
    system.A = ops->a2 + C;
    system.rhs = ops->g_load;
    system.block_offsets = {0, spaces.temperature.n_dofs()};
    apply_dirichlet(system, ops->theta_bc);

    return lu ? lu->solve(system) : saddle_solve(system);
}

PicardResult picard_solve(const DiscreteSpaces& spaces, const ManufacturedCase& c,
                          const SolverConfig& config, const CoupledState* initial) {
    config.validate();
    const int exactness = config.exactness_for(spaces.velocity.degree());
    const double s = norm_index_s(c.params);
    const double sp = s / (s - 1.0);

    const StokesOperators sops = make_stokes_operators(spaces, c, exactness);
    const TemperatureOperators tops =
        make_temperature_operators(spaces, c, config.kappa, exactness);
    ReusableLu stokes_lu, temp_lu;

    CoupledState state;
    if (initial) {
        state = *initial;
    } else {
        state.u = Vector::Zero(spaces.velocity.n_dofs());
        state.pi = Vector::Zero(spaces.pressure.n_dofs());
        state.theta = Vector::Zero(spaces.temperature.n_dofs());
    }

    PicardResult result;
    result.log.stopping_norm_s = s;
    result.log.status = SolveStatus::MaxIterReached;

    double prev_increment = 0.0;
    int growth_streak = 0;

    for (int k = 0; k < config.max_iter; ++k) {
        StokesStepResult st =
            stokes_step(state.theta, state.u, spaces, c, config, &sops, &stokes_lu);
        Vector theta_next =
            temperature_step(st.u, spaces, c, config, &tops, &temp_lu);

        IterationRecord rec;
        rec.iter = k + 1;
        rec.du = fe_ls_norm_velocity(spaces.velocity, st.u - state.u, s, exactness);
        rec.dpi = fe_ls_norm_scalar(spaces.pressure, st.pi - state.pi, sp, exactness);
        rec.dtheta =
            fe_ls_norm_scalar(spaces.temperature, theta_next - state.theta, 2.0, exactness);
        rec.eps_norm_diag =
            fe_eps_ls_norm(spaces.velocity, st.u, c.params.p + 1.0, exactness);
        rec.grad_theta_diag =
            fe_h1_seminorm_scalar(spaces.temperature, theta_next, exactness);
        rec.theta_min = theta_next.minCoeff();
        rec.theta_max = theta_next.maxCoeff();
        rec.div_residual = st.div_residual;
        rec.div_residual_raw = st.div_residual_raw;
        result.log.records.push_back(rec);

        state.u = std::move(st.u);
        state.pi = std::move(st.pi);
        state.theta = std::move(theta_next);

        const double increment = rec.du + rec.dpi + rec.dtheta;
        if (increment < config.tol) {
            result.log.status = SolveStatus::Converged;
            break;
        }
        if (k > 0 && increment > 10.0 * prev_increment) {
            if (++growth_streak >= 3) {
                result.log.status = SolveStatus::Diverged;
                break;
            }
        } else {
            growth_streak = 0;
        }
        prev_increment = increment;
    }

    result.state = std::move(state);
    return result;
}

} // namespace carreau
