// Command-line front end: single solves, convergence studies, constitutive
// property checks and forcing validation.
//
// Exit codes: 0 success, 1 solver non-convergence, 2 invalid configuration,
// 3 I/O error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "carreau/harness.hpp"

namespace {

using namespace carreau;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct CommonFlags {
    std::string case_id;
    std::vector<double> p_list;
    double eta_inf = kUnset;
    double eta0 = kUnset;
    double lambda = kUnset;
    double kappa = kUnset;
    std::vector<double> sigma_list;
    double r_reg = kUnset;
    int degree = 0;
    std::vector<int> levels;
    double tol = kUnset;
    int max_iter = 0;
    int quad_boost = -1;
    std::string out_dir;
    std::string config_path;
    int jobs = 0;
    bool warm_start = false;
};

void add_param_flags(CLI::App* cmd, CommonFlags& f) {
    // all constitutive quantities are dimensionless (unit-square benchmark)
    cmd->add_option("--case", f.case_id,
                    "Benchmark case: test1, test2 or linear (default test1)");
    cmd->add_option("--p", f.p_list,
                    "Carreau exponent(s) p in (1,2], comma separated (default 1.6)")
        ->delimiter(',');
    cmd->add_option("--eta-inf", f.eta_inf,
                    "Carreau infinite-shear viscosity >= 0 (default 0.5; test2 forces 0)");
    cmd->add_option("--eta0", f.eta0, "Carreau zero-shear viscosity > eta-inf (default 2)");
    cmd->add_option("--lambda", f.lambda, "Carreau time constant > 0 (default 1)");
    cmd->add_option("--kappa", f.kappa, "Heat diffusion coefficient > 0 (default 1)");
    cmd->add_option("--sigma", f.sigma_list,
                    "Regularization strength(s) >= 0, comma separated (default: 0 for "
                    "test1/linear; 0,1e-2,1e-3,1e-4,1e-5 for test2)")
        ->delimiter(',');
    cmd->add_option("--r-reg", f.r_reg, "Regularization exponent r >= 2 (default 2)");
    cmd->add_option("--degree", f.degree,
                    "Velocity/temperature polynomial degree, 2 or 3 (default 2); "
                    "the pressure degree is one lower");
    cmd->add_option("--tol", f.tol, "Fixed-point stopping tolerance (default 1e-10)");
    cmd->add_option("--max-iter", f.max_iter, "Fixed-point iteration cap (default 100)");
    cmd->add_option("--quad-boost", f.quad_boost,
                    "Extra quadrature exactness for error norms (default 4)");
    cmd->add_option("--config", f.config_path,
                    "Configuration file with [case]/[solver]/[mesh]/[output] sections; "
                    "flags override file values");
}

StudySpec build_spec(const CommonFlags& f) {
    StudySpec spec;
    if (!f.config_path.empty()) spec = parse_config(f.config_path);
    if (!f.case_id.empty()) spec.case_id = f.case_id;
    if (!f.p_list.empty()) spec.p_list = f.p_list;
    if (f.degree != 0) spec.degree = f.degree;
    if (!f.levels.empty()) spec.levels = f.levels;
    if (!f.sigma_list.empty()) spec.sigma_list = f.sigma_list;
    if (!std::isnan(f.eta_inf)) spec.eta_inf = f.eta_inf;
    if (!std::isnan(f.eta0)) spec.eta0 = f.eta0;
    if (!std::isnan(f.lambda)) spec.lambda = f.lambda;
    if (!std::isnan(f.kappa)) spec.kappa = f.kappa;
    if (!std::isnan(f.r_reg)) spec.solver.r_reg = f.r_reg;
    if (!std::isnan(f.tol)) spec.solver.tol = f.tol;
    if (f.max_iter != 0) spec.solver.max_iter = f.max_iter;
    if (f.quad_boost >= 0) spec.quad_boost = f.quad_boost;
    if (!f.out_dir.empty()) spec.out_dir = f.out_dir;
    if (f.jobs != 0) spec.jobs = f.jobs;
    if (f.warm_start) spec.solver.warm_start = true;
    spec.validate();
    return spec;
}

int run_study_cmd(const CommonFlags& flags) {
    const StudySpec spec = build_spec(flags);
    const std::vector<ConvergenceReport> reports = run_study(spec);
    for (const ConvergenceReport& r : reports) {
        const EocTable t = eoc_table(r.rows);
        std::fprintf(stderr, "%s: levels", r.file_stem().c_str());
        for (const LevelResult& row : r.rows)
            std::fprintf(stderr, " n=%d(%s)", row.level,
                         row.status == 0 ? "ok" : "fail");
        if (!t.u_w1s.empty())
            std::fprintf(stderr, ", finest EOC u_w1s=%.3f u_l2=%.3f pi=%.3f t_h1=%.3f",
                         t.u_w1s.back(), t.u_l2.back(), t.pi.back(), t.t_h1.back());
        std::fprintf(stderr, "\n");
    }
    for (const ConvergenceReport& r : reports)
        for (const LevelResult& row : r.rows)
            if (row.status != 0) return 1;
    return 0;
}

int run_solve_cmd(const CommonFlags& flags, int n, const std::string& iter_log,
                  const std::string& dump_mesh_path, const std::string& dump_system) {
    StudySpec spec = build_spec(flags);
    const double p = spec.p_list.front();
    const double sigma = spec.sigma_list.empty() ? 0.0 : spec.sigma_list.front();

    const Mesh mesh = unit_square_mesh(n);
    if (!dump_mesh_path.empty()) {
        std::ofstream mf(dump_mesh_path);
        if (!mf) {
            std::fprintf(stderr, "error: cannot write %s\n", dump_mesh_path.c_str());
            return 3;
        }
        mf << mesh_dump(mesh);
    }

    DiscreteSpaces spaces(mesh, spec.degree);
    const ManufacturedCase c = make_case(spec.case_id, p, spec.effective_eta_inf(),
                                         spec.eta0, spec.lambda, spec.kappa);
    SolverConfig config = spec.solver;
    config.sigma = sigma;
    config.kappa = spec.kappa;

    const PicardResult result = picard_solve(spaces, c, config);
    if (!iter_log.empty()) {
        std::ofstream lf(iter_log);
        if (!lf) {
            std::fprintf(stderr, "error: cannot write %s\n", iter_log.c_str());
            return 3;
        }
        lf << result.log.to_csv();
    }
    if (!dump_system.empty()) {
        // The last frozen momentum block, for debugging.
        FrozenCoefficients frozen;
        frozen.velocity_space = &spaces.velocity;
        frozen.w = &result.state.u;
        frozen.temperature_space = &spaces.temperature;
        frozen.theta = &result.state.theta;
        frozen.sigma = config.sigma;
        frozen.r_reg = config.r_reg;
        const SpMat A = assemble_a1_frozen(frozen, spaces.velocity, c.viscosity, c.params,
                                           config.exactness_for(spec.degree));
        std::ofstream sf(dump_system);
        if (!sf) {
            std::fprintf(stderr, "error: cannot write %s\n", dump_system.c_str());
            return 3;
        }
        sf << dump_matrix_coo(A);
    }

    std::fprintf(stderr, "status=%s iters=%zu\n", to_string(result.log.status),
                 result.log.records.size());
    if (result.log.status != SolveStatus::Converged) return 1;

    const ErrorReport err = error_norms(result.state, spaces, c, spec.quad_boost);
    std::printf("case=%s p=%g sigma=%g n=%d h=%.17g iters=%zu "
                "err_u_l2=%.17g err_u_w1s=%.17g err_pi=%.17g err_t_h1=%.17g\n",
                spec.case_id.c_str(), p, sigma, n, metrics(mesh).h_max,
                result.log.records.size(), err.err_u_l2, err.err_u_w1s, err.err_pi,
                err.err_theta_h1);
    return 0;
}

int run_check_constitutive(double p, double eta_inf, double eta0, double lambda,
                           int samples, unsigned seed) {
    CarreauParams params{eta_inf, eta0, lambda, p};
    params.validate();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);

    double min_pairing = 1e300;
    double min_pairing_margin = 1e300;  // pairing - eta_inf |K-L|^2
    double sup_lipschitz = 0.0;
    double sup_growth = 0.0;  // |stress| / (1 + |eps|)^(p-1)
    for (int k = 0; k < samples; ++k) {
        const SymTensor2 K{dist(rng), dist(rng), dist(rng)};
        const SymTensor2 L{dist(rng), dist(rng), dist(rng)};
        const double dn2 = (K - L).frobenius_sq();
        if (dn2 == 0.0) continue;
        const double pairing = monotonicity_pairing(K, L, params);
        min_pairing = std::min(min_pairing, pairing);
        min_pairing_margin = std::min(min_pairing_margin, pairing - eta_inf * dn2);
        sup_lipschitz = std::max(sup_lipschitz, lipschitz_ratio(K, L, params));
        const double kn = K.frobenius();
        sup_growth = std::max(sup_growth, stress(K, params).frobenius() /
                                              std::pow(1.0 + kn, p - 1.0));
    }

    const bool pairing_ok = min_pairing > 0.0;
    const bool lower_ok = min_pairing_margin > -1e-12;
    const bool lipschitz_ok = std::isfinite(sup_lipschitz);
    std::printf("samples=%d seed=%u\n", samples, seed);
    std::printf("min monotonicity pairing        = %.17g  [%s]\n", min_pairing,
                pairing_ok ? "ok" : "FAIL");
    std::printf("min pairing - eta_inf*|K-L|^2   = %.17g  [%s]\n", min_pairing_margin,
                lower_ok ? "ok" : "FAIL");
    std::printf("empirical Lipschitz constant    = %.17g  [%s]\n", sup_lipschitz,
                lipschitz_ok ? "ok" : "FAIL");
    std::printf("empirical growth constant tau2  = %.17g\n", sup_growth);
    return (pairing_ok && lower_ok && lipschitz_ok) ? 0 : 1;
}

int run_validate_forcing(const CommonFlags& flags, int samples, unsigned seed) {
    StudySpec spec = build_spec(flags);
    const double p = spec.p_list.front();
    const ManufacturedCase c = make_case(spec.case_id, p, spec.effective_eta_inf(),
                                         spec.eta0, spec.lambda, spec.kappa);

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(0.01, 0.99);
    const double delta = 1e-5;

    auto stress_field = [&c](const Vec2& x) {
        const Mat2 J = c.grad_velocity(x);
        const SymTensor2 eps{J(0, 0), 0.5 * (J(0, 1) + J(1, 0)), J(1, 1)};
        const double visc = 2.0 * nu(c.temperature(x), c.viscosity) *
                            eta(eps.frobenius_sq(), c.params);
        return SymTensor2{visc * eps.xx, visc * eps.xy, visc * eps.yy};
    };

    double max_dev_f = 0.0, max_dev_g = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Vec2 x(dist(rng), dist(rng));
        const Vec2 dx(delta, 0.0), dy(0.0, delta);

        const SymTensor2 sxp = stress_field(x + dx), sxm = stress_field(x - dx);
        const SymTensor2 syp = stress_field(x + dy), sym = stress_field(x - dy);
        const Vec2 div_fd((sxp.xx - sxm.xx) / (2 * delta) + (syp.xy - sym.xy) / (2 * delta),
                          (sxp.xy - sxm.xy) / (2 * delta) + (syp.yy - sym.yy) / (2 * delta));
        const Vec2 f_fd = -div_fd + c.grad_pressure(x);
        const Vec2 f_cf = forcing_f(x, c);
        max_dev_f = std::max(max_dev_f,
                             (f_cf - f_fd).norm() / std::max(1.0, f_fd.norm()));

        const double lap_fd =
            (c.temperature(x + dx) - 2.0 * c.temperature(x) + c.temperature(x - dx)) /
                (delta * delta) +
            (c.temperature(x + dy) - 2.0 * c.temperature(x) + c.temperature(x - dy)) /
                (delta * delta);
        const Vec2 gt_fd((c.temperature(x + dx) - c.temperature(x - dx)) / (2 * delta),
                         (c.temperature(x + dy) - c.temperature(x - dy)) / (2 * delta));
        const double g_fd = -c.kappa * lap_fd + c.velocity(x).dot(gt_fd);
        const double g_cf = forcing_g(x, c);
        max_dev_g = std::max(max_dev_g,
                             std::abs(g_cf - g_fd) / std::max(1.0, std::abs(g_fd)));
    }

    std::printf("case=%s p=%g samples=%d seed=%u\n", spec.case_id.c_str(), p, samples, seed);
    std::printf("max relative deviation f = %.6e\n", max_dev_f);
    std::printf("max relative deviation g = %.6e\n", max_dev_g);
    const bool ok = max_dev_f <= 1e-5 && max_dev_g <= 1e-4;
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite element solver for non-isothermal shear-thinning Stokes "
                 "flow with Carreau rheology, plus a manufactured-solution "
                 "convergence harness"};
    app.require_subcommand(1);

    CommonFlags flags;

    CLI::App* study = app.add_subcommand("study", "Run a convergence study");
    add_param_flags(study, flags);
    study->add_option("--out", flags.out_dir, "Output directory (default results)");
    study->add_option("--jobs", flags.jobs, "Worker threads for independent runs (default 1)");
    study->add_flag("--warm-start", flags.warm_start,
                    "Seed each level with the previous level's state (default off, "
                    "matching the cold-start algorithm)");

    study->add_option("--levels", flags.levels,
                      "Mesh levels n, cells per side (default 8,16,32,64)")
        ->delimiter(',');

    CLI::App* solve = app.add_subcommand("solve", "Solve on a single mesh");
    add_param_flags(solve, flags);
    int solve_n = 16;
    std::string iter_log, dump_mesh_path, dump_system;
    solve->add_option("--n", solve_n, "Cells per side of the mesh (default 16)");
    solve->add_option("--iter-log", iter_log, "Write the iteration log CSV here");
    solve->add_option("--dump-mesh", dump_mesh_path, "Write a plain-text mesh dump here");
    solve->add_option("--dump-system", dump_system,
                      "Write the final momentum block in coordinate format here");

    CLI::App* check = app.add_subcommand(
        "check-constitutive", "Randomized checks of the constitutive inequalities");
    double ck_p = 1.6, ck_eta_inf = 0.5, ck_eta0 = 2.0, ck_lambda = 1.0;
    int ck_samples = 100000;
    unsigned ck_seed = 20240101;
    check->add_option("--p", ck_p, "Carreau exponent p in (1,2] (default 1.6)");
    check->add_option("--eta-inf", ck_eta_inf, "Limit viscosity (default 0.5)");
    check->add_option("--eta0", ck_eta0, "Zero-shear viscosity (default 2)");
    check->add_option("--lambda", ck_lambda, "Carreau time constant (default 1)");
    check->add_option("--samples", ck_samples, "Random tensor pairs (default 100000)");
    check->add_option("--seed", ck_seed, "Random seed (default 20240101)");

    CLI::App* validate = app.add_subcommand(
        "validate-forcing",
        "Compare closed-form forcings with finite-difference oracles");
    add_param_flags(validate, flags);
    int vf_samples = 1000;
    unsigned vf_seed = 20240101;
    validate->add_option("--samples", vf_samples, "Interior sample points (default 1000)");
    validate->add_option("--seed", vf_seed, "Random seed (default 20240101)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // invalid configuration
    }

    try {
        if (study->parsed()) return run_study_cmd(flags);
        if (solve->parsed())
            return run_solve_cmd(flags, solve_n, iter_log, dump_mesh_path, dump_system);
        if (check->parsed())
            return run_check_constitutive(ck_p, ck_eta_inf, ck_eta0, ck_lambda,
                                          ck_samples, ck_seed);
        if (validate->parsed()) return run_validate_forcing(flags, vf_samples, vf_seed);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 1;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 3;
    }
    return 0;
}
