#include <doctest.h>

#include <random>

#include "carreau/manufactured.hpp"
#include "carreau/solver.hpp"
#include "test_util.hpp"

using namespace carreau;

namespace {

SymTensor2 stress_field(const ManufacturedCase& c, const Vec2& x) {
    const Mat2 J = c.grad_velocity(x);
    const SymTensor2 eps{J(0, 0), 0.5 * (J(0, 1) + J(1, 0)), J(1, 1)};
    const double visc =
        2.0 * nu(c.temperature(x), c.viscosity) * eta(eps.frobenius_sq(), c.params);
    return SymTensor2{visc * eps.xx, visc * eps.xy, visc * eps.yy};
}

} // namespace

TEST_CASE("test1 exact fields at the origin") {
    const ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.0);
    CHECK(c.velocity(Vec2(0, 0)).norm() == 0.0);
    CHECK(c.pressure(Vec2(0, 0)) == 0.0);
    CHECK(c.temperature(Vec2(0, 0)) == 1.0);
}

TEST_CASE("test1 velocity is divergence free at random points") {
    const ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.0);
    auto rng = test::seeded_rng(71);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
        const Vec2 x(d(rng), d(rng));
        const Mat2 J = c.grad_velocity(x);
        CHECK(std::abs(J(0, 0) + J(1, 1)) <= 1e-11);
    }
}

TEST_CASE("test1 gradient and Hessian match finite differences of u") {
    const ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.0);
    auto rng = test::seeded_rng(72);
    std::uniform_real_distribution<double> d(0.05, 0.95);
    const double h = 1e-6;
    for (int k = 0; k < 100; ++k) {
        const Vec2 x(d(rng), d(rng));
        const Vec2 dx(h, 0), dy(0, h);
        const Mat2 J = c.grad_velocity(x);
        const Vec2 jx = (c.velocity(x + dx) - c.velocity(x - dx)) / (2 * h);
        const Vec2 jy = (c.velocity(x + dy) - c.velocity(x - dy)) / (2 * h);
        CHECK(J(0, 0) == doctest::Approx(jx.x()).epsilon(1e-6));
        CHECK(J(1, 0) == doctest::Approx(jx.y()).epsilon(1e-6));
        CHECK(J(0, 1) == doctest::Approx(jy.x()).epsilon(1e-6));
        CHECK(J(1, 1) == doctest::Approx(jy.y()).epsilon(1e-6));

        Hess2 hx, hy;
        c.hess_velocity(x, hx, hy);
        const Mat2 Jxp = c.grad_velocity(x + dx), Jxm = c.grad_velocity(x - dx);
        const Mat2 Jyp = c.grad_velocity(x + dy), Jym = c.grad_velocity(x - dy);
        CHECK(hx.xx == doctest::Approx((Jxp(0, 0) - Jxm(0, 0)) / (2 * h)).epsilon(1e-5));
        CHECK(hx.xy == doctest::Approx((Jyp(0, 0) - Jym(0, 0)) / (2 * h)).epsilon(1e-5));
        CHECK(hx.yy == doctest::Approx((Jyp(0, 1) - Jym(0, 1)) / (2 * h)).epsilon(1e-5));
        CHECK(hy.xx == doctest::Approx((Jxp(1, 0) - Jxm(1, 0)) / (2 * h)).epsilon(1e-5));
        CHECK(hy.xy == doctest::Approx((Jyp(1, 0) - Jym(1, 0)) / (2 * h)).epsilon(1e-5));
        CHECK(hy.yy == doctest::Approx((Jyp(1, 1) - Jym(1, 1)) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("forcing_f matches the finite-difference stress divergence") {
    // the pre-build validation gate for every shipped nonlinear case
    for (double p : {2.0, 1.6, 1.2}) {
        for (double eta_inf : {0.5, 0.0}) {
            const ManufacturedCase c = test1_case(p, eta_inf, 2.0, 1.0, 1.0);
            auto rng = test::seeded_rng(73);
            std::uniform_real_distribution<double> d(0.01, 0.99);
            const double delta = 1e-5;
            double max_rel = 0.0;
            for (int k = 0; k < 100; ++k) {
                const Vec2 x(d(rng), d(rng));
                const Vec2 dx(delta, 0), dy(0, delta);
                const SymTensor2 sxp = stress_field(c, x + dx);
                const SymTensor2 sxm = stress_field(c, x - dx);
                const SymTensor2 syp = stress_field(c, x + dy);
                const SymTensor2 sym = stress_field(c, x - dy);
                const Vec2 div_fd(
                    (sxp.xx - sxm.xx) / (2 * delta) + (syp.xy - sym.xy) / (2 * delta),
                    (sxp.xy - sxm.xy) / (2 * delta) + (syp.yy - sym.yy) / (2 * delta));
                const Vec2 f_fd = -div_fd + c.grad_pressure(x);
                const Vec2 f_cf = forcing_f(x, c);
                max_rel = std::max(max_rel,
                                   (f_cf - f_fd).norm() / std::max(1.0, f_fd.norm()));
            }
            INFO("p = ", p, ", eta_inf = ", eta_inf);
            CHECK(max_rel <= 1e-5);
        }
    }
}

TEST_CASE("forcing_f is continuous") {
    const ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.0);
    auto rng = test::seeded_rng(74);
    std::uniform_real_distribution<double> d(0.05, 0.95);
    for (int k = 0; k < 100; ++k) {
        const Vec2 x(d(rng), d(rng));
        const Vec2 x2 = x + Vec2(1e-9, -1e-9);
        CHECK((forcing_f(x, c) - forcing_f(x2, c)).norm() <= 1e-6);
    }
}

TEST_CASE("linear case: f = grad pi = (1,1) exactly") {
    const ManufacturedCase c = linear_case(1.0);
    for (const Vec2& x : {Vec2(0.1, 0.3), Vec2(0.8, 0.2), Vec2(0.5, 0.99)}) {
        const Vec2 f = forcing_f(x, c);
        CHECK(f.x() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(f.y() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("forcing_g equals the explicit closed form for test1") {
    const ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.3);
    auto rng = test::seeded_rng(75);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const Vec2 x(d(rng), d(rng));
        const Vec2 u = c.velocity(x);
        const double expected =
            1.3 * (x.x() * x.x() + x.y() * x.y()) * std::cos(x.x() * x.y()) -
            (u.x() * x.y() + u.y() * x.x()) * std::sin(x.x() * x.y());
        CHECK(forcing_g(x, c) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("forcing_g matches finite differences of theta") {
    const ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.0);
    auto rng = test::seeded_rng(76);
    std::uniform_real_distribution<double> d(0.01, 0.99);
    // second differences lose half the mantissa, so the step is coarser
    // than for the first-derivative oracles
    const double delta = 1e-4;
    for (int k = 0; k < 100; ++k) {
        const Vec2 x(d(rng), d(rng));
        const Vec2 dx(delta, 0), dy(0, delta);
        const double lap_fd =
            (c.temperature(x + dx) - 2 * c.temperature(x) + c.temperature(x - dx)) /
                (delta * delta) +
            (c.temperature(x + dy) - 2 * c.temperature(x) + c.temperature(x - dy)) /
                (delta * delta);
        const Vec2 gt_fd((c.temperature(x + dx) - c.temperature(x - dx)) / (2 * delta),
                         (c.temperature(x + dy) - c.temperature(x - dy)) / (2 * delta));
        const double g_fd = -c.kappa * lap_fd + c.velocity(x).dot(gt_fd);
        CHECK(forcing_g(x, c) ==
              doctest::Approx(g_fd).epsilon(1e-6));
    }
}

namespace {

// int_0^1 cos(a x) dx and int_0^1 x^2 cos(a x) dx with small-argument series.
double int_cos(double a) {
    if (std::abs(a) < 1e-3) {
        const double a2 = a * a;
        return 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
    }
    return std::sin(a) / a;
}

double int_x2_cos(double a) {
    if (std::abs(a) < 1e-3) {
        const double a2 = a * a;
        return 1.0 / 3.0 - a2 / 10.0 + a2 * a2 / 168.0;
    }
    return ((a * a - 2.0) * std::sin(a) + 2.0 * a * std::cos(a)) / (a * a * a);
}

// ||grad cos(xy)||^2_L2 = int int (x^2 + y^2) sin^2(xy) dx dy via the
// reduced 1D closed form in x integrated by Gauss in y.
double grad_theta_norm_semianalytic() {
    // inner integral for fixed y:
    //   I(y) = (1/3 + y^2)/2 - [ int_x2_cos(2y) + y^2 int_cos(2y) ] / 2
    auto inner = [](double y) {
        return 0.5 * (1.0 / 3.0 + y * y) -
               0.5 * (int_x2_cos(2.0 * y) + y * y * int_cos(2.0 * y));
    };
    // 64-point composite Gauss(4) on [0,1]
    const double gx[4] = {0.069431844202974, 0.330009478207572, 0.669990521792428,
                          0.930568155797026};
    const double gw[4] = {0.173927422568727, 0.326072577431273, 0.326072577431273,
                          0.173927422568727};
    double sum = 0.0;
    const int cells = 16;
    for (int c = 0; c < cells; ++c)
        for (int k = 0; k < 4; ++k)
            sum += gw[k] / cells * inner((c + gx[k]) / cells);
    return std::sqrt(sum);
}

} // namespace

TEST_CASE("error_norms of the zero state reproduces ||grad theta||") {
    const ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.0);
    const Mesh m = unit_square_mesh(8);
    DiscreteSpaces spaces(m, 2);
    CoupledState zero;
    zero.u = Vector::Zero(spaces.velocity.n_dofs());
    zero.pi = Vector::Zero(spaces.pressure.n_dofs());
    zero.theta = Vector::Zero(spaces.temperature.n_dofs());
    const ErrorReport err = error_norms(zero, spaces, c, 4);
    CHECK(err.err_theta_h1 ==
          doctest::Approx(grad_theta_norm_semianalytic()).epsilon(1e-8));
}

TEST_CASE("error_norms scales exactly with the temperature field") {
    ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.0);
    const Mesh m = unit_square_mesh(4);
    DiscreteSpaces spaces(m, 2);

    CoupledState state;
    state.u = interpolate_velocity(spaces.velocity, c.velocity);
    state.pi = Vector::Zero(spaces.pressure.n_dofs());
    state.theta = interpolate_scalar(spaces.temperature,
                                     [](const Vec2& p) { return p.x() * p.y(); });
    const ErrorReport base = error_norms(state, spaces, c, 4);

    ManufacturedCase doubled = c;
    auto theta2 = [inner = c.temperature](const Vec2& x) { return 2.0 * inner(x); };
    auto grad2 = [inner = c.grad_temperature](const Vec2& x) {
        return Vec2(2.0 * inner(x));
    };
    doubled.temperature = theta2;
    doubled.grad_temperature = grad2;
    CoupledState scaled = state;
    scaled.theta *= 2.0;
    const ErrorReport twice = error_norms(scaled, spaces, doubled, 4);
    CHECK(twice.err_theta_h1 == 2.0 * base.err_theta_h1);  // exact binary scaling
}

TEST_CASE("error_norms rejects mismatched dimensions") {
    const ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.0);
    const Mesh m = unit_square_mesh(2);
    DiscreteSpaces spaces(m, 2);
    CoupledState bad;
    bad.u = Vector::Zero(3);
    bad.pi = Vector::Zero(spaces.pressure.n_dofs());
    bad.theta = Vector::Zero(spaces.temperature.n_dofs());
    CHECK_THROWS_AS(error_norms(bad, spaces, c, 4), std::invalid_argument);
}

TEST_CASE("discrete solution is quasi-optimal against the interpolant") {
    // Both errors are controlled by the interpolation error; the Galerkin
    // solution can beat the nodal interpolant slightly, so the comparison
    // is two-sided with modest constants rather than a strict ordering.
    const ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.0);
    const Mesh m = unit_square_mesh(8);
    DiscreteSpaces spaces(m, 2);

    SolverConfig config;
    config.tol = 1e-10;
    config.max_iter = 100;
    const PicardResult solved = picard_solve(spaces, c, config);
    REQUIRE(solved.log.status == SolveStatus::Converged);
    const ErrorReport err_solved = error_norms(solved.state, spaces, c, 4);

    CoupledState interp;
    interp.u = interpolate_velocity(spaces.velocity, c.velocity);
    interp.theta = interpolate_scalar(spaces.temperature, c.temperature);
    interp.pi = interpolate_scalar(spaces.pressure, c.pressure);
    const ErrorReport err_interp = error_norms(interp, spaces, c, 4);

    CHECK(err_solved.err_u_l2 <= 5.0 * err_interp.err_u_l2);
    CHECK(err_solved.err_u_w1s <= 5.0 * err_interp.err_u_w1s);
    CHECK(err_solved.err_theta_h1 <= 5.0 * err_interp.err_theta_h1);
    CHECK(err_interp.err_u_l2 <= 1.5 * err_solved.err_u_l2);
    CHECK(err_interp.err_u_w1s <= 1.5 * err_solved.err_u_w1s);
    CHECK(err_interp.err_theta_h1 <= 1.5 * err_solved.err_theta_h1);
}

TEST_CASE("interpolant L2 error decreases at order degree + 1") {
    const ManufacturedCase c = test1_case(1.6, 0.5, 2.0, 1.0, 1.0);
    for (int degree : {2, 3}) {
        std::vector<double> errs, hs;
        for (int n : {8, 16}) {
            const Mesh m = unit_square_mesh(n);
            DiscreteSpaces spaces(m, degree);
            CoupledState interp;
            interp.u = interpolate_velocity(spaces.velocity, c.velocity);
            interp.pi = interpolate_scalar(spaces.pressure, c.pressure);
            interp.theta = interpolate_scalar(spaces.temperature, c.temperature);
            errs.push_back(error_norms(interp, spaces, c, 4).err_u_l2);
            hs.push_back(metrics(m).h_max);
        }
        const double order = eoc(errs, hs)[0];
        CHECK(order > degree + 1 - 0.3);
        CHECK(order < degree + 1 + 0.3);
    }
}

TEST_CASE("eoc on frozen ratios") {
    CHECK(eoc({1.0, 0.25}, {1.0, 0.5})[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(eoc({1.0, 0.125}, {1.0, 0.5})[0] == doctest::Approx(3.0).epsilon(1e-14));
    const auto orders = eoc({0.7, 0.7, 0.7}, {1.0, 0.5, 0.25});
    for (double o : orders) CHECK(o == doctest::Approx(0.0));

    CHECK_THROWS_AS(eoc({1.0, 0.0}, {1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(eoc({1.0, 0.5}, {0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(eoc({1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("norm index follows eta_inf") {
    CHECK(norm_index_s(CarreauParams{0.5, 2.0, 1.0, 1.6}) == 2.0);
    CHECK(norm_index_s(CarreauParams{0.0, 2.0, 1.0, 1.6}) == 1.6);
}
