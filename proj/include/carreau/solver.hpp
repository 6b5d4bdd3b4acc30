#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "carreau/assembly.hpp"
#include "carreau/manufactured.hpp"

namespace carreau {

struct SolverConfig {
    double tol = 1e-10;     // fixed-point stopping tolerance
    int max_iter = 100;
    double sigma = 0.0;     // regularization strength
    double r_reg = 2.0;     // regularization exponent, >= 2
    double kappa = 1.0;     // heat diffusion coefficient
    int quad_exactness = -1;  // -1 selects 2*degree + 4
    bool warm_start = false;  // reuse the previous level's state in studies

    void validate() const;
    int exactness_for(int velocity_degree) const {
        return quad_exactness > 0 ? quad_exactness
                                  : default_assembly_exactness(velocity_degree);
    }
};

enum class SolveStatus { Converged, MaxIterReached, Diverged };

const char* to_string(SolveStatus s);

struct IterationRecord {
    int iter = 0;
    double du = 0.0;      // ||u^(k+1) - u^(k)||_Ls
    double dpi = 0.0;     // ||pi^(k+1) - pi^(k)||_Ls'
    double dtheta = 0.0;  // ||theta^(k+1) - theta^(k)||_L2
    double eps_norm_diag = 0.0;    // ||eps(u)||_L^(p+1)
    double grad_theta_diag = 0.0;  // ||grad theta||_L2
    double theta_min = 0.0, theta_max = 0.0;  // realized nodal range
    double div_residual = 0.0;      // ||B u||_inf against zero-mean tests
    double div_residual_raw = 0.0;  // ||B u||_inf including the constant mode
};

struct IterationLog {
    std::vector<IterationRecord> records;
    SolveStatus status = SolveStatus::MaxIterReached;
    double stopping_norm_s = 2.0;

    /// CSV with header iter,du,dpi,dtheta,eps_norm_diag,grad_theta_diag.
    std::string to_csv() const;
};

struct PicardResult {
    CoupledState state;
    IterationLog log;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularSystem : public SolverError {
public:
    using SolverError::SolverError;
};

/// Direct sparse LU solve with a residual check
/// ||Ax-b||_inf <= 1e-9 (||A||_inf ||x||_inf + ||b||_inf).
/// Throws SingularSystem on factorization failure or residual violation.
Vector saddle_solve(const SparseSystem& system);

/// Same solve, but the symbolic analysis is done once and reused across
/// calls with an identical sparsity pattern (one factorization per Picard
/// iteration on the same mesh).
class ReusableLu {
public:
    ReusableLu();
    ~ReusableLu();
    ReusableLu(ReusableLu&&) noexcept;
    ReusableLu& operator=(ReusableLu&&) noexcept;

    Vector solve(const SparseSystem& system);

    /// Split interface for multi-RHS use: factorize once, apply repeatedly.
    /// apply() performs no residual check; callers verify the final system.
    void factorize(const SpMat& A);
    Vector apply(const Vector& rhs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Pieces of the frozen Stokes subproblem that do not change across
/// iterations.
struct StokesOperators {
    SpMat B;        // divergence coupling, np x nu
    Vector m;       // pressure means, the zero-mean multiplier row
    Vector f_load;
    DirichletBC velocity_bc;
};

StokesOperators make_stokes_operators(const DiscreteSpaces& spaces,
                                      const ManufacturedCase& c, int exactness);

struct TemperatureOperators {
    SpMat a2;
    Vector g_load;
    DirichletBC theta_bc;
};

TemperatureOperators make_temperature_operators(const DiscreteSpaces& spaces,
                                                const ManufacturedCase& c,
                                                double kappa, int exactness);

struct StokesStepResult {
    Vector u;
    Vector pi;  // mean-free
    double div_residual = 0.0;
    double div_residual_raw = 0.0;
};

/// One frozen-coefficient saddle solve: eta and the sigma-term are frozen at
/// u_k, nu at theta_k; returns the next velocity and mean-free pressure.
StokesStepResult stokes_step(const Vector& theta_k, const Vector& u_k,
                             const DiscreteSpaces& spaces, const ManufacturedCase& c,
                             const SolverConfig& config,
                             const StokesOperators* ops = nullptr,
                             ReusableLu* lu = nullptr);

/// Convection-diffusion solve for the temperature given the new velocity.
Vector temperature_step(const Vector& u_next, const DiscreteSpaces& spaces,
                        const ManufacturedCase& c, const SolverConfig& config,
                        const TemperatureOperators* ops = nullptr,
                        ReusableLu* lu = nullptr);

/// The fixed-point loop: start from (0, 0) (or `initial`), alternate
/// stokes_step / temperature_step, stop when the combined increment
/// ||du||_Ls + ||dpi||_Ls' + ||dtheta||_L2 drops below tol. s = 2 when
/// eta_inf > 0 and s = p otherwise. Non-convergence and divergence are
/// reported through the log status, with the last state returned.
PicardResult picard_solve(const DiscreteSpaces& spaces, const ManufacturedCase& c,
                          const SolverConfig& config,
                          const CoupledState* initial = nullptr);

} // namespace carreau
