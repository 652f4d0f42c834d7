#pragma once

#include <memory>

#include "tpflow/bulk_field.hpp"
#include "tpflow/constitutive.hpp"
#include "tpflow/height_function.hpp"

namespace tpflow {

/// Coefficients of the linear problem, frozen at the reference state of the
/// current step: the advection field u*, its tangential interface trace, and
/// the interface fields sigma(c*_Sigma), sigma'(c*_Sigma), alpha'([c*]_Sigma).
struct FrozenCoefficients {
    VectorBulkField u_star;
    SurfaceField u_star_theta_sigma;
    SurfaceField sigma_star;
    SurfaceField sigma_prime_star;
    SurfaceField alpha_prime_star;

    static FrozenCoefficients rest(const TwoPhaseGrid& grid, const MaterialModel& model,
                                   double c_sigma_ref, double c_trace_ref);
};

/// Right-hand-side tuple of the linear problem plus the frozen coefficients
/// and the step size.
struct LinearStepData {
    VectorBulkField f_u;   // momentum forcing (the equation carries rho f_u)
    BulkField g;           // divergence datum, node-based
    BulkField f_c;         // bulk surfactant forcing, outer block
    TangentField h_tau;    // tangential stress datum (e_theta component)
    SurfaceField h_nu;     // normal stress datum
    SurfaceField h_gamma;  // kinematic datum
    SurfaceField h_alpha;  // adsorption datum
    SurfaceField h_eps;    // surface transport datum
    FrozenCoefficients frozen;
    double dt = 0.0;

    static LinearStepData zero(const TwoPhaseGrid& grid, const MaterialModel& model,
                               FrozenCoefficients frozen, double dt);
};

struct SurfaceSolveResult {
    SurfaceField c_sigma;
    double residual = 0.0;   // discrete-equation residual, relative
    int lag_iterations = 0;  // oscillating-coefficient correction sweeps
};

struct BulkSolveResult {
    BulkField c;
    double residual = 0.0;
    int lag_iterations = 0;
    bool positivity_warning = false;  // min c < 0 flags dt/resolution trouble
};

struct StokesResult {
    VectorBulkField u;
    BulkField p;             // node-based pressure (zero area mean)
    HeightFunction gamma;
    SurfaceField p_jump;     // [[p]] on Sigma from the native midpoint data
    Grid2D p_mid_inner;      // midpoint pressure, kept for residual evaluation
    Grid2D p_mid_outer;
    double residual_tau = 0.0;   // tangential stress condition
    double residual_nu = 0.0;    // normal stress condition
    double residual_div = 0.0;   // divergence constraint
    double residual_mom = 0.0;   // momentum equations
    double residual_kin = 0.0;   // kinematic equation
    int lag_iterations = 0;
};

/// Direct per-mode solver for one backward-Euler step of the linear problem,
/// in the decoupling order of the underlying theory: surface parabolic, then
/// bulk parabolic, then the two-phase Stokes system with the kinematic
/// update. Spectral in theta, second-order staggered finite differences in r,
/// one banded complex system per Fourier mode.
///
/// theta-dependent frozen coefficients are split: their angular mean enters
/// the factorized matrices, the oscillation is applied to the newest iterate
/// and absorbed by a short inner lag loop until the theta-dependent discrete
/// equations themselves are satisfied.
class LinearStepSolver {
public:
    LinearStepSolver(const TwoPhaseGrid& grid, const MaterialModel& model,
                     FrozenCoefficients frozen, double dt);
    ~LinearStepSolver();

    LinearStepSolver(const LinearStepSolver&) = delete;
    LinearStepSolver& operator=(const LinearStepSolver&) = delete;

    const TwoPhaseGrid& grid() const { return *grid_; }
    const MaterialModel& model() const { return *model_; }
    double dt() const { return dt_; }
    const FrozenCoefficients& frozen() const { return frozen_; }

    SurfaceSolveResult solve_surface(const SurfaceField& c_sigma_old,
                                     const SurfaceField& h_eps) const;

    BulkSolveResult solve_bulk(const BulkField& c_old, const SurfaceField& c_sigma_new,
                               const BulkField& f_c, const SurfaceField& h_alpha) const;

    StokesResult solve_stokes(const VectorBulkField& u_old, const HeightFunction& gamma_old,
                              const VectorBulkField& f_u, const BulkField& g,
                              const TangentField& h_tau, const SurfaceField& h_nu,
                              const SurfaceField& h_gamma, const SurfaceField& c_sigma_new) const;

    /// Same Stokes equations, all modes stacked into one banded matrix and
    /// factorized by LAPACK zgbsv; exists as an independent solution path for
    /// the mode-decoupling check (theta-independent coefficients).
    StokesResult solve_stokes_global(const VectorBulkField& u_old, const HeightFunction& gamma_old,
                                     const VectorBulkField& f_u, const BulkField& g,
                                     const TangentField& h_tau, const SurfaceField& h_nu,
                                     const SurfaceField& h_gamma,
                                     const SurfaceField& c_sigma_new) const;

    /// Flat backward-Euler operator rows applied to given fields (the exact
    /// stencils of the factorized matrices, with the full theta-dependent
    /// coefficients). Used for residuals and for the map-defect correction.
    VectorBulkField apply_momentum(const VectorBulkField& u, const Grid2D& p_mid_inner,
                                   const Grid2D& p_mid_outer) const;
    BulkField apply_bulk_operator(const BulkField& c) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    const TwoPhaseGrid* grid_;
    const MaterialModel* model_;
    FrozenCoefficients frozen_;
    double dt_;
};

// Spec-level convenience wrappers (factorize, solve, return).
SurfaceSolveResult solve_surface_parabolic(const TwoPhaseGrid& grid, const MaterialModel& model,
                                           const SurfaceField& c_sigma_old,
                                           const LinearStepData& data);
BulkSolveResult solve_bulk_parabolic(const TwoPhaseGrid& grid, const MaterialModel& model,
                                     const BulkField& c_old, const SurfaceField& c_sigma_new,
                                     const LinearStepData& data);
StokesResult solve_two_phase_stokes(const TwoPhaseGrid& grid, const MaterialModel& model,
                                    const VectorBulkField& u_old, const HeightFunction& gamma_old,
                                    const SurfaceField& c_sigma_new, const LinearStepData& data);

}  // namespace tpflow
