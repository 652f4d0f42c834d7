#pragma once

#include "tpflow/operator_context.hpp"

namespace tpflow {

struct SurfaceVector {
    SurfaceField er, et;
};

struct SurfaceTensor {
    SurfaceField rr, rt, tr, tt;
};

// ----- transformed geometric quantities on Sigma -----

/// Tangential factor of N(gamma) = (1 - gamma L_Sigma)^{-1}; on the circle
/// it acts as R_sigma / (R_sigma + gamma) on tangents and as 1 on normals.
SurfaceField n_op(const OperatorContext& ctx);

/// mu(gamma) = (1 + |N grad_Sigma gamma|^2)^{-1/2}.
SurfaceField mu_op(const OperatorContext& ctx);

/// Transformed unit normal nu_Gamma = mu (nu_Sigma - N grad_Sigma gamma).
SurfaceVector nu_gamma_op(const OperatorContext& ctx);

/// Transformed tangential projector P_Gamma = 1 - nu_Gamma (x) nu_Gamma.
SurfaceTensor p_gamma_op(const OperatorContext& ctx);

/// G_Sigma(gamma) = (1 - N) + (1 - P_Gamma) N, so that the transformed
/// surface gradient is (1 - G_Sigma) grad_Sigma.
SurfaceTensor g_sigma_op(const OperatorContext& ctx);

/// Transformed sum of principal curvatures kappa_Gamma(gamma).
SurfaceField kappa_gamma_op(const OperatorContext& ctx);

/// Linearized curvature at gamma = 0: tr L_Sigma^2 + Delta_Sigma, i.e.
/// (h + h'') / R_sigma^2 on the circle.
SurfaceField kappa_prime_zero(const ReferenceGeometry& geom, const SurfaceField& h);

// ----- bulk derivative bundles -----

/// All first and second derivatives of a scalar block field, both on the
/// physical side (composed with Theta; subscript s is the mapped radius) and
/// as flat reference-domain derivatives (subscript r). Assembled from mapped
/// radial stencils, spectral theta derivatives and the closed-form radial
/// map, so none of them difference across the cutoff profile.
struct ScalarDerivs {
    Grid2D ps, pss, pth, psth, pthth;  // physical, at radius T(r, theta)
    Grid2D fr, frr, fth, frth, fthth;  // flat reference, at radius r
};

ScalarDerivs scalar_derivs(const OperatorContext& ctx, Phase p, const Grid2D& f,
                           int accuracy, int parity = +1);

/// Physical Laplacian (Delta f) o Theta of a scalar bulk field (4th order).
BulkField transformed_laplacian(const BulkField& f, const OperatorContext& ctx);

/// Physical gradient (grad f) o Theta, polar components.
struct GradientField {
    BulkField er, et;
};
GradientField transformed_gradient(const BulkField& f, const OperatorContext& ctx);

/// Physical divergence (div u) o Theta of a velocity field in polar components.
BulkField transformed_divergence(const VectorBulkField& u, const OperatorContext& ctx);

// ----- multiplication operators -----

/// View of the cached coefficient fields G, D, A, L of one phase.
struct BulkCoefficients {
    const TensorField2& G;
    const TensorField2& D;
    const TensorField2& L;
    const PolarVectorField& A;
};
BulkCoefficients bulk_coefficients(const OperatorContext& ctx, Phase p);

/// M(u, gamma | u*) = dTheta/dt - (u - u*) + D(gamma)(u - dTheta/dt).
VectorBulkField m_field(const VectorBulkField& u, const OperatorContext& ctx);

/// Surface coefficients: M_Sigma = D_Sigma(gamma) u_Sigma - (u_Sigma - u*_Sigma)
/// (tangential scalar on the circle) and the expansion coefficients A_Sigma,
/// L_Sigma of the transformed Laplace-Beltrami
///   L_Gamma(gamma) = Delta_Sigma - A_Sigma . grad_Sigma - L_Sigma d^2/(R^2 dtheta^2).
struct SurfaceMaterialOps {
    SurfaceField m_sigma;
    SurfaceField a_sigma;
    SurfaceField l_sigma;
};
SurfaceMaterialOps surface_material_ops(const SurfaceField& u_theta_trace,
                                        const OperatorContext& ctx);

// ----- transformed surface operators -----

/// G_Gamma(gamma) f = P_Gamma N grad_Sigma f (a vector tangent to Gamma).
SurfaceVector g_gamma_apply(const SurfaceField& f, const OperatorContext& ctx);

/// L_Gamma(gamma) f = (Delta_Gamma f_Gamma) o Theta via the arc-length form.
SurfaceField laplace_gamma_apply(const SurfaceField& f, const OperatorContext& ctx);

/// D_Gamma(gamma) u = (div_Gamma u) o Theta from the interface traces of a
/// velocity field (polar components).
SurfaceField div_gamma_velocity(const SurfaceField& u_r_trace, const SurfaceField& u_t_trace,
                                const OperatorContext& ctx);

// ----- velocity derivative helpers -----

/// Physical rate of strain D = (grad u + grad u^T)/2 o Theta, polar components.
struct StrainField {
    Grid2D ss, st, tt;
};
StrainField physical_strain(const OperatorContext& ctx, Phase p, const VectorBulkField& u,
                            int accuracy = 4);

/// Flat reference velocity gradient, components (a,b) = (d_a u)_b in the
/// polar basis.
struct FlatVectorGradient {
    Grid2D rr, rt, tr, tt;
};
FlatVectorGradient flat_velocity_gradient(const OperatorContext& ctx, Phase p,
                                          const VectorBulkField& u, int accuracy = 4);

}  // namespace tpflow
