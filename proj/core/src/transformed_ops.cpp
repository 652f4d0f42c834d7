#include "tpflow/transformed_ops.hpp"

namespace tpflow {

SurfaceField n_op(const OperatorContext& ctx) { return ctx.n_factor(); }

SurfaceField mu_op(const OperatorContext& ctx) { return ctx.mu(); }

SurfaceVector nu_gamma_op(const OperatorContext& ctx) {
    const RealArray& mu = ctx.mu().values();
    const RealArray& a = ctx.a_theta().values();
    return {SurfaceField(mu), SurfaceField(-mu * a)};
}

SurfaceTensor p_gamma_op(const OperatorContext& ctx) {
    SurfaceVector nu = nu_gamma_op(ctx);
    const RealArray& nr = nu.er.values();
    const RealArray& nt = nu.et.values();
    return {SurfaceField(1.0 - nr * nr), SurfaceField(-nr * nt),
            SurfaceField(-nr * nt), SurfaceField(1.0 - nt * nt)};
}

SurfaceTensor g_sigma_op(const OperatorContext& ctx) {
    // Restricted to tangent inputs (the only ones G_Sigma ever sees), i.e.
    // G_Sigma P_Sigma embedded in the (e_r, e_theta) basis.
    const RealArray& mu = ctx.mu().values();
    const RealArray& a = ctx.a_theta().values();
    const RealArray& n = ctx.n_factor().values();
    const int nn = static_cast<int>(mu.size());
    RealArray mu2 = mu.square();
    return {SurfaceField::zero(nn), SurfaceField(-mu2 * n * a),
            SurfaceField::zero(nn), SurfaceField((1.0 - n) + mu2 * n * a.square())};
}

SurfaceField kappa_gamma_op(const OperatorContext& ctx) { return ctx.kappa_gamma(); }

SurfaceField kappa_prime_zero(const ReferenceGeometry& geom, const SurfaceField& h) {
    const double rs2 = geom.r_sigma() * geom.r_sigma();
    return SurfaceField((h.values() + h.derivative(2).values()) / rs2);
}

ScalarDerivs scalar_derivs(const OperatorContext& ctx, Phase p, const Grid2D& f,
                           int accuracy, int parity) {
    ScalarDerivs d;
    const Grid2D& T = ctx.T(p);
    const Grid2D& Tr = ctx.T_r(p);
    const Grid2D& Trr = ctx.T_rr(p);
    const Grid2D& Tth = ctx.T_theta(p);

    d.ps = ctx.deriv_s(p, f, 1, accuracy, parity);
    d.pss = ctx.deriv_s(p, f, 2, accuracy, parity);
    d.fth = ctx.deriv_theta(p, f, 1);
    d.fthth = ctx.deriv_theta(p, f, 2);

    d.pth = d.fth - Tth * d.ps;
    d.psth = ctx.deriv_theta(p, d.ps, 1) - Tth * d.pss;
    d.pthth = ctx.deriv_theta(p, d.pth, 1) - Tth * d.psth;

    d.fr = Tr * d.ps;
    d.frr = Trr * d.ps + Tr.square() * d.pss;
    d.frth = ctx.deriv_theta(p, d.fr, 1);
    (void)T;
    return d;
}

namespace {

Grid2D physical_laplacian_block(const OperatorContext& ctx, Phase p, const Grid2D& f,
                                int accuracy, int parity) {
    ScalarDerivs d = scalar_derivs(ctx, p, f, accuracy, parity);
    const Grid2D& T = ctx.T(p);
    return d.pss + d.ps / T + d.pthth / T.square();
}

}  // namespace

BulkField transformed_laplacian(const BulkField& f, const OperatorContext& ctx) {
    BulkField out = f;
    if (f.has_inner()) {
        out.inner() = physical_laplacian_block(ctx, Phase::Inner, f.inner(), 4, +1);
    }
    out.outer() = physical_laplacian_block(ctx, Phase::Outer, f.outer(), 4, +1);
    return out;
}

GradientField transformed_gradient(const BulkField& f, const OperatorContext& ctx) {
    GradientField g{f, f};
    for (Phase p : {Phase::Inner, Phase::Outer}) {
        if (p == Phase::Inner && !f.has_inner()) continue;
        ScalarDerivs d = scalar_derivs(ctx, p, f.block(p), 4, +1);
        g.er.block(p) = d.ps;
        g.et.block(p) = d.pth / ctx.T(p);
    }
    return g;
}

BulkField transformed_divergence(const VectorBulkField& u, const OperatorContext& ctx) {
    BulkField out = u.r;
    for (Phase p : {Phase::Inner, Phase::Outer}) {
        const Grid2D& T = ctx.T(p);
        const Grid2D& Tth = ctx.T_theta(p);
        Grid2D ur_s = ctx.deriv_s(p, u.r.block(p), 1, 4, -1);
        Grid2D ut_s = ctx.deriv_s(p, u.theta.block(p), 1, 4, -1);
        Grid2D ut_pth = ctx.deriv_theta(p, u.theta.block(p), 1) - Tth * ut_s;
        out.block(p) = ur_s + u.r.block(p) / T + ut_pth / T;
    }
    return out;
}

BulkCoefficients bulk_coefficients(const OperatorContext& ctx, Phase p) {
    return {ctx.op_G(p), ctx.op_D(p), ctx.op_L(p), ctx.op_A(p)};
}

VectorBulkField m_field(const VectorBulkField& u, const OperatorContext& ctx) {
    VectorBulkField m = u;
    for (Phase p : {Phase::Inner, Phase::Outer}) {
        const Grid2D& dtT = ctx.dt_theta_map(p);
        const TensorField2& D = ctx.op_D(p);
        const Grid2D& ur = u.r.block(p);
        const Grid2D& ut = u.theta.block(p);
        const Grid2D& vr = ctx.u_star().r.block(p);
        const Grid2D& vt = ctx.u_star().theta.block(p);
        Grid2D wr = ur - dtT;  // u - dTheta/dt (radial); tangential part is ut
        m.r.block(p) = dtT - (ur - vr) + D.rr * wr + D.rt * ut;
        m.theta.block(p) = -(ut - vt) + D.tr * wr + D.tt * ut;
    }
    return m;
}

SurfaceMaterialOps surface_material_ops(const SurfaceField& u_theta_trace,
                                        const OperatorContext& ctx) {
    const RealArray& gs = ctx.g_sigma().values();
    const RealArray& ut = u_theta_trace.values();
    const RealArray ut_star = ctx.u_star().theta.trace(Phase::Outer).values();
    SurfaceField m_sigma(gs * ut - (ut - ut_star));
    return {m_sigma, ctx.a_sigma(), ctx.l_sigma()};
}

SurfaceVector g_gamma_apply(const SurfaceField& f, const OperatorContext& ctx) {
    const double rs = ctx.geometry().r_sigma();
    const RealArray fp = f.derivative(1).values();
    const RealArray& n = ctx.n_factor().values();
    const RealArray& mu = ctx.mu().values();
    const RealArray& a = ctx.a_theta().values();
    RealArray tangential = n * mu.square() * fp / rs;
    return {SurfaceField(tangential * a), SurfaceField(tangential)};
}

SurfaceField laplace_gamma_apply(const SurfaceField& f, const OperatorContext& ctx) {
    const RealArray fp = f.derivative(1).values();
    const RealArray fpp = f.derivative(2).values();
    const RealArray& J = ctx.arc_element().values();
    const RealArray& rho = ctx.rho_curve().values();
    const RealArray& gp = ctx.gamma_prime().values();
    const RealArray gpp = ctx.gamma().field().derivative(2).values();
    RealArray Jp = gp * (rho + gpp) / J;
    return SurfaceField(fpp / J.square() - Jp * fp / J.cube());
}

SurfaceField div_gamma_velocity(const SurfaceField& u_r_trace, const SurfaceField& u_t_trace,
                                const OperatorContext& ctx) {
    const RealArray urp = u_r_trace.derivative(1).values();
    const RealArray utp = u_t_trace.derivative(1).values();
    const RealArray& ur = u_r_trace.values();
    const RealArray& ut = u_t_trace.values();
    const RealArray& rho = ctx.rho_curve().values();
    const RealArray& gp = ctx.gamma_prime().values();
    const RealArray& J = ctx.arc_element().values();
    // tau_Gamma . d(u)/dtheta / J with tau_Gamma = (rho' e_r + rho e_theta)/J
    return SurfaceField((gp * (urp - ut) + rho * (utp + ur)) / J.square());
}

StrainField physical_strain(const OperatorContext& ctx, Phase p, const VectorBulkField& u,
                            int accuracy) {
    const Grid2D& T = ctx.T(p);
    const Grid2D& Tth = ctx.T_theta(p);
    Grid2D ur_s = ctx.deriv_s(p, u.r.block(p), 1, accuracy, -1);
    Grid2D ut_s = ctx.deriv_s(p, u.theta.block(p), 1, accuracy, -1);
    Grid2D ur_pth = ctx.deriv_theta(p, u.r.block(p), 1) - Tth * ur_s;
    Grid2D ut_pth = ctx.deriv_theta(p, u.theta.block(p), 1) - Tth * ut_s;

    StrainField s;
    s.ss = ur_s;
    s.st = 0.5 * (ut_s - u.theta.block(p) / T + ur_pth / T);
    s.tt = ut_pth / T + u.r.block(p) / T;
    return s;
}

FlatVectorGradient flat_velocity_gradient(const OperatorContext& ctx, Phase p,
                                          const VectorBulkField& u, int accuracy) {
    const Grid2D& Tr = ctx.T_r(p);
    const RealArray& r = ctx.grid().radii(p);
    Grid2D ur_s = ctx.deriv_s(p, u.r.block(p), 1, accuracy, -1);
    Grid2D ut_s = ctx.deriv_s(p, u.theta.block(p), 1, accuracy, -1);
    Grid2D ur_th = ctx.deriv_theta(p, u.r.block(p), 1);
    Grid2D ut_th = ctx.deriv_theta(p, u.theta.block(p), 1);

    FlatVectorGradient g;
    g.rr = Tr * ur_s;
    g.rt = Tr * ut_s;
    g.tr = (ur_th - u.theta.block(p)).colwise() / r;
    g.tt = (ut_th + u.r.block(p)).colwise() / r;
    return g;
}

}  // namespace tpflow
