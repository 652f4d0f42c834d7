#include "doctest.h"

#include <cmath>
#include <random>

#include "test_utils.hpp"
#include "tpflow/transformed_ops.hpp"

using namespace tpflow;
using namespace tpflow::test;

namespace {

struct Setup {
    ReferenceGeometry geom;
    TwoPhaseGrid grid;
    Setup(int nth, int nr, double eps = 0.6)
        : geom(2.0, 1.0, nth, nr, nr, eps), grid(geom) {}
};

// Physical interface points rho(theta) e_r(theta), built from gamma alone.
struct CurveOracle {
    RealArray px, py, jac;  // points and arc element |dP/dtheta|
    RealArray tx, ty;       // unit tangent
    CurveOracle(const ReferenceGeometry& geom, const SurfaceField& gamma) {
        const RealArray& th = geom.angles();
        RealArray rho = geom.r_sigma() + gamma.values();
        px = rho * th.cos();
        py = rho * th.sin();
        const Spectral& sp = geom.spectral();
        RealArray dx = sp.derivative(px, 1), dy = sp.derivative(py, 1);
        jac = (dx.square() + dy.square()).sqrt();
        tx = dx / jac;
        ty = dy / jac;
    }
};

}  // namespace

TEST_CASE("transformed normal and projector") {
    Setup s(128, 32);
    std::mt19937_64 rng(17);

    SUBCASE("gamma = 0 reduces to the reference quantities") {
        OperatorContext ctx(s.grid, HeightFunction::zero(128));
        CHECK((n_op(ctx).values() - 1.0).abs().maxCoeff() < 1e-14);
        CHECK((mu_op(ctx).values() - 1.0).abs().maxCoeff() < 1e-14);
        auto nu = nu_gamma_op(ctx);
        CHECK((nu.er.values() - 1.0).abs().maxCoeff() < 1e-14);
        CHECK(nu.et.sup_norm() < 1e-14);
        auto P = p_gamma_op(ctx);
        CHECK(P.rr.sup_norm() < 1e-14);
        CHECK((P.tt.values() - 1.0).abs().maxCoeff() < 1e-14);
    }

    SUBCASE("constant gamma keeps the radial normal") {
        OperatorContext ctx(s.grid, HeightFunction(128, 0.1));
        CHECK((mu_op(ctx).values() - 1.0).abs().maxCoeff() < 1e-14);
        auto nu = nu_gamma_op(ctx);
        CHECK((nu.er.values() - 1.0).abs().maxCoeff() < 1e-14);
        CHECK(nu.et.sup_norm() < 1e-14);
        CHECK((n_op(ctx).values() - 1.0 / 1.1).abs().maxCoeff() < 1e-14);
    }

    SUBCASE("normal matches the parametrized-curve oracle") {
        HeightFunction gamma = random_height(s.geom, 0.12, rng);
        OperatorContext ctx(s.grid, gamma);
        CurveOracle curve(s.geom, gamma.field());
        auto nu = nu_gamma_op(ctx);
        for (int m = 0; m < 128; ++m) {
            const double th = s.geom.angles()(m);
            Vec2 nu_vec = nu.er(m) * ReferenceGeometry::normal(th) +
                          nu.et(m) * ReferenceGeometry::tangent(th);
            Vec2 oracle(curve.ty(m), -curve.tx(m));  // outward rotation of tangent
            CHECK((nu_vec - oracle).norm() < 1e-10);
        }
    }

    SUBCASE("algebraic identities") {
        HeightFunction gamma = random_height(s.geom, 0.14, rng);
        OperatorContext ctx(s.grid, gamma);
        auto nu = nu_gamma_op(ctx);
        auto P = p_gamma_op(ctx);
        for (int m = 0; m < 128; ++m) {
            const double nr = nu.er(m), nt = nu.et(m);
            CHECK(std::abs(nr * nr + nt * nt - 1.0) < 1e-12);
            // P nu = 0 and P^2 = P
            CHECK(std::abs(P.rr(m) * nr + P.rt(m) * nt) < 1e-12);
            CHECK(std::abs(P.tr(m) * nr + P.tt(m) * nt) < 1e-12);
            const double prr = P.rr(m) * P.rr(m) + P.rt(m) * P.tr(m);
            const double ptt = P.tr(m) * P.rt(m) + P.tt(m) * P.tt(m);
            CHECK(std::abs(prr - P.rr(m)) < 1e-12);
            CHECK(std::abs(ptt - P.tt(m)) < 1e-12);
        }
    }
}

TEST_CASE("surface gradient transform") {
    Setup s(128, 32);
    std::mt19937_64 rng(21);

    SUBCASE("gamma = 0 gives G_Sigma = 0") {
        OperatorContext ctx(s.grid, HeightFunction::zero(128));
        auto G = g_sigma_op(ctx);
        CHECK(G.rr.sup_norm() < 1e-14);
        CHECK(G.rt.sup_norm() < 1e-14);
        CHECK(G.tr.sup_norm() < 1e-14);
        CHECK(G.tt.sup_norm() < 1e-14);
    }

    SUBCASE("constant gamma reduces to 1 - N on tangents") {
        const double g = 0.08;
        OperatorContext ctx(s.grid, HeightFunction(128, g));
        auto G = g_sigma_op(ctx);
        CHECK((G.tt.values() - g / (1.0 + g)).abs().maxCoeff() < 1e-14);
        CHECK(G.rt.sup_norm() < 1e-14);
    }

    SUBCASE("chain rule against the arc-length oracle") {
        HeightFunction gamma = random_height(s.geom, 0.13, rng);
        OperatorContext ctx(s.grid, gamma);
        CurveOracle curve(s.geom, gamma.field());
        // phi(x, y) analytic in the plane, restricted to the moving curve
        RealArray phi_on_curve = (1.3 * curve.px).sin() * (0.7 * curve.py).cosh() + curve.py;
        SurfaceField phi(phi_on_curve);
        RealArray dphi = s.geom.spectral().derivative(phi_on_curve, 1);
        auto g = g_gamma_apply(phi, ctx);
        for (int m = 0; m < 128; ++m) {
            const double th = s.geom.angles()(m);
            Vec2 got = g.er(m) * ReferenceGeometry::normal(th) +
                       g.et(m) * ReferenceGeometry::tangent(th);
            Vec2 want = (dphi(m) / curve.jac(m)) * Vec2(curve.tx(m), curve.ty(m));
            CHECK((got - want).norm() < 1e-8);
        }
    }
}

TEST_CASE("transformed curvature") {
    Setup s(256, 32);
    std::mt19937_64 rng(31);

    SUBCASE("trivial values") {
        OperatorContext ctx0(s.grid, HeightFunction::zero(256));
        CHECK((kappa_gamma_op(ctx0).values() + 1.0).abs().maxCoeff() < 1e-14);
        OperatorContext ctxc(s.grid, HeightFunction(256, 0.1));
        CHECK((kappa_gamma_op(ctxc).values() + 1.0 / 1.1).abs().maxCoeff() < 1e-13);
    }

    SUBCASE("matches the polar-curvature oracle for 20 random heights") {
        for (int trial = 0; trial < 20; ++trial) {
            HeightFunction gamma = random_height(s.geom, 0.14, rng);
            OperatorContext ctx(s.grid, gamma);
            RealArray want = polar_curvature(s.geom, gamma.field());
            RealArray got = kappa_gamma_op(ctx).values();
            const double rel = (got - want).abs().maxCoeff() / want.abs().maxCoeff();
            CHECK(rel < 1e-8);
        }
    }
}

TEST_CASE("linearized curvature kappa'(0)") {
    Setup s(128, 32);
    const RealArray& th = s.geom.angles();

    SUBCASE("translation mode is neutral") {
        SurfaceField h(RealArray(th.cos()));
        CHECK(kappa_prime_zero(s.geom, h).sup_norm() < 1e-10);
    }

    SUBCASE("eigenvalue on cos(k theta)") {
        for (int k : {0, 2, 3, 5}) {
            SurfaceField h(RealArray((k * th).cos()));
            RealArray want = (1.0 - k * k) * (k * th).cos();
            CHECK((kappa_prime_zero(s.geom, h).values() - want).abs().maxCoeff() < 1e-10);
        }
    }

    SUBCASE("directional derivative of kappa_Gamma") {
        SurfaceField h(RealArray((3.0 * th).cos() + 0.4 * (th).sin()));
        std::vector<double> eps = {2e-3, 1e-3, 5e-4};
        std::vector<double> errs;
        OperatorContext ctx0(s.grid, HeightFunction::zero(128));
        RealArray k0 = kappa_gamma_op(ctx0).values();
        RealArray kp = kappa_prime_zero(s.geom, h).values();
        for (double e : eps) {
            OperatorContext ctx(s.grid, HeightFunction(h * e));
            RealArray diff = (kappa_gamma_op(ctx).values() - k0) / e - kp;
            errs.push_back(diff.abs().maxCoeff());
        }
        // first order in epsilon
        CHECK(observed_order(eps, errs) > 0.9);
    }
}

TEST_CASE("bulk multiplication operators") {
    Setup s(64, 48);
    std::mt19937_64 rng(41);

    SUBCASE("all vanish at the reference configuration") {
        OperatorContext ctx(s.grid, HeightFunction::zero(64));
        for (Phase p : {Phase::Inner, Phase::Outer}) {
            auto c = bulk_coefficients(ctx, p);
            CHECK(c.G.rr.abs().maxCoeff() < 1e-14);
            CHECK(c.G.tt.abs().maxCoeff() < 1e-14);
            CHECK(c.G.tr.abs().maxCoeff() < 1e-14);
            CHECK(c.D.rt.abs().maxCoeff() < 1e-14);
            CHECK(c.L.rr.abs().maxCoeff() < 1e-14);
            CHECK(c.A.r.abs().maxCoeff() < 1e-13);
            CHECK(c.A.t.abs().maxCoeff() < 1e-13);
        }
        VectorBulkField u(s.grid, 0.0);
        u.r.inner().setConstant(0.3);
        u.r.outer().setConstant(0.3);
        OperatorContext ctx2(s.grid, HeightFunction::zero(64), SurfaceField::zero(64), &u);
        VectorBulkField m = m_field(u, ctx2);
        CHECK(m.max_abs() < 1e-14);
    }

    SUBCASE("D is the transpose of G") {
        HeightFunction gamma = random_height(s.geom, 0.12, rng);
        OperatorContext ctx(s.grid, gamma);
        for (Phase p : {Phase::Inner, Phase::Outer}) {
            auto c = bulk_coefficients(ctx, p);
            CHECK((c.D.rr - c.G.rr).abs().maxCoeff() < 1e-14);
            CHECK((c.D.rt - c.G.tr).abs().maxCoeff() < 1e-14);
            CHECK((c.D.tr - c.G.rt).abs().maxCoeff() < 1e-14);
            CHECK((c.D.tt - c.G.tt).abs().maxCoeff() < 1e-14);
        }
    }

    SUBCASE("A matches a finite-difference Laplacian of the inverted map") {
        HeightFunction gamma = random_height(s.geom, 0.1, rng, 3);
        OperatorContext ctx(s.grid, gamma);
        HanzawaMap map(s.geom, gamma);
        // Sample nodes whose cutoff argument sits in the plateau or the
        // linear part of the descent, where the profile's high derivatives
        // vanish and the FD oracle itself is trustworthy.
        for (Phase p : {Phase::Inner, Phase::Outer}) {
            const RealArray& r = s.grid.radii(p);
            for (int i = 0; i < s.grid.n(p); ++i) {
                const double a = std::abs(r(i) - 1.0) / s.geom.epsilon();
                const bool plateau = a < 0.30;
                const bool descent = a > 0.40 && a < 0.60;
                if (!(plateau || descent)) continue;
                if (i % 5 != 0) continue;
                for (int m : {3, 20, 41}) {
                    Vec2 x = r(i) * ReferenceGeometry::normal(s.grid.theta(m));
                    Vec2 y = map.forward(x);
                    const double h = 1e-3;
                    Vec2 lap = Vec2::Zero();
                    for (int dir = 0; dir < 2; ++dir) {
                        Vec2 e = Vec2::Zero();
                        e(dir) = h;
                        lap += map.inverse(y + e) + map.inverse(y - e) - 2.0 * map.inverse(y);
                    }
                    lap /= h * h;
                    const double th = s.grid.theta(m);
                    Vec2 want = -(ctx.op_A(p).r(i, m) * ReferenceGeometry::normal(th) +
                                  ctx.op_A(p).t(i, m) * ReferenceGeometry::tangent(th));
                    CHECK((lap - want).norm() < 2e-5);
                }
            }
        }
    }
}

TEST_CASE("transformed bulk operators satisfy the chain rule") {
    std::mt19937_64 rng(51);

    auto phi = [](double x, double y) { return std::sin(1.2 * x + 0.3) * std::exp(0.5 * y) + x * x + y * y; };
    auto lap_phi = [](double x, double y) {
        return (0.25 - 1.44) * std::sin(1.2 * x + 0.3) * std::exp(0.5 * y) + 4.0;
    };
    auto grad_phi = [](double x, double y) {
        return Vec2(1.2 * std::cos(1.2 * x + 0.3) * std::exp(0.5 * y) + 2.0 * x,
                    0.5 * std::sin(1.2 * x + 0.3) * std::exp(0.5 * y) + 2.0 * y);
    };

    SUBCASE("gamma = 0 reduces to the plain operators") {
        Setup s(64, 40);
        OperatorContext ctx(s.grid, HeightFunction::zero(64));
        BulkField f(s.grid, BulkField::Support::Both);
        for (Phase p : {Phase::Inner, Phase::Outer}) {
            for (int i = 0; i < s.grid.n(p); ++i)
                for (int m = 0; m < 64; ++m) {
                    const double th = s.grid.theta(m), r = s.grid.radii(p)(i);
                    f.block(p)(i, m) = phi(r * std::cos(th), r * std::sin(th));
                }
        }
        BulkField lap = transformed_laplacian(f, ctx);
        double worst = 0.0;
        for (Phase p : {Phase::Inner, Phase::Outer}) {
            for (int i = 0; i < s.grid.n(p); ++i)
                for (int m = 0; m < 64; ++m) {
                    const double th = s.grid.theta(m), r = s.grid.radii(p)(i);
                    worst = std::max(worst, std::abs(lap.block(p)(i, m) -
                                                     lap_phi(r * std::cos(th), r * std::sin(th))));
                }
        }
        CHECK(worst < 2e-4);
    }

    SUBCASE("generic gamma: laplacian and gradient converge at order >= 2") {
        std::vector<double> hs, errs_lap, errs_grad;
        std::mt19937_64 rng2(77);
        for (int nr : {32, 48, 64, 96}) {
            Setup s(64, nr);
            std::mt19937_64 rng_fixed(123);
            HeightFunction gamma = random_height(s.geom, 0.1, rng_fixed, 3);
            OperatorContext ctx(s.grid, gamma);
            HanzawaMap map(s.geom, gamma);
            BulkField f(s.grid, BulkField::Support::Both);
            for (Phase p : {Phase::Inner, Phase::Outer}) {
                for (int i = 0; i < s.grid.n(p); ++i)
                    for (int m = 0; m < 64; ++m) {
                        Vec2 y = map.forward(s.grid.radii(p)(i) *
                                             ReferenceGeometry::normal(s.grid.theta(m)));
                        f.block(p)(i, m) = phi(y.x(), y.y());
                    }
            }
            BulkField lap = transformed_laplacian(f, ctx);
            GradientField grad = transformed_gradient(f, ctx);
            double w_lap = 0.0, w_grad = 0.0;
            for (Phase p : {Phase::Inner, Phase::Outer}) {
                for (int i = 0; i < s.grid.n(p); ++i)
                    for (int m = 0; m < 64; ++m) {
                        const double th = s.grid.theta(m);
                        Vec2 y = map.forward(s.grid.radii(p)(i) * ReferenceGeometry::normal(th));
                        w_lap = std::max(w_lap, std::abs(lap.block(p)(i, m) - lap_phi(y.x(), y.y())));
                        Vec2 g = grad.er.block(p)(i, m) * ReferenceGeometry::normal(th) +
                                 grad.et.block(p)(i, m) * ReferenceGeometry::tangent(th);
                        w_grad = std::max(w_grad, (g - grad_phi(y.x(), y.y())).norm());
                    }
            }
            hs.push_back(1.0 / nr);
            errs_lap.push_back(w_lap);
            errs_grad.push_back(w_grad);
        }
        CHECK(observed_order(hs, errs_lap) > 2.0);
        CHECK(observed_order(hs, errs_grad) > 2.0);
    }

    SUBCASE("transformed divergence annihilates a pulled-back curl") {
        std::vector<double> hs, errs;
        for (int nr : {32, 64}) {
            Setup s(64, nr);
            std::mt19937_64 rng_fixed(123);
            HeightFunction gamma = random_height(s.geom, 0.1, rng_fixed, 3);
            OperatorContext ctx(s.grid, gamma);
            HanzawaMap map(s.geom, gamma);
            // w = curl psi with psi = sin(x) y^2: w = (2 y sin x, -y^2 cos x)
            VectorBulkField w(s.grid, 0.0);
            for (Phase p : {Phase::Inner, Phase::Outer}) {
                for (int i = 0; i < s.grid.n(p); ++i)
                    for (int m = 0; m < 64; ++m) {
                        const double th = s.grid.theta(m);
                        Vec2 y = map.forward(s.grid.radii(p)(i) * ReferenceGeometry::normal(th));
                        Vec2 wv(2.0 * y.y() * std::sin(y.x()), -y.y() * y.y() * std::cos(y.x()));
                        w.r.block(p)(i, m) = wv.dot(ReferenceGeometry::normal(th));
                        w.theta.block(p)(i, m) = wv.dot(ReferenceGeometry::tangent(th));
                    }
            }
            BulkField div = transformed_divergence(w, ctx);
            errs.push_back(div.max_abs());
            hs.push_back(1.0 / nr);
        }
        CHECK(errs.back() < 1e-3);
        CHECK(observed_order(hs, errs) > 2.0);
    }
}

TEST_CASE("transformed surface material operators") {
    Setup s(128, 32);
    std::mt19937_64 rng(61);

    SUBCASE("M_Sigma vanishes when u equals the reference") {
        VectorBulkField u(s.grid, 0.0);
        u.theta.inner().setConstant(0.2);
        u.theta.outer().setConstant(0.2);
        OperatorContext ctx(s.grid, HeightFunction::zero(128), SurfaceField::zero(128), &u);
        auto ops = surface_material_ops(u.theta.trace(Phase::Outer), ctx);
        CHECK(ops.m_sigma.sup_norm() < 1e-14);
        CHECK(ops.a_sigma.sup_norm() < 1e-14);
        CHECK(ops.l_sigma.sup_norm() < 1e-14);
    }

    SUBCASE("transformed Laplace-Beltrami against the arc-length oracle") {
        HeightFunction gamma = random_height(s.geom, 0.12, rng);
        OperatorContext ctx(s.grid, gamma);
        CurveOracle curve(s.geom, gamma.field());
        RealArray phi_vals = (1.1 * curve.px).cos() * (0.6 * curve.py).sin() + curve.px;
        SurfaceField phi(phi_vals);
        const Spectral& sp = s.geom.spectral();
        RealArray oracle = sp.derivative(RealArray(sp.derivative(phi_vals, 1) / curve.jac), 1) / curve.jac;
        RealArray got = laplace_gamma_apply(phi, ctx).values();
        CHECK((got - oracle).abs().maxCoeff() < 1e-7 * std::max(1.0, oracle.abs().maxCoeff()));

        // coefficient form agrees: L_Gamma = Delta_Sigma - a_sigma grad_Sigma - l_sigma (1/R^2) d2
        auto ops = surface_material_ops(SurfaceField::zero(128), ctx);
        const double rs = s.geom.r_sigma();
        RealArray form = phi.derivative(2).values() / (rs * rs) -
                         ops.a_sigma.values() * phi.derivative(1).values() / rs -
                         ops.l_sigma.values() * phi.derivative(2).values() / (rs * rs);
        CHECK((form - got).abs().maxCoeff() < 1e-10 * std::max(1.0, got.abs().maxCoeff()));

        // constants are annihilated
        CHECK(laplace_gamma_apply(SurfaceField(128, 3.3), ctx).sup_norm() < 1e-12);
    }

    SUBCASE("transformed surface divergence of a radial rigid flow") {
        // u = rdot e_r on a circle of radius rho: div_Gamma u = rdot / rho.
        const double g = 0.07, rdot = 0.45;
        OperatorContext ctx(s.grid, HeightFunction(128, g));
        SurfaceField ur(128, rdot), ut(128, 0.0);
        RealArray got = div_gamma_velocity(ur, ut, ctx).values();
        CHECK((got - rdot / (1.0 + g)).abs().maxCoeff() < 1e-13);
    }
}
