#include "doctest.h"

#include <cmath>

#include "test_utils.hpp"
#include "tpflow/errors.hpp"
#include "tpflow/linear_step.hpp"

using namespace tpflow;
using namespace tpflow::test;

namespace {

MaterialModel make_model() {
    return MaterialModel(0.8, 1.0, 1.3, 0.7, 0.5, 0.4,
                         EquationOfState::linear(5.0, 1.5), Isotherm::henry(0.8), 0.2);
}

struct Lab {
    ReferenceGeometry geom;
    TwoPhaseGrid grid;
    MaterialModel model;
    Lab(int nth, int nr)
        : geom(2.0, 1.0, nth, nr, nr, 0.6), grid(geom), model(make_model()) {}
};

/// Single-stream-function manufactured Stokes family (flat reference
/// geometry): psi = A tau(t) P(r) sin(2 theta), P = r^2 (Q - r^2)^2 with
/// Q = R_omega^2, so u = curl psi vanishes at the wall and is continuous
/// across Sigma; the viscosity contrast shows up in the stress jumps.
struct Manufactured {
    double Q, A, b_in, b_out, c0, a_gamma, sbar;
    explicit Manufactured(double r_omega)
        : Q(r_omega * r_omega), A(0.02), b_in(0.3), b_out(0.45), c0(0.2), a_gamma(0.004),
          sbar(0.5) {}

    double P(double r) const { return Q * Q * r * r - 2 * Q * std::pow(r, 4) + std::pow(r, 6); }
    double Pp(double r) const { return 2 * Q * Q * r - 8 * Q * r * r * r + 6 * std::pow(r, 5); }
    double S(double r) const { return -24 * Q * r * r + 32 * std::pow(r, 4); }  // (Delta psi)/sin2th
    double Sp(double r) const { return -48 * Q * r + 128 * r * r * r; }

    double ur(double r, double th, double tau) const {
        return 2 * A * tau * P(r) / r * std::cos(2 * th);
    }
    double ut(double r, double th, double tau) const { return -A * tau * Pp(r) * std::sin(2 * th); }
    double lap_ur(double r, double th, double tau) const {
        return 2 * A * tau * S(r) / r * std::cos(2 * th);
    }
    double lap_ut(double r, double th, double tau) const {
        return -A * tau * Sp(r) * std::sin(2 * th);
    }
    double dp_dr(Phase ph, double r, double th, double tau) const {
        const double b = (ph == Phase::Inner) ? b_in : b_out;
        return 2 * tau * b * r * std::cos(2 * th);
    }
    double dp_dth_over_r(Phase ph, double r, double th, double tau) const {
        const double b = (ph == Phase::Inner) ? b_in : b_out;
        return -2 * tau * b * r * std::sin(2 * th);
    }

    double w_tau(double r) const {  // 2 D_rtheta / (A tau sin 2 theta)
        const double Ppp = 2 * Q * Q - 24 * Q * r * r + 30 * std::pow(r, 4);
        return -Ppp + Pp(r) / r - 4 * P(r) / (r * r);
    }
    double w_nu(double r) const {  // 2 D_rr / (A tau cos 2 theta)
        return 4 * (Pp(r) / r - P(r) / (r * r));
    }
};

}  // namespace

TEST_CASE("surface parabolic solve") {
    Lab lab(64, 32);
    const double dt = 0.05;
    auto frozen = FrozenCoefficients::rest(lab.grid, lab.model, 0.5, 0.625);
    LinearStepSolver solver(lab.grid, lab.model, frozen, dt);

    SUBCASE("constant state is a fixed point") {
        SurfaceField c0(64, 1.7);
        auto res = solver.solve_surface(c0, SurfaceField(64, 0.0));
        CHECK((res.c_sigma.values() - 1.7).abs().maxCoeff() < 1e-13);
        CHECK(res.residual < 1e-12);
    }

    SUBCASE("per-mode backward-Euler decay factors are exact") {
        const double dg = lab.model.surface_diffusivity();
        const RealArray& th = lab.geom.angles();
        for (int k : {1, 2, 5, 9}) {
            SurfaceField c0(RealArray((k * th).cos()));
            auto res = solver.solve_surface(c0, SurfaceField(64, 0.0));
            const double factor = 1.0 / (1.0 + dt * dg * k * k);
            CHECK((res.c_sigma.values() - factor * c0.values()).abs().maxCoeff() < 1e-12);
        }
    }

    SUBCASE("manufactured solution converges at first order in dt") {
        const double dg = lab.model.surface_diffusivity();
        const RealArray& th = lab.geom.angles();
        const double T = 0.5;
        std::vector<double> dts = {0.05, 0.025, 0.0125};
        std::vector<double> errs;
        for (double step : dts) {
            LinearStepSolver s(lab.grid, lab.model, frozen, step);
            SurfaceField c(RealArray(th.cos()));
            const int n = static_cast<int>(std::round(T / step));
            for (int it = 1; it <= n; ++it) {
                const double tn = it * step;
                SurfaceField h(RealArray((dg - 1.0) * std::exp(-tn) * th.cos()));
                c = s.solve_surface(c, h).c_sigma;
            }
            errs.push_back((c.values() - std::exp(-T) * th.cos()).abs().maxCoeff());
        }
        CHECK(observed_order(dts, errs) > 0.9);
    }
}

TEST_CASE("bulk parabolic solve") {
    Lab lab(64, 48);
    const double dt = 0.05;
    auto frozen = FrozenCoefficients::rest(lab.grid, lab.model, 0.5, 0.625);

    SUBCASE("compatible constants stay constant") {
        LinearStepSolver solver(lab.grid, lab.model, frozen, dt);
        const double cbar = 0.625;
        const double alpha = lab.model.isotherm().alpha(cbar);
        const double ap = lab.model.isotherm().alpha_prime(cbar);
        BulkField c0(lab.grid, BulkField::Support::OuterOnly, cbar);
        SurfaceField cs(64, alpha);
        SurfaceField h_alpha(64, ap * cbar - alpha);
        BulkField fc(lab.grid, BulkField::Support::OuterOnly, 0.0);
        auto res = solver.solve_bulk(c0, cs, fc, h_alpha);
        CHECK((res.c.outer() - cbar).abs().maxCoeff() < 1e-12);
        CHECK_FALSE(res.positivity_warning);
    }

    SUBCASE("radially symmetric manufactured solution: temporal order") {
        // c(r, t) = exp(-t) q(r) with q = (r - R_omega)^2, q'(R_omega) = 0.
        const double ro = 2.0, d = lab.model.diffusivity();
        auto q = [&](double r) { return (r - ro) * (r - ro); };
        auto lap_q = [&](double r) { return 2.0 + 2.0 * (r - ro) / r; };
        const double T = 0.4;
        std::vector<double> dts = {0.08, 0.04, 0.02};
        std::vector<double> errs;
        const RealArray& r = lab.grid.radii(Phase::Outer);
        for (double step : dts) {
            LinearStepSolver s(lab.grid, lab.model, frozen, step);
            BulkField c(lab.grid, BulkField::Support::OuterOnly);
            for (int j = 0; j < lab.grid.n(Phase::Outer); ++j) c.outer().row(j).setConstant(q(r(j)));
            const int n = static_cast<int>(std::round(T / step));
            for (int it = 1; it <= n; ++it) {
                const double tn = it * step;
                BulkField fc(lab.grid, BulkField::Support::OuterOnly);
                for (int j = 0; j < lab.grid.n(Phase::Outer); ++j) {
                    fc.outer().row(j).setConstant(std::exp(-tn) * (-q(r(j)) - d * lap_q(r(j))));
                }
                SurfaceField cs(64, 0.0);
                SurfaceField ha(64, frozen.alpha_prime_star.values()(0) * std::exp(-tn) * q(1.0));
                c = s.solve_bulk(c, cs, fc, ha).c;
            }
            double worst = 0.0;
            for (int j = 0; j < lab.grid.n(Phase::Outer); ++j) {
                worst = std::max(worst, std::abs(c.outer()(j, 0) - std::exp(-T) * q(r(j))));
            }
            errs.push_back(worst);
        }
        CHECK(observed_order(dts, errs) > 0.9);
    }

    SUBCASE("steady manufactured solution: spatial order >= 1.9") {
        const double ro = 2.0, d = lab.model.diffusivity();
        const double L = 1.0;
        auto q = [&](double r) { return std::cos(std::numbers::pi * (r - ro) / L); };
        auto lap_q = [&](double r) {
            const double w = std::numbers::pi / L;
            return -w * w * std::cos(w * (r - ro)) - w * std::sin(w * (r - ro)) / r;
        };
        std::vector<double> hs, errs;
        for (int nr : {24, 32, 48, 64}) {
            Lab fine(16, nr);
            auto fr = FrozenCoefficients::rest(fine.grid, fine.model, 0.5, 0.625);
            LinearStepSolver s(fine.grid, fine.model, fr, 0.5);
            const RealArray& rr = fine.grid.radii(Phase::Outer);
            BulkField c(fine.grid, BulkField::Support::OuterOnly, 0.0);
            BulkField fc(fine.grid, BulkField::Support::OuterOnly);
            for (int j = 0; j < fine.grid.n(Phase::Outer); ++j) {
                fc.outer().row(j).setConstant(-d * lap_q(rr(j)));
            }
            SurfaceField cs(16, 0.0);
            SurfaceField ha(16, fr.alpha_prime_star.values()(0) * q(1.0));
            for (int it = 0; it < 600; ++it) {
                BulkField next = s.solve_bulk(c, cs, fc, ha).c;
                const double delta = (next.outer() - c.outer()).abs().maxCoeff();
                c = next;
                if (delta < 1e-13) break;
            }
            double worst = 0.0;
            for (int j = 0; j < fine.grid.n(Phase::Outer); ++j) {
                worst = std::max(worst, std::abs(c.outer()(j, 0) - q(rr(j))));
            }
            hs.push_back(1.0 / nr);
            errs.push_back(worst);
        }
        CHECK(observed_order(hs, errs) > 1.9);
    }

    SUBCASE("flux bookkeeping closes against the interface face flux") {
        LinearStepSolver solver(lab.grid, lab.model, frozen, dt);
        const RealArray& r = lab.grid.radii(Phase::Outer);
        const RealArray& mid = lab.grid.midpoints(Phase::Outer);
        const RealArray& w = lab.grid.mass_weights(Phase::Outer);
        const double h = lab.grid.spacing(Phase::Outer);
        const double d = lab.model.diffusivity();
        BulkField c0(lab.grid, BulkField::Support::OuterOnly);
        for (int j = 0; j < lab.grid.n(Phase::Outer); ++j) {
            c0.outer().row(j).setConstant(1.0 + std::tanh((r(j) - 1.4) / 0.15));
        }
        SurfaceField cs(64, 0.0);
        SurfaceField ha(64, frozen.alpha_prime_star.values()(0) * c0.outer()(0, 0));
        BulkField fc(lab.grid, BulkField::Support::OuterOnly, 0.0);
        auto res = solver.solve_bulk(c0, cs, fc, ha);
        // Mass over the dual cells of the balance rows (the interface row is
        // a boundary condition; its face flux is the exchange term).
        double dm = 0.0;
        for (int m = 0; m < 64; ++m) {
            for (int j = 1; j < lab.grid.n(Phase::Outer); ++j) {
                dm += w(j) * (res.c.outer()(j, m) - c0.outer()(j, m)) * lab.grid.dtheta();
            }
        }
        double flux = 0.0;
        for (int m = 0; m < 64; ++m) {
            flux += d * mid(0) * (res.c.outer()(1, m) - res.c.outer()(0, m)) / h * lab.grid.dtheta();
        }
        CHECK(std::abs(dm - dt * flux) < 1e-8 * std::max(1.0, std::abs(dm)));
    }
}

TEST_CASE("two-phase Stokes solve") {
    SUBCASE("zero data gives the zero solution") {
        Lab lab(32, 24);
        auto frozen = FrozenCoefficients::rest(lab.grid, lab.model, 0.5, 0.625);
        LinearStepSolver solver(lab.grid, lab.model, frozen, 0.1);
        auto data = LinearStepData::zero(lab.grid, lab.model, frozen, 0.1);
        VectorBulkField u0(lab.grid, 0.0);
        auto res = solver.solve_stokes(u0, HeightFunction::zero(32), data.f_u, data.g, data.h_tau,
                                       data.h_nu, data.h_gamma, SurfaceField(32, 0.0));
        CHECK(res.u.max_abs() < 1e-13);
        CHECK(res.p.max_abs() < 1e-13);
        CHECK(res.gamma.sup_norm() < 1e-13);
    }

    SUBCASE("static drop reproduces the Laplace pressure jump to 1e-9") {
        Lab lab(64, 48);
        const double sbar = 0.5;
        const double sigma = lab.model.eos().sigma(sbar);
        auto frozen = FrozenCoefficients::rest(lab.grid, lab.model, sbar, 0.625);
        LinearStepSolver solver(lab.grid, lab.model, frozen, 0.05);
        auto data = LinearStepData::zero(lab.grid, lab.model, frozen, 0.05);
        data.h_nu = SurfaceField(64, -sigma);  // sigma kappa_Sigma with R_sigma = 1
        VectorBulkField u0(lab.grid, 0.0);
        auto res = solver.solve_stokes(u0, HeightFunction::zero(64), data.f_u, data.g, data.h_tau,
                                       data.h_nu, data.h_gamma, SurfaceField(64, sbar));
        CHECK(res.u.max_abs() < 1e-11);
        CHECK(res.gamma.sup_norm() < 1e-11);
        CHECK((res.p_jump.values() + sigma).abs().maxCoeff() < 1e-9);
        CHECK((res.p.inner() - res.p.inner()(0, 0)).abs().maxCoeff() < 1e-10);
        CHECK((res.p.outer() - res.p.outer()(0, 0)).abs().maxCoeff() < 1e-10);
    }

    SUBCASE("manufactured solution: steady spatial order >= 1.9") {
        Manufactured mf(2.0);
        std::vector<double> hs, errs;
        for (int nr : {24, 32, 48, 64}) {
            Lab lab(32, nr);
            auto frozen = FrozenCoefficients::rest(lab.grid, lab.model, mf.sbar, 0.625);
            const double sigma_bar = frozen.sigma_star.values()(0);
            LinearStepSolver solver(lab.grid, lab.model, frozen, 0.25);

            VectorBulkField fu(lab.grid, 0.0);
            for (Phase ph : {Phase::Inner, Phase::Outer}) {
                const double eta = lab.model.eta(ph), rho = lab.model.rho(ph);
                for (int i = 0; i < lab.grid.n(ph); ++i)
                    for (int m = 0; m < 32; ++m) {
                        const double r = lab.grid.radii(ph)(i), th = lab.grid.theta(m);
                        fu.r.block(ph)(i, m) =
                            (-eta * mf.lap_ur(r, th, 1.0) + mf.dp_dr(ph, r, th, 1.0)) / rho;
                        fu.theta.block(ph)(i, m) =
                            (-eta * mf.lap_ut(r, th, 1.0) + mf.dp_dth_over_r(ph, r, th, 1.0)) / rho;
                    }
            }
            BulkField g(lab.grid, BulkField::Support::Both, 0.0);
            RealArray th = lab.geom.angles();
            const double deta = lab.model.eta(Phase::Outer) - lab.model.eta(Phase::Inner);
            SurfaceField h_tau(RealArray(-mf.A * deta * mf.w_tau(1.0) * (2 * th).sin()));
            SurfaceField h_nu(RealArray(-mf.A * deta * mf.w_nu(1.0) * (2 * th).cos() +
                                        (mf.b_out - mf.b_in) * (2 * th).cos() + mf.c0 +
                                        sigma_bar * 4.0 * mf.a_gamma * (2 * th).cos()));
            SurfaceField h_gamma(RealArray(-2.0 * mf.A * mf.P(1.0) * (2 * th).cos()));

            VectorBulkField u(lab.grid, 0.0);
            HeightFunction gamma(SurfaceField(RealArray(mf.a_gamma * (2 * th).cos())));
            for (int it = 0; it < 3000; ++it) {
                auto res = solver.solve_stokes(u, gamma, fu, g, h_tau, h_nu, h_gamma,
                                               SurfaceField(32, 0.0));
                const double delta =
                    std::max((res.u.r.outer() - u.r.outer()).abs().maxCoeff(),
                             (res.gamma.values() - gamma.values()).abs().maxCoeff());
                u = res.u;
                gamma = res.gamma;
                if (delta < 1e-14) break;
            }
            double worst = 0.0;
            for (Phase ph : {Phase::Inner, Phase::Outer}) {
                for (int i = 0; i < lab.grid.n(ph); ++i)
                    for (int m = 0; m < 32; ++m) {
                        const double r = lab.grid.radii(ph)(i), thm = lab.grid.theta(m);
                        worst = std::max(worst, std::abs(u.r.block(ph)(i, m) - mf.ur(r, thm, 1.0)));
                        worst =
                            std::max(worst, std::abs(u.theta.block(ph)(i, m) - mf.ut(r, thm, 1.0)));
                    }
            }
            hs.push_back(1.0 / nr);
            errs.push_back(worst);
        }
        CHECK(observed_order(hs, errs) > 1.9);
    }

    SUBCASE("manufactured solution: temporal order >= 0.9") {
        Manufactured mf(2.0);
        Lab lab(32, 96);
        auto frozen = FrozenCoefficients::rest(lab.grid, lab.model, mf.sbar, 0.625);
        const double sigma_bar = frozen.sigma_star.values()(0);
        RealArray th = lab.geom.angles();
        const double deta = lab.model.eta(Phase::Outer) - lab.model.eta(Phase::Inner);
        const double T = 0.2;
        std::vector<double> dts = {0.04, 0.02, 0.01};
        std::vector<double> errs;
        auto tau = [](double t) { return std::exp(-0.5 * t); };
        for (double dt : dts) {
            LinearStepSolver solver(lab.grid, lab.model, frozen, dt);
            VectorBulkField u(lab.grid, 0.0);
            HeightFunction gamma(SurfaceField(RealArray(mf.a_gamma * (2 * th).cos())));
            for (Phase ph : {Phase::Inner, Phase::Outer})
                for (int i = 0; i < lab.grid.n(ph); ++i)
                    for (int m = 0; m < 32; ++m) {
                        const double r = lab.grid.radii(ph)(i), thm = lab.grid.theta(m);
                        u.r.block(ph)(i, m) = mf.ur(r, thm, 1.0);
                        u.theta.block(ph)(i, m) = mf.ut(r, thm, 1.0);
                    }
            const int n = static_cast<int>(std::round(T / dt));
            for (int it = 1; it <= n; ++it) {
                const double tn = tau(it * dt);
                const double dtau = -0.5 * tn;
                VectorBulkField fu(lab.grid, 0.0);
                for (Phase ph : {Phase::Inner, Phase::Outer}) {
                    const double eta = lab.model.eta(ph), rho = lab.model.rho(ph);
                    for (int i = 0; i < lab.grid.n(ph); ++i)
                        for (int m = 0; m < 32; ++m) {
                            const double r = lab.grid.radii(ph)(i), thm = lab.grid.theta(m);
                            fu.r.block(ph)(i, m) =
                                mf.ur(r, thm, dtau) +
                                (-eta * mf.lap_ur(r, thm, tn) + mf.dp_dr(ph, r, thm, tn)) / rho;
                            fu.theta.block(ph)(i, m) =
                                mf.ut(r, thm, dtau) +
                                (-eta * mf.lap_ut(r, thm, tn) + mf.dp_dth_over_r(ph, r, thm, tn)) /
                                    rho;
                        }
                }
                BulkField g(lab.grid, BulkField::Support::Both, 0.0);
                SurfaceField h_tau(RealArray(-mf.A * tn * deta * mf.w_tau(1.0) * (2 * th).sin()));
                SurfaceField h_nu(RealArray(-mf.A * tn * deta * mf.w_nu(1.0) * (2 * th).cos() +
                                            tn * (mf.b_out - mf.b_in) * (2 * th).cos() +
                                            tn * mf.c0 +
                                            sigma_bar * 4.0 * mf.a_gamma * tn * (2 * th).cos()));
                SurfaceField h_gamma(RealArray(mf.a_gamma * dtau * (2 * th).cos() -
                                               2.0 * mf.A * tn * mf.P(1.0) * (2 * th).cos()));
                auto res = solver.solve_stokes(u, gamma, fu, g, h_tau, h_nu, h_gamma,
                                               SurfaceField(32, 0.0));
                u = res.u;
                gamma = res.gamma;
            }
            const double tT = tau(T);
            double worst = (gamma.values() - mf.a_gamma * tT * (2 * th).cos()).abs().maxCoeff();
            for (Phase ph : {Phase::Inner, Phase::Outer})
                for (int i = 0; i < lab.grid.n(ph); ++i)
                    for (int m = 0; m < 32; ++m) {
                        const double r = lab.grid.radii(ph)(i), thm = lab.grid.theta(m);
                        worst = std::max(worst, std::abs(u.r.block(ph)(i, m) - mf.ur(r, thm, tT)));
                    }
            errs.push_back(worst);
        }
        CHECK(observed_order(dts, errs) > 0.9);
    }

    SUBCASE("per-mode and stacked banded solves agree to 1e-10") {
        Lab lab(32, 24);
        auto frozen = FrozenCoefficients::rest(lab.grid, lab.model, 0.5, 0.625);
        LinearStepSolver solver(lab.grid, lab.model, frozen, 0.05);
        RealArray th = lab.geom.angles();
        VectorBulkField fu(lab.grid, 0.0);
        for (Phase ph : {Phase::Inner, Phase::Outer})
            for (int i = 0; i < lab.grid.n(ph); ++i)
                for (int m = 0; m < 32; ++m) {
                    const double r = lab.grid.radii(ph)(i), thm = lab.grid.theta(m);
                    fu.r.block(ph)(i, m) = std::sin(3 * thm) * r + 0.2;
                    fu.theta.block(ph)(i, m) = std::cos(thm) * (1.0 - r / 2.0);
                }
        BulkField g(lab.grid, BulkField::Support::Both, 0.0);
        SurfaceField h_tau(RealArray(0.3 * th.sin()));
        SurfaceField h_nu(RealArray(-2.0 + 0.2 * (2.0 * th).cos()));
        SurfaceField h_gamma(RealArray(0.05 * (3.0 * th).cos()));
        VectorBulkField u0(lab.grid, 0.0);
        auto a = solver.solve_stokes(u0, HeightFunction::zero(32), fu, g, h_tau, h_nu, h_gamma,
                                     SurfaceField(32, 0.5));
        auto b = solver.solve_stokes_global(u0, HeightFunction::zero(32), fu, g, h_tau, h_nu,
                                            h_gamma, SurfaceField(32, 0.5));
        CHECK((a.u.r.inner() - b.u.r.inner()).abs().maxCoeff() < 1e-10);
        CHECK((a.u.theta.outer() - b.u.theta.outer()).abs().maxCoeff() < 1e-10);
        CHECK((a.p.outer() - b.p.outer()).abs().maxCoeff() < 1e-10);
        CHECK((a.gamma.values() - b.gamma.values()).abs().maxCoeff() < 1e-10);
    }

    SUBCASE("backward Euler dissipates the quadratic energy with zero data") {
        Lab lab(64, 32);
        auto frozen = FrozenCoefficients::rest(lab.grid, lab.model, 0.5, 0.625);
        const double sigma_bar = frozen.sigma_star.values()(0);
        LinearStepSolver solver(lab.grid, lab.model, frozen, 0.02);
        auto data = LinearStepData::zero(lab.grid, lab.model, frozen, 0.02);
        RealArray th = lab.geom.angles();
        HeightFunction gamma(
            SurfaceField(RealArray(0.05 * (3.0 * th).cos() + 0.02 * (2.0 * th).sin())));
        VectorBulkField u(lab.grid, 0.0);
        auto energy = [&](const VectorBulkField& uu, const HeightFunction& gg) {
            double e = 0.0;
            for (Phase ph : {Phase::Inner, Phase::Outer}) {
                const RealArray& w = lab.grid.quad_weights(ph);
                for (int i = 0; i < lab.grid.n(ph); ++i)
                    for (int m = 0; m < 64; ++m) {
                        e += 0.5 * lab.model.rho(ph) * w(i) * lab.grid.dtheta() *
                             (uu.r.block(ph)(i, m) * uu.r.block(ph)(i, m) +
                              uu.theta.block(ph)(i, m) * uu.theta.block(ph)(i, m));
                    }
            }
            RealArray gp = gg.field().derivative(1).values();
            e += 0.5 * sigma_bar * gp.square().sum() * lab.grid.dtheta();
            return e;
        };
        double e_prev = energy(u, gamma);
        for (int it = 0; it < 5; ++it) {
            auto res = solver.solve_stokes(u, gamma, data.f_u, data.g, data.h_tau, data.h_nu,
                                           data.h_gamma, SurfaceField(64, 0.0));
            u = res.u;
            gamma = res.gamma;
            const double e = energy(u, gamma);
            CHECK(e <= e_prev * (1.0 + 1e-12) + 1e-14);
            e_prev = e;
        }
    }
}
