#include "tpflow/operator_context.hpp"

#include <cassert>
#include <cmath>

#include "tpflow/cutoff.hpp"
#include "tpflow/errors.hpp"

namespace tpflow {

OperatorContext::OperatorContext(const TwoPhaseGrid& grid, const HeightFunction& gamma)
    : OperatorContext(grid, gamma, SurfaceField::zero(grid.n_theta()), nullptr) {}

OperatorContext::OperatorContext(const TwoPhaseGrid& grid, const HeightFunction& gamma,
                                 SurfaceField dt_gamma, const VectorBulkField* u_star)
    : grid_(&grid),
      gamma_(gamma),
      dt_gamma_(std::move(dt_gamma)),
      map_(grid.geometry(), gamma) {
    if (u_star != nullptr) {
        u_star_ = *u_star;
    } else {
        u_star_ = VectorBulkField(grid, 0.0);
    }
    build_surface();
    build_block(Phase::Inner, inner_);
    build_block(Phase::Outer, outer_);
    build_stencils(Phase::Inner, inner_);
    build_stencils(Phase::Outer, outer_);
}

void OperatorContext::require_matches(const HeightFunction& g) const {
    if (!gamma_.same_values(g)) {
        throw StaleContextError("operator context was built for a different height function");
    }
}

Vec2 OperatorContext::nu_gamma(int m) const {
    const double th = grid_->theta(m);
    return mu_(m) * (ReferenceGeometry::normal(th) - a_theta_(m) * ReferenceGeometry::tangent(th));
}

void OperatorContext::build_surface() {
    const double rs = geometry().r_sigma();
    const RealArray& g = gamma_.values();
    gamma_p_ = gamma_.field().derivative(1);
    gamma_pp_ = gamma_.field().derivative(2);
    const RealArray& gp = gamma_p_.values();
    const RealArray& gpp = gamma_pp_.values();

    RealArray rho = rs + g;
    RealArray a = gp / rho;
    RealArray da = gpp / rho - gp.square() / rho.square();
    RealArray mu = (1.0 + a.square()).rsqrt();
    RealArray n = rs / rho;

    rho_c_ = SurfaceField(rho);
    a_theta_ = SurfaceField(a);
    da_theta_ = SurfaceField(da);
    n_factor_ = SurfaceField(n);
    mu_ = SurfaceField(mu);

    // kappa_Gamma(gamma) in the paper's grouping; on the circle it reduces to
    // the curvature of the polar curve rho(theta) = R_sigma + gamma.
    RealArray kappa =
        mu * (n * (da - 1.0) / rs - mu.square() * n * a.square() * da / rs);
    kappa_ = SurfaceField(kappa);

    RealArray jarc = (rho.square() + gp.square()).sqrt();
    j_arc_ = SurfaceField(jarc);

    g_sigma_ = SurfaceField((1.0 - n) + n * mu.square() * a.square());

    // L_Gamma(gamma) = Delta_Sigma - a_sigma grad_Sigma - l_sigma d^2/(R^2 dth^2)
    // by matching the arc-length Laplace-Beltrami on the polar curve.
    RealArray jp = gp * (rho + gpp) / jarc;
    a_sigma_ = SurfaceField(rs * jp / jarc.cube());
    l_sigma_ = SurfaceField(1.0 - rs * rs / jarc.square());
}

void OperatorContext::build_block(Phase p, BlockCache& b) {
    const auto& cut = CutoffProfile::instance();
    const int n = grid_->n(p);
    const int nth = grid_->n_theta();
    const double eps = geometry().epsilon();
    const double rs = geometry().r_sigma();
    const RealArray& r = grid_->radii(p);
    const RealArray& g = gamma_.values();
    const RealArray& gp = gamma_p_.values();
    const RealArray& gpp = gamma_pp_.values();
    const RealArray& gdot = dt_gamma_.values();

    auto alloc = [&](Grid2D& a) { a.resize(n, nth); };
    alloc(b.T);
    alloc(b.Tr);
    alloc(b.Tth);
    alloc(b.Trr);
    alloc(b.Trth);
    alloc(b.Tthth);
    alloc(b.detJ);
    alloc(b.chi);
    alloc(b.dtTheta);
    for (Grid2D* t : {&b.B.rr, &b.B.rt, &b.B.tr, &b.B.tt, &b.G.rr, &b.G.rt, &b.G.tr, &b.G.tt,
                      &b.D.rr, &b.D.rt, &b.D.tr, &b.D.tt, &b.L.rr, &b.L.rt, &b.L.tr, &b.L.tt,
                      &b.A.r, &b.A.t}) {
        alloc(*t);
    }

    for (int i = 0; i < n; ++i) {
        const double d = r(i) - rs;
        const double chi = cut.chi(d / eps);
        const double chi_p = cut.chi_prime(d / eps) / eps;
        const double chi_pp = cut.chi_second(d / eps) / (eps * eps);
        for (int m = 0; m < nth; ++m) {
            const double T = r(i) + chi * g(m);
            const double Tr = 1.0 + chi_p * g(m);
            const double Tth = chi * gp(m);
            const double Trr = chi_pp * g(m);
            const double Trth = chi_p * gp(m);
            const double Tthth = chi * gpp(m);

            b.T(i, m) = T;
            b.Tr(i, m) = Tr;
            b.Tth(i, m) = Tth;
            b.Trr(i, m) = Trr;
            b.Trth(i, m) = Trth;
            b.Tthth(i, m) = Tthth;
            b.chi(i, m) = chi;
            b.detJ(i, m) = Tr * (T / r(i));
            b.dtTheta(i, m) = chi * gdot(m);

            // B = J^{-1} in the (e_r, e_theta) basis.
            const double Brr = 1.0 / Tr;
            const double Brt = -Tth / (Tr * T);
            const double Btt = r(i) / T;
            b.B.rr(i, m) = Brr;
            b.B.rt(i, m) = Brt;
            b.B.tr(i, m) = 0.0;
            b.B.tt(i, m) = Btt;

            // G = 1 - B^T, D = 1 - B, L = 1 - B B^T.
            b.G.rr(i, m) = 1.0 - Brr;
            b.G.rt(i, m) = 0.0;
            b.G.tr(i, m) = -Brt;
            b.G.tt(i, m) = 1.0 - Btt;
            b.D.rr(i, m) = 1.0 - Brr;
            b.D.rt(i, m) = -Brt;
            b.D.tr(i, m) = 0.0;
            b.D.tt(i, m) = 1.0 - Btt;
            b.L.rr(i, m) = 1.0 - Brr * Brr - Brt * Brt;
            b.L.rt(i, m) = -Brt * Btt;
            b.L.tr(i, m) = -Brt * Btt;
            b.L.tt(i, m) = 1.0 - Btt * Btt;

            // A = -(Laplacian of the inverse map) o Theta, from inverse
            // function derivatives of the radial profile.
            const double ibar_s = 1.0 / Tr;
            const double ibar_ss = -Trr / (Tr * Tr * Tr);
            const double ibar_th = -Tth / Tr;
            const double ibar_thth =
                -Tthth / Tr + 2.0 * Tth * Trth / (Tr * Tr) - Trr * Tth * Tth / (Tr * Tr * Tr);
            const double P = ibar_ss + ibar_s / T + (ibar_thth - r(i)) / (T * T);
            const double Q = 2.0 * ibar_th / (T * T);
            b.A.r(i, m) = -P;
            b.A.t(i, m) = -Q;
        }
    }
}

void OperatorContext::build_stencils(Phase p, BlockCache& b) {
    const int n = grid_->n(p);
    const int nth = grid_->n_theta();
    const bool has_pole = (p == Phase::Inner);
    const double eps = geometry().epsilon();
    const double rs = geometry().r_sigma();
    const RealArray& r = grid_->radii(p);

    if (has_pole) {
        // Near-pole stencils reflect through the origin; they require the
        // first nodes to sit in the identity zone of the cutoff.
        const double support = eps * (CutoffProfile::kDescentHi + CutoffProfile::kBumpHalfWidth);
        assert(rs - r(std::min(1, n - 1)) > support && "pole nodes must be outside the cutoff support");
        (void)support;
        (void)rs;
    }

    auto build = [&](int width, std::vector<Eigen::ArrayXXd>& w1, std::vector<Eigen::ArrayXXd>& w2) {
        const int half = width / 2;
        w1.assign(nth, Eigen::ArrayXXd(n, width));
        w2.assign(nth, Eigen::ArrayXXd(n, width));
        std::vector<double> pos(width);
        std::vector<double> wk(3 * static_cast<size_t>(width));
        for (int m = 0; m < nth; ++m) {
            for (int i = 0; i < n; ++i) {
                int ghosts = 0;
                int start = i - half;
                if (start < 0) {
                    if (has_pole) {
                        ghosts = -start;
                        start = 0;
                    } else {
                        start = 0;
                    }
                }
                if (start + width - ghosts > n) start = n - (width - ghosts);
                for (int j = 0; j < ghosts; ++j) pos[j] = -r(ghosts - 1 - j);
                for (int j = ghosts; j < width; ++j) pos[j] = b.T(start + j - ghosts, m);
                fd_weights(b.T(i, m), std::span<const double>(pos.data(), width), 2,
                           wk.data(), width);
                for (int j = 0; j < width; ++j) {
                    w1[m](i, j) = wk[static_cast<size_t>(width) + j];
                    w2[m](i, j) = wk[2 * static_cast<size_t>(width) + j];
                }
            }
        }
    };

    build(3, b.w_ord1_acc2, b.w_ord2_acc2);
    build(5, b.w_ord1_acc4, b.w_ord2_acc4);
}

Grid2D OperatorContext::deriv_s(Phase p, const Grid2D& f, int order, int accuracy,
                                int parity) const {
    const BlockCache& b = blk(p);
    const int n = grid_->n(p);
    const int nth = grid_->n_theta();
    const bool has_pole = (p == Phase::Inner);
    const int width = accuracy + 1;
    const int half = width / 2;
    const auto& table = (accuracy == 2)
                            ? (order == 1 ? b.w_ord1_acc2 : b.w_ord2_acc2)
                            : (order == 1 ? b.w_ord1_acc4 : b.w_ord2_acc4);
    assert(order == 1 || order == 2);
    assert(accuracy == 2 || accuracy == 4);
    assert(f.rows() == n && f.cols() == nth);

    Grid2D out(n, nth);
    for (int m = 0; m < nth; ++m) {
        const int mref = (m + nth / 2) % nth;
        const auto& w = table[m];
        for (int i = 0; i < n; ++i) {
            int ghosts = 0;
            int start = i - half;
            if (start < 0) {
                if (has_pole) {
                    ghosts = -start;
                    start = 0;
                } else {
                    start = 0;
                }
            }
            if (start + width - ghosts > n) start = n - (width - ghosts);
            double acc = 0.0;
            for (int j = 0; j < ghosts; ++j) {
                acc += w(i, j) * parity * f(ghosts - 1 - j, mref);
            }
            for (int j = ghosts; j < width; ++j) {
                acc += w(i, j) * f(start + j - ghosts, m);
            }
            out(i, m) = acc;
        }
    }
    return out;
}

Grid2D OperatorContext::deriv_theta(Phase p, const Grid2D& f, int order) const {
    const int n = grid_->n(p);
    const int nth = grid_->n_theta();
    const Spectral& sp = Spectral::of_size(nth);
    Grid2D out(n, nth);
    RealArray row(nth);
    for (int i = 0; i < n; ++i) {
        row = f.row(i).transpose();
        out.row(i) = sp.derivative(row, order).transpose();
    }
    return out;
}

RealArray OperatorContext::to_midpoints(const RealArray& nodal) {
    const int n = static_cast<int>(nodal.size());
    RealArray mid(n - 1);
    for (int i = 0; i + 1 < n; ++i) mid(i) = 0.5 * (nodal(i) + nodal(i + 1));
    return mid;
}

}  // namespace tpflow
