#include "tpflow/linear_step.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#define LAPACK_COMPLEX_CPP
#include <complex>
#include <lapacke.h>

#include <cassert>
#include <cmath>
#include <sstream>

#include "tpflow/errors.hpp"
#include "tpflow/threading.hpp"

namespace tpflow {

namespace {

using SpMat = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;
using SpLU = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::ArrayXXcd;  // rows: radial node, cols: mode

constexpr int kMaxLagSweeps = 100;
constexpr double kLagTol = 1e-12;

/// Width-3 uniform radial stencils for one block: first and second
/// derivative weights per node, one-sided at block edges. The inner block's
/// first node carries a pole ghost at -r_0 whose value is parity * f(node 0
/// of the opposite theta column); `ghost` marks that layout.
struct UniformStencils {
    std::vector<int> start;
    std::vector<bool> ghost;
    Eigen::ArrayXXd w1, w2;  // (n, 3)

    void build(const RealArray& r, bool has_pole) {
        const int n = static_cast<int>(r.size());
        start.assign(n, 0);
        ghost.assign(n, false);
        w1.resize(n, 3);
        w2.resize(n, 3);
        std::vector<double> pos(3), wk(9);
        for (int i = 0; i < n; ++i) {
            int s = i - 1;
            bool gh = false;
            if (s < 0) {
                if (has_pole) {
                    gh = true;  // slot 0 reflects node 0 through the pole
                    pos[0] = -r(0);
                    pos[1] = r(0);
                    pos[2] = r(1);
                    s = 0;
                } else {
                    s = 0;
                    pos[0] = r(0);
                    pos[1] = r(1);
                    pos[2] = r(2);
                }
            } else if (i + 1 >= n) {
                s = n - 3;
                pos[0] = r(n - 3);
                pos[1] = r(n - 2);
                pos[2] = r(n - 1);
            } else {
                pos[0] = r(i - 1);
                pos[1] = r(i);
                pos[2] = r(i + 1);
            }
            fd_weights(r(i), pos, 2, wk.data(), 3);
            start[i] = s;
            ghost[i] = gh;
            for (int j = 0; j < 3; ++j) {
                w1(i, j) = wk[3 + j];
                w2(i, j) = wk[6 + j];
            }
        }
    }
};

struct ModeLU {
    SpMat A;
    std::unique_ptr<SpLU> lu;
    std::vector<Triplet> triplets;
};

CMat to_modes(const Grid2D& f) {
    const int n = static_cast<int>(f.rows());
    const int nth = static_cast<int>(f.cols());
    const Spectral& sp = Spectral::of_size(nth);
    CMat out(n, nth / 2 + 1);
    RealArray row(nth);
    for (int i = 0; i < n; ++i) {
        row = f.row(i).transpose();
        out.row(i) = sp.to_coeffs(row).transpose();
    }
    return out;
}

Grid2D to_field(const CMat& m, int nth) {
    const int n = static_cast<int>(m.rows());
    const Spectral& sp = Spectral::of_size(nth);
    Grid2D out(n, nth);
    for (int i = 0; i < n; ++i) {
        ComplexArray c = m.row(i).transpose();
        c(0) = Complex(c(0).real(), 0.0);
        c(nth / 2) = Complex(c(nth / 2).real(), 0.0);
        out.row(i) = sp.to_values(c).transpose();
    }
    return out;
}

Grid2D midpoint_average(const Grid2D& nodal) {
    Grid2D out(nodal.rows() - 1, nodal.cols());
    for (int i = 0; i + 1 < nodal.rows(); ++i) {
        out.row(i) = 0.5 * (nodal.row(i) + nodal.row(i + 1));
    }
    return out;
}

}  // namespace

FrozenCoefficients FrozenCoefficients::rest(const TwoPhaseGrid& grid, const MaterialModel& model,
                                            double c_sigma_ref, double c_trace_ref) {
    FrozenCoefficients f;
    const int nth = grid.n_theta();
    f.u_star = VectorBulkField(grid, 0.0);
    f.u_star_theta_sigma = SurfaceField(nth, 0.0);
    f.sigma_star = SurfaceField(nth, model.eos().sigma(c_sigma_ref));
    f.sigma_prime_star = SurfaceField(nth, model.eos().sigma_prime(c_sigma_ref));
    f.alpha_prime_star = SurfaceField(nth, model.isotherm().alpha_prime(c_trace_ref));
    return f;
}

LinearStepData LinearStepData::zero(const TwoPhaseGrid& grid, const MaterialModel& /*model*/,
                                    FrozenCoefficients frozen, double dt) {
    LinearStepData d;
    const int nth = grid.n_theta();
    d.f_u = VectorBulkField(grid, 0.0);
    d.g = BulkField(grid, BulkField::Support::Both, 0.0);
    d.f_c = BulkField(grid, BulkField::Support::OuterOnly, 0.0);
    d.h_tau = SurfaceField(nth, 0.0);
    d.h_nu = SurfaceField(nth, 0.0);
    d.h_gamma = SurfaceField(nth, 0.0);
    d.h_alpha = SurfaceField(nth, 0.0);
    d.h_eps = SurfaceField(nth, 0.0);
    d.frozen = std::move(frozen);
    d.dt = dt;
    return d;
}

// ---------------------------------------------------------------------------

struct LinearStepSolver::Impl {
    const TwoPhaseGrid* grid;
    const MaterialModel* model;
    const FrozenCoefficients* frozen;
    double dt;

    int nth = 0, ni = 0, no = 0, nsys = 0, nmodes = 0;
    int idx_gamma = 0, outer_base = 0;

    UniformStencils st_in, st_out;

    RealArray abar_r_in, abar_t_in, abar_r_out, abar_t_out;
    double sigma_bar = 0.0, alpha_bar = 0.0, ut_sigma_bar = 0.0;

    Grid2D aosc_r_in, aosc_t_in, aosc_r_out, aosc_t_out;
    RealArray sigma_osc, alpha_osc, ut_sigma_osc;

    Eigen::ArrayXXd pgrad_in_w, pgrad_out_w;
    std::vector<int> pgrad_in_s, pgrad_out_s;
    Eigen::ArrayXXd pval_in_w, pval_out_w;
    std::vector<int> pval_in_s, pval_out_s;
    Eigen::Array3d ptrace_in_w, ptrace_out_w;
    int ptrace_in_s = 0, ptrace_out_s = 0;

    std::vector<ModeLU> stokes;
    std::vector<ModeLU> bulk;
    std::vector<Complex> surf_diag;

    int iur_in(int i) const { return 3 * i; }
    int iut_in(int i) const { return 3 * i + 1; }
    int ip_in(int i) const { return 3 * i + 2; }
    int igamma() const { return idx_gamma; }
    int iur_out(int j) const { return outer_base + 3 * j; }
    int iut_out(int j) const { return outer_base + 3 * j + 1; }
    int ip_out(int j) const { return outer_base + 3 * j + 2; }

    double parity(int k, bool vector_component) const {
        const double base = (k % 2 == 0) ? 1.0 : -1.0;
        return vector_component ? -base : base;
    }
    Complex ik(int k) const {
        if (k == nth / 2) return Complex(0.0, 0.0);  // Nyquist convention
        return Complex(0.0, static_cast<double>(k));
    }

    void setup();
    void build_stokes_matrices();
    void build_bulk_matrices();

    VectorBulkField momentum_spatial(const VectorBulkField& u) const;
    BulkField bulk_spatial(const BulkField& c) const;
    SurfaceField surface_spatial(const SurfaceField& c) const;

    Grid2D uniform_deriv(Phase p, const Grid2D& f, int order, int par) const;
    Grid2D theta_deriv(const Grid2D& f, int order) const;

    StokesResult solve_stokes_full(const VectorBulkField& u_old, const HeightFunction& gamma_old,
                                   const VectorBulkField& f_u, const BulkField& g,
                                   const TangentField& h_tau, const SurfaceField& h_nu,
                                   const SurfaceField& h_gamma, const SurfaceField& c_sigma_new,
                                   bool banded) const;

    std::vector<CVec> solve_modes_banded(const std::vector<CVec>& rhs) const;
};

Grid2D LinearStepSolver::Impl::uniform_deriv(Phase p, const Grid2D& f, int order, int par) const {
    const UniformStencils& st = (p == Phase::Inner) ? st_in : st_out;
    const int n = grid->n(p);
    Grid2D out(n, nth);
    const auto& w = (order == 1) ? st.w1 : st.w2;
    for (int m = 0; m < nth; ++m) {
        const int mref = (m + nth / 2) % nth;
        for (int i = 0; i < n; ++i) {
            double acc;
            if (st.ghost[i]) {
                acc = w(i, 0) * par * f(0, mref) + w(i, 1) * f(0, m) + w(i, 2) * f(1, m);
            } else {
                const int s = st.start[i];
                acc = w(i, 0) * f(s, m) + w(i, 1) * f(s + 1, m) + w(i, 2) * f(s + 2, m);
            }
            out(i, m) = acc;
        }
    }
    return out;
}

Grid2D LinearStepSolver::Impl::theta_deriv(const Grid2D& f, int order) const {
    const Spectral& sp = Spectral::of_size(nth);
    Grid2D out(f.rows(), nth);
    RealArray row(nth);
    for (int i = 0; i < f.rows(); ++i) {
        row = f.row(i).transpose();
        out.row(i) = sp.derivative(row, order).transpose();
    }
    return out;
}

void LinearStepSolver::Impl::setup() {
    nth = grid->n_theta();
    ni = grid->n(Phase::Inner);
    no = grid->n(Phase::Outer);
    nmodes = nth / 2 + 1;
    idx_gamma = 3 * ni - 1;
    outer_base = 3 * ni;
    nsys = 3 * ni + 3 * no - 1;

    st_in.build(grid->radii(Phase::Inner), true);
    st_out.build(grid->radii(Phase::Outer), false);

    abar_r_in = frozen->u_star.r.inner().rowwise().mean();
    abar_t_in = frozen->u_star.theta.inner().rowwise().mean();
    abar_r_out = frozen->u_star.r.outer().rowwise().mean();
    abar_t_out = frozen->u_star.theta.outer().rowwise().mean();
    aosc_r_in = frozen->u_star.r.inner().colwise() - abar_r_in;
    aosc_t_in = frozen->u_star.theta.inner().colwise() - abar_t_in;
    aosc_r_out = frozen->u_star.r.outer().colwise() - abar_r_out;
    aosc_t_out = frozen->u_star.theta.outer().colwise() - abar_t_out;

    sigma_bar = frozen->sigma_star.mean();
    alpha_bar = frozen->alpha_prime_star.mean();
    ut_sigma_bar = frozen->u_star_theta_sigma.mean();
    sigma_osc = frozen->sigma_star.values() - sigma_bar;
    alpha_osc = frozen->alpha_prime_star.values() - alpha_bar;
    ut_sigma_osc = frozen->u_star_theta_sigma.values() - ut_sigma_bar;

    if (!(alpha_bar > 0.0)) {
        throw LinearSolveError("alpha'([c*]) must be positive for the bulk interface condition");
    }

    auto build_ptables = [&](Phase p, Eigen::ArrayXXd& gw, std::vector<int>& gs,
                             Eigen::ArrayXXd& vw, std::vector<int>& vs) {
        const RealArray& r = grid->radii(p);
        const RealArray& m = grid->midpoints(p);
        const int n = static_cast<int>(r.size());
        const int nm = static_cast<int>(m.size());
        gw.setZero(n, 3);
        vw.setZero(n, 3);
        gs.assign(n, 0);
        vs.assign(n, 0);
        std::vector<double> pos(3), wk(6);
        for (int i = 0; i < n; ++i) {
            if (i >= 1 && i <= nm - 1) {
                // interior: two-point staggered gradient and average
                gs[i] = vs[i] = i - 1;
                const double hh = m(i) - m(i - 1);
                gw(i, 0) = -1.0 / hh;
                gw(i, 1) = 1.0 / hh;
                vw(i, 0) = 0.5;
                vw(i, 1) = 0.5;
            } else {
                const int s = std::clamp(i - 1, 0, nm - 3);
                pos[0] = m(s);
                pos[1] = m(s + 1);
                pos[2] = m(s + 2);
                fd_weights(r(i), pos, 1, wk.data(), 3);
                gs[i] = vs[i] = s;
                for (int j = 0; j < 3; ++j) {
                    vw(i, j) = wk[j];
                    gw(i, j) = wk[3 + j];
                }
            }
        }
    };
    build_ptables(Phase::Inner, pgrad_in_w, pgrad_in_s, pval_in_w, pval_in_s);
    build_ptables(Phase::Outer, pgrad_out_w, pgrad_out_s, pval_out_w, pval_out_s);

    {
        const RealArray& m_in = grid->midpoints(Phase::Inner);
        const int nm = static_cast<int>(m_in.size());
        std::vector<double> pos = {m_in(nm - 3), m_in(nm - 2), m_in(nm - 1)};
        auto w = fd_weights_single(grid->geometry().r_sigma(), pos, 0);
        ptrace_in_s = nm - 3;
        for (int j = 0; j < 3; ++j) ptrace_in_w(j) = w[j];
        const RealArray& m_out = grid->midpoints(Phase::Outer);
        pos = {m_out(0), m_out(1), m_out(2)};
        w = fd_weights_single(grid->geometry().r_sigma(), pos, 0);
        ptrace_out_s = 0;
        for (int j = 0; j < 3; ++j) ptrace_out_w(j) = w[j];
    }

    build_stokes_matrices();
    build_bulk_matrices();

    surf_diag.resize(nmodes);
    const double rs = grid->geometry().r_sigma();
    for (int k = 0; k < nmodes; ++k) {
        surf_diag[k] = 1.0 / dt + ik(k) * ut_sigma_bar / rs +
                       model->surface_diffusivity() * double(k) * double(k) / (rs * rs);
    }
}

void LinearStepSolver::Impl::build_stokes_matrices() {
    const double rs = grid->geometry().r_sigma();
    stokes.resize(nmodes);

    parallel_for(nmodes, [&](int k) {
        std::vector<Triplet>& T = stokes[k].triplets;
        T.clear();
        const Complex I_k = ik(k);
        const double k2 = double(k) * double(k);

        auto momentum_rows = [&](Phase p) {
            const bool inner = (p == Phase::Inner);
            const UniformStencils& st = inner ? st_in : st_out;
            const RealArray& r = grid->radii(p);
            const RealArray& ar = inner ? abar_r_in : abar_r_out;
            const RealArray& at = inner ? abar_t_in : abar_t_out;
            const double rho = model->rho(p);
            const double eta = model->eta(p);
            const int lo = inner ? 0 : 1;
            const int hi = inner ? ni - 2 : no - 2;
            auto iur = [&](int i) { return inner ? iur_in(i) : iur_out(i); };
            auto iut = [&](int i) { return inner ? iut_in(i) : iut_out(i); };
            auto ip = [&](int i) { return inner ? ip_in(i) : ip_out(i); };
            const Eigen::ArrayXXd& gw = inner ? pgrad_in_w : pgrad_out_w;
            const std::vector<int>& gsv = inner ? pgrad_in_s : pgrad_out_s;
            const Eigen::ArrayXXd& vw = inner ? pval_in_w : pval_out_w;
            const std::vector<int>& vsv = inner ? pval_in_s : pval_out_s;

            for (int i = lo; i <= hi; ++i) {
                const int row_r = iur(i), row_t = iut(i);
                const double par = parity(k, true);
                const double r2 = r(i) * r(i);
                T.emplace_back(row_r, iur(i),
                               rho / dt + rho * at(i) / r(i) * I_k + eta * (k2 + 1.0) / r2);
                T.emplace_back(row_r, iut(i), -rho * at(i) / r(i) + eta * 2.0 * I_k / r2);
                T.emplace_back(row_t, iut(i),
                               rho / dt + rho * at(i) / r(i) * I_k + eta * (k2 + 1.0) / r2);
                T.emplace_back(row_t, iur(i), rho * at(i) / r(i) - eta * 2.0 * I_k / r2);

                for (int j = 0; j < 3; ++j) {
                    const double w_op =
                        rho * ar(i) * st.w1(i, j) - eta * (st.w2(i, j) + st.w1(i, j) / r(i));
                    int col = st.start[i] + j;
                    double sign = 1.0;
                    if (st.ghost[i]) {
                        if (j == 0) {
                            col = 0;
                            sign = par;
                        } else {
                            col = j - 1;
                        }
                    }
                    T.emplace_back(row_r, iur(col), Complex(w_op * sign));
                    T.emplace_back(row_t, iut(col), Complex(w_op * sign));
                }

                for (int j = 0; j < 3; ++j) {
                    if (gw(i, j) != 0.0) T.emplace_back(row_r, ip(gsv[i] + j), Complex(gw(i, j)));
                    if (vw(i, j) != 0.0) T.emplace_back(row_t, ip(vsv[i] + j), I_k / r(i) * vw(i, j));
                }
            }

            const RealArray& mid = grid->midpoints(p);
            const double h = grid->spacing(p);
            const int last = static_cast<int>(mid.size()) - 1;
            for (int q = 0; q <= last; ++q) {
                const int row = ip(q);
                if (!inner && k == 0 && q == last) {
                    T.emplace_back(row, ip(q), Complex(1.0));  // pressure pin
                    continue;
                }
                T.emplace_back(row, iur(q + 1), Complex(r(q + 1) / (h * mid(q))));
                T.emplace_back(row, iur(q), Complex(-r(q) / (h * mid(q))));
                T.emplace_back(row, iut(q), I_k * 0.5 / mid(q));
                T.emplace_back(row, iut(q + 1), I_k * 0.5 / mid(q));
            }
        };

        momentum_rows(Phase::Inner);
        momentum_rows(Phase::Outer);

        const double eta_in = model->eta(Phase::Inner);
        const double eta_out = model->eta(Phase::Outer);

        // velocity continuity across the ring
        T.emplace_back(iur_in(ni - 1), iur_out(0), Complex(1.0));
        T.emplace_back(iur_in(ni - 1), iur_in(ni - 1), Complex(-1.0));
        T.emplace_back(iut_in(ni - 1), iut_out(0), Complex(1.0));
        T.emplace_back(iut_in(ni - 1), iut_in(ni - 1), Complex(-1.0));

        // tangential stress: -[[eta (D1 u_t - u_t/R + ik u_r/R)]] = rhs
        {
            const int row = iur_out(0);
            for (int j = 0; j < 3; ++j) {
                T.emplace_back(row, iut_out(j), Complex(-eta_out * st_out.w1(0, j)));
                T.emplace_back(row, iut_in(ni - 3 + j), Complex(eta_in * st_in.w1(ni - 1, j)));
            }
            T.emplace_back(row, iut_out(0), Complex(eta_out / rs));
            T.emplace_back(row, iut_in(ni - 1), Complex(-eta_in / rs));
            T.emplace_back(row, iur_out(0), -eta_out * I_k / rs);
            T.emplace_back(row, iur_in(ni - 1), eta_in * I_k / rs);
        }

        // normal stress: -[[2 eta D1 u_r]] + [[p]] + sigma_bar k^2/R^2 gamma = rhs
        {
            const int row = iut_out(0);
            for (int j = 0; j < 3; ++j) {
                T.emplace_back(row, iur_out(j), Complex(-2.0 * eta_out * st_out.w1(0, j)));
                T.emplace_back(row, iur_in(ni - 3 + j), Complex(2.0 * eta_in * st_in.w1(ni - 1, j)));
                T.emplace_back(row, ip_out(ptrace_out_s + j), Complex(ptrace_out_w(j)));
                T.emplace_back(row, ip_in(ptrace_in_s + j), Complex(-ptrace_in_w(j)));
            }
            T.emplace_back(row, igamma(), Complex(sigma_bar * k2 / (rs * rs)));
        }

        // kinematic: gamma/dt + ik (ubar/R) gamma - u_r = rhs
        {
            const int row = igamma();
            T.emplace_back(row, igamma(), 1.0 / dt + I_k * ut_sigma_bar / rs);
            T.emplace_back(row, iur_in(ni - 1), Complex(-1.0));
        }

        T.emplace_back(iur_out(no - 1), iur_out(no - 1), Complex(1.0));
        T.emplace_back(iut_out(no - 1), iut_out(no - 1), Complex(1.0));

        stokes[k].A = SpMat(nsys, nsys);
        stokes[k].A.setFromTriplets(T.begin(), T.end());
        stokes[k].A.makeCompressed();
        stokes[k].lu = std::make_unique<SpLU>();
        stokes[k].lu->analyzePattern(stokes[k].A);
        stokes[k].lu->factorize(stokes[k].A);
        if (stokes[k].lu->info() != Eigen::Success) {
            throw LinearSolveError("two-phase Stokes factorization failed (mode " +
                                   std::to_string(k) + ")");
        }
    });
}

void LinearStepSolver::Impl::build_bulk_matrices() {
    const RealArray& r = grid->radii(Phase::Outer);
    const RealArray& mid = grid->midpoints(Phase::Outer);
    const double h = grid->spacing(Phase::Outer);
    const double d = model->diffusivity();
    bulk.resize(nmodes);

    parallel_for(nmodes, [&](int k) {
        std::vector<Triplet>& T = bulk[k].triplets;
        T.clear();
        const Complex I_k = ik(k);
        const double k2 = double(k) * double(k);

        T.emplace_back(0, 0, Complex(alpha_bar));

        for (int j = 1; j <= no - 2; ++j) {
            T.emplace_back(j, j, 1.0 / dt + abar_t_out(j) / r(j) * I_k + d * k2 / (r(j) * r(j)));
            const double wl = d * mid(j - 1) / (h * h * r(j));
            const double wr = d * mid(j) / (h * h * r(j));
            T.emplace_back(j, j - 1, Complex(-wl));
            T.emplace_back(j, j, Complex(wl + wr));
            T.emplace_back(j, j + 1, Complex(-wr));
            for (int q = 0; q < 3; ++q) {
                T.emplace_back(j, st_out.start[j] + q, Complex(abar_r_out(j) * st_out.w1(j, q)));
            }
        }
        {
            const int j = no - 1;
            T.emplace_back(j, j, 1.0 / dt + abar_t_out(j) / r(j) * I_k + d * k2 / (r(j) * r(j)));
            const double wl = d * mid(j - 1) / (0.5 * h * h * r(j));
            T.emplace_back(j, j - 1, Complex(-wl));
            T.emplace_back(j, j, Complex(wl));
            for (int q = 0; q < 3; ++q) {
                T.emplace_back(j, st_out.start[j] + q, Complex(abar_r_out(j) * st_out.w1(j, q)));
            }
        }

        bulk[k].A = SpMat(no, no);
        bulk[k].A.setFromTriplets(T.begin(), T.end());
        bulk[k].A.makeCompressed();
        bulk[k].lu = std::make_unique<SpLU>();
        bulk[k].lu->analyzePattern(bulk[k].A);
        bulk[k].lu->factorize(bulk[k].A);
        if (bulk[k].lu->info() != Eigen::Success) {
            throw LinearSolveError("bulk parabolic factorization failed (mode " + std::to_string(k) +
                                   ")");
        }
    });
}

VectorBulkField LinearStepSolver::Impl::momentum_spatial(const VectorBulkField& u) const {
    VectorBulkField out(*grid, 0.0);
    for (Phase p : {Phase::Inner, Phase::Outer}) {
        const bool inner = (p == Phase::Inner);
        const RealArray& r = grid->radii(p);
        const RealArray r2 = r.square();
        const double rho = model->rho(p);
        const double eta = model->eta(p);
        const Grid2D& ur = u.r.block(p);
        const Grid2D& ut = u.theta.block(p);
        Grid2D ur1 = uniform_deriv(p, ur, 1, -1), ur2 = uniform_deriv(p, ur, 2, -1);
        Grid2D ut1 = uniform_deriv(p, ut, 1, -1), ut2 = uniform_deriv(p, ut, 2, -1);
        Grid2D ur_th = theta_deriv(ur, 1), ur_thth = theta_deriv(ur, 2);
        Grid2D ut_th = theta_deriv(ut, 1), ut_thth = theta_deriv(ut, 2);
        const Grid2D& ar = inner ? frozen->u_star.r.inner() : frozen->u_star.r.outer();
        const Grid2D& at = inner ? frozen->u_star.theta.inner() : frozen->u_star.theta.outer();

        Grid2D adv_r = ar * ur1 + at * ((ur_th - ut).colwise() / r);
        Grid2D adv_t = ar * ut1 + at * ((ut_th + ur).colwise() / r);
        Grid2D lap_r = ur2 + ur1.colwise() / r + (ur_thth - ur - 2.0 * ut_th).colwise() / r2;
        Grid2D lap_t = ut2 + ut1.colwise() / r + (ut_thth - ut + 2.0 * ur_th).colwise() / r2;
        out.r.block(p) = rho * adv_r - eta * lap_r;
        out.theta.block(p) = rho * adv_t - eta * lap_t;
    }
    return out;
}

BulkField LinearStepSolver::Impl::bulk_spatial(const BulkField& c) const {
    BulkField out(*grid, BulkField::Support::OuterOnly, 0.0);
    const Phase p = Phase::Outer;
    const RealArray& r = grid->radii(p);
    const RealArray& mid = grid->midpoints(p);
    const double h = grid->spacing(p);
    const double d = model->diffusivity();
    const Grid2D& cc = c.outer();
    Grid2D c1 = uniform_deriv(p, cc, 1, +1);
    Grid2D c_th = theta_deriv(cc, 1);
    Grid2D c_thth = theta_deriv(cc, 2);
    const Grid2D& ar = frozen->u_star.r.outer();
    const Grid2D& at = frozen->u_star.theta.outer();

    Grid2D adv = ar * c1 + at * (c_th.colwise() / r);
    Grid2D diff(no, nth);
    diff.setZero();
    for (int m = 0; m < nth; ++m) {
        for (int j = 1; j <= no - 2; ++j) {
            diff(j, m) = (mid(j) * (cc(j + 1, m) - cc(j, m)) -
                          mid(j - 1) * (cc(j, m) - cc(j - 1, m))) /
                         (h * h * r(j));
        }
        diff(no - 1, m) = -mid(no - 2) * (cc(no - 1, m) - cc(no - 2, m)) / (0.5 * h * h * r(no - 1));
    }
    out.outer() = adv - d * (diff + c_thth.colwise() / RealArray(r.square()));
    // row 0 carries the interface condition instead of a balance
    out.outer().row(0) = frozen->alpha_prime_star.values().transpose() * cc.row(0).array();
    return out;
}

SurfaceField LinearStepSolver::Impl::surface_spatial(const SurfaceField& c) const {
    const double rs = grid->geometry().r_sigma();
    RealArray adv = frozen->u_star_theta_sigma.values() * c.derivative(1).values() / rs;
    RealArray diff = model->surface_diffusivity() * c.derivative(2).values() / (rs * rs);
    return SurfaceField(adv - diff);
}

// ---------------------------------------------------------------------------

LinearStepSolver::LinearStepSolver(const TwoPhaseGrid& grid, const MaterialModel& model,
                                   FrozenCoefficients frozen, double dt)
    : grid_(&grid), model_(&model), frozen_(std::move(frozen)), dt_(dt) {
    if (!(dt > 0.0)) throw LinearSolveError("time step must be positive");
    impl_ = std::make_unique<Impl>();
    impl_->grid = grid_;
    impl_->model = model_;
    impl_->frozen = &frozen_;
    impl_->dt = dt_;
    impl_->setup();
}

LinearStepSolver::~LinearStepSolver() = default;

VectorBulkField LinearStepSolver::apply_momentum(const VectorBulkField& u, const Grid2D& p_mid_inner,
                                                 const Grid2D& p_mid_outer) const {
    VectorBulkField out = impl_->momentum_spatial(u);
    for (Phase p : {Phase::Inner, Phase::Outer}) {
        const bool inner = (p == Phase::Inner);
        const Grid2D& pm = inner ? p_mid_inner : p_mid_outer;
        const Eigen::ArrayXXd& gw = inner ? impl_->pgrad_in_w : impl_->pgrad_out_w;
        const std::vector<int>& gs = inner ? impl_->pgrad_in_s : impl_->pgrad_out_s;
        const Eigen::ArrayXXd& vw = inner ? impl_->pval_in_w : impl_->pval_out_w;
        const std::vector<int>& vs = inner ? impl_->pval_in_s : impl_->pval_out_s;
        const RealArray& r = grid_->radii(p);
        const int n = grid_->n(p);
        Grid2D pnode(n, impl_->nth), pgrad(n, impl_->nth);
        for (int m = 0; m < impl_->nth; ++m) {
            for (int i = 0; i < n; ++i) {
                double pv = 0.0, pg = 0.0;
                for (int j = 0; j < 3; ++j) {
                    pv += vw(i, j) * pm(vs[i] + j, m);
                    pg += gw(i, j) * pm(gs[i] + j, m);
                }
                pnode(i, m) = pv;
                pgrad(i, m) = pg;
            }
        }
        out.r.block(p) += pgrad;
        out.theta.block(p) += impl_->theta_deriv(pnode, 1).colwise() / r;
    }
    return out;
}

BulkField LinearStepSolver::apply_bulk_operator(const BulkField& c) const {
    return impl_->bulk_spatial(c);
}

SurfaceSolveResult LinearStepSolver::solve_surface(const SurfaceField& c_sigma_old,
                                                   const SurfaceField& h_eps) const {
    const Impl& im = *impl_;
    const double rs = grid_->geometry().r_sigma();
    const Spectral& sp = Spectral::of_size(im.nth);

    SurfaceField c = c_sigma_old;
    const RealArray base_rhs = c_sigma_old.values() / dt_ + h_eps.values();
    const double scale = std::max(1.0, base_rhs.abs().maxCoeff());

    SurfaceSolveResult res;
    for (int sweep = 0; sweep < kMaxLagSweeps; ++sweep) {
        RealArray corr = -im.ut_sigma_osc * c.derivative(1).values() / rs;
        ComplexArray rhs = sp.to_coeffs(RealArray(base_rhs + corr));
        for (int k = 0; k < im.nmodes; ++k) rhs(k) /= im.surf_diag[k];
        c = SurfaceField::from_coeffs(rhs);
        RealArray resid = (c.values() - c_sigma_old.values()) / dt_ +
                          im.surface_spatial(c).values() - h_eps.values();
        res.residual = resid.abs().maxCoeff() / scale;
        res.lag_iterations = sweep + 1;
        if (res.residual < kLagTol) break;
    }
    if (res.residual > 1e-11) {
        throw LinearSolveError(
            "surface parabolic solve missed its residual target; the lagged advection "
            "did not contract (reduce dt)");
    }
    res.c_sigma = c;
    return res;
}

BulkSolveResult LinearStepSolver::solve_bulk(const BulkField& c_old, const SurfaceField& c_sigma_new,
                                             const BulkField& f_c,
                                             const SurfaceField& h_alpha) const {
    const Impl& im = *impl_;
    const RealArray& r = grid_->radii(Phase::Outer);

    BulkField c = c_old;
    const RealArray iface_rhs = c_sigma_new.values() + h_alpha.values();
    Grid2D base(im.no, im.nth);
    for (int m = 0; m < im.nth; ++m) {
        base(0, m) = iface_rhs(m);
        for (int j = 1; j < im.no; ++j) {
            base(j, m) = c_old.outer()(j, m) / dt_ + f_c.outer()(j, m);
        }
    }
    const double scale = std::max(1.0, base.abs().maxCoeff());

    BulkSolveResult res;
    for (int sweep = 0; sweep < kMaxLagSweeps; ++sweep) {
        Grid2D c1 = im.uniform_deriv(Phase::Outer, c.outer(), 1, +1);
        Grid2D c_th = im.theta_deriv(c.outer(), 1);
        Grid2D corr = -(im.aosc_r_out * c1 + im.aosc_t_out * (c_th.colwise() / r));
        corr.row(0) = -(im.alpha_osc.transpose() * c.outer().row(0).array());

        CMat rhs = to_modes(Grid2D(base + corr));
        CMat sol(im.no, im.nmodes);
        for (int k = 0; k < im.nmodes; ++k) {
            sol.col(k) = im.bulk[k].lu->solve(CVec(rhs.col(k).matrix())).array();
        }
        c.outer() = to_field(sol, im.nth);

        BulkField op = im.bulk_spatial(c);
        double worst = 0.0;
        for (int m = 0; m < im.nth; ++m) {
            worst = std::max(worst, std::abs(op.outer()(0, m) - iface_rhs(m)));
            for (int j = 1; j < im.no; ++j) {
                const double resid = (c.outer()(j, m) - c_old.outer()(j, m)) / dt_ +
                                     op.outer()(j, m) - base(j, m) + c_old.outer()(j, m) / dt_;
                worst = std::max(worst, std::abs(resid));
            }
        }
        res.residual = worst / scale;
        res.lag_iterations = sweep + 1;
        if (res.residual < kLagTol) break;
    }
    if (res.residual > 1e-10) {
        throw LinearSolveError(
            "bulk parabolic solve missed its residual target; the lagged oscillating "
            "coefficients did not contract (reduce dt)");
    }
    res.positivity_warning = (c.outer().minCoeff() < 0.0);
    res.c = c;
    return res;
}

std::vector<CVec> LinearStepSolver::Impl::solve_modes_banded(const std::vector<CVec>& rhs) const {
    // Stack all per-mode systems into one block-diagonal banded matrix and
    // factorize with LAPACK zgbsv: an independent path to the same solution.
    int kl = 0, ku = 0;
    for (const auto& ms : stokes) {
        for (const auto& t : ms.triplets) {
            kl = std::max(kl, t.row() - t.col());
            ku = std::max(ku, t.col() - t.row());
        }
    }
    const int N = nmodes * nsys;
    const int ldab = 2 * kl + ku + 1;
    std::vector<Complex> ab(static_cast<size_t>(ldab) * N, Complex(0.0, 0.0));
    std::vector<Complex> b(static_cast<size_t>(N));
    std::vector<lapack_int> ipiv(static_cast<size_t>(N));
    for (int k = 0; k < nmodes; ++k) {
        const int off = k * nsys;
        for (const auto& t : stokes[k].triplets) {
            const int i = off + t.row();
            const int j = off + t.col();
            ab[static_cast<size_t>(j) * ldab + (kl + ku + i - j)] += t.value();
        }
        for (int i = 0; i < nsys; ++i) b[off + i] = rhs[k](i);
    }
    const lapack_int info = LAPACKE_zgbsv(LAPACK_COL_MAJOR, N, kl, ku, 1,
                                          reinterpret_cast<lapack_complex_double*>(ab.data()), ldab,
                                          ipiv.data(),
                                          reinterpret_cast<lapack_complex_double*>(b.data()), N);
    if (info != 0) {
        throw LinearSolveError("banded global Stokes solve failed, zgbsv info = " +
                               std::to_string(info));
    }
    std::vector<CVec> out(nmodes);
    for (int k = 0; k < nmodes; ++k) {
        out[k] = CVec(nsys);
        for (int i = 0; i < nsys; ++i) out[k](i) = b[k * nsys + i];
    }
    return out;
}

StokesResult LinearStepSolver::Impl::solve_stokes_full(
    const VectorBulkField& u_old, const HeightFunction& gamma_old, const VectorBulkField& f_u,
    const BulkField& g, const TangentField& h_tau, const SurfaceField& h_nu,
    const SurfaceField& h_gamma, const SurfaceField& c_sigma_new, bool banded) const {
    const Spectral& sp = Spectral::of_size(nth);
    const double rs = grid->geometry().r_sigma();
    const double rho_in = model->rho(Phase::Inner), rho_out = model->rho(Phase::Outer);

    // mode-space data that does not change across lag sweeps
    CMat base_r_in = to_modes(Grid2D(rho_in * (f_u.r.inner() + u_old.r.inner() / dt)));
    CMat base_t_in = to_modes(Grid2D(rho_in * (f_u.theta.inner() + u_old.theta.inner() / dt)));
    CMat base_r_out = to_modes(Grid2D(rho_out * (f_u.r.outer() + u_old.r.outer() / dt)));
    CMat base_t_out = to_modes(Grid2D(rho_out * (f_u.theta.outer() + u_old.theta.outer() / dt)));
    CMat g_in = to_modes(midpoint_average(g.inner()));
    CMat g_out = to_modes(midpoint_average(g.outer()));

    // Marangoni term with the already-known new surface concentration
    RealArray tau_data = h_tau.values() +
                         frozen->sigma_prime_star.values() * c_sigma_new.derivative(1).values() / rs;
    ComplexArray tau_hat = sp.to_coeffs(tau_data);
    ComplexArray gamma_data_hat =
        sp.to_coeffs(RealArray(h_gamma.values() + gamma_old.values() / dt));

    StokesResult res;
    VectorBulkField u = u_old;
    SurfaceField gamma = gamma_old.field();
    res.p_mid_inner = Grid2D::Zero(ni - 1, nth);
    res.p_mid_outer = Grid2D::Zero(no - 1, nth);

    const double data_scale =
        std::max({1.0, tau_data.abs().maxCoeff(), h_nu.sup_norm(),
                  base_r_in.abs().maxCoeff(), base_r_out.abs().maxCoeff()});

    std::vector<CVec> rhs(nmodes, CVec::Zero(nsys));
    for (int sweep = 0; sweep < kMaxLagSweeps; ++sweep) {
        // oscillating-coefficient corrections at the newest iterate
        VectorBulkField osc(*grid, 0.0);
        {
            for (Phase p : {Phase::Inner, Phase::Outer}) {
                const bool inner = (p == Phase::Inner);
                const RealArray& r = grid->radii(p);
                const double rho = model->rho(p);
                const Grid2D& ur = u.r.block(p);
                const Grid2D& ut = u.theta.block(p);
                Grid2D ur1 = uniform_deriv(p, ur, 1, -1);
                Grid2D ut1 = uniform_deriv(p, ut, 1, -1);
                Grid2D ur_th = theta_deriv(ur, 1);
                Grid2D ut_th = theta_deriv(ut, 1);
                const Grid2D& aor = inner ? aosc_r_in : aosc_r_out;
                const Grid2D& aot = inner ? aosc_t_in : aosc_t_out;
                osc.r.block(p) = -rho * (aor * ur1 + aot * ((ur_th - ut).colwise() / r));
                osc.theta.block(p) = -rho * (aor * ut1 + aot * ((ut_th + ur).colwise() / r));
            }
        }
        CMat osc_r_in = to_modes(osc.r.inner());
        CMat osc_t_in = to_modes(osc.theta.inner());
        CMat osc_r_out = to_modes(osc.r.outer());
        CMat osc_t_out = to_modes(osc.theta.outer());

        RealArray lap_gamma = gamma.derivative(2).values() / (rs * rs);
        ComplexArray nu_hat =
            sp.to_coeffs(RealArray(h_nu.values() + sigma_osc * lap_gamma));
        ComplexArray kin_corr =
            sp.to_coeffs(RealArray(-ut_sigma_osc * gamma.derivative(1).values() / rs));

        for (int k = 0; k < nmodes; ++k) {
            CVec& b = rhs[k];
            b.setZero();
            for (int i = 0; i <= ni - 2; ++i) {
                b(iur_in(i)) = base_r_in(i, k) + osc_r_in(i, k);
                b(iut_in(i)) = base_t_in(i, k) + osc_t_in(i, k);
                b(ip_in(i)) = g_in(i, k);
            }
            for (int j = 1; j <= no - 2; ++j) {
                b(iur_out(j)) = base_r_out(j, k) + osc_r_out(j, k);
                b(iut_out(j)) = base_t_out(j, k) + osc_t_out(j, k);
            }
            for (int q = 0; q <= no - 2; ++q) {
                if (k == 0 && q == no - 2) {
                    b(ip_out(q)) = 0.0;  // pressure pin
                } else {
                    b(ip_out(q)) = g_out(q, k);
                }
            }
            b(iur_out(0)) = tau_hat(k);
            b(iut_out(0)) = nu_hat(k);
            b(igamma()) = gamma_data_hat(k) + kin_corr(k);
        }

        std::vector<CVec> sol(nmodes);
        if (banded) {
            sol = solve_modes_banded(rhs);
        } else {
            parallel_for(nmodes, [&](int k) { sol[k] = stokes[k].lu->solve(rhs[k]); });
        }

        // unpack
        CMat ur_in(ni, nmodes), ut_in(ni, nmodes), ur_out(no, nmodes), ut_out(no, nmodes);
        CMat pm_in(ni - 1, nmodes), pm_out(no - 1, nmodes);
        ComplexArray gamma_hat(nmodes);
        for (int k = 0; k < nmodes; ++k) {
            for (int i = 0; i < ni; ++i) {
                ur_in(i, k) = sol[k](iur_in(i));
                ut_in(i, k) = sol[k](iut_in(i));
                if (i < ni - 1) pm_in(i, k) = sol[k](ip_in(i));
            }
            for (int j = 0; j < no; ++j) {
                ur_out(j, k) = sol[k](iur_out(j));
                ut_out(j, k) = sol[k](iut_out(j));
                if (j < no - 1) pm_out(j, k) = sol[k](ip_out(j));
            }
            gamma_hat(k) = sol[k](igamma());
        }
        u.r.inner() = to_field(ur_in, nth);
        u.theta.inner() = to_field(ut_in, nth);
        u.r.outer() = to_field(ur_out, nth);
        u.theta.outer() = to_field(ut_out, nth);
        res.p_mid_inner = to_field(pm_in, nth);
        res.p_mid_outer = to_field(pm_out, nth);
        gamma_hat(0) = Complex(gamma_hat(0).real(), 0.0);
        gamma_hat(nmodes - 1) = Complex(gamma_hat(nmodes - 1).real(), 0.0);
        gamma = SurfaceField::from_coeffs(gamma_hat);

        // residuals of the theta-dependent flat discrete system
        res.lag_iterations = sweep + 1;
        {
            // momentum
            VectorBulkField mom(*grid, 0.0);
            {
                VectorBulkField spatial = momentum_spatial(u);
                for (Phase p : {Phase::Inner, Phase::Outer}) {
                    const double rho = model->rho(p);
                    mom.r.block(p) = rho * (u.r.block(p) - u_old.r.block(p)) / dt +
                                     spatial.r.block(p) - rho * f_u.r.block(p);
                    mom.theta.block(p) = rho * (u.theta.block(p) - u_old.theta.block(p)) / dt +
                                         spatial.theta.block(p) - rho * f_u.theta.block(p);
                }
            }
            double worst = 0.0;
            for (Phase p : {Phase::Inner, Phase::Outer}) {
                const bool inner = (p == Phase::Inner);
                const Grid2D& pm = inner ? res.p_mid_inner : res.p_mid_outer;
                const Eigen::ArrayXXd& gw = inner ? pgrad_in_w : pgrad_out_w;
                const std::vector<int>& gs = inner ? pgrad_in_s : pgrad_out_s;
                const Eigen::ArrayXXd& vw = inner ? pval_in_w : pval_out_w;
                const std::vector<int>& vs = inner ? pval_in_s : pval_out_s;
                const RealArray& r = grid->radii(p);
                const int lo = inner ? 0 : 1;
                const int hi = inner ? ni - 2 : no - 2;
                Grid2D pnode(grid->n(p), nth);
                for (int m = 0; m < nth; ++m)
                    for (int i = lo; i <= hi; ++i) {
                        double pv = 0.0;
                        for (int j = 0; j < 3; ++j) pv += vw(i, j) * pm(vs[i] + j, m);
                        pnode(i, m) = pv;
                    }
                Grid2D pnode_th = theta_deriv(pnode, 1);
                for (int m = 0; m < nth; ++m) {
                    for (int i = lo; i <= hi; ++i) {
                        double pg = 0.0;
                        for (int j = 0; j < 3; ++j) pg += gw(i, j) * pm(gs[i] + j, m);
                        const double rr = mom.r.block(p)(i, m) + pg;
                        const double rt = mom.theta.block(p)(i, m) + pnode_th(i, m) / r(i);
                        worst = std::max({worst, std::abs(rr), std::abs(rt)});
                    }
                }
            }
            res.residual_mom = worst / data_scale;
        }
        {
            double worst = 0.0;
            for (Phase p : {Phase::Inner, Phase::Outer}) {
                const RealArray& r = grid->radii(p);
                const RealArray& mid = grid->midpoints(p);
                const double h = grid->spacing(p);
                const Grid2D& gm_field = (p == Phase::Inner) ? g.inner() : g.outer();
                Grid2D gmid = midpoint_average(gm_field);
                Grid2D ut_mid = midpoint_average(u.theta.block(p));
                Grid2D ut_mid_th = theta_deriv(ut_mid, 1);
                const Grid2D& ur = u.r.block(p);
                for (int m = 0; m < nth; ++m) {
                    for (int q = 0; q + 1 < grid->n(p); ++q) {
                        const double div = (r(q + 1) * ur(q + 1, m) - r(q) * ur(q, m)) / (h * mid(q)) +
                                           ut_mid_th(q, m) / mid(q);
                        worst = std::max(worst, std::abs(div - gmid(q, m)));
                    }
                }
            }
            res.residual_div = worst;
        }
        {
            // interface conditions
            const double eta_in = model->eta(Phase::Inner), eta_out = model->eta(Phase::Outer);
            Grid2D d1ur_in = uniform_deriv(Phase::Inner, u.r.inner(), 1, -1);
            Grid2D d1ur_out = uniform_deriv(Phase::Outer, u.r.outer(), 1, -1);
            Grid2D d1ut_in = uniform_deriv(Phase::Inner, u.theta.inner(), 1, -1);
            Grid2D d1ut_out = uniform_deriv(Phase::Outer, u.theta.outer(), 1, -1);
            RealArray ur_th_in = sp.derivative(RealArray(u.r.inner().row(ni - 1).transpose()), 1);
            RealArray ur_th_out = sp.derivative(RealArray(u.r.outer().row(0).transpose()), 1);
            RealArray lap_gamma2 = gamma.derivative(2).values() / (rs * rs);

            double worst_tau = 0.0, worst_nu = 0.0, worst_kin = 0.0;
            for (int m = 0; m < nth; ++m) {
                const double stress_t_out = eta_out * (d1ut_out(0, m) - u.theta.outer()(0, m) / rs +
                                                       ur_th_out(m) / rs);
                const double stress_t_in = eta_in * (d1ut_in(ni - 1, m) - u.theta.inner()(ni - 1, m) / rs +
                                                     ur_th_in(m) / rs);
                worst_tau = std::max(worst_tau,
                                     std::abs(-(stress_t_out - stress_t_in) - tau_data(m)));

                double p_in_trace = 0.0, p_out_trace = 0.0;
                for (int j = 0; j < 3; ++j) {
                    p_in_trace += ptrace_in_w(j) * res.p_mid_inner(ptrace_in_s + j, m);
                    p_out_trace += ptrace_out_w(j) * res.p_mid_outer(ptrace_out_s + j, m);
                }
                const double nu_lhs = -2.0 * (eta_out * d1ur_out(0, m) - eta_in * d1ur_in(ni - 1, m)) +
                                      (p_out_trace - p_in_trace) -
                                      frozen->sigma_star.values()(m) * lap_gamma2(m);
                worst_nu = std::max(worst_nu, std::abs(nu_lhs - h_nu.values()(m)));

                const double kin = (gamma.values()(m) - gamma_old.values()(m)) / dt -
                                   u.r.inner()(ni - 1, m) +
                                   frozen->u_star_theta_sigma.values()(m) *
                                       gamma.derivative(1).values()(m) / rs -
                                   h_gamma.values()(m);
                worst_kin = std::max(worst_kin, std::abs(kin));
            }
            res.residual_tau = worst_tau / data_scale;
            res.residual_nu = worst_nu / data_scale;
            res.residual_kin = worst_kin / data_scale;
        }

        const double total = std::max({res.residual_mom, res.residual_div, res.residual_tau,
                                       res.residual_nu, res.residual_kin});
        if (total < kLagTol) break;
    }

    const double total = std::max({res.residual_mom, res.residual_div, res.residual_tau,
                                   res.residual_nu, res.residual_kin});
    if (total > 1e-9) {
        std::ostringstream msg;
        msg << "two-phase Stokes solve missed its residual target (" << total
            << "); the lagged oscillating coefficients did not contract (reduce dt)";
        throw LinearSolveError(msg.str());
    }

    // pressure: node interpolation (cubic) and zero area mean
    BulkField p(*grid, BulkField::Support::Both, 0.0);
    for (Phase ph : {Phase::Inner, Phase::Outer}) {
        const bool inner = (ph == Phase::Inner);
        const Grid2D& pm = inner ? res.p_mid_inner : res.p_mid_outer;
        const RealArray& mid = grid->midpoints(ph);
        const RealArray& r = grid->radii(ph);
        const int n = grid->n(ph);
        const int nm = static_cast<int>(mid.size());
        for (int i = 0; i < n; ++i) {
            const int s = std::clamp(i - 2, 0, nm - 4);
            std::vector<double> pos = {mid(s), mid(s + 1), mid(s + 2), mid(s + 3)};
            auto w = fd_weights_single(r(i), pos, 0);
            for (int m = 0; m < nth; ++m) {
                double pv = 0.0;
                for (int j = 0; j < 4; ++j) pv += w[j] * pm(s + j, m);
                p.block(ph)(i, m) = pv;
            }
        }
    }
    {
        double mass = 0.0, vol = 0.0;
        const double dth = grid->dtheta();
        for (Phase ph : {Phase::Inner, Phase::Outer}) {
            const RealArray& w = grid->quad_weights(ph);
            for (int i = 0; i < grid->n(ph); ++i)
                for (int m = 0; m < nth; ++m) {
                    mass += w(i) * dth * p.block(ph)(i, m);
                    vol += w(i) * dth;
                }
        }
        const double shift = mass / vol;
        p.inner() -= shift;
        p.outer() -= shift;
        res.p_mid_inner -= shift;
        res.p_mid_outer -= shift;
    }

    if (!(gamma.sup_norm() < 0.25 * grid->geometry().epsilon())) {
        throw InterfaceValidityError(
            "kinematic update left the admissible tube: sup|gamma| = " +
            std::to_string(gamma.sup_norm()));
    }

    res.u = u;
    res.p = p;
    res.gamma = HeightFunction(gamma);
    {
        RealArray pj(nth);
        for (int m = 0; m < nth; ++m) {
            double p_in_trace = 0.0, p_out_trace = 0.0;
            for (int j = 0; j < 3; ++j) {
                p_in_trace += ptrace_in_w(j) * res.p_mid_inner(ptrace_in_s + j, m);
                p_out_trace += ptrace_out_w(j) * res.p_mid_outer(ptrace_out_s + j, m);
            }
            pj(m) = p_out_trace - p_in_trace;
        }
        res.p_jump = SurfaceField(pj);
    }
    return res;
}

StokesResult LinearStepSolver::solve_stokes(const VectorBulkField& u_old,
                                            const HeightFunction& gamma_old,
                                            const VectorBulkField& f_u, const BulkField& g,
                                            const TangentField& h_tau, const SurfaceField& h_nu,
                                            const SurfaceField& h_gamma,
                                            const SurfaceField& c_sigma_new) const {
    return impl_->solve_stokes_full(u_old, gamma_old, f_u, g, h_tau, h_nu, h_gamma, c_sigma_new,
                                    false);
}

StokesResult LinearStepSolver::solve_stokes_global(const VectorBulkField& u_old,
                                                   const HeightFunction& gamma_old,
                                                   const VectorBulkField& f_u, const BulkField& g,
                                                   const TangentField& h_tau,
                                                   const SurfaceField& h_nu,
                                                   const SurfaceField& h_gamma,
                                                   const SurfaceField& c_sigma_new) const {
    return impl_->solve_stokes_full(u_old, gamma_old, f_u, g, h_tau, h_nu, h_gamma, c_sigma_new,
                                    true);
}

// ---- spec-level wrappers ----

SurfaceSolveResult solve_surface_parabolic(const TwoPhaseGrid& grid, const MaterialModel& model,
                                           const SurfaceField& c_sigma_old,
                                           const LinearStepData& data) {
    LinearStepSolver solver(grid, model, data.frozen, data.dt);
    return solver.solve_surface(c_sigma_old, data.h_eps);
}

BulkSolveResult solve_bulk_parabolic(const TwoPhaseGrid& grid, const MaterialModel& model,
                                     const BulkField& c_old, const SurfaceField& c_sigma_new,
                                     const LinearStepData& data) {
    LinearStepSolver solver(grid, model, data.frozen, data.dt);
    return solver.solve_bulk(c_old, c_sigma_new, data.f_c, data.h_alpha);
}

StokesResult solve_two_phase_stokes(const TwoPhaseGrid& grid, const MaterialModel& model,
                                    const VectorBulkField& u_old, const HeightFunction& gamma_old,
                                    const SurfaceField& c_sigma_new, const LinearStepData& data) {
    LinearStepSolver solver(grid, model, data.frozen, data.dt);
    return solver.solve_stokes(u_old, gamma_old, data.f_u, data.g, data.h_tau, data.h_nu,
                               data.h_gamma, c_sigma_new);
}

}  // namespace tpflow
