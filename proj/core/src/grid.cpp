#include "tpflow/grid.hpp"

#include <cassert>
#include <cmath>

namespace tpflow {

void fd_weights(double x0, std::span<const double> x, int max_order,
                double* w, int row_stride) {
    // B. Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988).
    const int nd = static_cast<int>(x.size()) - 1;
    const int m = max_order;
    assert(nd >= m);
    auto W = [&](int k, int j) -> double& { return w[k * row_stride + j]; };
    for (int k = 0; k <= m; ++k)
        for (int j = 0; j <= nd; ++j) W(k, j) = 0.0;

    double c1 = 1.0;
    double c4 = x[0] - x0;
    W(0, 0) = 1.0;
    for (int i = 1; i <= nd; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j <= i - 1; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    W(k, i) = c1 * (k * W(k - 1, i - 1) - c5 * W(k, i - 1)) / c2;
                }
                W(0, i) = -c1 * c5 * W(0, i - 1) / c2;
            }
            for (int k = mn; k >= 1; --k) {
                W(k, j) = (c4 * W(k, j) - k * W(k - 1, j)) / c3;
            }
            W(0, j) = c4 * W(0, j) / c3;
        }
        c1 = c2;
    }
}

std::vector<double> fd_weights_single(double x0, std::span<const double> x, int order) {
    const int n = static_cast<int>(x.size());
    std::vector<double> all(static_cast<size_t>(order + 1) * n);
    fd_weights(x0, x, order, all.data(), n);
    return std::vector<double>(all.begin() + static_cast<size_t>(order) * n, all.end());
}

namespace {

RealArray gregory_weights(const RealArray& r, double h) {
    // Fourth-order end-corrected trapezoid (Gregory) for integral f(r) r dr on
    // the uniform nodes, integrand F = f*r. Weights returned on f.
    const int n = static_cast<int>(r.size());
    RealArray w = RealArray::Constant(n, h);
    w(0) = w(n - 1) = 3.0 / 8.0 * h;
    w(1) = w(n - 2) = 7.0 / 6.0 * h;
    w(2) = w(n - 3) = 23.0 / 24.0 * h;
    w *= r;  // fold in the polar factor
    return w;
}

}  // namespace

TwoPhaseGrid::TwoPhaseGrid(const ReferenceGeometry& geom) : geom_(&geom) {
    n_in_ = geom.n_r_in();
    n_out_ = geom.n_r_out();
    const double rs = geom.r_sigma();
    const double ro = geom.r_omega();

    h_in_ = rs / (n_in_ - 0.5);
    r_in_ = RealArray(n_in_);
    for (int i = 0; i < n_in_; ++i) r_in_(i) = (i + 0.5) * h_in_;

    h_out_ = (ro - rs) / (n_out_ - 1);
    r_out_ = RealArray(n_out_);
    for (int j = 0; j < n_out_; ++j) r_out_(j) = rs + j * h_out_;

    mid_in_ = RealArray(n_in_ - 1);
    for (int i = 0; i + 1 < n_in_; ++i) mid_in_(i) = 0.5 * (r_in_(i) + r_in_(i + 1));
    mid_out_ = RealArray(n_out_ - 1);
    for (int j = 0; j + 1 < n_out_; ++j) mid_out_(j) = 0.5 * (r_out_(j) + r_out_(j + 1));

    // Finite-volume weights: node i owns its half-open dual cell; the pole
    // cell [0, h] integrates r dr to h^2/2 = r_0 h exactly.
    mass_w_in_ = RealArray(n_in_);
    for (int i = 0; i < n_in_; ++i) mass_w_in_(i) = r_in_(i) * h_in_;
    mass_w_in_(n_in_ - 1) = 0.5 * h_in_ * (rs - 0.25 * h_in_);  // interface half cell

    mass_w_out_ = RealArray(n_out_);
    for (int j = 0; j < n_out_; ++j) mass_w_out_(j) = r_out_(j) * h_out_;
    mass_w_out_(0) = 0.5 * h_out_ * (rs + 0.25 * h_out_);
    mass_w_out_(n_out_ - 1) = 0.5 * h_out_ * (ro - 0.25 * h_out_);

    // Fourth-order weights. Inner block: Gregory on [r_0, R_sigma] plus a
    // closure for [0, r_0] using quadratic extrapolation of f to r = h/4
    // (the integrand f*r vanishes at the pole).
    quad_w_in_ = gregory_weights(r_in_, h_in_);
    {
        const double seg = h_in_ * h_in_ / 8.0;  // integral of r dr over [0, h/2]
        quad_w_in_(0) += seg * (45.0 / 32.0);
        quad_w_in_(1) += seg * (-18.0 / 32.0);
        quad_w_in_(2) += seg * (5.0 / 32.0);
    }
    quad_w_out_ = gregory_weights(r_out_, h_out_);
}

}  // namespace tpflow
