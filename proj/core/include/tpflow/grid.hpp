#pragma once

#include <span>

#include "tpflow/geometry.hpp"

namespace tpflow {

/// Finite-difference weights on arbitrary nodes (Fornberg's algorithm).
/// Fills w[k][j] = weight of f(x[j]) in the k-th derivative at x0, for
/// k = 0..max_order. w must point to (max_order+1) rows of x.size() doubles.
void fd_weights(double x0, std::span<const double> x, int max_order,
                double* w, int row_stride);

/// Convenience: weights of a single derivative order at x0.
std::vector<double> fd_weights_single(double x0, std::span<const double> x, int order);

/// Which of the two radial blocks of the two-phase grid.
enum class Phase { Inner = 0, Outer = 1 };

/// Two-block polar grid: inner block r in (0, R_sigma], outer block
/// [R_sigma, R_omega], both uniform in r, interface ring duplicated.
/// The inner block is offset half a spacing from the pole.
class TwoPhaseGrid {
public:
    explicit TwoPhaseGrid(const ReferenceGeometry& geom);

    const ReferenceGeometry& geometry() const { return *geom_; }
    int n_theta() const { return geom_->n_theta(); }
    int n(Phase p) const { return p == Phase::Inner ? n_in_ : n_out_; }
    double spacing(Phase p) const { return p == Phase::Inner ? h_in_ : h_out_; }
    const RealArray& radii(Phase p) const { return p == Phase::Inner ? r_in_ : r_out_; }
    /// Pressure midpoints (between consecutive velocity nodes), size n-1.
    const RealArray& midpoints(Phase p) const { return p == Phase::Inner ? mid_in_ : mid_out_; }

    /// Index of the interface node (last inner node / first outer node).
    int interface_index(Phase p) const { return p == Phase::Inner ? n_in_ - 1 : 0; }

    /// Finite-volume radial weights w_i with  integral f r dr ~= sum w_i f_i
    /// over the block (pole, interface and wall cells closed consistently
    /// with the conservative stencils). Multiply by 2 pi / n_theta for areas.
    const RealArray& mass_weights(Phase p) const { return p == Phase::Inner ? mass_w_in_ : mass_w_out_; }

    /// Fourth-order (Gregory) radial weights, same convention.
    const RealArray& quad_weights(Phase p) const { return p == Phase::Inner ? quad_w_in_ : quad_w_out_; }

    double theta(int m) const { return geom_->angles()(m); }
    double dtheta() const { return 2.0 * std::numbers::pi / n_theta(); }

private:
    const ReferenceGeometry* geom_;
    int n_in_, n_out_;
    double h_in_, h_out_;
    RealArray r_in_, r_out_, mid_in_, mid_out_;
    RealArray mass_w_in_, mass_w_out_, quad_w_in_, quad_w_out_;
};

}  // namespace tpflow
