#pragma once

#include <memory>
#include <optional>

#include "tpflow/bulk_field.hpp"
#include "tpflow/hanzawa.hpp"

namespace tpflow {

/// 2x2 tensor field in the local polar basis: component (a)(b) multiplies
/// e_a (x) e_b with a, b in {r, t}.
struct TensorField2 {
    Grid2D rr, rt, tr, tt;
};

/// Vector field in the local polar basis.
struct PolarVectorField {
    Grid2D r, t;
};

/// Immutable per-height-function cache: the radial map T(r, theta) and its
/// derivatives (closed forms through the tabulated cutoff, never grid
/// differences across the cutoff), the Jacobian-derived multiplication
/// operator fields, the transformed surface geometry, and finite-difference
/// stencils on the mapped radial nodes s_i(theta) = T(r_i, theta).
///
/// Differentiating bulk fields with respect to the mapped coordinate keeps
/// the cutoff out of the differentiated data entirely: it only moves node
/// positions. theta derivatives at fixed r are spectral.
class OperatorContext {
public:
    OperatorContext(const TwoPhaseGrid& grid, const HeightFunction& gamma,
                    SurfaceField dt_gamma, const VectorBulkField* u_star);

    /// Context with zero interface velocity and zero reference velocity.
    OperatorContext(const TwoPhaseGrid& grid, const HeightFunction& gamma);

    const TwoPhaseGrid& grid() const { return *grid_; }
    const ReferenceGeometry& geometry() const { return grid_->geometry(); }
    const HeightFunction& gamma() const { return gamma_; }
    const SurfaceField& dt_gamma() const { return dt_gamma_; }
    const VectorBulkField& u_star() const { return u_star_; }
    const HanzawaMap& map() const { return map_; }

    /// Throws StaleContextError unless this context was built from `g`.
    void require_matches(const HeightFunction& g) const;

    // ----- surface caches (all SurfaceField over theta) -----
    const SurfaceField& rho_curve() const { return rho_c_; }      // R_sigma + gamma
    const SurfaceField& gamma_prime() const { return gamma_p_; }  // d gamma / d theta
    const SurfaceField& a_theta() const { return a_theta_; }      // (N grad_S gamma) . e_theta
    const SurfaceField& n_factor() const { return n_factor_; }    // tangential factor of N(gamma)
    const SurfaceField& mu() const { return mu_; }
    const SurfaceField& kappa_gamma() const { return kappa_; }
    const SurfaceField& arc_element() const { return j_arc_; }    // sqrt(rho^2 + rho'^2)
    const SurfaceField& g_sigma() const { return g_sigma_; }      // e_t . G_Sigma e_t
    const SurfaceField& a_sigma() const { return a_sigma_; }      // first-order coeff of L_Gamma
    const SurfaceField& l_sigma() const { return l_sigma_; }      // second-order coeff of L_Gamma
    /// Transformed unit normal nu_Gamma = mu (e_r - a_theta e_theta).
    Vec2 nu_gamma(int m) const;

    // ----- bulk caches, per phase -----
    const Grid2D& T(Phase p) const { return blk(p).T; }
    const Grid2D& T_r(Phase p) const { return blk(p).Tr; }
    const Grid2D& T_theta(Phase p) const { return blk(p).Tth; }
    const Grid2D& T_rr(Phase p) const { return blk(p).Trr; }
    const Grid2D& T_rtheta(Phase p) const { return blk(p).Trth; }
    const Grid2D& T_thetatheta(Phase p) const { return blk(p).Tthth; }
    const Grid2D& det_jacobian(Phase p) const { return blk(p).detJ; }
    const Grid2D& chi(Phase p) const { return blk(p).chi; }

    /// Multiplication operator fields (polar-basis components):
    /// G = 1 - B^T, D = 1 - B, L = 1 - B B^T with B = (Jacobian)^{-1},
    /// A = -(Laplacian of the inverse map) composed with the map.
    const TensorField2& op_G(Phase p) const { return blk(p).G; }
    const TensorField2& op_D(Phase p) const { return blk(p).D; }
    const TensorField2& op_L(Phase p) const { return blk(p).L; }
    const TensorField2& inv_jacobian(Phase p) const { return blk(p).B; }
    const PolarVectorField& op_A(Phase p) const { return blk(p).A; }

    /// d Theta / dt = chi * dt_gamma * e_r (radial component only).
    const Grid2D& dt_theta_map(Phase p) const { return blk(p).dtTheta; }

    // ----- derivatives -----
    /// d^order/ds^order on the mapped radial nodes of one block;
    /// accuracy 2 (width-3 stencils, the solver's order) or 4 (width-5, the
    /// operator module's order). parity is the reflection sign through the
    /// pole (+1 for scalars and Cartesian components, -1 for polar vector
    /// components); it only affects the inner block's near-pole stencils.
    Grid2D deriv_s(Phase p, const Grid2D& f, int order, int accuracy, int parity = +1) const;

    /// Spectral d^order/dtheta^order along rows.
    Grid2D deriv_theta(Phase p, const Grid2D& f, int order) const;

    /// Interpolate node values to midpoints (2nd order average).
    static RealArray to_midpoints(const RealArray& nodal);

private:
    struct BlockCache {
        Grid2D T, Tr, Tth, Trr, Trth, Tthth, detJ, chi;
        TensorField2 B, G, D, L;
        PolarVectorField A;
        Grid2D dtTheta;
        // Fornberg weights on mapped nodes: [accuracy/2 - 1][order - 1]
        // laid out (node, slot) per theta column.
        std::vector<Eigen::ArrayXXd> w_ord1_acc2, w_ord2_acc2, w_ord1_acc4, w_ord2_acc4;
    };

    const BlockCache& blk(Phase p) const { return p == Phase::Inner ? inner_ : outer_; }

    void build_surface();
    void build_block(Phase p, BlockCache& b);
    void build_stencils(Phase p, BlockCache& b);

    const TwoPhaseGrid* grid_;
    HeightFunction gamma_;
    SurfaceField dt_gamma_;
    VectorBulkField u_star_;
    HanzawaMap map_;

    SurfaceField rho_c_, gamma_p_, gamma_pp_, a_theta_, da_theta_, n_factor_, mu_, kappa_,
        j_arc_, g_sigma_, a_sigma_, l_sigma_;
    BlockCache inner_, outer_;
};

}  // namespace tpflow
