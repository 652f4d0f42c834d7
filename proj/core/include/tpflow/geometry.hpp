#pragma once

#include <Eigen/Core>

#include "tpflow/surface_field.hpp"

namespace tpflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Reference configuration: the disk Omega of radius r_omega, the concentric
/// reference circle Sigma of radius r_sigma, and the angular grid on Sigma.
///
/// Conventions fixed here and relied on everywhere else:
///   - nu_Sigma is the outward radial unit vector,
///   - the curvature tensor L_Sigma acts on tangent vectors as -1/r_sigma,
///     so kappa_Sigma = tr L_Sigma = -1/r_sigma and
///     div_Sigma { sigma P_Sigma } = sigma kappa_Sigma nu_Sigma for constant
///     sigma.
class ReferenceGeometry {
public:
    ReferenceGeometry(double r_omega, double r_sigma, int n_theta, int n_r_in,
                      int n_r_out, double epsilon);

    double r_omega() const { return r_omega_; }
    double r_sigma() const { return r_sigma_; }
    int n_theta() const { return n_theta_; }
    int n_r_in() const { return n_r_in_; }
    int n_r_out() const { return n_r_out_; }
    double epsilon() const { return epsilon_; }

    /// Largest half-width of a normal tube around Sigma contained in Omega,
    /// min(r_sigma, r_omega - r_sigma); also bounded by 1/|kappa_Sigma|.
    double tube_size() const;

    /// Signed distance to Sigma: negative in int(Sigma), positive in
    /// ext(Sigma), i.e. |x| - r_sigma.
    double signed_distance(const Vec2& x) const;

    /// Nearest point on Sigma. Throws GeometryError at the origin, where the
    /// projection is multi-valued.
    Vec2 metric_projection(const Vec2& x) const;

    /// Outward unit normal of Sigma at angle theta.
    static Vec2 normal(double theta);
    /// Unit tangent e_theta at angle theta.
    static Vec2 tangent(double theta);

    double kappa_sigma() const { return -1.0 / r_sigma_; }

    /// Curvature tensor L_Sigma = -grad_Sigma nu_Sigma at angle theta
    /// (rank-one, acts as -1/r_sigma on tangents).
    Mat2 curvature_tensor(double theta) const;

    /// Tangential projector P_Sigma = 1 - nu (x) nu at angle theta.
    static Mat2 tangential_projector(double theta);

    const Spectral& spectral() const { return Spectral::of_size(n_theta_); }
    const RealArray& angles() const { return spectral().angles(); }

    // Intrinsic calculus on Sigma (spectral in theta). Tangent fields are
    // e_theta components.
    TangentField surface_gradient(const SurfaceField& f) const;
    SurfaceField surface_divergence(const TangentField& v) const;
    SurfaceField laplace_beltrami(const SurfaceField& f) const;

private:
    double r_omega_;
    double r_sigma_;
    int n_theta_;
    int n_r_in_;
    int n_r_out_;
    double epsilon_;
};

}  // namespace tpflow
