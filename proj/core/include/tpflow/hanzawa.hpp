#pragma once

#include "tpflow/cutoff.hpp"
#include "tpflow/geometry.hpp"
#include "tpflow/height_function.hpp"

namespace tpflow {

/// Validity report for a height function, see check_diffeo().
struct DiffeoReport {
    double sup_ratio = 0.0;        // sup|gamma| / epsilon
    double min_theta_prime = 1.0;  // min over a fine sweep of theta'(r)
    double min_det = 1.0;          // min over the sweep of det grad(Theta)
    bool within_bound = true;      // sup|gamma| < epsilon/4
    bool valid = true;             // within_bound && min_theta_prime > 0 && min_det > 0
};

/// Scalar normal-direction map theta(r; g) = r + chi(r/epsilon) g and its
/// inverse. theta is extended as the identity outside (-epsilon, epsilon).
/// Throws InterfaceValidityError when the monotonicity check
/// theta' = 1 + chi'(r/epsilon) g / epsilon <= 0 fails somewhere.
double hanzawa_theta(double r, double g, double epsilon);

/// Inverse of hanzawa_theta in r, by safeguarded Newton/bisection on the
/// monotone scalar map; absolute tolerance 1e-13.
double hanzawa_theta_inverse(double s, double g, double epsilon);

/// The Hanzawa transformation Theta for a fixed height function, with its
/// inverse and gradient. Construction validates sup|gamma| < epsilon/4 and
/// the monotonicity sweep.
class HanzawaMap {
public:
    HanzawaMap(const ReferenceGeometry& geom, HeightFunction gamma);

    const ReferenceGeometry& geometry() const { return *geom_; }
    const HeightFunction& gamma() const { return gamma_; }
    double epsilon() const { return geom_->epsilon(); }

    /// Theta(x) = x + { theta(d_Sigma(x); gamma(Pi_Sigma(x))) - d_Sigma(x) }
    ///            nu_Sigma(Pi_Sigma(x)); identity outside the 2 epsilon / 3 tube.
    Vec2 forward(const Vec2& x) const;

    /// Spatial inverse of forward(); root finding in the normal coordinate.
    Vec2 inverse(const Vec2& y) const;

    /// The tensor grad Theta with components (grad Theta)_{ij} = d_i Theta_j,
    /// from the four-term closed form. Throws InterfaceValidityError if its
    /// determinant is not positive at x.
    Mat2 gradient(const Vec2& x) const;

    double det_gradient(const Vec2& x) const;

    /// Radial profile T(r, theta) = r + chi((r - R_sigma)/epsilon) gamma(theta)
    /// so that Theta((r, theta)) = (T(r, theta), theta) in polar coordinates.
    double radial_map(double r, double theta) const;
    double radial_map_inverse(double s, double theta) const;

    DiffeoReport report() const { return report_; }

private:
    const ReferenceGeometry* geom_;
    HeightFunction gamma_;
    DiffeoReport report_;
};

/// Pure validity report for gamma on a geometry; never throws.
DiffeoReport check_diffeo(const ReferenceGeometry& geom, const HeightFunction& gamma);

}  // namespace tpflow
