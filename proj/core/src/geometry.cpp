#include "tpflow/geometry.hpp"

#include <cmath>
#include <sstream>

#include "tpflow/errors.hpp"

namespace tpflow {

ReferenceGeometry::ReferenceGeometry(double r_omega, double r_sigma, int n_theta,
                                     int n_r_in, int n_r_out, double epsilon)
    : r_omega_(r_omega),
      r_sigma_(r_sigma),
      n_theta_(n_theta),
      n_r_in_(n_r_in),
      n_r_out_(n_r_out),
      epsilon_(epsilon) {
    std::ostringstream bad;
    if (!(r_sigma > 0.0 && r_sigma < r_omega)) {
        bad << "geometry requires 0 < R_sigma < R_omega, got R_sigma=" << r_sigma
            << ", R_omega=" << r_omega;
    } else if (!(epsilon > 0.0 && epsilon < std::min(r_sigma, r_omega - r_sigma))) {
        bad << "geometry requires 0 < epsilon < min(R_sigma, R_omega - R_sigma) = "
            << std::min(r_sigma, r_omega - r_sigma) << ", got epsilon=" << epsilon;
    } else if (n_theta < 4 || (n_theta & (n_theta - 1)) != 0) {
        bad << "N_theta must be a power of two >= 4, got " << n_theta;
    } else if (n_r_in < 8 || n_r_out < 8) {
        bad << "N_r_in and N_r_out must be >= 8, got " << n_r_in << ", " << n_r_out;
    }
    if (!bad.str().empty()) throw ConfigError(bad.str());
}

double ReferenceGeometry::tube_size() const {
    return std::min(r_sigma_, r_omega_ - r_sigma_);
}

double ReferenceGeometry::signed_distance(const Vec2& x) const {
    return x.norm() - r_sigma_;
}

Vec2 ReferenceGeometry::metric_projection(const Vec2& x) const {
    const double r = x.norm();
    if (r == 0.0) {
        throw GeometryError("metric projection onto Sigma is multi-valued at the origin");
    }
    return (r_sigma_ / r) * x;
}

Vec2 ReferenceGeometry::normal(double theta) {
    return Vec2(std::cos(theta), std::sin(theta));
}

Vec2 ReferenceGeometry::tangent(double theta) {
    return Vec2(-std::sin(theta), std::cos(theta));
}

Mat2 ReferenceGeometry::curvature_tensor(double theta) const {
    const Vec2 t = tangent(theta);
    return (-1.0 / r_sigma_) * (t * t.transpose());
}

Mat2 ReferenceGeometry::tangential_projector(double theta) {
    const Vec2 t = tangent(theta);
    return t * t.transpose();
}

TangentField ReferenceGeometry::surface_gradient(const SurfaceField& f) const {
    return f.derivative(1) * (1.0 / r_sigma_);
}

SurfaceField ReferenceGeometry::surface_divergence(const TangentField& v) const {
    return v.derivative(1) * (1.0 / r_sigma_);
}

SurfaceField ReferenceGeometry::laplace_beltrami(const SurfaceField& f) const {
    return f.derivative(2) * (1.0 / (r_sigma_ * r_sigma_));
}

}  // namespace tpflow
