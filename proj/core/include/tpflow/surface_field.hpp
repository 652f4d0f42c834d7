#pragma once

#include "tpflow/spectral.hpp"

namespace tpflow {

/// Scalar field on the reference circle, sampled at the uniform angular grid.
/// Trigonometric coefficients are computed at construction and kept
/// consistent with the nodal values; instances are immutable.
///
/// Tangent vector fields on the circle are represented by their e_theta
/// component, so TangentField is an alias.
class SurfaceField {
public:
    SurfaceField() = default;
    explicit SurfaceField(RealArray values);
    SurfaceField(int n, double constant);

    static SurfaceField zero(int n) { return SurfaceField(n, 0.0); }
    static SurfaceField from_coeffs(const ComplexArray& coeffs);

    int size() const { return static_cast<int>(values_.size()); }
    const RealArray& values() const { return values_; }
    const ComplexArray& coeffs() const { return coeffs_; }
    double operator()(int j) const { return values_(j); }

    /// d^order/dtheta^order, spectrally.
    SurfaceField derivative(int order = 1) const;

    /// Trigonometric interpolation at an arbitrary angle.
    double at_angle(double theta) const { return Spectral::evaluate(coeffs_, theta); }
    double derivative_at_angle(double theta, int order = 1) const {
        return Spectral::evaluate_derivative(coeffs_, theta, order);
    }

    double mean() const { return coeffs_(0).real(); }
    double sup_norm() const { return values_.abs().maxCoeff(); }
    double max() const { return values_.maxCoeff(); }
    double min() const { return values_.minCoeff(); }

    /// Oscillation: field minus its angular mean.
    SurfaceField oscillation() const;

    SurfaceField operator+(const SurfaceField& o) const { return SurfaceField(values_ + o.values_); }
    SurfaceField operator-(const SurfaceField& o) const { return SurfaceField(values_ - o.values_); }
    SurfaceField operator*(double s) const { return SurfaceField(values_ * s); }
    SurfaceField cwise_mul(const SurfaceField& o) const { return SurfaceField(values_ * o.values_); }

private:
    RealArray values_;
    ComplexArray coeffs_;
};

using TangentField = SurfaceField;

}  // namespace tpflow
