#include "tpflow/surface_field.hpp"

namespace tpflow {

SurfaceField::SurfaceField(RealArray values) : values_(std::move(values)) {
    coeffs_ = Spectral::of_size(size()).to_coeffs(values_);
}

SurfaceField::SurfaceField(int n, double constant) {
    values_ = RealArray::Constant(n, constant);
    coeffs_ = ComplexArray::Zero(n / 2 + 1);
    coeffs_(0) = constant;
}

SurfaceField SurfaceField::from_coeffs(const ComplexArray& coeffs) {
    const int n = 2 * (static_cast<int>(coeffs.size()) - 1);
    return SurfaceField(Spectral::of_size(n).to_values(coeffs));
}

SurfaceField SurfaceField::derivative(int order) const {
    ComplexArray c = coeffs_;
    apply_spectral_derivative(c, size(), order);
    return from_coeffs(c);
}

SurfaceField SurfaceField::oscillation() const {
    return SurfaceField(values_ - mean());
}

}  // namespace tpflow
