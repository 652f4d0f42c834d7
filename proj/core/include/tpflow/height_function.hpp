#pragma once

#include "tpflow/surface_field.hpp"

namespace tpflow {

/// Height of the moving interface over the reference circle, in the normal
/// direction: Gamma = { (R_sigma + gamma(theta)) e_r(theta) }.
///
/// The hard admissibility bound is sup|gamma| < epsilon/4; the runtime
/// monotonicity sweep in hanzawa.hpp governs.
class HeightFunction {
public:
    HeightFunction() = default;
    explicit HeightFunction(SurfaceField gamma);
    HeightFunction(int n, double constant) : HeightFunction(SurfaceField(n, constant)) {}

    static HeightFunction zero(int n) { return HeightFunction(SurfaceField::zero(n)); }

    const SurfaceField& field() const { return gamma_; }
    const RealArray& values() const { return gamma_.values(); }
    int size() const { return gamma_.size(); }

    double sup_norm() const { return sup_norm_; }
    double mean() const { return gamma_.mean(); }
    SurfaceField oscillation() const { return gamma_.oscillation(); }

    bool within_bound(double epsilon) const { return sup_norm_ < 0.25 * epsilon; }

    double at_angle(double theta) const { return gamma_.at_angle(theta); }
    double slope_at_angle(double theta) const { return gamma_.derivative_at_angle(theta, 1); }

    bool same_values(const HeightFunction& o) const {
        return gamma_.size() == o.gamma_.size() && (gamma_.values() == o.gamma_.values()).all();
    }

private:
    SurfaceField gamma_;
    double sup_norm_ = 0.0;
};

}  // namespace tpflow
