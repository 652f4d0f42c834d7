#pragma once

#include <vector>

namespace tpflow {

/// Smooth cutoff chi with chi(r) = 1 for |r| <= 1/3, chi(r) = 0 for
/// |r| >= 2/3, 0 <= chi <= 1 and max |chi'| < 4.
///
/// Construction: the piecewise-linear descent of slope 3.6 (width 1/3.6,
/// centered in [1/3, 2/3]) convolved with a compactly supported C-infinity
/// bump of half-width 0.027, which keeps both plateaus exact. The result is
/// tabulated once on a uniform grid of [-1, 1] together with its first
/// derivative; evaluation is cubic Hermite on that table, and chi' is the
/// exact derivative of the same cubic so that root finding on theta stays
/// consistent.
class CutoffProfile {
public:
    CutoffProfile();

    double chi(double r) const;
    double chi_prime(double r) const;
    /// Second derivative, from the closed convolution form (the linear
    /// descent differentiates to point masses at the two kinks).
    double chi_second(double r) const;

    double sup_slope() const { return sup_slope_; }

    int table_size() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& table_values() const { return values_; }
    const std::vector<double>& table_derivatives() const { return derivs_; }

    /// Shared immutable instance (the profile is parameter-free).
    static const CutoffProfile& instance();

    // Construction parameters, exposed for tests.
    static constexpr double kSlope = 3.6;
    static constexpr double kDescentLo = 0.5 - 1.0 / (2.0 * kSlope);
    static constexpr double kDescentHi = 0.5 + 1.0 / (2.0 * kSlope);
    static constexpr double kBumpHalfWidth = 0.027;

private:
    double h_;                    // table spacing
    std::vector<double> values_;  // chi on [-1, 1]
    std::vector<double> derivs_;  // chi' on [-1, 1]
    double sup_slope_;
};

}  // namespace tpflow
