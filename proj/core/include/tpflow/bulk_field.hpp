#pragma once

#include "tpflow/grid.hpp"
#include "tpflow/surface_field.hpp"

namespace tpflow {

using Grid2D = Eigen::ArrayXXd;  // rows: radial index, cols: theta index

/// Scalar field on the two-phase polar grid. The interface ring is
/// duplicated: the last inner row and the first outer row both live at
/// r = R_sigma and carry the one-sided traces. Fields supported only in the
/// continuous phase (the surfactant c) have an empty inner block.
class BulkField {
public:
    enum class Support { Both, OuterOnly };

    BulkField() = default;
    BulkField(const TwoPhaseGrid& grid, Support support, double fill = 0.0);

    Support support() const { return support_; }
    bool has_inner() const { return support_ == Support::Both; }

    Grid2D& block(Phase p) { return p == Phase::Inner ? inner_ : outer_; }
    const Grid2D& block(Phase p) const { return p == Phase::Inner ? inner_ : outer_; }
    Grid2D& inner() { return inner_; }
    const Grid2D& inner() const { return inner_; }
    Grid2D& outer() { return outer_; }
    const Grid2D& outer() const { return outer_; }

    /// One-sided traces on the interface ring.
    SurfaceField trace(Phase p) const;
    /// Jump [[f]] = outer trace - inner trace.
    SurfaceField jump() const;

    double max_abs() const;

    BulkField& operator+=(const BulkField& o);
    BulkField& operator-=(const BulkField& o);
    BulkField& operator*=(double s);

private:
    Support support_ = Support::Both;
    Grid2D inner_;
    Grid2D outer_;
};

/// Velocity-like field: polar components (e_r, e_theta) on the two-phase grid.
struct VectorBulkField {
    BulkField r;      // radial component
    BulkField theta;  // tangential component

    VectorBulkField() = default;
    explicit VectorBulkField(const TwoPhaseGrid& grid, double fill = 0.0)
        : r(grid, BulkField::Support::Both, fill), theta(grid, BulkField::Support::Both, fill) {}

    double max_abs() const { return std::max(r.max_abs(), theta.max_abs()); }
};

}  // namespace tpflow
