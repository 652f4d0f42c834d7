#include "tpflow/bulk_field.hpp"

#include "tpflow/errors.hpp"

namespace tpflow {

BulkField::BulkField(const TwoPhaseGrid& grid, Support support, double fill)
    : support_(support) {
    if (support == Support::Both) {
        inner_ = Grid2D::Constant(grid.n(Phase::Inner), grid.n_theta(), fill);
    }
    outer_ = Grid2D::Constant(grid.n(Phase::Outer), grid.n_theta(), fill);
}

SurfaceField BulkField::trace(Phase p) const {
    if (p == Phase::Inner) {
        if (!has_inner()) throw Error("BulkField: no inner block to trace");
        return SurfaceField(inner_.row(inner_.rows() - 1).transpose());
    }
    return SurfaceField(outer_.row(0).transpose());
}

SurfaceField BulkField::jump() const {
    return SurfaceField(trace(Phase::Outer).values() - trace(Phase::Inner).values());
}

double BulkField::max_abs() const {
    double m = outer_.size() > 0 ? outer_.abs().maxCoeff() : 0.0;
    if (has_inner() && inner_.size() > 0) m = std::max(m, inner_.abs().maxCoeff());
    return m;
}

BulkField& BulkField::operator+=(const BulkField& o) {
    if (has_inner()) inner_ += o.inner_;
    outer_ += o.outer_;
    return *this;
}

BulkField& BulkField::operator-=(const BulkField& o) {
    if (has_inner()) inner_ -= o.inner_;
    outer_ -= o.outer_;
    return *this;
}

BulkField& BulkField::operator*=(double s) {
    if (has_inner()) inner_ *= s;
    outer_ *= s;
    return *this;
}

}  // namespace tpflow
