#include "tpflow/height_function.hpp"

namespace tpflow {

HeightFunction::HeightFunction(SurfaceField gamma) : gamma_(std::move(gamma)) {
    sup_norm_ = gamma_.sup_norm();
}

}  // namespace tpflow
