#include "tpflow/hanzawa.hpp"

#include <cmath>
#include <sstream>

#include "tpflow/errors.hpp"

namespace tpflow {

namespace {

// Support of chi(./epsilon) in the signed-distance variable.
double support_radius(double epsilon) {
    return epsilon * (CutoffProfile::kDescentHi + CutoffProfile::kBumpHalfWidth);
}

void check_monotone(double g, double epsilon) {
    const auto& cut = CutoffProfile::instance();
    if (1.0 - cut.sup_slope() * std::abs(g) / epsilon > 0.0) return;
    // The cheap bound failed; sweep theta' before rejecting.
    double min_tp = 1.0;
    const int n = 4096;
    for (int i = 0; i <= n; ++i) {
        double r = -epsilon + 2.0 * epsilon * i / n;
        min_tp = std::min(min_tp, 1.0 + cut.chi_prime(r / epsilon) * g / epsilon);
    }
    if (min_tp <= 0.0) {
        std::ostringstream msg;
        msg << "hanzawa theta not monotone: min theta' = " << min_tp
            << " for |g| = " << std::abs(g) << ", epsilon = " << epsilon;
        throw InterfaceValidityError(msg.str());
    }
}

}  // namespace

double hanzawa_theta(double r, double g, double epsilon) {
    check_monotone(g, epsilon);
    if (std::abs(r) >= support_radius(epsilon)) return r;
    return r + CutoffProfile::instance().chi(r / epsilon) * g;
}

double hanzawa_theta_inverse(double s, double g, double epsilon) {
    check_monotone(g, epsilon);
    const auto& cut = CutoffProfile::instance();
    const double supp = support_radius(epsilon);
    if (std::abs(s) >= supp + std::abs(g)) return s;

    auto f = [&](double r) { return r + cut.chi(r / epsilon) * g - s; };
    double lo = s - std::abs(g), hi = s + std::abs(g);
    double flo = f(lo), fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0) {  // widen defensively; theta is monotone
        lo -= std::abs(g) + 1e-3 * epsilon;
        hi += std::abs(g) + 1e-3 * epsilon;
        flo = f(lo);
        fhi = f(hi);
    }
    double r = s - cut.chi(s / epsilon) * g;  // good initial guess
    r = std::clamp(r, lo, hi);
    for (int it = 0; it < 100; ++it) {
        double fr = f(r);
        if (fr > 0.0) hi = r;
        else lo = r;
        double tp = 1.0 + cut.chi_prime(r / epsilon) * g / epsilon;
        double step = fr / tp;
        double next = r - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - r) < 1e-13) return next;
        r = next;
    }
    return r;
}

HanzawaMap::HanzawaMap(const ReferenceGeometry& geom, HeightFunction gamma)
    : geom_(&geom), gamma_(std::move(gamma)) {
    if (gamma_.size() != geom.n_theta()) {
        throw InterfaceValidityError("height function resolution does not match geometry");
    }
    report_ = check_diffeo(geom, gamma_);
    if (!report_.valid) {
        std::ostringstream msg;
        msg << "height function is not admissible: sup|gamma|/epsilon = " << report_.sup_ratio
            << " (bound 0.25), min theta' = " << report_.min_theta_prime
            << ", min det grad(Theta) = " << report_.min_det;
        throw InterfaceValidityError(msg.str());
    }
}

double HanzawaMap::radial_map(double r, double theta) const {
    const double d = r - geom_->r_sigma();
    if (std::abs(d) >= support_radius(epsilon())) return r;
    return r + CutoffProfile::instance().chi(d / epsilon()) * gamma_.at_angle(theta);
}

double HanzawaMap::radial_map_inverse(double s, double theta) const {
    const double d = s - geom_->r_sigma();
    return geom_->r_sigma() + hanzawa_theta_inverse(d, gamma_.at_angle(theta), epsilon());
}

Vec2 HanzawaMap::forward(const Vec2& x) const {
    const double d = geom_->signed_distance(x);
    if (std::abs(d) >= support_radius(epsilon())) return x;
    const double ang = std::atan2(x.y(), x.x());
    const double g = gamma_.at_angle(ang);
    const double shift = CutoffProfile::instance().chi(d / epsilon()) * g;
    return x + shift * ReferenceGeometry::normal(ang);
}

Vec2 HanzawaMap::inverse(const Vec2& y) const {
    const double d = geom_->signed_distance(y);
    const double ang = std::atan2(y.y(), y.x());
    const double g = gamma_.at_angle(ang);
    if (std::abs(d) >= support_radius(epsilon()) + std::abs(g)) return y;
    const double r = hanzawa_theta_inverse(d, g, epsilon());
    return y + (r - d) * ReferenceGeometry::normal(ang);
}

Mat2 HanzawaMap::gradient(const Vec2& x) const {
    const auto& cut = CutoffProfile::instance();
    const double d = geom_->signed_distance(x);
    Mat2 grad = Mat2::Identity();
    if (std::abs(d) >= support_radius(epsilon())) return grad;

    const double ang = std::atan2(x.y(), x.x());
    const double g = gamma_.at_angle(ang);
    const double gp = gamma_.slope_at_angle(ang);
    const double chi = cut.chi(d / epsilon());
    const double chi_p = cut.chi_prime(d / epsilon());
    const double rs = geom_->r_sigma();

    const Vec2 er = ReferenceGeometry::normal(ang);
    const Vec2 et = ReferenceGeometry::tangent(ang);

    // 1 + (chi'/eps) gamma (1 - P_Sigma)
    grad += (chi_p * g / epsilon()) * (er * er.transpose());
    // chi N(d) grad_Sigma gamma (x) nu_Sigma ; N(d) scales tangents by R/(R+d)
    grad += (chi * gp / (rs + d)) * (et * er.transpose());
    // - chi gamma N(d) L_Sigma ; L_Sigma acts as -1/R on tangents
    grad += (chi * g / (rs + d)) * (et * et.transpose());

    const double det = grad(0, 0) * grad(1, 1) - grad(0, 1) * grad(1, 0);
    if (det <= 0.0) {
        throw InterfaceValidityError("grad(Theta) is not orientation preserving at the sample point");
    }
    return grad;
}

double HanzawaMap::det_gradient(const Vec2& x) const {
    const double d = geom_->signed_distance(x);
    if (std::abs(d) >= support_radius(epsilon())) return 1.0;
    const auto& cut = CutoffProfile::instance();
    const double ang = std::atan2(x.y(), x.x());
    const double g = gamma_.at_angle(ang);
    const double r = x.norm();
    const double t_r = 1.0 + cut.chi_prime(d / epsilon()) * g / epsilon();
    const double t_over_r = 1.0 + cut.chi(d / epsilon()) * g / r;
    return t_r * t_over_r;
}

DiffeoReport check_diffeo(const ReferenceGeometry& geom, const HeightFunction& gamma) {
    const auto& cut = CutoffProfile::instance();
    const double eps = geom.epsilon();
    DiffeoReport rep;
    rep.sup_ratio = gamma.sup_norm() / eps;
    rep.within_bound = gamma.sup_norm() < 0.25 * eps;

    // Sweep theta' and det grad(Theta) on a fine normal grid for every node
    // angle; on a circle the minimum over node angles is the minimum.
    const int nr = 512;
    for (int j = 0; j < gamma.size(); ++j) {
        const double g = gamma.values()(j);
        for (int i = 0; i <= nr; ++i) {
            const double d = -eps + 2.0 * eps * i / nr;
            const double tp = 1.0 + cut.chi_prime(d / eps) * g / eps;
            rep.min_theta_prime = std::min(rep.min_theta_prime, tp);
            const double r = geom.r_sigma() + d;
            if (r > 0.0) {
                const double det = tp * (1.0 + cut.chi(d / eps) * g / r);
                rep.min_det = std::min(rep.min_det, det);
            }
        }
    }
    rep.valid = rep.within_bound && rep.min_theta_prime > 0.0 && rep.min_det > 0.0;
    return rep;
}

}  // namespace tpflow
