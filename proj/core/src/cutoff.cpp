#include "tpflow/cutoff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace tpflow {

namespace {

// 20-point Gauss-Legendre rule on [-1, 1], nodes computed by Newton on the
// Legendre recurrence.
struct GaussRule {
    std::array<double, 20> x{};
    std::array<double, 20> w{};
    GaussRule() {
        const int n = 20;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double xi = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = xi;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (xi * p1 - p0) / (xi * xi - 1.0);
                double dx = p1 / pp;
                xi -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            x[i] = -xi;
            x[n - 1 - i] = xi;
            w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
        }
    }
};

const GaussRule& gauss20() {
    static GaussRule rule;
    return rule;
}

double bump_unnormalized(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

struct Bump {
    double delta;
    double norm;  // integral of bump_unnormalized(t/delta) dt over [-delta, delta]
    explicit Bump(double d) : delta(d) {
        const auto& g = gauss20();
        // Integrate in 8 panels; the integrand is C-infinity with flat ends.
        double acc = 0.0;
        const int panels = 8;
        for (int p = 0; p < panels; ++p) {
            double a = -delta + 2.0 * delta * p / panels;
            double b = -delta + 2.0 * delta * (p + 1) / panels;
            for (int i = 0; i < 20; ++i) {
                double s = 0.5 * (a + b) + 0.5 * (b - a) * g.x[i];
                acc += 0.5 * (b - a) * g.w[i] * bump_unnormalized(s / delta);
            }
        }
        norm = acc;
    }
    double operator()(double s) const { return bump_unnormalized(s / delta) / norm; }
};

// Trapezoid profile and its a.e. derivative.
double trap(double v) {
    const double a0 = CutoffProfile::kDescentLo;
    const double a1 = CutoffProfile::kDescentHi;
    double u = std::abs(v);
    if (u <= a0) return 1.0;
    if (u >= a1) return 0.0;
    return (a1 - u) * CutoffProfile::kSlope;
}

double trap_prime(double v) {
    const double a0 = CutoffProfile::kDescentLo;
    const double a1 = CutoffProfile::kDescentHi;
    double u = std::abs(v);
    if (u <= a0 || u >= a1) return 0.0;
    return v > 0.0 ? -CutoffProfile::kSlope : CutoffProfile::kSlope;
}

// Integrate f(s)*bump(s) over [-delta, delta], splitting panels at the points
// where f has kinks (f piecewise smooth).
template <typename F>
double convolve_at(const Bump& bump, double u, F&& f, const std::vector<double>& kinks) {
    std::vector<double> cuts = {-bump.delta, bump.delta};
    for (double k : kinks) {
        double s = u - k;  // kink of f(u - s) at s = u - k
        if (s > -bump.delta && s < bump.delta) cuts.push_back(s);
    }
    std::sort(cuts.begin(), cuts.end());
    const auto& g = gauss20();
    double acc = 0.0;
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        double a = cuts[c], b = cuts[c + 1];
        if (b - a < 1e-300) continue;
        // two panels per smooth piece
        for (int half = 0; half < 2; ++half) {
            double aa = a + 0.5 * (b - a) * half;
            double bb = a + 0.5 * (b - a) * (half + 1);
            for (int i = 0; i < 20; ++i) {
                double s = 0.5 * (aa + bb) + 0.5 * (bb - aa) * g.x[i];
                acc += 0.5 * (bb - aa) * g.w[i] * bump(s) * f(u - s);
            }
        }
    }
    return acc;
}

}  // namespace

CutoffProfile::CutoffProfile() {
    const int n = 20001;  // uniform grid on [-1, 1], 1e-4 spacing
    h_ = 2.0 / (n - 1);
    values_.resize(n);
    derivs_.resize(n);
    Bump bump(kBumpHalfWidth);
    const std::vector<double> kinks = {-kDescentHi, -kDescentLo, kDescentLo, kDescentHi};
    for (int i = 0; i < n; ++i) {
        double u = -1.0 + i * h_;
        if (std::abs(u) <= kDescentLo - kBumpHalfWidth) {
            values_[i] = 1.0;
            derivs_[i] = 0.0;
        } else if (std::abs(u) >= kDescentHi + kBumpHalfWidth) {
            values_[i] = 0.0;
            derivs_[i] = 0.0;
        } else {
            values_[i] = convolve_at(bump, u, trap, kinks);
            derivs_[i] = convolve_at(bump, u, trap_prime, kinks);
        }
    }
    sup_slope_ = 0.0;
    for (double d : derivs_) sup_slope_ = std::max(sup_slope_, std::abs(d));
}

double CutoffProfile::chi(double r) const {
    if (std::abs(r) <= kDescentLo - kBumpHalfWidth) return 1.0;
    if (std::abs(r) >= kDescentHi + kBumpHalfWidth) return 0.0;
    const int n = static_cast<int>(values_.size());
    double t = (r + 1.0) / h_;
    int i = std::clamp(static_cast<int>(t), 0, n - 2);
    double s = t - i;  // in [0, 1]
    const double v0 = values_[i], v1 = values_[i + 1];
    const double m0 = derivs_[i] * h_, m1 = derivs_[i + 1] * h_;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * m0 +
           (-2 * s3 + 3 * s2) * v1 + (s3 - s2) * m1;
}

double CutoffProfile::chi_prime(double r) const {
    if (std::abs(r) <= kDescentLo - kBumpHalfWidth) return 0.0;
    if (std::abs(r) >= kDescentHi + kBumpHalfWidth) return 0.0;
    const int n = static_cast<int>(values_.size());
    double t = (r + 1.0) / h_;
    int i = std::clamp(static_cast<int>(t), 0, n - 2);
    double s = t - i;
    const double v0 = values_[i], v1 = values_[i + 1];
    const double m0 = derivs_[i] * h_, m1 = derivs_[i + 1] * h_;
    const double s2 = s * s;
    double d = (6 * s2 - 6 * s) * v0 + (3 * s2 - 4 * s + 1) * m0 +
               (-6 * s2 + 6 * s) * v1 + (3 * s2 - 2 * s) * m1;
    return d / h_;
}

double CutoffProfile::chi_second(double r) const {
    static const Bump bump(kBumpHalfWidth);
    double u = std::abs(r);
    double v = -kSlope * (bump(u - kDescentLo) - bump(u - kDescentHi));
    return v;  // even in r
}

const CutoffProfile& CutoffProfile::instance() {
    static CutoffProfile profile;
    return profile;
}

}  // namespace tpflow
