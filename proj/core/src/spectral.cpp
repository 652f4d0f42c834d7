#include "tpflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace tpflow {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Spectral::Spectral(int n) : n_(n) {
    if (n < 4 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("Spectral: size must be a power of two >= 4");
    }
    angles_ = RealArray::LinSpaced(n, 0.0, 2.0 * std::numbers::pi * (n - 1) / n);

    // Plans are created once per size with FFTW_ESTIMATE (deterministic) and
    // executed via the new-array interface on caller buffers.
    std::lock_guard<std::mutex> lock(planner_mutex());
    std::vector<double> rbuf(static_cast<size_t>(n));
    std::vector<fftw_complex> cbuf(static_cast<size_t>(n / 2 + 1));
    plan_fwd_ = fftw_plan_dft_r2c_1d(n, rbuf.data(), cbuf.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft_c2r_1d(n, cbuf.data(), rbuf.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Spectral::~Spectral() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

ComplexArray Spectral::to_coeffs(const RealArray& values) const {
    if (values.size() != n_) throw std::invalid_argument("Spectral::to_coeffs: size mismatch");
    std::vector<double> in(values.data(), values.data() + n_);
    ComplexArray out(n_ / 2 + 1);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    out *= 2.0 / n_;
    out(0) *= 0.5;
    out(n_ / 2) *= 0.5;
    return out;
}

RealArray Spectral::to_values(const ComplexArray& coeffs) const {
    if (coeffs.size() != n_ / 2 + 1) throw std::invalid_argument("Spectral::to_values: size mismatch");
    ComplexArray in = coeffs;
    in *= 0.5;
    in(0) *= 2.0;
    in(n_ / 2) *= 2.0;
    RealArray out(n_);
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_bwd_),
                         reinterpret_cast<fftw_complex*>(in.data()), out.data());
    return out;
}

void apply_spectral_derivative(ComplexArray& coeffs, int n, int order) {
    for (int k = 0; k <= n / 2; ++k) {
        Complex f = std::pow(Complex(0.0, static_cast<double>(k)), order);
        coeffs(k) *= f;
    }
    if (order % 2 != 0) coeffs(n / 2) = 0.0;
}

RealArray Spectral::derivative(const RealArray& values, int order) const {
    ComplexArray c = to_coeffs(values);
    apply_spectral_derivative(c, n_, order);
    return to_values(c);
}

double Spectral::evaluate(const ComplexArray& coeffs, double theta) {
    const int m = static_cast<int>(coeffs.size()) - 1;
    double acc = coeffs(0).real();
    for (int k = 1; k <= m; ++k) {
        acc += coeffs(k).real() * std::cos(k * theta) - coeffs(k).imag() * std::sin(k * theta);
    }
    return acc;
}

double Spectral::evaluate_derivative(const ComplexArray& coeffs, double theta, int order) {
    const int m = static_cast<int>(coeffs.size()) - 1;
    const int n = 2 * m;
    ComplexArray c = coeffs;
    apply_spectral_derivative(c, n, order);
    return evaluate(c, theta);
}

const Spectral& Spectral::of_size(int n) {
    static std::mutex m;
    static std::map<int, std::unique_ptr<Spectral>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<Spectral>(n)).first;
    }
    return *it->second;
}

}  // namespace tpflow
