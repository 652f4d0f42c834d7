#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace tpflow {

using Complex = std::complex<double>;
using RealArray = Eigen::ArrayXd;
using ComplexArray = Eigen::ArrayXcd;

/// Real-to-complex trigonometric transform on a uniform periodic grid of
/// n points (n a power of two), theta_j = 2*pi*j/n.
///
/// Coefficient convention: values(j) = sum_{k=0}^{n/2} Re(c_k e^{i k theta_j})
/// with c_0, c_{n/2} real, i.e. c_k = (2 - delta_{k0} - delta_{k,n/2})/n *
/// sum_j values(j) e^{-i k theta_j}. to_values(to_coeffs(v)) == v to roundoff.
///
/// Instances are immutable after construction and safe to share across
/// threads; transforms allocate no shared buffers.
class Spectral {
public:
    explicit Spectral(int n);
    ~Spectral();

    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    int size() const { return n_; }
    int num_modes() const { return n_ / 2 + 1; }

    /// Nodal values -> half-spectrum coefficients (size n/2+1).
    ComplexArray to_coeffs(const RealArray& values) const;

    /// Half-spectrum coefficients -> nodal values.
    RealArray to_values(const ComplexArray& coeffs) const;

    /// Spectral derivative d^order/dtheta^order of nodal values.
    /// The Nyquist mode is zeroed for odd derivative orders.
    RealArray derivative(const RealArray& values, int order = 1) const;

    /// Evaluate the trigonometric interpolant at an arbitrary angle.
    static double evaluate(const ComplexArray& coeffs, double theta);

    /// Derivative of the interpolant at an arbitrary angle.
    static double evaluate_derivative(const ComplexArray& coeffs, double theta,
                                      int order = 1);

    /// Grid angles theta_j = 2*pi*j/n.
    const RealArray& angles() const { return angles_; }

    /// Shared transform for a given size (cached; sizes are few).
    static const Spectral& of_size(int n);

private:
    int n_;
    RealArray angles_;
    void* plan_fwd_;  // fftw_plan, opaque here
    void* plan_bwd_;
};

/// (ik)^order factor applied to a coefficient array in place.
void apply_spectral_derivative(ComplexArray& coeffs, int n, int order);

}  // namespace tpflow
