#pragma once

#include <functional>
#include <string>

#include "tpflow/grid.hpp"

namespace tpflow {

/// Surface tension as a function of surface concentration, sigma(s) > 0 and
/// sigma'(s) < 0 on (0, s_max) for the built-in kinds.
class EquationOfState {
public:
    enum class Kind { Linear, Szyszkowski, User };

    /// sigma(s) = sigma0 - beta s.
    static EquationOfState linear(double sigma0, double beta);
    /// sigma(s) = sigma0 + E log(1 - s / s_inf).
    static EquationOfState szyszkowski(double sigma0, double E, double s_inf);
    static EquationOfState user(std::function<double(double)> sigma,
                                std::function<double(double)> sigma_prime,
                                std::function<double(double)> sigma_second,
                                double s_max);

    Kind kind() const { return kind_; }
    const char* kind_name() const;
    double s_max() const { return s_max_; }

    double sigma(double s) const;
    double sigma_prime(double s) const;
    double sigma_second(double s) const;

    double param_sigma0() const { return sigma0_; }
    double param_beta() const { return beta_; }
    double param_elasticity() const { return elasticity_; }
    double param_s_inf() const { return s_inf_; }

private:
    EquationOfState() = default;
    void check_domain(double s) const;

    Kind kind_ = Kind::Linear;
    double sigma0_ = 0.0, beta_ = 0.0, elasticity_ = 0.0, s_inf_ = 0.0;
    double s_max_ = 0.0;
    std::function<double(double)> fs_, fsp_, fspp_;
};

/// Adsorption isotherm c_Gamma = alpha([c]); alpha' > 0 everywhere.
class Isotherm {
public:
    enum class Kind { Henry, Langmuir };

    /// alpha(c) = K c.
    static Isotherm henry(double K);
    /// alpha(c) = s_inf K c / (1 + K c).
    static Isotherm langmuir(double s_inf, double K);

    Kind kind() const { return kind_; }
    const char* kind_name() const;

    double alpha(double c) const;
    double alpha_prime(double c) const;

    double param_K() const { return K_; }
    double param_s_inf() const { return s_inf_; }

private:
    Isotherm() = default;
    Kind kind_ = Kind::Henry;
    double K_ = 0.0, s_inf_ = 0.0;
};

/// Fluid and surfactant parameters plus the constitutive pair. The chemical
/// potential integrates sigma'(r)/r from the reference concentration s_ref
/// (the paper's lower limit 0 diverges whenever sigma'(0) != 0); shifting
/// s_ref moves mu_Gamma by a constant and the energies by a term linear in
/// the conserved total mass, so the Lyapunov structure is unaffected.
class MaterialModel {
public:
    MaterialModel(double rho_minus, double rho_plus, double eta_minus, double eta_plus,
                  double d, double d_gamma, EquationOfState eos, Isotherm isotherm,
                  double s_ref);

    double rho(Phase p) const { return p == Phase::Inner ? rho_minus_ : rho_plus_; }
    double eta(Phase p) const { return p == Phase::Inner ? eta_minus_ : eta_plus_; }
    double rho_minus() const { return rho_minus_; }
    double rho_plus() const { return rho_plus_; }
    double eta_minus() const { return eta_minus_; }
    double eta_plus() const { return eta_plus_; }
    double diffusivity() const { return d_; }
    double surface_diffusivity() const { return d_gamma_; }
    double s_ref() const { return s_ref_; }
    const EquationOfState& eos() const { return eos_; }
    const Isotherm& isotherm() const { return isotherm_; }

    /// mu_Gamma(s) = -int_{s_ref}^{s} sigma'(r)/r dr; closed forms for the
    /// built-in equations of state, adaptive quadrature otherwise.
    double chemical_potential(double s) const;

    /// phi(s) = int_0^s mu_Gamma(alpha(r)) dr, with phi(0) = 0; the
    /// integrable logarithmic singularity at zero is handled by a stretched
    /// quadrature in the generic path.
    double phi(double s) const;

    /// phi_Gamma(s) = sigma(s) + s mu_Gamma(s).
    double phi_gamma(double s) const;

    /// phi''(s) = -sigma'(alpha(s)) alpha'(s) / alpha(s).
    double phi_second(double s) const;
    /// phi_Gamma''(s) = -sigma'(s)/s.
    double phi_gamma_second(double s) const;

private:
    double rho_minus_, rho_plus_, eta_minus_, eta_plus_, d_, d_gamma_, s_ref_;
    EquationOfState eos_;
    Isotherm isotherm_;
};

}  // namespace tpflow
