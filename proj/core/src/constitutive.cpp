#include "tpflow/constitutive.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tpflow/errors.hpp"

namespace tpflow {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << "material coefficient " << name << " must be strictly positive, got " << v;
        throw ConfigError(msg.str());
    }
}

/// Integral of f over [a, b] by doubling composite Simpson until the result
/// settles to ~1e-12 relative.
template <typename F>
double integrate(F&& f, double a, double b) {
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 64; n <= 1 << 20; n *= 2) {
        const double h = (b - a) / n;
        double acc = f(a) + f(b);
        for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
        acc *= h / 3.0;
        if (std::abs(acc - prev) <= 1e-12 * (1.0 + std::abs(acc))) return acc;
        prev = acc;
    }
    return prev;
}

}  // namespace

EquationOfState EquationOfState::linear(double sigma0, double beta) {
    require_positive(sigma0, "sigma0");
    require_positive(beta, "beta");
    EquationOfState e;
    e.kind_ = Kind::Linear;
    e.sigma0_ = sigma0;
    e.beta_ = beta;
    e.s_max_ = sigma0 / beta;  // keep sigma > 0
    return e;
}

EquationOfState EquationOfState::szyszkowski(double sigma0, double E, double s_inf) {
    require_positive(sigma0, "sigma0");
    require_positive(E, "E");
    require_positive(s_inf, "s_inf");
    EquationOfState e;
    e.kind_ = Kind::Szyszkowski;
    e.sigma0_ = sigma0;
    e.elasticity_ = E;
    e.s_inf_ = s_inf;
    e.s_max_ = s_inf * (1.0 - std::exp(-sigma0 / E));  // sigma > 0 and s < s_inf
    return e;
}

EquationOfState EquationOfState::user(std::function<double(double)> sigma,
                                      std::function<double(double)> sigma_prime,
                                      std::function<double(double)> sigma_second,
                                      double s_max) {
    require_positive(s_max, "s_max");
    EquationOfState e;
    e.kind_ = Kind::User;
    e.fs_ = std::move(sigma);
    e.fsp_ = std::move(sigma_prime);
    e.fspp_ = std::move(sigma_second);
    e.s_max_ = s_max;
    return e;
}

const char* EquationOfState::kind_name() const {
    switch (kind_) {
        case Kind::Linear: return "linear";
        case Kind::Szyszkowski: return "szyszkowski";
        case Kind::User: return "user-tabulated";
    }
    return "?";
}

void EquationOfState::check_domain(double s) const {
    if (!(s >= 0.0) || s >= s_max_) {
        std::ostringstream msg;
        msg << "surface concentration " << s << " outside admissible [0, " << s_max_
            << ") of the " << kind_name() << " equation of state";
        throw ConstitutiveDomainError(msg.str());
    }
}

double EquationOfState::sigma(double s) const {
    check_domain(s);
    switch (kind_) {
        case Kind::Linear: return sigma0_ - beta_ * s;
        case Kind::Szyszkowski: return sigma0_ + elasticity_ * std::log1p(-s / s_inf_);
        case Kind::User: return fs_(s);
    }
    return 0.0;
}

double EquationOfState::sigma_prime(double s) const {
    check_domain(s);
    switch (kind_) {
        case Kind::Linear: return -beta_;
        case Kind::Szyszkowski: return -elasticity_ / (s_inf_ - s);
        case Kind::User: return fsp_(s);
    }
    return 0.0;
}

double EquationOfState::sigma_second(double s) const {
    check_domain(s);
    switch (kind_) {
        case Kind::Linear: return 0.0;
        case Kind::Szyszkowski: return -elasticity_ / ((s_inf_ - s) * (s_inf_ - s));
        case Kind::User: return fspp_(s);
    }
    return 0.0;
}

Isotherm Isotherm::henry(double K) {
    require_positive(K, "K");
    Isotherm a;
    a.kind_ = Kind::Henry;
    a.K_ = K;
    return a;
}

Isotherm Isotherm::langmuir(double s_inf, double K) {
    require_positive(K, "K");
    require_positive(s_inf, "s_inf");
    Isotherm a;
    a.kind_ = Kind::Langmuir;
    a.K_ = K;
    a.s_inf_ = s_inf;
    return a;
}

const char* Isotherm::kind_name() const {
    return kind_ == Kind::Henry ? "henry" : "langmuir";
}

double Isotherm::alpha(double c) const {
    if (!(c >= 0.0)) throw ConstitutiveDomainError("bulk concentration must be >= 0");
    if (kind_ == Kind::Henry) return K_ * c;
    return s_inf_ * K_ * c / (1.0 + K_ * c);
}

double Isotherm::alpha_prime(double c) const {
    if (!(c >= 0.0)) throw ConstitutiveDomainError("bulk concentration must be >= 0");
    if (kind_ == Kind::Henry) return K_;
    const double q = 1.0 + K_ * c;
    return s_inf_ * K_ / (q * q);
}

MaterialModel::MaterialModel(double rho_minus, double rho_plus, double eta_minus,
                             double eta_plus, double d, double d_gamma,
                             EquationOfState eos, Isotherm isotherm, double s_ref)
    : rho_minus_(rho_minus),
      rho_plus_(rho_plus),
      eta_minus_(eta_minus),
      eta_plus_(eta_plus),
      d_(d),
      d_gamma_(d_gamma),
      s_ref_(s_ref),
      eos_(std::move(eos)),
      isotherm_(std::move(isotherm)) {
    require_positive(rho_minus, "rho-");
    require_positive(rho_plus, "rho+");
    require_positive(eta_minus, "eta-");
    require_positive(eta_plus, "eta+");
    require_positive(d, "d");
    require_positive(d_gamma, "d_Gamma");
    require_positive(s_ref, "s_ref");
    if (s_ref >= eos_.s_max()) {
        throw ConfigError("s_ref must lie inside the admissible domain of the equation of state");
    }
}

double MaterialModel::chemical_potential(double s) const {
    if (!(s > 0.0) || s >= eos_.s_max()) {
        std::ostringstream msg;
        msg << "chemical potential needs 0 < s < " << eos_.s_max() << ", got " << s;
        throw ConstitutiveDomainError(msg.str());
    }
    switch (eos_.kind()) {
        case EquationOfState::Kind::Linear:
            return eos_.param_beta() * std::log(s / s_ref_);
        case EquationOfState::Kind::Szyszkowski: {
            const double si = eos_.param_s_inf();
            return eos_.param_elasticity() / si *
                   std::log(s * (si - s_ref_) / (s_ref_ * (si - s)));
        }
        case EquationOfState::Kind::User:
            return -integrate([&](double r) { return eos_.sigma_prime(r) / r; },
                              s_ref_, s);
    }
    return 0.0;
}

double MaterialModel::phi(double s) const {
    if (s == 0.0) return 0.0;
    if (!(s > 0.0)) throw ConstitutiveDomainError("phi needs s >= 0");

    const bool henry = isotherm_.kind() == Isotherm::Kind::Henry;
    const double K = isotherm_.param_K();
    if (eos_.kind() == EquationOfState::Kind::Linear && henry) {
        // mu(alpha(r)) = beta log(K r / s_ref)
        (void)isotherm_.alpha(s);  // domain check
        return eos_.param_beta() * s * (std::log(K * s / s_ref_) - 1.0);
    }
    if (eos_.kind() == EquationOfState::Kind::Szyszkowski &&
        isotherm_.kind() == Isotherm::Kind::Langmuir &&
        isotherm_.param_s_inf() == eos_.param_s_inf()) {
        // alpha/(s_inf - alpha) = K r collapses the logarithm:
        // mu(alpha(r)) = (E/s_inf) log(K r (s_inf - s_ref) / s_ref)
        const double si = eos_.param_s_inf();
        if (isotherm_.alpha(s) >= eos_.s_max()) {
            throw ConstitutiveDomainError("phi: alpha(s) outside the equation of state domain");
        }
        return eos_.param_elasticity() / si * s *
               (std::log(K * s * (si - s_ref_) / s_ref_) - 1.0);
    }

    // Generic path: substitute r = s u^3 so that the logarithmic endpoint
    // singularity of mu(alpha(r)) integrates smoothly.
    if (isotherm_.alpha(s) >= eos_.s_max()) {
        throw ConstitutiveDomainError("phi: alpha(s) outside the equation of state domain");
    }
    auto f = [&](double u) {
        if (u <= 0.0) return 0.0;
        return 3.0 * s * u * u * chemical_potential(isotherm_.alpha(s * u * u * u));
    };
    return integrate(f, 0.0, 1.0);
}

double MaterialModel::phi_gamma(double s) const {
    return eos_.sigma(s) + s * chemical_potential(s);
}

double MaterialModel::phi_second(double s) const {
    const double a = isotherm_.alpha(s);
    if (!(a > 0.0)) throw ConstitutiveDomainError("phi'' needs alpha(s) > 0");
    return -eos_.sigma_prime(a) * isotherm_.alpha_prime(s) / a;
}

double MaterialModel::phi_gamma_second(double s) const {
    if (!(s > 0.0)) throw ConstitutiveDomainError("phi_Gamma'' needs s > 0");
    return -eos_.sigma_prime(s) / s;
}

}  // namespace tpflow
