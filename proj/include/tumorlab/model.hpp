#ifndef TUMORLAB_MODEL_HPP
#define TUMORLAB_MODEL_HPP

/**
 * @file model.hpp
 * @brief Constitutive laws for the two-population tumor model.
 *
 * Pure functions of their arguments: the singular pressure law
 * p(n) = kappa n/(1-n), its enthalpy (Kirchhoff) transform, the
 * regularized mobilities, and the kinetic rate functions with their
 * structural-assumption validator.
 */

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tumorlab {

// Density arguments at or above this value are clamped before the
// singular laws are evaluated; the solver is expected to stay well
// below it (barrier), so any clamp is counted as a scheme overshoot.
inline constexpr double kDensityCeiling = 1.0 - 1e-9;

namespace detail {
inline long& clamp_counter() {
    static long count = 0;
    return count;
}
}  // namespace detail

/// Number of times a density had to be clamped below the singularity.
inline long singularity_clamp_count() { return detail::clamp_counter(); }
inline void reset_singularity_clamp_count() { detail::clamp_counter() = 0; }

inline double clamp_density(double n) {
    if (n >= kDensityCeiling) {
        ++detail::clamp_counter();
        return kDensityCeiling;
    }
    return n;
}

// ---------------------------------------------------------------------------
// Pressure law and enthalpy transform
// ---------------------------------------------------------------------------

/// p(n) = kappa n / (1 - n) on [0, 1).
inline double pressure(double n, double kappa) {
    if (kappa <= 0.0) throw std::domain_error("pressure: kappa must be positive");
    if (n < 0.0 || n >= 1.0) throw std::domain_error("pressure: n outside [0,1)");
    n = clamp_density(n);
    return kappa * n / (1.0 - n);
}

/// Inverse of the pressure law: n = p / (p + kappa).
inline double pressure_inverse(double p, double kappa) {
    if (kappa <= 0.0) throw std::domain_error("pressure_inverse: kappa must be positive");
    if (p < 0.0) throw std::domain_error("pressure_inverse: negative pressure");
    return p / (p + kappa);
}

/// p'(n) = kappa / (1 - n)^2.
inline double pressure_deriv(double n, double kappa) {
    n = clamp_density(n);
    const double om = 1.0 - n;
    return kappa / (om * om);
}

/**
 * Enthalpy transform H(n) = integral_0^n s p'(s) ds = p(n) + kappa ln(1-n).
 * Strictly increasing on [0,1) with H(0) = 0.
 */
inline double enthalpy(double n, double kappa) {
    if (n < 0.0 || n >= 1.0) throw std::domain_error("enthalpy: n outside [0,1)");
    n = clamp_density(n);
    return kappa * n / (1.0 - n) + kappa * std::log1p(-n);
}

/// H'(n) = kappa n / (1-n)^2, the degenerate mobility.
inline double enthalpy_deriv(double n, double kappa) {
    n = clamp_density(n);
    const double om = 1.0 - n;
    return kappa * n / (om * om);
}

/// Antiderivative of the enthalpy, Phi(n) = integral_0^n H(s) ds.
inline double enthalpy_potential(double n, double kappa) {
    if (n < 0.0 || n >= 1.0) throw std::domain_error("enthalpy_potential: n outside [0,1)");
    n = clamp_density(n);
    const double ln1mn = std::log1p(-n);
    return kappa * (-ln1mn - 2.0 * n - (1.0 - n) * ln1mn);
}

// ---------------------------------------------------------------------------
// Regularized mobilities (total functions of n)
// ---------------------------------------------------------------------------

/**
 * Regularized total-density mobility:
 *   kappa*eps                    for n < 0
 *   kappa*(n+eps)/(1-n)^2        for 0 <= n <= 1-eps
 *   kappa/eps^2                  for n >= 1-eps
 * Continuous at the upper branch point and positive everywhere.
 */
inline double chi_eps(double n, double eps, double kappa) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("chi_eps: eps outside (0,1)");
    if (kappa <= 0.0) throw std::invalid_argument("chi_eps: kappa must be positive");
    if (n < 0.0) return kappa * eps;
    if (n >= 1.0 - eps) return kappa / (eps * eps);
    const double om = 1.0 - n;
    return kappa * (n + eps) / (om * om);
}

/// Cross mobility chi_{z,eps}: the species fraction z replaces n in the
/// numerator of the middle branch only.
inline double chi_partial(double z, double n, double eps, double kappa) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("chi_partial: eps outside (0,1)");
    if (kappa <= 0.0) throw std::invalid_argument("chi_partial: kappa must be positive");
    if (n < 0.0) return kappa * eps;
    if (n >= 1.0 - eps) return kappa / (eps * eps);
    const double om = 1.0 - n;
    return kappa * (z + eps) / (om * om);
}

/**
 * Regularized enthalpy H_eps(n) = integral_0^n chi_eps.
 * Middle branch closed form: kappa * [ (1+eps) n/(1-n) + ln(1-n) ],
 * extended linearly by the constant branches outside [0, 1-eps].
 */
inline double enthalpy_eps(double n, double eps, double kappa) {
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("enthalpy_eps: eps outside (0,1)");
    if (n < 0.0) return kappa * eps * n;
    const double n_knee = 1.0 - eps;
    auto middle = [&](double x) {
        return kappa * ((1.0 + eps) * x / (1.0 - x) + std::log1p(-x));
    };
    if (n <= n_knee) return middle(n);
    return middle(n_knee) + (n - n_knee) * kappa / (eps * eps);
}

/// Derivative of enthalpy_eps, identical to chi_eps.
inline double enthalpy_eps_deriv(double n, double eps, double kappa) {
    return chi_eps(n, eps, kappa);
}

// ---------------------------------------------------------------------------
// Kinetic functions
// ---------------------------------------------------------------------------

/**
 * Kinetic rate functions and model constants.
 *
 * Built-in parametric families:
 *   growth      G(c)  = growth_max * c / (growth_half + c)       ("monod")
 *   death       K_D(c)= death_max / (1 + death_decay * c)        ("inverse_linear")
 *   consumption f(c)  = consumption_rate * c                     ("linear")
 */
struct Kinetics {
    std::string growth_form = "monod";
    double growth_max = 1.0;
    double growth_half = 0.5;

    std::string death_form = "inverse_linear";
    double death_max = 0.3;
    double death_decay = 2.0;

    std::string consumption_form = "linear";
    double consumption_rate = 0.5;

    double removal_rate = 0.5;       ///< mu, clearance of dead cells
    double nutrient_diffusion = 1.0; ///< d
    double nutrient_boundary = 1.0;  ///< c at the domain walls

    double growth(double c) const {
        if (c < 0.0) throw std::domain_error("growth: negative nutrient level");
        return growth_max * c / (growth_half + c);
    }
    double death(double c) const {
        if (c < 0.0) throw std::domain_error("death: negative nutrient level");
        return death_max / (1.0 + death_decay * c);
    }
    double consumption(double c) const {
        if (c < 0.0) throw std::domain_error("consumption: negative nutrient level");
        return consumption_rate * c;
    }
};

struct ReactionTerms {
    double live;        ///< (G - K_D) n_l
    double dead;        ///< K_D n_l - mu n_d
    double total;       ///< live + dead = G n_l - mu n_d
    double consumption; ///< f(c) n_l
};

inline ReactionTerms reaction_terms(double n_l, double n_d, double c, const Kinetics& kin) {
    if (n_l < 0.0 || n_d < 0.0 || c < 0.0)
        throw std::domain_error("reaction_terms: negative input");
    const double g = kin.growth(c);
    const double kd = kin.death(c);
    ReactionTerms r;
    r.live = (g - kd) * n_l;
    r.dead = kd * n_l - kin.removal_rate * n_d;
    r.total = g * n_l - kin.removal_rate * n_d;
    r.consumption = kin.consumption(c) * n_l;
    return r;
}

// ---------------------------------------------------------------------------
// Derived constants and assumption validation
// ---------------------------------------------------------------------------

struct DerivedConstants {
    double c_max;    ///< max(sup c0, boundary nutrient)
    double growth_sup;      ///< sup G on [0, c_max]
    double consumption_sup; ///< sup f on [0, c_max]
};

/// Suprema taken over a fine sample grid of [0, c_max].
inline DerivedConstants derived_constants(double c0_max, const Kinetics& kin,
                                          int samples = 10000) {
    if (!std::isfinite(c0_max) || c0_max < 0.0)
        throw std::invalid_argument("derived_constants: invalid initial nutrient bound");
    DerivedConstants out;
    out.c_max = std::max(c0_max, std::abs(kin.nutrient_boundary));
    out.growth_sup = 0.0;
    out.consumption_sup = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double c = out.c_max * static_cast<double>(i) / samples;
        out.growth_sup = std::max(out.growth_sup, kin.growth(c));
        out.consumption_sup = std::max(out.consumption_sup, kin.consumption(c));
    }
    return out;
}

struct AssumptionReport {
    bool consumption_ok = true; ///< f(0)=0 and f strictly increasing
    bool growth_ok = true;      ///< G(0)=0 and G strictly increasing
    bool death_ok = true;       ///< K_D >= 0 and strictly decreasing
    bool removal_ok = true;     ///< mu > K_D(0) > 0
    double witness = 0.0;       ///< sample point of the first failure
    std::string detail;

    bool pass() const { return consumption_ok && growth_ok && death_ok && removal_ok; }
};

/**
 * Checks the structural assumptions on the kinetic functions over a
 * sampling grid of [0, c_max]. Report-only; never throws on failure.
 */
inline AssumptionReport validate_assumptions(const Kinetics& kin, double c_max = 1.0,
                                             int samples = 10000) {
    constexpr double strict = 1e-12;
    AssumptionReport rep;
    auto fail = [&](bool& flag, double xi, const std::string& what) {
        if (rep.pass()) {
            rep.witness = xi;
            rep.detail = what;
        }
        flag = false;
    };

    if (std::abs(kin.consumption(0.0)) > strict)
        fail(rep.consumption_ok, 0.0, "f(0) != 0");
    if (std::abs(kin.growth(0.0)) > strict)
        fail(rep.growth_ok, 0.0, "G(0) != 0");
    if (kin.death(0.0) <= 0.0)
        fail(rep.removal_ok, 0.0, "K_D(0) <= 0");
    if (kin.removal_rate <= kin.death(0.0))
        fail(rep.removal_ok, 0.0, "mu <= K_D(0)");

    for (int i = 0; i < samples; ++i) {
        const double a = c_max * static_cast<double>(i) / samples;
        const double b = c_max * static_cast<double>(i + 1) / samples;
        if (kin.consumption(b) - kin.consumption(a) <= strict)
            fail(rep.consumption_ok, a, "f not strictly increasing");
        if (kin.growth(b) - kin.growth(a) <= strict)
            fail(rep.growth_ok, a, "G not strictly increasing");
        if (kin.death(a) - kin.death(b) <= strict)
            fail(rep.death_ok, a, "K_D not strictly decreasing");
        if (kin.death(b) < 0.0)
            fail(rep.death_ok, b, "K_D negative");
        if (!rep.consumption_ok && !rep.growth_ok && !rep.death_ok) break;
    }
    return rep;
}

/// Full parameter bundle for one simulation mode.
struct ModelParams {
    double kappa = 0.1; ///< pressure stiffness
    double eps = 0.05;  ///< mobility regularization (regularized mode only)
    Kinetics kinetics;
};

}  // namespace tumorlab

#endif  // TUMORLAB_MODEL_HPP
