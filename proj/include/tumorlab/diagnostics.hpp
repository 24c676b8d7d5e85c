#ifndef TUMORLAB_DIAGNOSTICS_HPP
#define TUMORLAB_DIAGNOSTICS_HPP

/**
 * @file diagnostics.hpp
 * @brief Estimates, residuals, and functionals monitored over trajectories.
 *
 * Everything here is a pure function of an immutable trajectory. Time
 * derivatives are approximated by snapshot differences at output
 * resolution.
 */

#include <functional>
#include <string>
#include <vector>

#include "tumorlab/grid.hpp"
#include "tumorlab/solver.hpp"

namespace tumorlab {

struct EnergyReport {
    std::vector<double> times;

    // Cumulative space-time integrals of squared time differences.
    std::vector<double> nutrient_dt_sq;
    std::vector<double> live_dt_sq;
    std::vector<double> dead_dt_sq;
    std::vector<double> enthalpy_dt_sq;

    // Running suprema of the spatial gradient integrals.
    std::vector<double> nutrient_grad_sup;
    std::vector<double> live_grad_sup;
    std::vector<double> dead_grad_sup;
    std::vector<double> enthalpy_grad_sup;

    std::vector<double> potential_integral;    ///< integral of Phi_kappa(n) per snapshot
    std::vector<double> enthalpy_grad_cum;     ///< cumulative integral of |grad H|^2 dt
    std::vector<double> pressure_grad_cum;     ///< cumulative integral of |grad p|^2 dt

    bool all_finite() const;

    /// Final (largest) value of each series, keyed by name; used by the
    /// sweep summary and the uniformity fixtures.
    std::vector<std::pair<std::string, double>> maxima() const;
};

EnergyReport energy_report(const Trajectory& traj, double kappa);

/// L1 norm of p^2 (Lap_h p + G(c) n_l - mu n_d) with the no-flux Laplacian.
double complementarity_residual(const Grid& g, const State& s, const Kinetics& kin);

/// L1 norm of (1-n) p. Equals kappa*|n|_L1 identically under the kappa-law.
double segregation_residual(const Grid& g, const State& s);

/// Per-interval L1 defect of the pressure equation; trend-only.
std::vector<double> pressure_equation_residual(const Trajectory& traj, double kappa);

struct BarrierReport {
    double max_total = 0.0;  ///< max n over all accepted steps
    double rho = 1.0;        ///< 1 - max_total
};

BarrierReport barrier_monitor(const Trajectory& traj);

/// Smooth space-time test function with analytic derivatives.
struct TestFunction {
    std::string name;
    std::function<double(double t, double x)> value;
    std::function<double(double t, double x)> dt;
    std::function<double(double t, double x)> dx;
};

/// Bank of compactly supported test functions on [0,t_end] x [x_min,x_max].
std::vector<TestFunction> default_test_bank(double t_end, double x_min, double x_max);

/// Maximum absolute weak-form defect of the live-cell equation over the bank.
double weak_form_check(const Trajectory& traj, const std::vector<TestFunction>& bank);

}  // namespace tumorlab

#endif  // TUMORLAB_DIAGNOSTICS_HPP
