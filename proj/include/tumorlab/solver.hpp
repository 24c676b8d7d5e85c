#ifndef TUMORLAB_SOLVER_HPP
#define TUMORLAB_SOLVER_HPP

/**
 * @file solver.hpp
 * @brief Time integration of the degenerate (kappa) and regularized (eps)
 *        systems in enthalpy form.
 *
 * Splitting per step: implicit total-density diffusion, explicit species
 * transport/reaction, semi-implicit nutrient. After the species sub-step
 * the two populations are rescaled by a common per-cell factor so that
 * n_l + n_d equals the implicitly advanced total density.
 */

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

#include "tumorlab/grid.hpp"
#include "tumorlab/model.hpp"

namespace tumorlab {

/// Thrown by sub-steps to request a smaller dt from the driver.
struct StepRejected : std::runtime_error {
    explicit StepRejected(const std::string& why) : std::runtime_error(why) {}
};

enum class Mode { Degenerate, Regularized };

struct TimeControl {
    double dt_init = 1e-4;
    double dt_max = 1e-2;
    double cfl_safety = 0.4;
    double growth_factor = 1.2;
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
};

struct InitialData {
    double bump_amplitude = 0.4;  ///< peak of the live-cell bump
    double bump_center = 0.5;     ///< fraction of domain length
    double bump_width = 0.1;      ///< fraction of domain length
    double dead_level = 0.0;      ///< uniform n_d
    bool kappa_offset = true;     ///< add kappa to each component in degenerate mode
    double theta_min = 0.1;       ///< required gap of max n below 1
};

struct SimConfig {
    int cells = 200;
    double x_min = 0.0;
    double x_max = 1.0;
    ModelParams params;
    Mode mode = Mode::Degenerate;
    double t_end = 0.5;
    int snapshots = 50;
    TimeControl time;
    InitialData initial;
    std::string face_average = "arithmetic";  ///< "arithmetic" or "harmonic"

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    /// Requested snapshot times: 0 = t_0 < ... < t_end.
    std::vector<double> output_times() const;
};

struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    int newton_iters = 0;
    double mass = 0.0;
    double max_total = 0.0;
    double rescale_lo = 1.0;
    double rescale_hi = 1.0;
    double clip_l1 = 0.0;  ///< L1 mass clipped from slightly negative species
};

struct Trajectory {
    Grid grid;
    SimConfig config;
    std::vector<State> snapshots;
    std::vector<StepRecord> steps;

    /// Exact h-weighted time integral of the source actually applied
    /// (piecewise constant over each accepted step).
    double applied_source_integral = 0.0;
    double min_field_value = 0.0;  ///< min of (n_l, n_d, c) over accepted steps
    double max_nutrient = 0.0;
    double max_total = 0.0;
    long clamp_events = 0;

    double mean_dt() const {
        if (steps.empty()) return 0.0;
        double s = 0.0;
        for (const auto& r : steps) s += r.dt;
        return s / static_cast<double>(steps.size());
    }
};

// ---------------------------------------------------------------------------
// Implicit total-density step
// ---------------------------------------------------------------------------

struct NewtonResult {
    Array density;
    int iterations = 0;
    bool converged = false;
};

/// Enthalpy transform of the degenerate system; iterates are projected
/// into [0, 1) since H_kappa is singular at 1.
struct KappaTransform {
    double kappa;
    double value(double n) const { return enthalpy(n, kappa); }
    double deriv(double n) const { return enthalpy_deriv(n, kappa); }
    double project(double n) const {
        return std::min(std::max(n, 0.0), kDensityCeiling);
    }
};

/// Regularized transform; total on the real line, no projection needed.
struct EpsTransform {
    double eps;
    double kappa;
    double value(double n) const { return enthalpy_eps(n, eps, kappa); }
    double deriv(double n) const { return chi_eps(n, eps, kappa); }
    double project(double n) const { return n; }
};

/// Solves the tridiagonal system with Thomas elimination.
Array tridiagonal_solve(const Array& lower, const Array& diag, const Array& upper,
                        const Array& rhs);

namespace detail {

/// Flux-form no-flux Laplacian of H evaluated cellwise.
inline Array laplacian_no_flux(const Grid& g, const Array& H) {
    const int n = static_cast<int>(H.size());
    Array flux = Array::Zero(n + 1);
    flux.segment(1, n - 1) = (H.tail(n - 1) - H.head(n - 1)) / g.h;
    return (flux.tail(n) - flux.head(n)) / g.h;
}

}  // namespace detail

/**
 * Backward-Euler step of  n_new - dt * Lap(H(n_new)) = n_old + dt * source
 * by damped Newton on the cell values. Mass is conserved up to the source
 * integral exactly because the Laplacian is in flux form.
 *
 * Throws StepRejected if Newton fails to converge.
 */
template <typename Transform>
NewtonResult step_total_density(const Grid& g, const Array& n_old, double dt,
                                const Array& source, const Transform& tf,
                                const TimeControl& tc) {
    const int n = g.n_cells;
    const Array rhs = n_old + dt * source;
    Array x(n);
    for (int i = 0; i < n; ++i) x(i) = tf.project(n_old(i));

    auto residual = [&](const Array& v) {
        Array H(n);
        for (int i = 0; i < n; ++i) H(i) = tf.value(v(i));
        return (v - dt * detail::laplacian_no_flux(g, H) - rhs).eval();
    };

    Array res = residual(x);
    double res_norm = norm_linf(res);
    NewtonResult out;
    const double scale = dt / (g.h * g.h);
    for (int iter = 0; iter < tc.newton_max_iter; ++iter) {
        if (res_norm <= tc.newton_tol) {
            out.density = x;
            out.iterations = iter;
            out.converged = true;
            return out;
        }
        Array dH(n);
        for (int i = 0; i < n; ++i) dH(i) = tf.deriv(x(i));
        Array lower(n), diag(n), upper(n);
        for (int i = 0; i < n; ++i) {
            const double stencil = (i == 0 || i == n - 1) ? 1.0 : 2.0;
            diag(i) = 1.0 + scale * stencil * dH(i);
            lower(i) = (i > 0) ? -scale * dH(i - 1) : 0.0;
            upper(i) = (i < n - 1) ? -scale * dH(i + 1) : 0.0;
        }
        const Array delta = tridiagonal_solve(lower, diag, upper, res);

        double s = 1.0;
        bool improved = false;
        while (s >= 1.0 / 1024.0) {
            Array trial = x - s * delta;
            for (int i = 0; i < n; ++i) trial(i) = tf.project(trial(i));
            Array trial_res = residual(trial);
            const double trial_norm = norm_linf(trial_res);
            if (trial_norm < res_norm) {
                x = std::move(trial);
                res = std::move(trial_res);
                res_norm = trial_norm;
                improved = true;
                break;
            }
            s *= 0.5;
        }
        if (!improved) throw StepRejected("density Newton stalled");
    }
    throw StepRejected("density Newton exceeded max iterations");
}

// ---------------------------------------------------------------------------
// Explicit / semi-implicit sub-steps
// ---------------------------------------------------------------------------

/**
 * Explicit upwind transport with face velocity plus explicit reactions.
 * Throws StepRejected on CFL violation.
 */
void step_species(const Grid& g, const Field& live, const Field& dead,
                  const Array& face_velocity, double dt, const Array& reaction_live,
                  const Array& reaction_dead, const TimeControl& tc, Array& live_new,
                  Array& dead_new);

/**
 * Semi-implicit backward-Euler nutrient step: diffusion and the lagged
 * consumption-rate coefficient f(c_old)/c_old * n_l are implicit.
 * Preserves 0 <= c <= max(c_old, c_boundary) by the discrete maximum
 * principle.
 */
Array step_nutrient(const Grid& g, const Field& nutrient, const Array& live, double dt,
                    const Kinetics& kin);

/// One full step of the degenerate kappa-system. Returns the new state.
State step_kappa(const Grid& g, const State& s, double dt, const SimConfig& cfg,
                 StepRecord& rec, double& applied_source_mass);

/// One full step of the eps-regularized system.
State step_regularized(const Grid& g, const State& s, double dt, const SimConfig& cfg,
                       StepRecord& rec, double& applied_source_mass);

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

/// Builds the configured initial state (live-cell bump, uniform dead level,
/// nutrient at the boundary value, optional kappa offset with clipping).
State initial_state(const Grid& g, const SimConfig& cfg);

/**
 * Advances the configured system to t_end with adaptive dt (reject/halve on
 * sub-step failure, grow on success) and snapshots exactly at the requested
 * output times.
 */
Trajectory run(const SimConfig& cfg);

}  // namespace tumorlab

#endif  // TUMORLAB_SOLVER_HPP
