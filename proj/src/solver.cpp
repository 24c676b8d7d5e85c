#include "tumorlab/solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <cmath>
#include <sstream>

namespace tumorlab {

Array tridiagonal_solve(const Array& lower, const Array& diag, const Array& upper,
                        const Array& rhs) {
    const Eigen::Index n = diag.size();
    Array c_prime(n), d_prime(n);
    c_prime(0) = upper(0) / diag(0);
    d_prime(0) = rhs(0) / diag(0);
    for (Eigen::Index i = 1; i < n; ++i) {
        const double m = diag(i) - lower(i) * c_prime(i - 1);
        c_prime(i) = (i < n - 1) ? upper(i) / m : 0.0;
        d_prime(i) = (rhs(i) - lower(i) * d_prime(i - 1)) / m;
    }
    Array x(n);
    x(n - 1) = d_prime(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = d_prime(i) - c_prime(i) * x(i + 1);
    return x;
}

// ---------------------------------------------------------------------------
// SimConfig
// ---------------------------------------------------------------------------

void SimConfig::validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("config field '" + field + "': " + why);
    };
    if (cells < 4) bad("cells", "need at least 4");
    if (!(x_max > x_min)) bad("x_max", "must exceed x_min");
    if (params.kappa <= 0.0) bad("kappa", "must be positive");
    if (mode == Mode::Regularized && (params.eps <= 0.0 || params.eps >= 1.0))
        bad("eps", "must lie in (0,1)");
    if (t_end < 0.0) bad("t_end", "must be nonnegative");
    if (snapshots < 1) bad("snapshots", "need at least 1");
    if (time.dt_init <= 0.0) bad("dt_init", "must be positive");
    if (time.dt_max <= 0.0) bad("dt_max", "must be positive");
    if (time.cfl_safety <= 0.0 || time.cfl_safety > 1.0) bad("cfl_safety", "must lie in (0,1]");
    if (time.newton_tol <= 0.0) bad("newton_tol", "must be positive");
    if (time.newton_max_iter < 1) bad("newton_max_iter", "need at least 1");
    if (initial.bump_amplitude < 0.0) bad("bump_amplitude", "must be nonnegative");
    if (initial.bump_width <= 0.0) bad("bump_width", "must be positive");
    if (initial.theta_min <= 0.0 || initial.theta_min >= 1.0)
        bad("theta_min", "must lie in (0,1)");
    if (initial.dead_level < 0.0) bad("dead_level", "must be nonnegative");
    if (face_average != "arithmetic" && face_average != "harmonic")
        bad("face_average", "must be 'arithmetic' or 'harmonic'");
    const double kd0 = params.kinetics.death(0.0);
    if (params.kinetics.removal_rate <= kd0) bad("removal_rate", "must exceed K_D(0)");
}

std::vector<double> SimConfig::output_times() const {
    std::vector<double> out;
    out.push_back(0.0);
    if (t_end <= 0.0) return out;
    for (int k = 1; k <= snapshots; ++k)
        out.push_back(t_end * static_cast<double>(k) / snapshots);
    return out;
}

// ---------------------------------------------------------------------------
// Sub-steps
// ---------------------------------------------------------------------------

void step_species(const Grid& g, const Field& live, const Field& dead,
                  const Array& face_velocity, double dt, const Array& reaction_live,
                  const Array& reaction_dead, const TimeControl& tc, Array& live_new,
                  Array& dead_new) {
    const double vmax = norm_linf(face_velocity);
    if (vmax > 0.0 && dt > tc.cfl_safety * g.h / vmax)
        throw StepRejected("species CFL violated");
    live_new =
        live.values - dt * advective_flux_divergence(g, live, face_velocity).values +
        dt * reaction_live;
    dead_new =
        dead.values - dt * advective_flux_divergence(g, dead, face_velocity).values +
        dt * reaction_dead;
}

Array step_nutrient(const Grid& g, const Field& nutrient, const Array& live, double dt,
                    const Kinetics& kin) {
    const int n = g.n_cells;
    const double eta = dt * kin.nutrient_diffusion / (g.h * g.h);
    const double c_inf = nutrient.boundary_value;
    Array lower = Array::Zero(n), diag(n), upper = Array::Zero(n), rhs = nutrient.values;
    for (int i = 0; i < n; ++i) {
        // Lagged consumption-rate coefficient keeps the step an M-matrix.
        const double c_old = nutrient.values(i);
        const double rate = (c_old > 1e-14) ? kin.consumption(c_old) / c_old * live(i)
                                            : kin.consumption_rate * live(i);
        diag(i) = 1.0 + dt * rate + 2.0 * eta;
        if (i > 0) lower(i) = -eta;
        if (i < n - 1) upper(i) = -eta;
    }
    // Dirichlet ghost mirroring at both walls.
    diag(0) += eta;
    rhs(0) += 2.0 * eta * c_inf;
    diag(n - 1) += eta;
    rhs(n - 1) += 2.0 * eta * c_inf;
    return tridiagonal_solve(lower, diag, upper, rhs);
}

namespace {

struct ReactionArrays {
    Array live, dead, total;
};

ReactionArrays evaluate_reactions(const State& s, const Kinetics& kin) {
    const Eigen::Index n = s.live.values.size();
    ReactionArrays r{Array(n), Array(n), Array(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const ReactionTerms t = reaction_terms(std::max(s.live.values(i), 0.0),
                                               std::max(s.dead.values(i), 0.0),
                                               std::max(s.nutrient.values(i), 0.0), kin);
        r.live(i) = t.live;
        r.dead(i) = t.dead;
        r.total(i) = t.total;
    }
    return r;
}

/// Common per-cell rescale so that live+dead matches the implicit total.
/// The splitting mismatch |total_new - (live+dead)| is O(dt); reject the
/// step if it exceeds an absolute O(dt) band. In near-empty cells the
/// composition is taken from the pre-step state.
void rescale_species(const Array& total_new, double dt, const Array& old_live,
                     const Array& old_dead, Array& live, Array& dead, StepRecord& rec) {
    rec.rescale_lo = 1.0;
    rec.rescale_hi = 1.0;
    const double band = 10.0 * dt;
    for (Eigen::Index i = 0; i < total_new.size(); ++i) {
        const double sum = live(i) + dead(i);
        if (std::abs(total_new(i) - sum) > band * std::max(1.0, total_new(i)))
            throw StepRejected("species rescale mismatch out of band");
        if (sum <= 1e-14) {
            const double old_sum = old_live(i) + old_dead(i);
            const double live_frac = old_sum > 1e-14 ? old_live(i) / old_sum : 1.0;
            live(i) = total_new(i) * live_frac;
            dead(i) = total_new(i) * (1.0 - live_frac);
            continue;
        }
        const double factor = total_new(i) / sum;
        live(i) *= factor;
        dead(i) *= factor;
        rec.rescale_lo = std::min(rec.rescale_lo, factor);
        rec.rescale_hi = std::max(rec.rescale_hi, factor);
    }
}

void check_positivity(const Array& live, const Array& dead, const Array& nutrient) {
    constexpr double tol = -1e-12;
    if (live.minCoeff() < tol || dead.minCoeff() < tol || nutrient.minCoeff() < tol)
        throw StepRejected("positivity lost");
}

}  // namespace

State step_kappa(const Grid& g, const State& s, double dt, const SimConfig& cfg,
                 StepRecord& rec, double& applied_source_mass) {
    const double kappa = cfg.params.kappa;
    const Kinetics& kin = cfg.params.kinetics;
    const TimeControl& tc = cfg.time;
    const ReactionArrays r = evaluate_reactions(s, kin);

    const NewtonResult nr =
        step_total_density(g, s.total.values, dt, r.total, KappaTransform{kappa}, tc);
    rec.newton_iters = nr.iterations;

    Array p_new(nr.density.size());
    for (Eigen::Index i = 0; i < p_new.size(); ++i) p_new(i) = pressure(nr.density(i), kappa);
    const Array velocity = -gradient_at_faces(g, Field::no_flux(p_new));

    Array live_new, dead_new;
    step_species(g, s.live, s.dead, velocity, dt, r.live, r.dead, tc, live_new, dead_new);
    rescale_species(nr.density, dt, s.live.values, s.dead.values, live_new, dead_new, rec);

    const Array c_new = step_nutrient(g, s.nutrient, live_new, dt, kin);
    check_positivity(live_new, dead_new, c_new);

    applied_source_mass = dt * g.h * r.total.sum();
    return make_state(s.time + dt, live_new, dead_new, c_new, s.nutrient.boundary_value, kappa);
}

State step_regularized(const Grid& g, const State& s, double dt, const SimConfig& cfg,
                       StepRecord& rec, double& applied_source_mass) {
    const double kappa = cfg.params.kappa;
    const double eps = cfg.params.eps;
    const Kinetics& kin = cfg.params.kinetics;
    const TimeControl& tc = cfg.time;
    const bool harmonic = (cfg.face_average == "harmonic");
    const ReactionArrays r = evaluate_reactions(s, kin);

    const NewtonResult nr =
        step_total_density(g, s.total.values, dt, r.total, EpsTransform{eps, kappa}, tc);
    rec.newton_iters = nr.iterations;
    const Array& n_new = nr.density;
    const int n = g.n_cells;

    auto face_mean = [harmonic](double a, double b) {
        if (!harmonic) return 0.5 * (a + b);
        return (a > 0.0 && b > 0.0) ? 2.0 * a * b / (a + b) : 0.0;
    };

    // Species flux  q = -chi_{z,eps}(n) grad n  with the donor cell picked
    // against the direction of transport (-sign(grad n)).
    Array flux_live = Array::Zero(n + 1), flux_dead = Array::Zero(n + 1);
    double max_speed = 0.0;
    for (int f = 1; f < n; ++f) {
        const double gn = (n_new(f) - n_new(f - 1)) / g.h;
        const int donor = (gn < 0.0) ? f - 1 : f;
        const double z_live = std::max(s.live.values(donor), 0.0);
        const double z_dead = std::max(s.dead.values(donor), 0.0);
        flux_live(f) = -face_mean(chi_partial(z_live, n_new(f - 1), eps, kappa),
                                  chi_partial(z_live, n_new(f), eps, kappa)) *
                       gn;
        flux_dead(f) = -face_mean(chi_partial(z_dead, n_new(f - 1), eps, kappa),
                                  chi_partial(z_dead, n_new(f), eps, kappa)) *
                       gn;
        const double n_hi = std::max(n_new(f - 1), n_new(f));
        if (n_hi >= 0.0 && n_hi <= 1.0 - eps) {
            const double om = 1.0 - n_hi;
            max_speed = std::max(max_speed, kappa * std::abs(gn) / (om * om));
        }
    }
    if (max_speed > 0.0 && dt > tc.cfl_safety * g.h / max_speed)
        throw StepRejected("regularized species CFL violated");

    Array live_new =
        s.live.values - dt / g.h * (flux_live.tail(n) - flux_live.head(n)) + dt * r.live;
    Array dead_new =
        s.dead.values - dt / g.h * (flux_dead.tail(n) - flux_dead.head(n)) + dt * r.dead;

    // The cross coefficient chi_{z,eps} keeps its +eps term at z = 0, so a
    // vanishing species can be pushed slightly negative by O(dt). Clip to
    // zero before the rescale and record the clipped mass.
    rec.clip_l1 = 0.0;
    for (int i = 0; i < n; ++i) {
        if (live_new(i) < 0.0) {
            rec.clip_l1 += g.h * -live_new(i);
            live_new(i) = 0.0;
        }
        if (dead_new(i) < 0.0) {
            rec.clip_l1 += g.h * -dead_new(i);
            dead_new(i) = 0.0;
        }
    }
    rescale_species(n_new, dt, s.live.values, s.dead.values, live_new, dead_new, rec);

    const Array c_new = step_nutrient(g, s.nutrient, live_new, dt, kin);
    check_positivity(live_new, dead_new, c_new);

    applied_source_mass = dt * g.h * r.total.sum();
    return make_state(s.time + dt, live_new, dead_new, c_new, s.nutrient.boundary_value, kappa);
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

State initial_state(const Grid& g, const SimConfig& cfg) {
    const double length = g.x_max - g.x_min;
    const double m = g.x_min + cfg.initial.bump_center * length;
    const double w = cfg.initial.bump_width * length;
    Array live(g.n_cells), dead(g.n_cells), nutrient(g.n_cells);
    for (int i = 0; i < g.n_cells; ++i) {
        const double xi = (g.centers(i) - m) / w;
        live(i) = cfg.initial.bump_amplitude * std::exp(-xi * xi);
        dead(i) = cfg.initial.dead_level;
        nutrient(i) = cfg.params.kinetics.nutrient_boundary;
    }
    if (cfg.mode == Mode::Degenerate && cfg.initial.kappa_offset) {
        live += cfg.params.kappa;
        dead += cfg.params.kappa;
        nutrient += cfg.params.kappa;
    }
    const double cap = 1.0 - cfg.initial.theta_min;
    const double max_n = (live + dead).maxCoeff();
    if (max_n > cap) {
        // Nudge strictly below the cap so the validation below cannot fail
        // by a rounding ulp after the multiplication.
        const double scale = cap * (1.0 - 1e-12) / max_n;
        live *= scale;
        dead *= scale;
    }
    State s = make_state(0.0, live, dead, nutrient,
                         cfg.params.kinetics.nutrient_boundary, cfg.params.kappa);
    const InitialStateReport rep = validate_initial_state(s, cfg.initial.theta_min);
    if (!rep.pass)
        throw std::invalid_argument("initial state invalid: " + rep.detail + " at cell " +
                                    std::to_string(rep.witness_cell));
    return s;
}

Trajectory run(const SimConfig& cfg) {
    cfg.validate();
    Trajectory traj;
    traj.config = cfg;
    traj.grid = Grid::uniform(cfg.cells, cfg.x_min, cfg.x_max);
    const Grid& g = traj.grid;

    const long clamp_before = singularity_clamp_count();

    State state = initial_state(g, cfg);
    traj.min_field_value = std::min({state.live.values.minCoeff(), state.dead.values.minCoeff(),
                                     state.nutrient.values.minCoeff()});
    traj.max_nutrient = state.nutrient.values.maxCoeff();
    traj.max_total = state.total.values.maxCoeff();
    traj.snapshots.push_back(state);

    const std::vector<double> out_times = cfg.output_times();
    std::size_t next_out = 1;
    double t = 0.0;
    double dt = cfg.time.dt_init;
    const double dt_floor = 1e-12 * std::max(cfg.t_end, 1.0);

    while (next_out < out_times.size()) {
        const double target = out_times[next_out];
        double dt_try = std::min({dt, cfg.time.dt_max, target - t});

        // Proactive CFL limit from the current pressure gradient.
        const double vmax = norm_linf(gradient_at_faces(g, state.pressure_field));
        if (cfg.mode == Mode::Degenerate && vmax > 0.0)
            dt_try = std::min(dt_try, cfg.time.cfl_safety * g.h / vmax);

        StepRecord rec;
        double source_mass = 0.0;
        bool accepted = false;
        State next;
        try {
            next = (cfg.mode == Mode::Degenerate)
                       ? step_kappa(g, state, dt_try, cfg, rec, source_mass)
                       : step_regularized(g, state, dt_try, cfg, rec, source_mass);
            accepted = true;
        } catch (const StepRejected& e) {
            if (std::getenv("TUMORLAB_LOG"))
                std::cerr << "reject t=" << t << " dt=" << dt_try << ": " << e.what() << "\n";
            dt = 0.5 * dt_try;
            if (dt < dt_floor) {
                std::ostringstream oss;
                oss << "time step underflow at t=" << t << " (" << e.what()
                    << "; last accepted mass=" << g.h * state.total.values.sum()
                    << ", max n=" << state.total.values.maxCoeff() << ")";
                throw std::runtime_error(oss.str());
            }
        }
        if (!accepted) continue;

        t += dt_try;
        state = std::move(next);
        state.time = t;
        traj.applied_source_integral += source_mass;
        rec.t = t;
        rec.dt = dt_try;
        rec.mass = g.h * state.total.values.sum();
        rec.max_total = state.total.values.maxCoeff();
        traj.steps.push_back(rec);
        traj.min_field_value =
            std::min({traj.min_field_value, state.live.values.minCoeff(),
                      state.dead.values.minCoeff(), state.nutrient.values.minCoeff()});
        traj.max_nutrient = std::max(traj.max_nutrient, state.nutrient.values.maxCoeff());
        traj.max_total = std::max(traj.max_total, rec.max_total);
        dt = std::min(dt_try * cfg.time.growth_factor, cfg.time.dt_max);

        if (t >= target - 1e-13 * std::max(1.0, cfg.t_end)) {
            traj.snapshots.push_back(state);
            ++next_out;
        }
    }
    traj.clamp_events = singularity_clamp_count() - clamp_before;
    return traj;
}

}  // namespace tumorlab
