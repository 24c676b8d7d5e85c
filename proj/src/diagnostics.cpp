#include "tumorlab/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace tumorlab {

namespace {

double grad_sq_integral(const Grid& g, const Field& f) {
    const Array grad = gradient_at_faces(g, f);
    return g.h * grad.square().sum();
}

double dt_sq_integral(const Grid& g, const Array& newer, const Array& older, double dt) {
    // integral over the slab of ((f_new - f_old)/dt)^2 = h * sum(diff^2) / dt
    return g.h * (newer - older).square().sum() / dt;
}

bool finite_series(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

bool EnergyReport::all_finite() const {
    return finite_series(times) && finite_series(nutrient_dt_sq) &&
           finite_series(live_dt_sq) && finite_series(dead_dt_sq) &&
           finite_series(enthalpy_dt_sq) && finite_series(nutrient_grad_sup) &&
           finite_series(live_grad_sup) && finite_series(dead_grad_sup) &&
           finite_series(enthalpy_grad_sup) && finite_series(potential_integral) &&
           finite_series(enthalpy_grad_cum) && finite_series(pressure_grad_cum);
}

std::vector<std::pair<std::string, double>> EnergyReport::maxima() const {
    auto last = [](const std::vector<double>& v) { return v.empty() ? 0.0 : v.back(); };
    auto peak = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, x);
        return m;
    };
    return {
        {"nutrient_dt_sq", last(nutrient_dt_sq)},
        {"live_dt_sq", last(live_dt_sq)},
        {"dead_dt_sq", last(dead_dt_sq)},
        {"enthalpy_dt_sq", last(enthalpy_dt_sq)},
        {"nutrient_grad_sup", last(nutrient_grad_sup)},
        {"live_grad_sup", last(live_grad_sup)},
        {"dead_grad_sup", last(dead_grad_sup)},
        {"enthalpy_grad_sup", last(enthalpy_grad_sup)},
        {"potential_integral", peak(potential_integral)},
        {"enthalpy_grad_cum", last(enthalpy_grad_cum)},
        {"pressure_grad_cum", last(pressure_grad_cum)},
    };
}

EnergyReport energy_report(const Trajectory& traj, double kappa) {
    if (traj.snapshots.size() < 2)
        throw std::invalid_argument("energy_report: need at least two snapshots");
    const Grid& g = traj.grid;
    EnergyReport rep;

    double cum_c = 0.0, cum_l = 0.0, cum_d = 0.0, cum_H = 0.0;
    double sup_c = 0.0, sup_l = 0.0, sup_d = 0.0, sup_H = 0.0;
    double cum_gH = 0.0, cum_gp = 0.0;
    double prev_gH = 0.0, prev_gp = 0.0;

    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const State& s = traj.snapshots[k];
        const double gH = grad_sq_integral(g, s.enthalpy_field);
        const double gp = grad_sq_integral(g, s.pressure_field);
        sup_c = std::max(sup_c, grad_sq_integral(g, s.nutrient));
        sup_l = std::max(sup_l, grad_sq_integral(g, s.live));
        sup_d = std::max(sup_d, grad_sq_integral(g, s.dead));
        sup_H = std::max(sup_H, gH);

        if (k > 0) {
            const State& prev = traj.snapshots[k - 1];
            const double dt = s.time - prev.time;
            cum_c += dt_sq_integral(g, s.nutrient.values, prev.nutrient.values, dt);
            cum_l += dt_sq_integral(g, s.live.values, prev.live.values, dt);
            cum_d += dt_sq_integral(g, s.dead.values, prev.dead.values, dt);
            cum_H += dt_sq_integral(g, s.enthalpy_field.values, prev.enthalpy_field.values, dt);
            cum_gH += 0.5 * dt * (gH + prev_gH);
            cum_gp += 0.5 * dt * (gp + prev_gp);
        }
        prev_gH = gH;
        prev_gp = gp;

        double phi = 0.0;
        for (Eigen::Index i = 0; i < s.total.values.size(); ++i)
            phi += enthalpy_potential(s.total.values(i), kappa);
        rep.times.push_back(s.time);
        rep.nutrient_dt_sq.push_back(cum_c);
        rep.live_dt_sq.push_back(cum_l);
        rep.dead_dt_sq.push_back(cum_d);
        rep.enthalpy_dt_sq.push_back(cum_H);
        rep.nutrient_grad_sup.push_back(sup_c);
        rep.live_grad_sup.push_back(sup_l);
        rep.dead_grad_sup.push_back(sup_d);
        rep.enthalpy_grad_sup.push_back(sup_H);
        rep.potential_integral.push_back(g.h * phi);
        rep.enthalpy_grad_cum.push_back(cum_gH);
        rep.pressure_grad_cum.push_back(cum_gp);
    }
    return rep;
}

double complementarity_residual(const Grid& g, const State& s, const Kinetics& kin) {
    const Array& p = s.pressure_field.values;
    const Array lap = detail::laplacian_no_flux(g, p);
    Array defect(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double growth = kin.growth(std::max(s.nutrient.values(i), 0.0));
        const double source = growth * s.live.values(i) - kin.removal_rate * s.dead.values(i);
        defect(i) = p(i) * p(i) * (lap(i) + source);
    }
    return norm_l1(g, defect);
}

double segregation_residual(const Grid& g, const State& s) {
    const Array defect = (1.0 - s.total.values) * s.pressure_field.values;
    return norm_l1(g, defect);
}

std::vector<double> pressure_equation_residual(const Trajectory& traj, double kappa) {
    const Grid& g = traj.grid;
    std::vector<double> out;
    for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
        const State& a = traj.snapshots[k - 1];
        const State& b = traj.snapshots[k];
        const double dt = b.time - a.time;
        const Array& p = b.pressure_field.values;
        const Array lap = detail::laplacian_no_flux(g, p);
        const Array grad_faces = gradient_at_faces(g, b.pressure_field);
        const int n = g.n_cells;
        Array defect(n);
        for (int i = 0; i < n; ++i) {
            const double dpdt = (p(i) - a.pressure_field.values(i)) / dt;
            const double grad_sq =
                0.5 * (grad_faces(i) * grad_faces(i) + grad_faces(i + 1) * grad_faces(i + 1));
            const double growth = traj.config.params.kinetics.growth(
                std::max(b.nutrient.values(i), 0.0));
            const double source = growth * b.live.values(i) -
                                  traj.config.params.kinetics.removal_rate * b.dead.values(i);
            const double pk = p(i) + kappa;
            defect(i) = dpdt - (p(i) / kappa + p(i)) * lap(i) - grad_sq -
                        pk * pk / kappa * source;
        }
        out.push_back(norm_l1(g, defect));
    }
    return out;
}

BarrierReport barrier_monitor(const Trajectory& traj) {
    BarrierReport rep;
    rep.max_total = traj.max_total;
    for (const auto& s : traj.snapshots)
        rep.max_total = std::max(rep.max_total, s.total.values.maxCoeff());
    rep.rho = 1.0 - rep.max_total;
    return rep;
}

std::vector<TestFunction> default_test_bank(double t_end, double x_min, double x_max) {
    const double length = x_max - x_min;
    std::vector<TestFunction> bank;
    auto time_bump = [t_end](double t) {
        const double s = std::sin(M_PI * t / t_end);
        return s * s;
    };
    auto time_bump_dt = [t_end](double t) {
        return M_PI / t_end * std::sin(2.0 * M_PI * t / t_end);
    };
    for (int m = 1; m <= 3; ++m) {
        bank.push_back(TestFunction{
            "sin" + std::to_string(m),
            [=](double t, double x) {
                return time_bump(t) * std::sin(m * M_PI * (x - x_min) / length);
            },
            [=](double t, double x) {
                return time_bump_dt(t) * std::sin(m * M_PI * (x - x_min) / length);
            },
            [=](double t, double x) {
                return time_bump(t) * m * M_PI / length *
                       std::cos(m * M_PI * (x - x_min) / length);
            }});
    }
    bank.push_back(TestFunction{
        "poly",
        [=](double t, double x) {
            const double u = (x - x_min) / length;
            return time_bump(t) * u * u * (1.0 - u) * (1.0 - u);
        },
        [=](double t, double x) {
            const double u = (x - x_min) / length;
            return time_bump_dt(t) * u * u * (1.0 - u) * (1.0 - u);
        },
        [=](double t, double x) {
            const double u = (x - x_min) / length;
            return time_bump(t) * (2.0 * u * (1.0 - u) * (1.0 - u) -
                                   2.0 * u * u * (1.0 - u)) /
                   length;
        }});
    return bank;
}

double weak_form_check(const Trajectory& traj, const std::vector<TestFunction>& bank) {
    const Grid& g = traj.grid;
    const Kinetics& kin = traj.config.params.kinetics;
    double worst = 0.0;
    for (const auto& phi : bank) {
        // Time-slab trapezoid of the distributional defect
        //   -int n_l dphi/dt + int n_l grad p dphi/dx - int R1 phi.
        double defect = 0.0;
        std::vector<double> integrand(traj.snapshots.size());
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
            const State& s = traj.snapshots[k];
            const Array grad_faces = gradient_at_faces(g, s.pressure_field);
            double acc = 0.0;
            for (int i = 0; i < g.n_cells; ++i) {
                const double x = g.centers(i);
                const double gp = 0.5 * (grad_faces(i) + grad_faces(i + 1));
                const double growth = kin.growth(std::max(s.nutrient.values(i), 0.0));
                const double death = kin.death(std::max(s.nutrient.values(i), 0.0));
                const double r1 = (growth - death) * s.live.values(i);
                acc += -s.live.values(i) * phi.dt(s.time, x) +
                       s.live.values(i) * gp * phi.dx(s.time, x) - r1 * phi.value(s.time, x);
            }
            integrand[k] = g.h * acc;
        }
        for (std::size_t k = 1; k < integrand.size(); ++k) {
            const double dt = traj.snapshots[k].time - traj.snapshots[k - 1].time;
            defect += 0.5 * dt * (integrand[k] + integrand[k - 1]);
        }
        worst = std::max(worst, std::abs(defect));
    }
    return worst;
}

}  // namespace tumorlab
