#include "tumorlab/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tumorlab {

namespace {

// 16-node Gauss-Legendre rule on [-1, 1].
constexpr int kGaussNodes = 16;
constexpr double kGaussX[kGaussNodes] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGaussW[kGaussNodes] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

void require_shared_discretization(const Trajectory& a, const Trajectory& b) {
    if (a.grid.n_cells != b.grid.n_cells || a.snapshots.size() != b.snapshots.size())
        throw std::invalid_argument("trajectory pair: mismatched discretization");
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
        if (std::abs(a.snapshots[k].time - b.snapshots[k].time) > 1e-10)
            throw std::invalid_argument("trajectory pair: mismatched snapshot times");
}

double sup_distance(const Trajectory& a, const Trajectory& b,
                    const Field State::*field) {
    require_shared_discretization(a, b);
    double sup = 0.0;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
        sup = std::max(sup, norm_l1(a.grid, Array((a.snapshots[k].*field).values -
                                                  (b.snapshots[k].*field).values)));
    return sup;
}

RateVerdict rate_check(const Trajectory& coarse, const Trajectory& fine,
                       const Field State::*field, double rate_constant,
                       double slack_factor) {
    require_shared_discretization(coarse, fine);
    const Grid& g = coarse.grid;

    double sup_total_coarse = 0.0;
    for (const auto& s : coarse.snapshots)
        sup_total_coarse = std::max(sup_total_coarse, norm_l1(g, s.total));
    const double mean_dt = std::max(coarse.mean_dt(), fine.mean_dt());
    const double slack = slack_factor * (g.h + mean_dt) * sup_total_coarse;

    RateVerdict v;
    v.slack = slack;
    const double initial_gap =
        norm_l1(g, Array((coarse.snapshots[0].*field).values -
                         (fine.snapshots[0].*field).values));
    double lhs = 0.0;
    double sup_n = 0.0;
    v.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < coarse.snapshots.size(); ++k) {
        const double t = coarse.snapshots[k].time;
        lhs = std::max(lhs, norm_l1(g, Array((coarse.snapshots[k].*field).values -
                                             (fine.snapshots[k].*field).values)));
        sup_n = std::max(sup_n, norm_l1(g, coarse.snapshots[k].total));
        const double rhs = initial_gap + rate_constant * t * sup_n + slack;
        v.worst_margin = std::min(v.worst_margin, rhs - lhs);
        v.lhs_final = lhs;
        v.rhs_final = rhs;
    }
    v.pass = v.worst_margin > 0.0;
    return v;
}

SweepMember make_member(double parameter, Trajectory&& traj) {
    SweepMember m;
    m.parameter = parameter;
    m.trajectory = std::move(traj);
    const Trajectory& tr = m.trajectory;
    const double kappa = tr.config.params.kappa;
    m.energy = energy_report(tr, kappa);
    for (const auto& s : tr.snapshots) {
        m.segregation.push_back(segregation_residual(tr.grid, s));
        m.complementarity.push_back(
            complementarity_residual(tr.grid, s, tr.config.params.kinetics));
    }
    m.barrier = barrier_monitor(tr);
    m.constants = derived_constants(tr.snapshots[0].nutrient.values.maxCoeff(),
                                    tr.config.params.kinetics);
    return m;
}

}  // namespace

double trajectory_distance_n(const Trajectory& a, const Trajectory& b) {
    return sup_distance(a, b, &State::total);
}

double trajectory_distance_c(const Trajectory& a, const Trajectory& b) {
    return sup_distance(a, b, &State::nutrient);
}

RateVerdict rate_check_pair_n(const Trajectory& coarse, const Trajectory& fine,
                              double growth_sup, double slack_factor) {
    return rate_check(coarse, fine, &State::total, growth_sup, slack_factor);
}

RateVerdict rate_check_pair_c(const Trajectory& coarse, const Trajectory& fine,
                              double consumption_sup, double slack_factor) {
    return rate_check(coarse, fine, &State::nutrient, consumption_sup, slack_factor);
}

Array lambda_coefficient(const Array& n_a, const Array& n_b, double kappa_h) {
    if (n_a.size() != n_b.size())
        throw std::invalid_argument("lambda_coefficient: size mismatch");
    if (kappa_h <= 0.0) throw std::invalid_argument("lambda_coefficient: kappa_h <= 0");
    Array out(n_a.size());
    for (Eigen::Index i = 0; i < n_a.size(); ++i) {
        const double a = n_a(i), b = n_b(i);
        if (a < 0.0 || a >= 1.0 || b < 0.0 || b >= 1.0)
            throw std::domain_error("lambda_coefficient: density outside [0,1)");
        double quad = 0.0;
        for (int q = 0; q < kGaussNodes; ++q) {
            const double xi = 0.5 * (kGaussX[q] + 1.0);
            quad += 0.5 * kGaussW[q] * enthalpy_deriv(xi * a + (1.0 - xi) * b, kappa_h);
        }
        if (std::abs(a - b) > 1e-9) {
            const double quotient =
                (enthalpy(b, kappa_h) - enthalpy(a, kappa_h)) / (b - a);
            if (std::abs(quad - quotient) > 1e-10 * std::max(1.0, std::abs(quotient)))
                throw std::runtime_error(
                    "lambda_coefficient: quadrature/difference-quotient disagreement");
        }
        out(i) = quad;
    }
    return out;
}

DualSolution dual_solve(const Grid& g, const std::vector<Array>& lambda_series,
                        const std::vector<double>& times, double eps, const Array& phi0) {
    if (lambda_series.size() != times.size() || times.size() < 2)
        throw std::invalid_argument("dual_solve: need matching lambda/time series");
    for (const auto& lam : lambda_series)
        if (lam.minCoeff() < 0.0) throw std::invalid_argument("dual_solve: negative lambda");
    if (eps <= 0.0) throw std::invalid_argument("dual_solve: eps must be positive");

    const int n = g.n_cells;
    const double h2 = g.h * g.h;
    Array phi = phi0;
    const double sup0 = norm_linf(phi0);

    auto zero_dirichlet_laplacian = [&](const Array& v) {
        Array lap(n);
        for (int i = 0; i < n; ++i) {
            const double left = (i == 0) ? -v(0) : v(i - 1);
            const double right = (i == n - 1) ? -v(n - 1) : v(i + 1);
            lap(i) = (left - 2.0 * v(i) + right) / h2;
        }
        return lap;
    };
    auto w12_sq = [&](const Array& v) {
        double grad = 0.0;
        // zero-Dirichlet ghost mirror at both walls
        grad += g.h * (2.0 * v(0) / g.h) * (2.0 * v(0) / g.h);
        for (int i = 1; i < n; ++i) {
            const double gr = (v(i) - v(i - 1)) / g.h;
            grad += g.h * gr * gr;
        }
        grad += g.h * (2.0 * v(n - 1) / g.h) * (2.0 * v(n - 1) / g.h);
        return g.h * v.square().sum() + grad;
    };

    DualSolution out;
    out.snapshots.push_back(phi);
    const double energy0 = w12_sq(phi0);
    double dissipation = 0.0;
    double sup_ratio = (sup0 > 0.0) ? 1.0 : 0.0;
    bool max_ok = true, energy_ok = true;

    for (std::size_t k = 1; k < times.size(); ++k) {
        const double dt_slab = times[k] - times[k - 1];
        const Array& lam = lambda_series[k - 1];
        // substeps keep the piecewise-constant lambda resolved in time
        const int substeps = std::max(1, static_cast<int>(std::ceil(dt_slab / g.h)));
        const double dt = dt_slab / substeps;
        for (int ss = 0; ss < substeps; ++ss) {
            Array lower = Array::Zero(n), diag(n), upper = Array::Zero(n);
            for (int i = 0; i < n; ++i) {
                const double mu = dt * (lam(i) + eps) / h2;
                const double stencil = (i == 0 || i == n - 1) ? 3.0 : 2.0;
                diag(i) = 1.0 + stencil * mu;
                if (i > 0) lower(i) = -mu;
                if (i < n - 1) upper(i) = -mu;
            }
            phi = tridiagonal_solve(lower, diag, upper, phi);
            dissipation += dt * g.h * zero_dirichlet_laplacian(phi).square().sum();
            const double sup = norm_linf(phi);
            if (sup > sup0 + 1e-12) max_ok = false;
            if (sup0 > 0.0) sup_ratio = std::max(sup_ratio, sup / sup0);
            if (w12_sq(phi) + eps * dissipation > energy0 * (1.0 + 1e-10) + 1e-14)
                energy_ok = false;
        }
        out.snapshots.push_back(phi);
    }
    out.max_principle_ok = max_ok;
    out.energy_ok = energy_ok;
    out.sup_ratio = sup_ratio;
    out.observed_constant =
        (dissipation > 0.0) ? (energy0 - w12_sq(phi)) / (eps * dissipation) : 0.0;
    return out;
}

DualityAudit duality_rate_audit(const Trajectory& coarse, const Trajectory& fine) {
    require_shared_discretization(coarse, fine);
    const Grid& g = coarse.grid;
    const Kinetics& kin_a = coarse.config.params.kinetics;
    const Kinetics& kin_b = fine.config.params.kinetics;

    DualityAudit audit;
    const double w0 = norm_l1(
        g, Array(coarse.snapshots[0].total.values - fine.snapshots[0].total.values));
    double integral = 0.0;
    double prev_r = 0.0;
    for (std::size_t k = 0; k < coarse.snapshots.size(); ++k) {
        const State& a = coarse.snapshots[k];
        const State& b = fine.snapshots[k];
        Array r(g.n_cells);
        for (int i = 0; i < g.n_cells; ++i) {
            const double ra = kin_a.growth(std::max(a.nutrient.values(i), 0.0)) *
                                  a.live.values(i) -
                              kin_a.removal_rate * a.dead.values(i);
            const double rb = kin_b.growth(std::max(b.nutrient.values(i), 0.0)) *
                                  b.live.values(i) -
                              kin_b.removal_rate * b.dead.values(i);
            r(i) = ra - rb;
        }
        const double r_l1 = norm_l1(g, r);
        if (k > 0) {
            const double dt = a.time - coarse.snapshots[k - 1].time;
            integral += 0.5 * dt * (r_l1 + prev_r);
        }
        prev_r = r_l1;
        audit.times.push_back(a.time);
        audit.lhs.push_back(norm_l1(g, Array(a.total.values - b.total.values)));
        audit.rhs.push_back(w0 + integral);
    }
    audit.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < audit.times.size(); ++k)
        audit.min_gap = std::min(audit.min_gap, audit.rhs[k] - audit.lhs[k]);
    return audit;
}

SweepSummary kappa_sweep(const SimConfig& base, const std::vector<double>& kappas,
                         double slack_factor) {
    if (kappas.size() < 2)
        throw std::invalid_argument("kappa_sweep: need at least two members");
    for (std::size_t i = 1; i < kappas.size(); ++i)
        if (!(kappas[i] < kappas[i - 1]))
            throw std::invalid_argument("kappa_sweep: list must be strictly decreasing");

    SweepSummary sum;
    sum.kind = "kappa";
    try {
        for (double kappa : kappas) {
            SimConfig cfg = base;
            cfg.mode = Mode::Degenerate;
            cfg.params.kappa = kappa;
            sum.members.push_back(make_member(kappa, run(cfg)));
        }
    } catch (const std::exception& e) {
        sum.failure = e.what();
        return sum;
    }

    const Trajectory& proxy = sum.members.back().trajectory;
    for (std::size_t i = 0; i + 1 < sum.members.size(); ++i) {
        sum.proxy_distance_n.push_back(
            trajectory_distance_n(sum.members[i].trajectory, proxy));
        sum.proxy_distance_c.push_back(
            trajectory_distance_c(sum.members[i].trajectory, proxy));
    }
    for (std::size_t i = 0; i + 1 < sum.members.size(); ++i) {
        const SweepMember& a = sum.members[i];
        const SweepMember& b = sum.members[i + 1];
        PairSummary pair;
        pair.param_a = a.parameter;
        pair.param_b = b.parameter;
        pair.distance_n = trajectory_distance_n(a.trajectory, b.trajectory);
        pair.distance_c = trajectory_distance_c(a.trajectory, b.trajectory);
        const double growth_sup = std::max(a.constants.growth_sup, b.constants.growth_sup);
        const double consumption_sup =
            std::max(a.constants.consumption_sup, b.constants.consumption_sup);
        pair.rate_n = rate_check_pair_n(a.trajectory, b.trajectory, growth_sup, slack_factor);
        pair.rate_c =
            rate_check_pair_c(a.trajectory, b.trajectory, consumption_sup, slack_factor);
        sum.adjacent_pairs.push_back(pair);
    }
    sum.completed = true;
    return sum;
}

SweepSummary eps_sweep(const SimConfig& base, double kappa,
                       const std::vector<double>& eps_list) {
    if (eps_list.empty()) throw std::invalid_argument("eps_sweep: empty list");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("eps_sweep: list must be strictly decreasing");

    SweepSummary sum;
    sum.kind = "eps";
    try {
        for (double eps : eps_list) {
            SimConfig cfg = base;
            cfg.mode = Mode::Regularized;
            cfg.params.kappa = kappa;
            cfg.params.eps = eps;
            cfg.initial.kappa_offset = false;
            sum.members.push_back(make_member(eps, run(cfg)));
        }
        // Degenerate reference from the same initial data, as the proxy.
        SimConfig ref = base;
        ref.mode = Mode::Degenerate;
        ref.params.kappa = kappa;
        ref.initial.kappa_offset = false;
        sum.members.push_back(make_member(0.0, run(ref)));
    } catch (const std::exception& e) {
        sum.failure = e.what();
        return sum;
    }

    const Trajectory& proxy = sum.members.back().trajectory;
    for (std::size_t i = 0; i + 1 < sum.members.size(); ++i) {
        sum.proxy_distance_n.push_back(
            trajectory_distance_n(sum.members[i].trajectory, proxy));
        sum.proxy_distance_c.push_back(
            trajectory_distance_c(sum.members[i].trajectory, proxy));
    }
    for (std::size_t i = 0; i + 2 < sum.members.size(); ++i) {
        PairSummary pair;
        pair.param_a = sum.members[i].parameter;
        pair.param_b = sum.members[i + 1].parameter;
        pair.distance_n =
            trajectory_distance_n(sum.members[i].trajectory, sum.members[i + 1].trajectory);
        pair.distance_c =
            trajectory_distance_c(sum.members[i].trajectory, sum.members[i + 1].trajectory);
        sum.adjacent_pairs.push_back(pair);
    }
    sum.completed = true;
    return sum;
}

}  // namespace tumorlab
