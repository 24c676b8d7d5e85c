#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tumorlab/diagnostics.hpp"

using namespace tumorlab;

namespace {

Trajectory short_run(int cells = 64, double t_end = 0.1) {
    SimConfig cfg;
    cfg.cells = cells;
    cfg.t_end = t_end;
    cfg.snapshots = 8;
    return run(cfg);
}

}  // namespace

TEST_CASE("segregation residual equals kappa * |n|_L1") {
    const Grid g = Grid::uniform(40, 0.0, 1.0);
    const double kappa = 0.37;
    Array nl(40), nd(40), c(40);
    for (int i = 0; i < 40; ++i) {
        nl(i) = 0.3 * (1.0 + std::sin(5.0 * i)) / 2.0;
        nd(i) = 0.2 * (1.0 + std::cos(3.0 * i)) / 2.0;
        c(i) = 1.0;
    }
    const State s = make_state(0.0, nl, nd, c, 1.0, kappa);
    const double res = segregation_residual(g, s);
    CHECK(std::abs(res - kappa * norm_l1(g, s.total)) <= 1e-13);
}

TEST_CASE("complementarity residual vanishes on the empty state") {
    const Grid g = Grid::uniform(20, 0.0, 1.0);
    Kinetics kin;
    const Array zero = Array::Zero(20);
    const State s = make_state(0.0, zero, zero, Array::Constant(20, 1.0), 1.0, 0.5);
    CHECK(complementarity_residual(g, s, kin) == 0.0);
}

TEST_CASE("energy report structure on a short run") {
    const Trajectory traj = short_run();
    const EnergyReport rep = energy_report(traj, traj.config.params.kappa);
    REQUIRE(rep.times.size() == traj.snapshots.size());
    CHECK(rep.all_finite());

    auto nondecreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] < v[i - 1] - 1e-14) return false;
        return true;
    };
    CHECK(nondecreasing(rep.nutrient_grad_sup));
    CHECK(nondecreasing(rep.live_grad_sup));
    CHECK(nondecreasing(rep.dead_grad_sup));
    CHECK(nondecreasing(rep.enthalpy_grad_sup));
    CHECK(nondecreasing(rep.nutrient_dt_sq));
    CHECK(nondecreasing(rep.enthalpy_dt_sq));
    CHECK(nondecreasing(rep.enthalpy_grad_cum));
    CHECK(nondecreasing(rep.pressure_grad_cum));
    for (double v : rep.potential_integral) CHECK(v >= 0.0);
    CHECK(rep.maxima().size() == 11);
}

TEST_CASE("pressure equation residual per interval") {
    const Trajectory traj = short_run();
    const auto res = pressure_equation_residual(traj, traj.config.params.kappa);
    REQUIRE(res.size() == traj.snapshots.size() - 1);
    for (double r : res) {
        CHECK(std::isfinite(r));
        CHECK(r >= 0.0);
    }
}

TEST_CASE("barrier monitor") {
    const Trajectory traj = short_run();
    const BarrierReport rep = barrier_monitor(traj);
    CHECK(rep.max_total == traj.max_total);
    CHECK(rep.rho == doctest::Approx(1.0 - traj.max_total).epsilon(1e-14));
    CHECK(rep.rho > 0.0);
}

TEST_CASE("test bank functions are compactly supported with exact derivatives") {
    const double T = 0.4, a = 0.0, b = 1.0;
    const auto bank = default_test_bank(T, a, b);
    REQUIRE(bank.size() >= 3);
    for (const auto& tf : bank) {
        CHECK(std::abs(tf.value(0.0, 0.5)) <= 1e-14);
        CHECK(std::abs(tf.value(T, 0.5)) <= 1e-14);
        CHECK(std::abs(tf.value(0.2, a)) <= 1e-14);
        CHECK(std::abs(tf.value(0.2, b)) <= 1e-14);
        // analytic derivatives vs central differences
        const double t = 0.17, x = 0.43, d = 1e-6;
        const double fdt = (tf.value(t + d, x) - tf.value(t - d, x)) / (2.0 * d);
        const double fdx = (tf.value(t, x + d) - tf.value(t, x - d)) / (2.0 * d);
        CHECK(tf.dt(t, x) == doctest::Approx(fdt).epsilon(1e-6));
        CHECK(tf.dx(t, x) == doctest::Approx(fdx).epsilon(1e-6));
    }
}

TEST_CASE("weak form defect vanishes for a frozen inert run") {
    SimConfig cfg;
    cfg.cells = 64;
    cfg.t_end = 0.1;
    cfg.snapshots = 20;
    cfg.params.kinetics.growth_max = 0.0;
    cfg.params.kinetics.death_max = 0.0;
    cfg.params.kinetics.consumption_rate = 0.0;
    cfg.initial.bump_amplitude = 0.0;  // flat fields, zero pressure gradient
    const Trajectory traj = run(cfg);
    const auto bank = default_test_bank(cfg.t_end, cfg.x_min, cfg.x_max);
    CHECK(weak_form_check(traj, bank) <= 1e-10);
}

TEST_CASE("weak form defect shrinks under refinement") {
    auto defect = [](int cells, int snaps) {
        SimConfig cfg;
        cfg.cells = cells;
        cfg.t_end = 0.2;
        cfg.snapshots = snaps;
        const Trajectory traj = run(cfg);
        return weak_form_check(traj, default_test_bank(cfg.t_end, cfg.x_min, cfg.x_max));
    };
    const double coarse = defect(50, 10);
    const double fine = defect(200, 40);
    CHECK(std::isfinite(coarse));
    CHECK(fine < coarse);
}
