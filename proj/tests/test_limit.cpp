#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tumorlab/limit.hpp"

using namespace tumorlab;

namespace {

SimConfig sweep_base() {
    // kappa = 0.5 members need the front resolved well enough for the
    // species-rescale band, hence the full default resolution.
    SimConfig cfg;
    cfg.cells = 200;
    cfg.t_end = 0.2;
    cfg.snapshots = 10;
    return cfg;
}

}  // namespace

TEST_CASE("identical trajectories have zero distance and trivially pass") {
    const Trajectory traj = run(sweep_base());
    CHECK(trajectory_distance_n(traj, traj) == 0.0);
    CHECK(trajectory_distance_c(traj, traj) == 0.0);
    const RateVerdict v = rate_check_pair_n(traj, traj, 0.5, kRateSlackFactor);
    CHECK(v.pass);
    CHECK(v.worst_margin > 0.0);
    CHECK(v.lhs_final == 0.0);
}

TEST_CASE("rate check is falsifiable") {
    SimConfig a = sweep_base();
    a.params.kappa = 0.5;
    SimConfig b = sweep_base();
    b.params.kappa = 0.2;
    const Trajectory ta = run(a), tb = run(b);
    const DerivedConstants dc = derived_constants(1.0 + 0.5, a.params.kinetics);

    // true constant passes with positive margin
    const RateVerdict good = rate_check_pair_n(ta, tb, dc.growth_sup, kRateSlackFactor);
    CHECK(good.pass);
    CHECK(good.worst_margin > 0.0);

    // overstating G_m keeps it passing (rhs monotone in the constant)
    const RateVerdict loose = rate_check_pair_n(ta, tb, 2.0 * dc.growth_sup, kRateSlackFactor);
    CHECK(loose.pass);
    CHECK(loose.worst_margin >= good.worst_margin);

    // zero constant with zero slack must fail: the trajectories differ at t=0
    // by the kappa offset alone, and the gap grows
    const RateVerdict broken = rate_check_pair_n(ta, tb, 0.0, 0.0);
    CHECK_FALSE(broken.pass);
}

TEST_CASE("lambda coefficient") {
    const int n = 12;
    Array a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a(i) = 0.1 + 0.05 * i;
        b(i) = 0.12 + 0.05 * i;
    }
    const double kappa = 0.3;
    const Array lam = lambda_coefficient(a, b, kappa);
    for (int i = 0; i < n; ++i) {
        // mean-value bracket: lambda between H' at the endpoints (H' increasing)
        const double lo = std::min(enthalpy_deriv(a(i), kappa), enthalpy_deriv(b(i), kappa));
        const double hi = std::max(enthalpy_deriv(a(i), kappa), enthalpy_deriv(b(i), kappa));
        CHECK(lam(i) >= lo - 1e-12);
        CHECK(lam(i) <= hi + 1e-12);
        // exact difference quotient of H
        const double dq =
            (enthalpy(b(i), kappa) - enthalpy(a(i), kappa)) / (b(i) - a(i));
        CHECK(lam(i) == doctest::Approx(dq).epsilon(1e-10));
    }
    // coincident fields reduce to H'(n)
    const Array lam_eq = lambda_coefficient(a, a, kappa);
    for (int i = 0; i < n; ++i)
        CHECK(lam_eq(i) == doctest::Approx(enthalpy_deriv(a(i), kappa)).epsilon(1e-12));
}

TEST_CASE("dual solve: zero initial data stays zero") {
    const Grid g = Grid::uniform(32, 0.0, 1.0);
    const std::vector<double> times = {0.0, 0.05, 0.1};
    const std::vector<Array> lam(times.size(), Array::Constant(32, 0.4));
    const DualSolution sol = dual_solve(g, lam, times, 1e-8, Array::Zero(32));
    CHECK(sol.max_principle_ok);
    CHECK(sol.energy_ok);
    for (const auto& phi : sol.snapshots) CHECK(norm_linf(phi) == 0.0);
}

TEST_CASE("dual solve: heat-equation decay obeys the estimates") {
    const Grid g = Grid::uniform(64, 0.0, 1.0);
    const std::vector<double> times = {0.0, 0.1, 0.2, 0.3};
    const std::vector<Array> lam(times.size(), Array::Constant(64, 1.0));
    Array phi0(64);
    for (int i = 0; i < 64; ++i) phi0(i) = std::pow(std::sin(M_PI * g.centers(i)), 2);
    const DualSolution sol = dual_solve(g, lam, times, 1e-8, phi0);
    CHECK(sol.max_principle_ok);
    CHECK(sol.energy_ok);
    CHECK(sol.sup_ratio <= 1.0 + 1e-12);
    CHECK(norm_linf(sol.snapshots.back()) < 0.25 * norm_linf(phi0));
}

TEST_CASE("duality audit of identical trajectories") {
    const Trajectory traj = run(sweep_base());
    const DualityAudit audit = duality_rate_audit(traj, traj);
    REQUIRE(!audit.lhs.empty());
    for (double v : audit.lhs) CHECK(v == 0.0);
    CHECK(audit.min_gap >= 0.0);
}

TEST_CASE("kappa sweep on a reduced problem") {
    const SweepSummary sum = kappa_sweep(sweep_base(), {0.5, 0.2});
    REQUIRE(sum.completed);
    REQUIRE(sum.members.size() == 2);
    REQUIRE(sum.adjacent_pairs.size() == 1);
    CHECK(sum.adjacent_pairs[0].rate_n.pass);
    CHECK(sum.adjacent_pairs[0].rate_c.pass);
    CHECK(sum.proxy_distance_n.size() == 1);
    CHECK(sum.proxy_distance_n[0] == sum.adjacent_pairs[0].distance_n);
    for (const auto& m : sum.members) {
        CHECK(m.barrier.rho > 0.0);
        CHECK(m.energy.all_finite());
    }
    CHECK_THROWS_AS(kappa_sweep(sweep_base(), {0.2, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(kappa_sweep(sweep_base(), {0.5}), std::invalid_argument);
}

TEST_CASE("eps sweep appends the degenerate proxy") {
    const SweepSummary sum = eps_sweep(sweep_base(), 0.5, {0.1, 0.05});
    REQUIRE(sum.completed);
    REQUIRE(sum.members.size() == 3);
    CHECK(sum.members.back().parameter == 0.0);
    REQUIRE(sum.proxy_distance_n.size() == 2);
    CHECK(sum.proxy_distance_n[1] < sum.proxy_distance_n[0]);
    CHECK_THROWS_AS(eps_sweep(sweep_base(), 0.5, {0.05, 0.1}), std::invalid_argument);
}
