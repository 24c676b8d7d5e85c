#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tumorlab/grid.hpp"

using namespace tumorlab;

namespace {

Array random_array(int n, unsigned seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Array out(n);
    for (int i = 0; i < n; ++i) out(i) = dist(rng);
    return out;
}

}  // namespace

TEST_CASE("grid construction") {
    const Grid g = Grid::uniform(10, 0.0, 2.0);
    CHECK(g.h == doctest::Approx(0.2));
    CHECK(g.centers(0) == doctest::Approx(0.1));
    CHECK(g.centers(9) == doctest::Approx(1.9));
    CHECK_THROWS_AS(Grid::uniform(3, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid::uniform(10, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("gradient at faces") {
    const Grid g = Grid::uniform(8, 0.0, 1.0);
    // linear field: interior faces carry the exact slope, no-flux walls zero
    const Array lin = 3.0 * g.centers + 1.0;
    const Array grad = gradient_at_faces(g, Field::no_flux(lin));
    CHECK(grad(0) == 0.0);
    CHECK(grad(8) == 0.0);
    for (int f = 1; f < 8; ++f) CHECK(grad(f) == doctest::Approx(3.0).epsilon(1e-13));
    // Dirichlet walls: ghost mirror reproduces the slope for matching bc
    Field d = Field::dirichlet(lin, 1.0);  // bc equals the linear trace at x=0
    const Array gd = gradient_at_faces(g, d);
    CHECK(gd(0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("laplacian with Dirichlet mirror") {
    const Grid g = Grid::uniform(16, 0.0, 1.0);
    // constant field equal to its boundary value has zero laplacian
    Field c = Field::constant(g, 2.5, BoundaryTag::Dirichlet, 2.5);
    const Field lap = laplacian(g, c);
    for (int i = 0; i < 16; ++i) CHECK(lap.values(i) == doctest::Approx(0.0).epsilon(1e-13));
    // quadratic: exact second difference of 2 in the interior
    Array q(16);
    for (int i = 0; i < 16; ++i) q(i) = g.centers(i) * g.centers(i);
    const Field lq = laplacian(g, Field::dirichlet(q, 0.0));
    for (int i = 1; i < 15; ++i) CHECK(lq.values(i) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_THROWS_AS(laplacian(g, Field::no_flux(q)), std::invalid_argument);
}

TEST_CASE("diffusion flux divergence telescopes") {
    const Grid g = Grid::uniform(50, 0.0, 1.0);
    const Array f = random_array(50, 7);
    const Array coef = random_array(51, 11, 0.0, 5.0);
    const Field div = diffusion_flux_divergence(g, coef, Field::no_flux(f));
    CHECK(std::abs(g.h * div.values.sum()) <= 1e-13);
    // zero coefficients annihilate, constants annihilate
    CHECK(norm_linf(diffusion_flux_divergence(g, Array::Zero(51), Field::no_flux(f))) == 0.0);
    CHECK(norm_linf(diffusion_flux_divergence(g, coef, Field::constant(g, 0.7))) <= 1e-13);
    Array bad = coef;
    bad(25) = -1.0;
    CHECK_THROWS_AS(diffusion_flux_divergence(g, bad, Field::no_flux(f)),
                    std::invalid_argument);
    CHECK_THROWS_AS(diffusion_flux_divergence(g, random_array(50, 3), Field::no_flux(f)),
                    std::invalid_argument);
}

TEST_CASE("advective flux divergence telescopes and upwinds") {
    const Grid g = Grid::uniform(40, 0.0, 1.0);
    const Array species = random_array(40, 5);
    Array v = random_array(41, 9, -2.0, 2.0);
    const Field div = advective_flux_divergence(g, Field::no_flux(species), v);
    CHECK(std::abs(g.h * div.values.sum()) <= 1e-13);
    // uniform rightward velocity with a step profile: only the step face moves mass
    Array step = Array::Zero(40);
    step.head(20) = 1.0;
    const Array vr = Array::Constant(41, 1.0);
    const Field ds = advective_flux_divergence(g, Field::no_flux(step), vr);
    CHECK(ds.values(20) == doctest::Approx(-1.0 / g.h).epsilon(1e-12));  // inflow
    for (int i = 1; i < 19; ++i) CHECK(ds.values(i) == doctest::Approx(0.0));
}

TEST_CASE("norms") {
    const Grid g = Grid::uniform(10, 0.0, 2.0);
    const Array ones = Array::Ones(10);
    CHECK(norm_l1(g, ones) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(norm_l2(g, ones) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(norm_linf(Array(-3.0 * ones)) == 3.0);
    const Array a = random_array(10, 1, -1.0, 1.0), b = random_array(10, 2, -1.0, 1.0);
    CHECK(norm_l1(g, Array(a + b)) <= norm_l1(g, a) + norm_l1(g, b) + 1e-14);
    CHECK(norm_l2(g, Array(2.0 * a)) == doctest::Approx(2.0 * norm_l2(g, a)).epsilon(1e-13));
}

TEST_CASE("state assembly and derived fields") {
    const Grid g = Grid::uniform(10, 0.0, 1.0);
    const Array nl = Array::Constant(10, 0.2), nd = Array::Constant(10, 0.2);
    const Array c = Array::Constant(10, 1.0);
    const State s = make_state(0.0, nl, nd, c, 1.0, 0.5);
    CHECK(s.total.values(4) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(s.pressure_field.values(4) ==
          doctest::Approx(pressure(0.4, 0.5)).epsilon(1e-14));
    CHECK(s.enthalpy_field.values(4) ==
          doctest::Approx(enthalpy(0.4, 0.5)).epsilon(1e-14));
    CHECK(s.nutrient.tag == BoundaryTag::Dirichlet);
}

TEST_CASE("initial state validation") {
    const Grid g = Grid::uniform(10, 0.0, 1.0);
    const Array nl = Array::Constant(10, 0.2), nd = Array::Constant(10, 0.2);
    const Array c = Array::Constant(10, 1.0);
    CHECK(validate_initial_state(make_state(0.0, nl, nd, c, 1.0, 0.5), 0.1).pass);

    Array neg = nl;
    neg(3) = -0.01;
    const auto rep1 = validate_initial_state(make_state(0.0, neg, nd, c, 1.0, 0.5), 0.1);
    CHECK_FALSE(rep1.pass);
    CHECK(rep1.witness_cell == 3);

    const Array big = Array::Constant(10, 0.48);
    const auto rep2 = validate_initial_state(make_state(0.0, big, big, c, 1.0, 0.5), 0.1);
    CHECK_FALSE(rep2.pass);
    CHECK(rep2.detail == "max n exceeds 1 - theta_min");
}
