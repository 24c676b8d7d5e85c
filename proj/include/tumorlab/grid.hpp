#ifndef TUMORLAB_GRID_HPP
#define TUMORLAB_GRID_HPP

/**
 * @file grid.hpp
 * @brief 1D finite-volume mesh, cell-averaged fields, and discrete operators.
 *
 * Fields are value types (Eigen arrays plus a boundary tag); operators are
 * free functions. The flux-form operators conserve total mass exactly by
 * telescoping, which the solver's mass accounting relies on.
 */

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tumorlab/model.hpp"

namespace tumorlab {

using Array = Eigen::ArrayXd;

struct Grid {
    int n_cells = 0;
    double x_min = 0.0;
    double x_max = 1.0;
    double h = 0.0;
    Array centers;

    static Grid uniform(int n_cells, double x_min, double x_max) {
        if (n_cells < 4) throw std::invalid_argument("Grid: need at least 4 cells");
        if (!(x_max > x_min)) throw std::invalid_argument("Grid: empty interval");
        Grid g;
        g.n_cells = n_cells;
        g.x_min = x_min;
        g.x_max = x_max;
        g.h = (x_max - x_min) / n_cells;
        g.centers = x_min + g.h * (Array::LinSpaced(n_cells, 0.5, n_cells - 0.5));
        return g;
    }
};

enum class BoundaryTag { NoFlux, Dirichlet };

struct Field {
    Array values;
    BoundaryTag tag = BoundaryTag::NoFlux;
    double boundary_value = 0.0;  ///< used only for Dirichlet

    static Field no_flux(const Array& v) { return Field{v, BoundaryTag::NoFlux, 0.0}; }
    static Field dirichlet(const Array& v, double bc) {
        return Field{v, BoundaryTag::Dirichlet, bc};
    }
    static Field constant(const Grid& g, double value, BoundaryTag tag = BoundaryTag::NoFlux,
                          double bc = 0.0) {
        return Field{Array::Constant(g.n_cells, value), tag, bc};
    }
};

// ---------------------------------------------------------------------------
// Discrete operators
// ---------------------------------------------------------------------------

/**
 * Face gradients, N+1 values. Interior face i+1/2 carries
 * (f_{i+1} - f_i)/h. No-flux walls give zero; Dirichlet walls use the
 * mirrored ghost value 2*bc - f_interior.
 */
inline Array gradient_at_faces(const Grid& g, const Field& f) {
    const int n = g.n_cells;
    Array grad = Array::Zero(n + 1);
    grad.segment(1, n - 1) = (f.values.tail(n - 1) - f.values.head(n - 1)) / g.h;
    if (f.tag == BoundaryTag::Dirichlet) {
        grad(0) = 2.0 * (f.values(0) - f.boundary_value) / g.h;
        grad(n) = 2.0 * (f.boundary_value - f.values(n - 1)) / g.h;
    }
    return grad;
}

/**
 * Second-difference Laplacian for a Dirichlet-tagged field with
 * ghost values 2*bc - interior mirror at the walls.
 */
inline Field laplacian(const Grid& g, const Field& f) {
    if (f.tag != BoundaryTag::Dirichlet)
        throw std::invalid_argument("laplacian: field must carry a Dirichlet tag");
    const int n = g.n_cells;
    const double h2 = g.h * g.h;
    Array out(n);
    for (int i = 0; i < n; ++i) {
        const double left = (i == 0) ? 2.0 * f.boundary_value - f.values(0) : f.values(i - 1);
        const double right =
            (i == n - 1) ? 2.0 * f.boundary_value - f.values(n - 1) : f.values(i + 1);
        out(i) = (left - 2.0 * f.values(i) + right) / h2;
    }
    return Field{out, f.tag, f.boundary_value};
}

/**
 * Conservative divergence of a diffusive flux: face_coef * face gradient,
 * with zero flux through the walls. face_coef has N+1 entries; its wall
 * entries are ignored. Output sums to zero exactly (telescoping).
 */
inline Field diffusion_flux_divergence(const Grid& g, const Array& face_coef, const Field& f) {
    const int n = g.n_cells;
    if (face_coef.size() != n + 1)
        throw std::invalid_argument("diffusion_flux_divergence: need N+1 face coefficients");
    if ((face_coef < 0.0).any())
        throw std::invalid_argument("diffusion_flux_divergence: negative face coefficient");
    if (f.tag != BoundaryTag::NoFlux)
        throw std::invalid_argument("diffusion_flux_divergence: field must be no-flux");
    Array flux = Array::Zero(n + 1);
    flux.segment(1, n - 1) =
        face_coef.segment(1, n - 1) * (f.values.tail(n - 1) - f.values.head(n - 1)) / g.h;
    Array out = (flux.tail(n) - flux.head(n)) / g.h;
    return Field::no_flux(out);
}

/**
 * Conservative first-order upwind divergence of (species * velocity).
 * face_velocity has N+1 entries; wall entries are forced to zero.
 */
inline Field advective_flux_divergence(const Grid& g, const Field& species,
                                       const Array& face_velocity) {
    const int n = g.n_cells;
    if (face_velocity.size() != n + 1)
        throw std::invalid_argument("advective_flux_divergence: need N+1 face velocities");
    Array flux = Array::Zero(n + 1);
    for (int i = 1; i < n; ++i) {
        const double v = face_velocity(i);
        const double upwind = (v >= 0.0) ? species.values(i - 1) : species.values(i);
        flux(i) = v * upwind;
    }
    Array out = (flux.tail(n) - flux.head(n)) / g.h;
    return Field::no_flux(out);
}

// ---------------------------------------------------------------------------
// Norms (h-weighted; L-inf is the plain max of |.|)
// ---------------------------------------------------------------------------

inline double norm_l1(const Grid& g, const Array& v) { return g.h * v.abs().sum(); }
inline double norm_l1(const Grid& g, const Field& f) { return norm_l1(g, f.values); }
inline double norm_l2(const Grid& g, const Array& v) { return std::sqrt(g.h * v.square().sum()); }
inline double norm_l2(const Grid& g, const Field& f) { return norm_l2(g, f.values); }
inline double norm_linf(const Array& v) { return v.abs().maxCoeff(); }
inline double norm_linf(const Field& f) { return norm_linf(f.values); }

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

/// Primary fields plus cached derived fields at one time instant.
struct State {
    double time = 0.0;
    Field live;      ///< n_l, no-flux
    Field dead;      ///< n_d, no-flux
    Field nutrient;  ///< c, Dirichlet
    Field total;     ///< n = n_l + n_d
    Field pressure_field;
    Field enthalpy_field;

    /// Rebuild the derived caches from the primaries.
    void refresh_derived(double kappa) {
        total = Field::no_flux(live.values + dead.values);
        Array p(total.values.size()), H(total.values.size());
        for (Eigen::Index i = 0; i < total.values.size(); ++i) {
            p(i) = pressure(total.values(i), kappa);
            H(i) = enthalpy(total.values(i), kappa);
        }
        pressure_field = Field::no_flux(p);
        enthalpy_field = Field::no_flux(H);
    }
};

inline State make_state(double t, const Array& n_l, const Array& n_d, const Array& c,
                        double c_boundary, double kappa) {
    State s;
    s.time = t;
    s.live = Field::no_flux(n_l);
    s.dead = Field::no_flux(n_d);
    s.nutrient = Field::dirichlet(c, c_boundary);
    s.refresh_derived(kappa);
    return s;
}

struct InitialStateReport {
    bool pass = true;
    int witness_cell = -1;
    std::string detail;
};

/// Checks nonnegativity of all three fields and max(n) <= 1 - theta_min.
inline InitialStateReport validate_initial_state(const State& s, double theta_min) {
    InitialStateReport rep;
    auto check_nonneg = [&](const Field& f, const char* name) {
        for (Eigen::Index i = 0; i < f.values.size(); ++i) {
            if (f.values(i) < 0.0) {
                rep.pass = false;
                rep.witness_cell = static_cast<int>(i);
                rep.detail = std::string(name) + " negative";
                return false;
            }
        }
        return true;
    };
    if (!check_nonneg(s.live, "n_l")) return rep;
    if (!check_nonneg(s.dead, "n_d")) return rep;
    if (!check_nonneg(s.nutrient, "c")) return rep;
    Eigen::Index arg = 0;
    const double max_n = s.total.values.maxCoeff(&arg);
    if (max_n > 1.0 - theta_min) {
        rep.pass = false;
        rep.witness_cell = static_cast<int>(arg);
        rep.detail = "max n exceeds 1 - theta_min";
    }
    return rep;
}

}  // namespace tumorlab

#endif  // TUMORLAB_GRID_HPP
