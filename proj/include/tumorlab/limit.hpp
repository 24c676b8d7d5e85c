#ifndef TUMORLAB_LIMIT_HPP
#define TUMORLAB_LIMIT_HPP

/**
 * @file limit.hpp
 * @brief kappa- and eps-sweep orchestration, pairwise L1 rate checks, and
 *        the dual-problem verifier behind the rate inequality.
 */

#include <string>
#include <vector>

#include "tumorlab/diagnostics.hpp"
#include "tumorlab/solver.hpp"

namespace tumorlab {

struct SweepMember {
    double parameter = 0.0;  ///< kappa or eps
    Trajectory trajectory;
    EnergyReport energy;
    std::vector<double> segregation;       ///< per snapshot
    std::vector<double> complementarity;   ///< per snapshot
    BarrierReport barrier;
    DerivedConstants constants;
};

struct RateVerdict {
    bool pass = false;
    double worst_margin = 0.0;  ///< min over snapshots of rhs - lhs
    double lhs_final = 0.0;
    double rhs_final = 0.0;
    double slack = 0.0;
};

struct PairSummary {
    double param_a = 0.0;  ///< larger parameter
    double param_b = 0.0;
    double distance_n = 0.0;  ///< sup over snapshot times of L1 distance
    double distance_c = 0.0;
    RateVerdict rate_n;
    RateVerdict rate_c;
};

struct SweepSummary {
    std::string kind;  ///< "kappa" or "eps"
    std::vector<SweepMember> members;  ///< sorted by decreasing parameter
    std::vector<PairSummary> adjacent_pairs;
    /// L1 distance of each member to the limit proxy (smallest parameter in a
    /// kappa sweep; the degenerate run in an eps sweep). One entry per
    /// non-proxy member, in member order.
    std::vector<double> proxy_distance_n;
    std::vector<double> proxy_distance_c;
    bool completed = false;
    std::string failure;
};

/// Sup over shared snapshot times of the L1 distance between total densities.
double trajectory_distance_n(const Trajectory& a, const Trajectory& b);
double trajectory_distance_c(const Trajectory& a, const Trajectory& b);

/**
 * Checks the pairwise L1 rate bound: for each snapshot time t,
 *   sup_{s<=t} |n_k(s)-n_k'(s)|_L1
 *     <= |n_k(0)-n_k'(0)|_L1 + growth_sup * t * sup_{s<=t}|n_k(s)|_L1 + slack
 * and analogously for c with consumption_sup. slack scales with (h + mean dt).
 */
RateVerdict rate_check_pair_n(const Trajectory& coarse, const Trajectory& fine,
                              double growth_sup, double slack_factor);
RateVerdict rate_check_pair_c(const Trajectory& coarse, const Trajectory& fine,
                              double consumption_sup, double slack_factor);

/// Default slack scale frozen after calibration on the default sweep.
inline constexpr double kRateSlackFactor = 2.0;

/**
 * Per-cell coefficient  lambda_i = integral_0^1 H'(xi a_i + (1-xi) b_i) dxi
 * by 16-node Gauss-Legendre, cross-checked against the exact difference
 * quotient (H(b)-H(a))/(b-a) to 1e-10 wherever a != b.
 */
Array lambda_coefficient(const Array& n_a, const Array& n_b, double kappa_h);

struct DualSolution {
    std::vector<Array> snapshots;  ///< phi at the lambda sample times
    bool max_principle_ok = false;
    bool energy_ok = false;
    double sup_ratio = 0.0;           ///< max_t |phi(t)|_inf / |phi0|_inf
    double observed_constant = 0.0;   ///< best C in the discrete energy inequality
};

/**
 * Backward-Euler integration of  d phi/dt = (lambda(t,x) + eps) Lap phi  with
 * zero Dirichlet walls; lambda is piecewise constant in time between its
 * sample times. Verifies the sup-norm and energy estimates.
 */
DualSolution dual_solve(const Grid& g, const std::vector<Array>& lambda_series,
                        const std::vector<double>& times, double eps, const Array& phi0);

struct DualityAudit {
    std::vector<double> times;
    std::vector<double> lhs;  ///< |W(t)|_L1
    std::vector<double> rhs;  ///< |W(0)|_L1 + int_0^t |R|_L1
    double min_gap = 0.0;     ///< min over t of rhs - lhs
};

/// Evaluates the estimate chain behind the rate check for a trajectory pair.
DualityAudit duality_rate_audit(const Trajectory& coarse, const Trajectory& fine);

/// Runs one member per kappa (strictly decreasing list) on a shared grid and
/// assembles diagnostics, pairwise distances, and rate verdicts.
SweepSummary kappa_sweep(const SimConfig& base, const std::vector<double>& kappas,
                         double slack_factor = kRateSlackFactor);

/**
 * Runs regularized members for each eps (strictly decreasing) at fixed kappa
 * plus a degenerate reference run, all from identical initial data (the
 * kappa offset is disabled so the modes share initial states).
 */
SweepSummary eps_sweep(const SimConfig& base, double kappa,
                       const std::vector<double>& eps_list);

}  // namespace tumorlab

#endif  // TUMORLAB_LIMIT_HPP
