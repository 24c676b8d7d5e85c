// Acceptance suite: one pass/fail line per criterion, tolerances pinned
// below. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "tumorlab/limit.hpp"
#include "tumorlab/runner.hpp"

using namespace tumorlab;

namespace {

// Pinned tolerances.
constexpr double kEnthalpyTol = 1e-8;
constexpr double kSegregationTol = 1e-13;
constexpr double kBarrierRhoMin = 1e-3;
constexpr double kPositivityTol = -1e-12;
constexpr double kNutrientSlack = 1e-10;
constexpr double kMassTol = 1e-8;
constexpr double kComplementarityFactor = 0.25;
constexpr double kEnergyUniformityFactor = 10.0;
constexpr double kSelfConvergenceOrder = 0.8;

int failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("[%2d] %-28s %s  (%s)\n", idx, name, pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fb, double fm, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, fm, flm, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, fb, frm, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    if (a == b) return 0.0;
    return simpson(f, a, b, f(a), f(b), f(0.5 * (a + b)), 1e-12, 40);
}

double max_segregation_defect(const Trajectory& traj) {
    double worst = 0.0;
    for (const auto& s : traj.snapshots) {
        const double res = segregation_residual(traj.grid, s);
        worst = std::max(worst,
                         std::abs(res - traj.config.params.kappa *
                                            norm_l1(traj.grid, s.total)));
    }
    return worst;
}

double mass_defect(const Trajectory& traj) {
    const double m0 = traj.grid.h * traj.snapshots.front().total.values.sum();
    const double m1 = traj.grid.h * traj.snapshots.back().total.values.sum();
    return std::abs(m1 - m0 - traj.applied_source_integral);
}

/// Restriction of a fine run (2N cells) onto the coarse N-cell grid by
/// pairwise cell averaging, compared in L1 at the final snapshot.
double refinement_distance(const Trajectory& coarse, const Trajectory& fine) {
    const int n = coarse.grid.n_cells;
    const Array& f = fine.snapshots.back().total.values;
    const Array& c = coarse.snapshots.back().total.values;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += std::abs(c(i) - 0.5 * (f(2 * i) + f(2 * i + 1)));
    return coarse.grid.h * sum;
}

}  // namespace

int main() {
    const auto t_start = std::chrono::steady_clock::now();

    // Shared runs: default sweeps at desk scale.
    SimConfig base;  // N=200, T=0.5, 50 snapshots
    const std::vector<double> kappas = {0.5, 0.2, 0.1, 0.05, 0.02};
    const SweepSummary ks = kappa_sweep(base, kappas);
    const SweepSummary es = eps_sweep(base, 0.5, {0.1, 0.05, 0.025});

    std::vector<const SweepMember*> all_members;
    for (const auto& m : ks.members) all_members.push_back(&m);
    for (const auto& m : es.members) all_members.push_back(&m);

    // 1: closed-form enthalpy vs adaptive quadrature.
    {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (double kappa : {0.01, 0.1, 1.0}) {
            auto integrand = [kappa](double s) { return s * pressure_deriv(s, kappa); };
            for (int i = 0; i <= 99; ++i) {
                const double n = 0.99 * i / 99.0;
                worst = std::max(worst,
                                 std::abs(enthalpy(n, kappa) - integrate(integrand, 0.0, n)));
            }
        }
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        report(1, "enthalpy identity", worst <= kEnthalpyTol && secs < 1.0,
               "max defect " + fmt(worst) + ", " + fmt(secs) + " s");
    }

    // 2: segregation identity on every snapshot of every run.
    {
        double worst = 0.0;
        for (const auto* m : all_members)
            worst = std::max(worst, max_segregation_defect(m->trajectory));
        report(2, "segregation identity", worst <= kSegregationTol,
               "max defect " + fmt(worst));
    }

    // 3: barrier across the kappa sweep with a single rho.
    {
        double max_total = 0.0;
        for (const auto& m : ks.members)
            max_total = std::max(max_total, m.barrier.max_total);
        const double rho = 1.0 - max_total;
        report(3, "barrier", ks.completed && rho >= kBarrierRhoMin, "rho " + fmt(rho));
    }

    // 4: positivity and nutrient barrier over all accepted steps.
    {
        bool ok = true;
        double worst_min = 0.0, worst_over = 0.0;
        for (const auto* m : all_members) {
            const Trajectory& t = m->trajectory;
            worst_min = std::min(worst_min, t.min_field_value);
            worst_over = std::max(worst_over, t.max_nutrient - m->constants.c_max);
            if (t.min_field_value < kPositivityTol ||
                t.max_nutrient > m->constants.c_max + kNutrientSlack)
                ok = false;
        }
        report(4, "positivity + nutrient bound", ok,
               "min field " + fmt(worst_min) + ", c overshoot " + fmt(worst_over));
    }

    // 5: mass accounting per run.
    {
        double worst = 0.0;
        for (const auto* m : all_members)
            worst = std::max(worst, mass_defect(m->trajectory));
        report(5, "mass accounting", worst <= kMassTol, "max defect " + fmt(worst));
    }

    // 6: pairwise rate bound and monotone distances.
    {
        bool ok = ks.completed;
        double margin = 1e300;
        for (const auto& p : ks.adjacent_pairs) {
            ok = ok && p.rate_n.pass && p.rate_c.pass;
            margin = std::min({margin, p.rate_n.worst_margin, p.rate_c.worst_margin});
        }
        for (std::size_t i = 1; i < ks.adjacent_pairs.size(); ++i)
            ok = ok && ks.adjacent_pairs[i].distance_n < ks.adjacent_pairs[i - 1].distance_n;
        for (std::size_t i = 1; i < ks.proxy_distance_n.size(); ++i)
            ok = ok && ks.proxy_distance_n[i] < ks.proxy_distance_n[i - 1];
        report(6, "convergence rate", ok && margin > 0.0, "min margin " + fmt(margin));
    }

    // 7: complementarity decay at T between the extreme kappas.
    {
        const double res_big = ks.members.front().complementarity.back();
        const double res_small = ks.members.back().complementarity.back();
        report(7, "complementarity decay",
               ks.completed && res_small <= kComplementarityFactor * res_big,
               fmt(res_small) + " vs " + fmt(res_big) + " at kappa 0.5");
    }

    // 8: strictly decreasing eps gaps to the degenerate run.
    {
        bool ok = es.completed && es.proxy_distance_n.size() >= 3;
        for (std::size_t i = 1; i < es.proxy_distance_n.size(); ++i)
            ok = ok && es.proxy_distance_n[i] < es.proxy_distance_n[i - 1];
        std::string gaps;
        for (double d : es.proxy_distance_n) gaps += fmt(d) + " ";
        report(8, "regularization convergence", ok, "gaps " + gaps);
    }

    // 9: dual-problem max principle and C=1 energy inequality on lambda
    // from the sweep's first adjacent pair.
    {
        const Trajectory& ta = ks.members[0].trajectory;
        const Trajectory& tb = ks.members[1].trajectory;
        std::vector<Array> lam;
        std::vector<double> times;
        for (std::size_t k = 0; k < ta.snapshots.size(); ++k) {
            lam.push_back(lambda_coefficient(ta.snapshots[k].total.values,
                                             tb.snapshots[k].total.values,
                                             ks.members[0].parameter));
            times.push_back(ta.snapshots[k].time);
        }
        Array phi0(ta.grid.n_cells);
        for (int i = 0; i < ta.grid.n_cells; ++i)
            phi0(i) = std::pow(std::sin(M_PI * ta.grid.centers(i)), 2);
        const DualSolution dual = dual_solve(ta.grid, lam, times, 1e-8, phi0);
        report(9, "dual-problem estimates", dual.max_principle_ok && dual.energy_ok,
               "sup ratio " + fmt(dual.sup_ratio));
    }

    // 10: energy functionals finite with kappa-uniform maxima.
    {
        bool ok = ks.completed;
        double worst_ratio = 0.0;
        const auto baseline = ks.members.front().energy.maxima();
        for (const auto& m : ks.members) {
            ok = ok && m.energy.all_finite();
            const auto mx = m.energy.maxima();
            for (std::size_t j = 0; j < mx.size(); ++j) {
                const double ratio = mx[j].second / (baseline[j].second + 1e-9);
                worst_ratio = std::max(worst_ratio, ratio);
                ok = ok && ratio <= kEnergyUniformityFactor;
            }
        }
        report(10, "energy boundedness", ok, "worst ratio " + fmt(worst_ratio));
    }

    // 11: L1 self-convergence order between N = 100/200/400.
    {
        auto at = [](int cells) {
            SimConfig cfg;
            cfg.cells = cells;
            cfg.params.kappa = 0.1;
            return run(cfg);
        };
        const Trajectory r100 = at(100), r200 = at(200), r400 = at(400);
        const double d1 = refinement_distance(r100, r200);
        const double d2 = refinement_distance(r200, r400);
        const double order = std::log2(d1 / d2);
        report(11, "self-convergence", order >= kSelfConvergenceOrder,
               "order " + fmt(order));
    }

    // 12: byte-identical data files on repeated identical invocations.
    {
        namespace fs = std::filesystem;
        const fs::path tmp = fs::temp_directory_path() / "tumorlab_acceptance";
        fs::create_directories(tmp);
        auto emit = [&](const fs::path& dir) {
            fs::create_directories(dir);
            SimConfig cfg;
            cfg.cells = 100;
            cfg.t_end = 0.2;
            cfg.snapshots = 10;
            const Trajectory traj = run(cfg);
            write_trajectory_csv((dir / "trajectory.csv").string(), traj);
            write_diagnostics_csv((dir / "diagnostics.csv").string(), traj,
                                  energy_report(traj, cfg.params.kappa));
        };
        emit(tmp / "a");
        emit(tmp / "b");
        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };
        const bool ok =
            slurp(tmp / "a/trajectory.csv") == slurp(tmp / "b/trajectory.csv") &&
            slurp(tmp / "a/diagnostics.csv") == slurp(tmp / "b/diagnostics.csv") &&
            !slurp(tmp / "a/trajectory.csv").empty();
        fs::remove_all(tmp);
        report(12, "determinism", ok, "trajectory + diagnostics byte-compared");
    }

    const double total = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t_start)
                             .count();
    std::printf("%d/12 criteria passed in %.2f s\n", 12 - failures, total);
    return failures == 0 ? 0 : 1;
}
