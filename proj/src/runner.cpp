#include "tumorlab/runner.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tumorlab {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string hex_hash(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string now_iso() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

double mass_of(const Grid& g, const State& s) { return g.h * s.total.values.sum(); }

/// Max over snapshots of the h-weighted L1 defect |(1-n)p - kappa n|.
double segregation_identity_defect(const Trajectory& traj) {
    const double kappa = traj.config.params.kappa;
    double worst = 0.0;
    for (const auto& s : traj.snapshots) {
        const Array defect =
            ((1.0 - s.total.values) * s.pressure_field.values - kappa * s.total.values).abs();
        worst = std::max(worst, traj.grid.h * defect.sum());
    }
    return worst;
}

json summary_payload(const Config& cfg, const Trajectory& traj,
                     const std::vector<std::pair<std::string, bool>>& checks) {
    const Grid& g = traj.grid;
    const double mass0 = mass_of(g, traj.snapshots.front());
    const double mass1 = mass_of(g, traj.snapshots.back());
    const double c0_max = traj.snapshots.front().nutrient.values.maxCoeff();
    const DerivedConstants dc = derived_constants(c0_max, traj.config.params.kinetics);

    json j;
    j["config_hash"] = hex_hash(config_hash(cfg));
    j["mode"] = traj.config.mode == Mode::Degenerate ? "degenerate" : "regularized";
    j["kappa"] = traj.config.params.kappa;
    j["eps"] = traj.config.params.eps;
    j["cells"] = g.n_cells;
    j["x_min"] = g.x_min;
    j["x_max"] = g.x_max;
    j["h"] = g.h;
    j["t_end"] = traj.config.t_end;
    j["snapshots"] = traj.snapshots.size();
    j["steps"] = traj.steps.size();
    j["mean_dt"] = traj.mean_dt();
    j["mass_initial"] = mass0;
    j["mass_final"] = mass1;
    j["applied_source_integral"] = traj.applied_source_integral;
    j["mass_defect"] = std::abs(mass1 - mass0 - traj.applied_source_integral);
    j["min_field_value"] = traj.min_field_value;
    j["max_nutrient"] = traj.max_nutrient;
    j["max_total"] = traj.max_total;
    j["barrier_rho"] = 1.0 - traj.max_total;
    j["c_max"] = dc.c_max;
    j["growth_sup"] = dc.growth_sup;
    j["consumption_sup"] = dc.consumption_sup;
    j["segregation_identity_defect"] = segregation_identity_defect(traj);
    j["clamp_events"] = traj.clamp_events;
    j["tolerances"] = {{"mass", cfg.checks.mass_tolerance},
                       {"segregation", cfg.checks.segregation_tolerance},
                       {"barrier_rho_min", cfg.checks.barrier_rho_min},
                       {"positivity", cfg.checks.positivity_tolerance}};
    json jc = json::object();
    for (const auto& [name, pass] : checks) jc[name] = pass;
    j["checks"] = jc;
    return j;
}

/// Config for one sweep member, so its summary hash matches its actual run.
Config member_config(const Config& base, const SimConfig& member_sim) {
    Config c = base;
    c.sim = member_sim;
    return c;
}

void write_member_dir(const fs::path& dir, const Config& cfg, const SweepMember& m,
                      std::vector<std::string>& outputs, const fs::path& root,
                      std::vector<std::pair<std::string, bool>>& checks,
                      const std::string& tag) {
    fs::create_directories(dir);
    const Config mc = member_config(cfg, m.trajectory.config);
    auto member_checks = run_checks(mc, m.trajectory);
    for (const auto& [name, pass] : member_checks) checks.emplace_back(tag + "." + name, pass);

    write_trajectory_csv((dir / "trajectory.csv").string(), m.trajectory);
    write_diagnostics_csv((dir / "diagnostics.csv").string(), m.trajectory, m.energy);
    write_summary_json((dir / "summary.json").string(), mc, m.trajectory, member_checks);
    for (const char* f : {"trajectory.csv", "diagnostics.csv", "summary.json"})
        outputs.push_back(fs::relative(dir / f, root).string());
}

json verdict_payload(const RateVerdict& v) {
    return {{"pass", v.pass},
            {"worst_margin", v.worst_margin},
            {"lhs_final", v.lhs_final},
            {"rhs_final", v.rhs_final},
            {"slack", v.slack}};
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ostringstream os;
    os << "t,x,n_l,n_d,n,c,p,H\n";
    for (const auto& s : traj.snapshots) {
        for (int i = 0; i < traj.grid.n_cells; ++i) {
            os << fmt17(s.time) << ',' << fmt17(traj.grid.centers(i)) << ','
               << fmt17(s.live.values(i)) << ',' << fmt17(s.dead.values(i)) << ','
               << fmt17(s.total.values(i)) << ',' << fmt17(s.nutrient.values(i)) << ','
               << fmt17(s.pressure_field.values(i)) << ',' << fmt17(s.enthalpy_field.values(i))
               << '\n';
        }
    }
    write_text(path, os.str());
}

void write_diagnostics_csv(const std::string& path, const Trajectory& traj,
                           const EnergyReport& energy) {
    const Kinetics& kin = traj.config.params.kinetics;
    const double kappa = traj.config.params.kappa;
    std::ostringstream os;
    os << "time,metric,value\n";
    auto row = [&](double t, const char* metric, double v) {
        os << fmt17(t) << ',' << metric << ',' << fmt17(v) << '\n';
    };
    auto series = [&](const char* metric, const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) row(energy.times[i], metric, v[i]);
    };
    series("nutrient_dt_sq", energy.nutrient_dt_sq);
    series("live_dt_sq", energy.live_dt_sq);
    series("dead_dt_sq", energy.dead_dt_sq);
    series("enthalpy_dt_sq", energy.enthalpy_dt_sq);
    series("nutrient_grad_sup", energy.nutrient_grad_sup);
    series("live_grad_sup", energy.live_grad_sup);
    series("dead_grad_sup", energy.dead_grad_sup);
    series("enthalpy_grad_sup", energy.enthalpy_grad_sup);
    series("potential_integral", energy.potential_integral);
    series("enthalpy_grad_cum", energy.enthalpy_grad_cum);
    series("pressure_grad_cum", energy.pressure_grad_cum);
    for (const auto& s : traj.snapshots) {
        row(s.time, "segregation_residual", segregation_residual(traj.grid, s));
        row(s.time, "complementarity_residual",
            complementarity_residual(traj.grid, s, kin));
        row(s.time, "mass", mass_of(traj.grid, s));
    }
    const auto pres = pressure_equation_residual(traj, kappa);
    for (std::size_t i = 0; i < pres.size(); ++i)
        row(traj.snapshots[i + 1].time, "pressure_equation_residual", pres[i]);
    write_text(path, os.str());
}

void write_summary_json(const std::string& path, const Config& cfg, const Trajectory& traj,
                        const std::vector<std::pair<std::string, bool>>& checks) {
    write_text(path, summary_payload(cfg, traj, checks).dump(2) + "\n");
}

void write_manifest(const std::string& path, const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["config_hash"] = m.config_hash;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    j["outputs"] = m.outputs;
    json jc = json::object();
    for (const auto& [name, pass] : m.checks) jc[name] = pass;
    j["checks"] = jc;
    j["ok"] = m.ok();
    write_text(path, j.dump(2) + "\n");
}

void write_sweep_summary_json(const std::string& path, const Config& cfg,
                              const SweepSummary& sweep, const DualSolution* dual,
                              const std::vector<DualityAudit>& audits) {
    json j;
    j["kind"] = sweep.kind;
    j["config_hash"] = hex_hash(config_hash(cfg));
    j["completed"] = sweep.completed;
    j["failure"] = sweep.failure;
    j["slack_factor"] = cfg.sweep.slack_factor;

    json members = json::array();
    for (const auto& m : sweep.members) {
        json jm;
        jm["parameter"] = m.parameter;
        jm["barrier_rho"] = m.barrier.rho;
        jm["max_total"] = m.barrier.max_total;
        jm["growth_sup"] = m.constants.growth_sup;
        jm["consumption_sup"] = m.constants.consumption_sup;
        jm["segregation"] = m.segregation;
        jm["complementarity"] = m.complementarity;
        json maxima = json::object();
        for (const auto& [name, v] : m.energy.maxima()) maxima[name] = v;
        jm["energy_maxima"] = maxima;
        members.push_back(jm);
    }
    j["members"] = members;

    json pairs = json::array();
    for (const auto& p : sweep.adjacent_pairs) {
        json jp;
        jp["param_a"] = p.param_a;
        jp["param_b"] = p.param_b;
        jp["distance_n"] = p.distance_n;
        jp["distance_c"] = p.distance_c;
        jp["rate_n"] = verdict_payload(p.rate_n);
        jp["rate_c"] = verdict_payload(p.rate_c);
        pairs.push_back(jp);
    }
    j["adjacent_pairs"] = pairs;
    j["proxy_distance_n"] = sweep.proxy_distance_n;
    j["proxy_distance_c"] = sweep.proxy_distance_c;

    if (dual) {
        j["dual"] = {{"max_principle_ok", dual->max_principle_ok},
                     {"energy_ok", dual->energy_ok},
                     {"sup_ratio", dual->sup_ratio},
                     {"observed_constant", dual->observed_constant}};
    }
    json jaud = json::array();
    for (const auto& a : audits)
        jaud.push_back({{"min_gap", a.min_gap},
                        {"lhs_final", a.lhs.empty() ? 0.0 : a.lhs.back()},
                        {"rhs_final", a.rhs.empty() ? 0.0 : a.rhs.back()}});
    j["duality_audits"] = jaud;
    write_text(path, j.dump(2) + "\n");
}

std::vector<std::pair<std::string, bool>> run_checks(const Config& cfg,
                                                     const Trajectory& traj) {
    std::vector<std::pair<std::string, bool>> out;
    const CheckSpec& ck = cfg.checks;

    out.emplace_back("positivity", traj.min_field_value >= -ck.positivity_tolerance);

    const double c0_max = traj.snapshots.front().nutrient.values.maxCoeff();
    const DerivedConstants dc = derived_constants(c0_max, traj.config.params.kinetics);
    out.emplace_back("nutrient_bound", traj.max_nutrient <= dc.c_max + 1e-10);

    if (traj.config.mode == Mode::Degenerate)
        out.emplace_back("barrier", 1.0 - traj.max_total >= ck.barrier_rho_min);

    const double mass0 = mass_of(traj.grid, traj.snapshots.front());
    const double mass1 = mass_of(traj.grid, traj.snapshots.back());
    out.emplace_back("mass_balance",
                     std::abs(mass1 - mass0 - traj.applied_source_integral) <=
                         ck.mass_tolerance);

    out.emplace_back("segregation_identity",
                     segregation_identity_defect(traj) <= ck.segregation_tolerance);

    out.emplace_back("energy_finite",
                     energy_report(traj, traj.config.params.kappa).all_finite());
    return out;
}

RunManifest command_simulate(const Config& cfg, const std::string& out_dir) {
    RunManifest m;
    m.command = "simulate";
    m.config_hash = hex_hash(config_hash(cfg));
    m.started_at = now_iso();

    const fs::path root(out_dir);
    fs::create_directories(root);

    Trajectory traj = run(cfg.sim);
    const EnergyReport energy = energy_report(traj, cfg.sim.params.kappa);
    m.checks = run_checks(cfg, traj);

    write_trajectory_csv((root / "trajectory.csv").string(), traj);
    write_diagnostics_csv((root / "diagnostics.csv").string(), traj, energy);
    write_summary_json((root / "summary.json").string(), cfg, traj, m.checks);
    write_text((root / "config.ini").string(), serialize_config(cfg));
    m.outputs = {"trajectory.csv", "diagnostics.csv", "summary.json", "config.ini"};

    m.finished_at = now_iso();
    write_manifest((root / "manifest.json").string(), m);
    for (const auto& [name, pass] : m.checks)
        std::cout << "check " << name << ": " << (pass ? "pass" : "FAIL") << "\n";
    return m;
}

RunManifest command_sweep(const Config& cfg, const std::string& kind,
                          const std::string& out_dir) {
    if (kind != "kappa" && kind != "eps")
        throw std::invalid_argument("sweep kind must be kappa or eps");

    RunManifest m;
    m.command = "sweep-" + kind;
    m.config_hash = hex_hash(config_hash(cfg));
    m.started_at = now_iso();

    const fs::path root(out_dir);
    fs::create_directories(root);

    SweepSummary sweep =
        kind == "kappa"
            ? kappa_sweep(cfg.sim, cfg.sweep.kappa_values, cfg.sweep.slack_factor)
            : eps_sweep(cfg.sim, cfg.sim.params.kappa, cfg.sweep.eps_values);

    for (std::size_t i = 0; i < sweep.members.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "member_%02zu", i);
        write_member_dir(root / name, cfg, sweep.members[i], m.outputs, root, m.checks, name);
    }

    if (kind == "kappa") {
        // The pairwise rate bound is a statement about kappa pairs; the eps
        // sweep is judged on its decreasing gaps to the degenerate run.
        for (std::size_t i = 0; i < sweep.adjacent_pairs.size(); ++i) {
            const auto& p = sweep.adjacent_pairs[i];
            m.checks.emplace_back("rate_n_pair_" + std::to_string(i), p.rate_n.pass);
            m.checks.emplace_back("rate_c_pair_" + std::to_string(i), p.rate_c.pass);
        }
    } else {
        bool decreasing = sweep.completed;
        for (std::size_t i = 1; i < sweep.proxy_distance_n.size(); ++i)
            if (!(sweep.proxy_distance_n[i] < sweep.proxy_distance_n[i - 1]))
                decreasing = false;
        m.checks.emplace_back("eps_gaps_decreasing", decreasing);
    }

    DualSolution dual;
    bool have_dual = false;
    std::vector<DualityAudit> audits;
    if (sweep.completed && sweep.members.size() >= 2) {
        for (std::size_t i = 0; i + 1 < sweep.members.size(); ++i)
            audits.push_back(duality_rate_audit(sweep.members[i].trajectory,
                                                sweep.members[i + 1].trajectory));
        if (kind == "kappa") {
            const Trajectory& ta = sweep.members[0].trajectory;
            const Trajectory& tb = sweep.members[1].trajectory;
            const double kappa_h = cfg.sweep.kappa_h == "larger" ? sweep.members[0].parameter
                                                                 : sweep.members[1].parameter;
            std::vector<Array> lam;
            std::vector<double> times;
            for (std::size_t s = 0; s < ta.snapshots.size(); ++s) {
                lam.push_back(lambda_coefficient(ta.snapshots[s].total.values,
                                                 tb.snapshots[s].total.values, kappa_h));
                times.push_back(ta.snapshots[s].time);
            }
            const Grid& g = ta.grid;
            Array phi0(g.n_cells);
            for (int i = 0; i < g.n_cells; ++i) {
                const double xh = (g.centers(i) - g.x_min) / (g.x_max - g.x_min);
                const double s = std::sin(M_PI * xh);
                phi0(i) = s * s;
            }
            dual = dual_solve(g, lam, times, 1e-8, phi0);
            have_dual = true;
            m.checks.emplace_back("dual_max_principle", dual.max_principle_ok);
            m.checks.emplace_back("dual_energy", dual.energy_ok);
        }
    }
    m.checks.emplace_back("sweep_completed", sweep.completed);

    write_sweep_summary_json((root / "sweep_summary.json").string(), cfg, sweep,
                             have_dual ? &dual : nullptr, audits);
    write_text((root / "config.ini").string(), serialize_config(cfg));
    m.outputs.push_back("sweep_summary.json");
    m.outputs.push_back("config.ini");

    m.finished_at = now_iso();
    write_manifest((root / "manifest.json").string(), m);
    for (const auto& [name, pass] : m.checks)
        std::cout << "check " << name << ": " << (pass ? "pass" : "FAIL") << "\n";
    if (!sweep.completed) std::cout << "sweep failure: " << sweep.failure << "\n";
    return m;
}

namespace {

struct CsvSnapshot {
    double t = 0.0;
    std::vector<std::array<double, 7>> rows;  ///< x,n_l,n_d,n,c,p,H
};

std::vector<CsvSnapshot> read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,x,n_l,n_d,n,c,p,H")
        throw std::runtime_error("bad header in " + path);
    std::vector<CsvSnapshot> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::array<double, 8> v{};
        std::stringstream ss(line);
        std::string cell;
        for (int i = 0; i < 8; ++i) {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error(path + " line " + std::to_string(lineno) +
                                         ": expected 8 columns");
            std::size_t pos = 0;
            v[i] = std::stod(cell, &pos);
            if (pos != cell.size())
                throw std::runtime_error(path + " line " + std::to_string(lineno) +
                                         ": bad number '" + cell + "'");
        }
        if (out.empty() || out.back().t != v[0]) out.push_back(CsvSnapshot{v[0], {}});
        out.back().rows.push_back({v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
    }
    if (out.empty()) throw std::runtime_error(path + ": no data rows");
    return out;
}

struct VerifyFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void verify_run_dir(const fs::path& dir) {
    const fs::path summary_path = dir / "summary.json";
    const fs::path traj_path = dir / "trajectory.csv";

    std::ifstream sin(summary_path);
    if (!sin) throw VerifyFailure("missing summary.json in " + dir.string());
    json summary;
    try {
        sin >> summary;
    } catch (const std::exception& e) {
        throw VerifyFailure("corrupt summary.json in " + dir.string() + ": " + e.what());
    }

    const double kappa = summary.at("kappa").get<double>();
    const double h = summary.at("h").get<double>();
    const double mass_tol = summary.at("tolerances").at("mass").get<double>();
    const double seg_tol = summary.at("tolerances").at("segregation").get<double>();

    const auto snaps = read_trajectory_csv(traj_path.string());
    if (static_cast<std::size_t>(summary.at("snapshots").get<long>()) != snaps.size())
        throw VerifyFailure(dir.string() + ": snapshot count differs from summary");

    // Segregation identity and pressure-law consistency from the raw rows.
    for (const auto& s : snaps) {
        double defect = 0.0;
        for (const auto& r : s.rows) {
            const double n = r[3], p = r[5];
            defect += std::abs((1.0 - n) * p - kappa * n);
            const double p_law = kappa * n / (1.0 - n);
            if (std::abs(p - p_law) > 1e-9 * (1.0 + std::abs(p_law)))
                throw VerifyFailure(dir.string() + ": pressure column violates the law at t=" +
                                    fmt17(s.t));
        }
        if (h * defect > seg_tol)
            throw VerifyFailure(dir.string() + ": segregation identity defect " +
                                fmt17(h * defect) + " at t=" + fmt17(s.t));
    }

    // Mass accounting against the recorded source integral.
    auto mass = [&](const CsvSnapshot& s) {
        double m = 0.0;
        for (const auto& r : s.rows) m += r[3];
        return h * m;
    };
    const double mass0 = mass(snaps.front());
    const double mass1 = mass(snaps.back());
    const double stored0 = summary.at("mass_initial").get<double>();
    const double stored1 = summary.at("mass_final").get<double>();
    if (std::abs(mass0 - stored0) > 1e-12 * (1.0 + std::abs(stored0)))
        throw VerifyFailure(dir.string() + ": initial mass differs from summary");
    if (std::abs(mass1 - stored1) > 1e-12 * (1.0 + std::abs(stored1)))
        throw VerifyFailure(dir.string() + ": final mass differs from summary");
    const double src = summary.at("applied_source_integral").get<double>();
    if (std::abs(mass1 - mass0 - src) > mass_tol)
        throw VerifyFailure(dir.string() + ": mass balance defect " +
                            fmt17(std::abs(mass1 - mass0 - src)));
}

}  // namespace

int command_verify(const std::string& dir) {
    try {
        const fs::path root(dir);
        const fs::path manifest_path = root / "manifest.json";
        std::ifstream min(manifest_path);
        if (!min) throw VerifyFailure("missing manifest in " + dir);
        json manifest;
        try {
            min >> manifest;
        } catch (const std::exception& e) {
            throw VerifyFailure(std::string("corrupt manifest: ") + e.what());
        }

        for (const auto& out : manifest.at("outputs")) {
            const fs::path p = root / out.get<std::string>();
            if (!fs::exists(p)) throw VerifyFailure("missing output file " + p.string());
        }
        for (const auto& [name, pass] : manifest.at("checks").items())
            if (!pass.get<bool>())
                throw VerifyFailure("recorded check failed: " + name);

        // Recompute invariants for every run directory listed in the manifest.
        std::vector<fs::path> run_dirs;
        for (const auto& out : manifest.at("outputs")) {
            const fs::path p = root / out.get<std::string>();
            if (p.filename() == "trajectory.csv") run_dirs.push_back(p.parent_path());
        }
        for (const auto& d : run_dirs) verify_run_dir(d);

        std::cout << "verify: all checks passed (" << run_dirs.size() << " run"
                  << (run_dirs.size() == 1 ? "" : "s") << ")\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "verify failed: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tumorlab
