#ifndef TUMORLAB_RUNNER_HPP
#define TUMORLAB_RUNNER_HPP

/**
 * @file runner.hpp
 * @brief Command-level orchestration and file serialization.
 *
 * Data files (CSV / summary JSON) are deterministic: identical configs
 * produce byte-identical files. Wall-clock times live only in the
 * manifest.
 */

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tumorlab/config.hpp"
#include "tumorlab/diagnostics.hpp"
#include "tumorlab/limit.hpp"

namespace tumorlab {

struct RunManifest {
    std::string command;  ///< simulate | sweep-kappa | sweep-eps
    std::string config_hash;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;  ///< paths relative to the output directory
    std::vector<std::pair<std::string, bool>> checks;

    bool ok() const {
        for (const auto& [name, pass] : checks)
            if (!pass) return false;
        return true;
    }
};

// Serialization helpers (all floats written with 17 significant digits).
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_diagnostics_csv(const std::string& path, const Trajectory& traj,
                           const EnergyReport& energy);
void write_summary_json(const std::string& path, const Config& cfg, const Trajectory& traj,
                        const std::vector<std::pair<std::string, bool>>& checks);
void write_manifest(const std::string& path, const RunManifest& m);
void write_sweep_summary_json(const std::string& path, const Config& cfg,
                              const SweepSummary& sweep, const DualSolution* dual,
                              const std::vector<DualityAudit>& audits);

/// Standard per-run health checks driven by the [checks] section.
std::vector<std::pair<std::string, bool>> run_checks(const Config& cfg,
                                                     const Trajectory& traj);

/// Runs one trajectory and writes trajectory.csv, diagnostics.csv,
/// summary.json, manifest.json under out_dir.
RunManifest command_simulate(const Config& cfg, const std::string& out_dir);

/// Runs a kappa or eps sweep with per-member subdirectories and
/// sweep_summary.json. kind is "kappa" or "eps".
RunManifest command_sweep(const Config& cfg, const std::string& kind,
                          const std::string& out_dir);

/// Re-reads a produced directory and recomputes a checksum subset of the
/// diagnostics. Returns 0 iff everything passes; prints the first failing
/// check to stderr otherwise.
int command_verify(const std::string& dir);

}  // namespace tumorlab

#endif  // TUMORLAB_RUNNER_HPP
