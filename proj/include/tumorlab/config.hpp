#ifndef TUMORLAB_CONFIG_HPP
#define TUMORLAB_CONFIG_HPP

/**
 * @file config.hpp
 * @brief Flat sectioned key-value configuration for the experiment runner.
 *
 * Sections: [model], [grid], [time], [initial], [sweep], [checks].
 * Unknown keys are errors; an empty file yields the documented defaults.
 */

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "tumorlab/solver.hpp"

namespace tumorlab {

struct SweepSpec {
    std::vector<double> kappa_values = {0.5, 0.2, 0.1, 0.05, 0.02};
    std::vector<double> eps_values = {0.1, 0.05, 0.025};
    double slack_factor = 2.0;
    std::string kappa_h = "larger";  ///< which kappa of a pair feeds H' in the dual coefficient
};

struct CheckSpec {
    double mass_tolerance = 1e-8;
    double segregation_tolerance = 1e-13;
    double barrier_rho_min = 1e-3;
    double positivity_tolerance = 1e-12;
};

struct Config {
    SimConfig sim;
    SweepSpec sweep;
    CheckSpec checks;
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses and validates; throws ConfigError with a line number on syntax
/// errors and with the field name on validation errors.
Config parse_config(std::istream& in);
Config parse_config_file(const std::string& path);

/// Canonical serialization; parse(serialize(c)) reproduces c bit-exactly.
std::string serialize_config(const Config& c);

/// The full-default configuration rendered canonically.
std::string emit_defaults();

/// FNV-1a hash of the canonical serialization.
std::uint64_t config_hash(const Config& c);

}  // namespace tumorlab

#endif  // TUMORLAB_CONFIG_HPP
