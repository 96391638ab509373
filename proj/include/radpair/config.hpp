#pragma once

// JSON run configuration (schema 1). Complex entries are [re, im] pairs;
// matrices are arrays of rows. Parsing is strict: unknown or ill-typed fields
// raise ConfigError naming the offending field.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radpair/spinsys.hpp"
#include "radpair/superop.hpp"

namespace radpair {

struct TimesSpec {
    bool explicit_list = false;
    double start = 0.0, stop = 1.0;
    std::int64_t count = 2;
    std::vector<double> values; // used when explicit_list

    std::vector<double> materialize() const;
};

struct SweepSpec {
    double log10_start = -2.0, log10_stop = 3.0;
    std::int64_t log10_count = 51;
    double t_omega_start = 0.0, t_omega_stop = 20.0;
    std::int64_t t_omega_count = 401;
};

struct TrajectorySpec {
    double dt = 0.0;
    double t_max = 0.0;
    std::int64_t n_traj = 0;
    std::uint64_t seed = 0;
};

struct RunConfig {
    int schema = 1;
    bool two_level = true;
    double omega = 1.0;
    ComplexMatrix hamiltonian, q_singlet; // explicit system
    RateConstants rates;
    bool rho0_singlet = true;
    ComplexMatrix rho0_matrix;
    TimesSpec times;
    std::string approach = "both"; // haberkorn | measurement | both
    std::optional<TrajectorySpec> trajectory;
    SweepSpec sweep;
    std::string out_dir = ".";
    std::string prefix = "radpair";

    SpinSystem make_system() const;
    ComplexMatrix make_rho0(const SpinSystem& sys) const;
    std::vector<SuperopKind> approaches() const; // both -> {haberkorn, measurement}
};

RunConfig parse_config_json(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

// Resolved form with every default filled in; re-parsing it reproduces the run.
nlohmann::json to_json(const RunConfig& cfg);

} // namespace radpair
