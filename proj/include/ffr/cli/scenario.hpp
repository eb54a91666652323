#pragma once

#include "ffr/dispatch/heuristic.hpp"
#include "ffr/routing/statistics.hpp"
#include "ffr/routing/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ffr::cli
{

struct Range
{
    double lo;
    double hi;
};

struct FleetSpec
{
    std::size_t ders = 0;
    std::size_t cls = 0;
    Range der_capacity_pu{10e-6, 15e-6};
    Range cl_capacity_pu{1e-6, 5e-6};
    double der_time_constant_s = 0.1;
    /// Multiplies every sampled capacity; lets a handful of devices stand in
    /// for an aggregated fleet.
    double capacity_scale = 1.0;
    std::size_t paths_per_device = 2;
};

struct LatencySpec
{
    /// Synthetic profile name; used when no trace files are given.
    std::string profile = "scion";
    std::vector<std::filesystem::path> traces;
    /// Draws from the profile that make up the pooled distribution.
    std::size_t pool_size = 20000;
    /// Pooled values above this are discarded before sampling.
    std::optional<double> max_latency_s;
};

struct DispatchSpec
{
    double dP_L_pu = 0.05;
    double nadir_limit_hz = 49.2;
    double c_rr = 0.025e6;
    bool warm_start = true;
    bool nadir_bracket = true;
    bool post_trim = false;
    double horizon_s = 60.0;
};

struct Scenario
{
    std::uint64_t seed = 1;
    freq::SystemParams params;
    FleetSpec fleet;
    LatencySpec latency;
    DispatchSpec dispatch;

    /// Throws DomainError.
    void validate() const;
    dispatch::HeuristicOptions heuristic_options() const;
};

/// Parses the YAML scenario format. Unknown keys are rejected. Relative trace
/// paths resolve against `base_dir`. Throws ConfigError.
Scenario parse_scenario(std::string const& text, std::filesystem::path const& base_dir = {});
Scenario load_scenario(std::filesystem::path const& file);

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Pooled latency distribution for the scenario.
routing::EmpiricalCdf latency_distribution(Scenario const& sc);

/// Seeded fleet with one constant-latency trace per path, routed at t = 0.
dispatch::DispatchProblem generate_problem(Scenario const& sc);

} // namespace ffr::cli
