#pragma once

#include "ffr/routing/latency_trace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ffr::routing
{

struct MixtureComponent
{
    double weight;
    double mean_s;
    double stddev_s;
};

/// Gaussian mixture of per-probe latencies, truncated at zero by resampling.
struct LatencyProfile
{
    std::string name;
    std::vector<MixtureComponent> components;

    void validate() const;

    /// Path-aware profile: p99 near 410 ms, most mass in 100-200 ms.
    static LatencyProfile scion();
    /// BGP profile: p99 near 480 ms, wide 300-500 ms spread.
    static LatencyProfile bgp();
    /// "scion" or "bgp"; throws DomainError otherwise.
    static LatencyProfile by_name(std::string const& name);
};

/// Seeded iid draws from `profile` at timestamps 0, g, 2g, ... < duration.
LatencyTrace synth_trace(LatencyProfile const& profile, double duration_s, double granularity_s, std::uint64_t seed);

/// Draws `n` latencies directly, with the same generator as synth_trace.
std::vector<double> synth_latencies(LatencyProfile const& profile, std::size_t n, std::uint64_t seed);

} // namespace ffr::routing
