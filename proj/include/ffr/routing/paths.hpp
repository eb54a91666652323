#pragma once

#include "ffr/routing/latency_trace.hpp"

#include <string>
#include <vector>

namespace ffr::routing
{

struct Path
{
    std::string path_id;
    LatencyTrace trace;
};

/// Candidate communication paths from the operator to one device.
struct PathSet
{
    std::string device_id;
    std::vector<Path> paths;

    /// Non-empty, unique path ids. Throws DomainError.
    void validate() const;
};

struct PathChoice
{
    std::string path_id;
    double latency_s;
};

/// Path with the lowest held latency at `at`; ties go to the smallest path id.
/// Paths without a sample at or before `at` are not eligible. Throws
/// NotReadyError when no path is eligible.
PathChoice select_lowest_latency(PathSet const& ps, double at);

struct ScheduleEntry
{
    double timestamp_s;
    std::string path_id;
    double latency_s;
};

/// Probes every `probe_interval_s` from the first sample time for
/// `horizon_s` seconds and records an entry whenever the selected path or its
/// latency changes. The selection between entries is piecewise constant.
std::vector<ScheduleEntry> reselect_on_update(PathSet const& ps, double probe_interval_s, double horizon_s);

} // namespace ffr::routing
