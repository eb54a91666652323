#include "ffr/routing/paths.hpp"

#include "ffr/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <set>

namespace ffr::routing
{

void
PathSet::validate() const
{
    if (paths.empty())
    {
        throw DomainError(fmt::format("device '{}' has no communication paths", device_id));
    }
    std::set<std::string_view> ids;
    for (auto const& p : paths)
    {
        if (!ids.insert(p.path_id).second)
        {
            throw DomainError(fmt::format("device '{}' has duplicate path id '{}'", device_id, p.path_id));
        }
    }
}

PathChoice
select_lowest_latency(PathSet const& ps, double at)
{
    ps.validate();
    Path const* best = nullptr;
    double best_latency = std::numeric_limits<double>::infinity();
    for (auto const& p : ps.paths)
    {
        auto const held = p.trace.held_latency(at);
        if (!held)
        {
            continue;
        }
        if (best == nullptr || *held < best_latency || (*held == best_latency && p.path_id < best->path_id))
        {
            best = &p;
            best_latency = *held;
        }
    }
    if (best == nullptr)
    {
        throw NotReadyError(fmt::format("device '{}' has no latency sample at t = {} s", ps.device_id, at));
    }
    return {best->path_id, best_latency};
}

std::vector<ScheduleEntry>
reselect_on_update(PathSet const& ps, double probe_interval_s, double horizon_s)
{
    ps.validate();
    if (!(probe_interval_s > 0.0) || !std::isfinite(probe_interval_s))
    {
        throw DomainError("reselect_on_update: probe interval must be > 0");
    }
    if (!(horizon_s >= 0.0) || !std::isfinite(horizon_s))
    {
        throw DomainError("reselect_on_update: horizon must be finite and >= 0");
    }
    double start = std::numeric_limits<double>::infinity();
    for (auto const& p : ps.paths)
    {
        if (!p.trace.empty())
        {
            start = std::min(start, p.trace.samples().front().timestamp_s);
        }
    }
    if (!std::isfinite(start))
    {
        throw NotReadyError(fmt::format("device '{}' has no latency samples", ps.device_id));
    }

    std::vector<ScheduleEntry> schedule;
    auto const probes = static_cast<long long>(std::floor(horizon_s / probe_interval_s + 1e-9));
    for (long long k = 0; k <= probes; ++k)
    {
        double const at = start + static_cast<double>(k) * probe_interval_s;
        PathChoice choice = select_lowest_latency(ps, at);
        if (schedule.empty() || schedule.back().path_id != choice.path_id
            || schedule.back().latency_s != choice.latency_s)
        {
            schedule.push_back({at, std::move(choice.path_id), choice.latency_s});
        }
    }
    return schedule;
}

} // namespace ffr::routing
