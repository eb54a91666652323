#include "ffr/dispatch/device.hpp"

#include "ffr/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ffr::dispatch
{

char const*
to_string(DeviceKind kind)
{
    return kind == DeviceKind::Der ? "DER" : "CL";
}

void
Device::validate() const
{
    if (!(r_max_pu > 0.0) || !std::isfinite(r_max_pu))
    {
        throw DomainError(fmt::format("device '{}': R_max must be > 0", id));
    }
    if (!(t_d_s >= 0.0) || !std::isfinite(t_d_s))
    {
        throw DomainError(fmt::format("device '{}': T_d must be >= 0", id));
    }
    if (kind == DeviceKind::Cl && t_d_s != 0.0)
    {
        throw DomainError(fmt::format("device '{}': controllable loads have no time constant", id));
    }
    if (selected_latency_s && (!(*selected_latency_s >= 0.0) || !std::isfinite(*selected_latency_s)))
    {
        throw DomainError(fmt::format("device '{}': selected latency must be >= 0", id));
    }
}

double
Device::effective_latency() const
{
    if (!selected_latency_s)
    {
        throw StateError(fmt::format("device '{}' has not been routed", id));
    }
    return kind == DeviceKind::Der ? equivalent_latency(*selected_latency_s, t_d_s) : *selected_latency_s;
}

freq::DelayedStepSource
Device::as_source(double reserve_pu) const
{
    if (!selected_latency_s)
    {
        throw StateError(fmt::format("device '{}' has not been routed", id));
    }
    if (kind == DeviceKind::Der)
    {
        return freq::DelayedStepSource::der(reserve_pu, *selected_latency_s, t_d_s, id);
    }
    return freq::DelayedStepSource::cl(reserve_pu, *selected_latency_s, id);
}

void
route_devices(std::span<Device> devices, double at)
{
    for (auto& d : devices)
    {
        auto choice = routing::select_lowest_latency(d.paths, at);
        d.selected_latency_s = choice.latency_s;
        d.selected_path = std::move(choice.path_id);
    }
}

void
DispatchProblem::validate() const
{
    if (!(dP_L_pu > 0.0) || !std::isfinite(dP_L_pu))
    {
        throw DomainError("dispatch: dP_L must be > 0");
    }
    if (!(dw_max_pu > 0.0) || !std::isfinite(dw_max_pu))
    {
        throw DomainError("dispatch: dw_max must be > 0");
    }
    if (!(c_rr >= 0.0) || !std::isfinite(c_rr))
    {
        throw DomainError("dispatch: C_rr must be >= 0");
    }
    params.validate();
    for (auto const& d : devices)
    {
        d.validate();
    }
}

double
DispatchProblem::capacity_total() const
{
    double total = 0.0;
    for (auto const& d : devices)
    {
        total += d.r_max_pu;
    }
    return total;
}

double
equivalent_latency(double tau_s, double T_d_s)
{
    if (!(tau_s >= 0.0) || !(T_d_s >= 0.0))
    {
        throw DomainError("equivalent_latency: tau and T_d must be >= 0");
    }
    return tau_s + T_d_s;
}

SortedSequence
build_sorted_sequence(std::span<Device const> devices)
{
    SortedSequence seq;
    seq.reserve(devices.size());
    for (auto kind : {DeviceKind::Der, DeviceKind::Cl})
    {
        for (std::size_t i = 0; i < devices.size(); ++i)
        {
            if (devices[i].kind == kind)
            {
                seq.push_back({devices[i].effective_latency(), i});
            }
        }
    }
    std::stable_sort(seq.begin(), seq.end(), [](SequenceEntry const& a, SequenceEntry const& b) {
        return a.latency_eff_s < b.latency_eff_s;
    });
    return seq;
}

std::size_t
warm_start(SortedSequence const& seq, std::span<Device const> devices, double dP_L_pu)
{
    double cum = 0.0;
    for (std::size_t k = 0; k < seq.size(); ++k)
    {
        if (cum >= dP_L_pu)
        {
            return k;
        }
        cum += devices[seq[k].device_index].r_max_pu;
    }
    if (cum >= dP_L_pu)
    {
        return seq.size();
    }
    throw InfeasibleError(
        fmt::format("total reserve capacity {:.6g} pu is below the contingency {:.6g} pu", cum, dP_L_pu)
    );
}

} // namespace ffr::dispatch
