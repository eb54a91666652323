#pragma once

#include "ffr/freq/response.hpp"
#include "ffr/freq/system_params.hpp"
#include "ffr/routing/paths.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ffr::dispatch
{

enum class DeviceKind
{
    Der,
    Cl,
};

char const* to_string(DeviceKind kind);

/// A flexible device offering fast reserve. DERs respond through a
/// first-order lag with time constant t_d_s; controllable loads step.
struct Device
{
    std::string id;
    DeviceKind kind = DeviceKind::Der;
    double r_max_pu = 0.0;
    double t_d_s = 0.0;
    routing::PathSet paths;
    std::optional<double> selected_latency_s;
    std::optional<std::string> selected_path;

    /// Throws DomainError.
    void validate() const;
    bool routed() const { return selected_latency_s.has_value(); }

    /// Latency used for ordering: tau + T_d for DERs, tau for loads.
    /// Throws StateError when unrouted.
    double effective_latency() const;

    /// The device activated at `reserve_pu`. Throws StateError when unrouted.
    freq::DelayedStepSource as_source(double reserve_pu) const;
};

/// Selects the lowest-latency path of every device at time `at`.
void route_devices(std::span<Device> devices, double at);

struct DispatchProblem
{
    std::vector<Device> devices;
    double dP_L_pu = 0.0;
    double dw_max_pu = 0.016;
    double c_rr = 0.025e6;
    freq::SystemParams params;

    /// Throws DomainError.
    void validate() const;
    double capacity_total() const;
};

/// Delay of the step that delivers the same energy as a lagged step.
double equivalent_latency(double tau_s, double T_d_s);

struct SequenceEntry
{
    double latency_eff_s;
    std::size_t device_index;
};

using SortedSequence = std::vector<SequenceEntry>;

/// Devices ordered by effective latency; ties keep the DER-then-load
/// concatenation order. Throws StateError for an unrouted device.
SortedSequence build_sorted_sequence(std::span<Device const> devices);

/// Length of the shortest prefix of `seq` whose capacity covers dP_L.
/// Throws InfeasibleError when the whole fleet falls short.
std::size_t warm_start(SortedSequence const& seq, std::span<Device const> devices, double dP_L_pu);

} // namespace ffr::dispatch
