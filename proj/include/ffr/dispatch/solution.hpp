#pragma once

#include "ffr/dispatch/device.hpp"
#include "ffr/nadir/nadir.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ffr::dispatch
{

enum class SolutionStatus
{
    Feasible,
    Infeasible,
};

char const* to_string(SolutionStatus status);

struct Activation
{
    std::size_t device_index;
    std::string device_id;
    DeviceKind kind;
    double reserve_pu;
    double latency_s;
    std::string path_id;
};

struct IterationRecord
{
    std::size_t active_count;
    double reserve_total_pu;
    double t_nad_s;
    double w_nad_pu;
    nadir::NadirKind kind;
    bool bracketed;
};

struct DispatchSolution
{
    SolutionStatus status = SolutionStatus::Infeasible;
    std::vector<Activation> activations;
    /// For an infeasible result, the highest nadir reached.
    double t_nad_s = 0.0;
    double w_nad_pu = 0.0;
    nadir::NadirKind nadir_kind = nadir::NadirKind::Boundary;
    double cost_usd = 0.0;
    std::size_t iterations = 0;
    /// (device id, path id) for every routed device.
    std::vector<std::pair<std::string, std::string>> path_choices;
    std::vector<IterationRecord> trace;
    std::optional<nadir::Bracket> bracket;
    /// Bracketed searches that ended on the bracket edge and were redone.
    std::size_t bracket_misses = 0;
    std::string message;

    bool feasible() const { return status == SolutionStatus::Feasible; }
    double reserve_total() const;
    /// Activations as a portfolio against the problem's contingency.
    freq::Portfolio portfolio(DispatchProblem const& problem) const;
};

/// C_rr times the sum of activated reserves.
double cost(DispatchSolution const& solution, double c_rr);

Activation make_activation(std::span<Device const> devices, std::size_t index, double reserve_pu);

std::vector<std::pair<std::string, std::string>> collect_path_choices(std::span<Device const> devices);

/// device_id,kind,reserve_pu,latency_s,path_id
void write_solution_csv(std::ostream& os, DispatchSolution const& solution);
/// t_nad_s,w_nad_pu,nadir_hz,cost_usd,iterations
void write_summary_csv(std::ostream& os, DispatchSolution const& solution, freq::SystemParams const& params);

} // namespace ffr::dispatch
