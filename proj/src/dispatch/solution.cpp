#include "ffr/dispatch/solution.hpp"

#include <fmt/format.h>

#include <ostream>

namespace ffr::dispatch
{

char const*
to_string(SolutionStatus status)
{
    return status == SolutionStatus::Feasible ? "feasible" : "infeasible";
}

double
DispatchSolution::reserve_total() const
{
    double total = 0.0;
    for (auto const& a : activations)
    {
        total += a.reserve_pu;
    }
    return total;
}

freq::Portfolio
DispatchSolution::portfolio(DispatchProblem const& problem) const
{
    freq::Portfolio pf;
    pf.params = problem.params;
    pf.loss = freq::DelayedStepSource::loss(problem.dP_L_pu);
    pf.sources.reserve(activations.size());
    for (auto const& a : activations)
    {
        pf.sources.push_back(problem.devices.at(a.device_index).as_source(a.reserve_pu));
    }
    return pf;
}

double
cost(DispatchSolution const& solution, double c_rr)
{
    return c_rr * solution.reserve_total();
}

Activation
make_activation(std::span<Device const> devices, std::size_t index, double reserve_pu)
{
    Device const& d = devices[index];
    return {index, d.id, d.kind, reserve_pu, d.selected_latency_s.value_or(0.0), d.selected_path.value_or("")};
}

std::vector<std::pair<std::string, std::string>>
collect_path_choices(std::span<Device const> devices)
{
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(devices.size());
    for (auto const& d : devices)
    {
        if (d.selected_path)
        {
            out.emplace_back(d.id, *d.selected_path);
        }
    }
    return out;
}

void
write_solution_csv(std::ostream& os, DispatchSolution const& solution)
{
    os << "device_id,kind,reserve_pu,latency_s,path_id\n";
    for (auto const& a : solution.activations)
    {
        os << fmt::format("{},{},{:.17g},{:.17g},{}\n", a.device_id, to_string(a.kind), a.reserve_pu, a.latency_s,
                          a.path_id);
    }
}

void
write_summary_csv(std::ostream& os, DispatchSolution const& solution, freq::SystemParams const& params)
{
    os << "t_nad_s,w_nad_pu,nadir_hz,cost_usd,iterations\n";
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{}\n", solution.t_nad_s, solution.w_nad_pu,
                      params.to_hz(solution.w_nad_pu), solution.cost_usd, solution.iterations);
}

} // namespace ffr::dispatch
