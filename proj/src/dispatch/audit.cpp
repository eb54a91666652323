#include "ffr/dispatch/audit.hpp"

#include <fmt/format.h>

#include <exception>
#include <map>
#include <ostream>
#include <set>

namespace ffr::dispatch
{

char const*
to_string(Constraint c)
{
    switch (c)
    {
    case Constraint::Nadir:
        return "nadir";
    case Constraint::SteadyState:
        return "steady_state";
    case Constraint::Capacity:
        return "capacity";
    case Constraint::SinglePath:
        return "single_path";
    case Constraint::Binary:
        return "binary";
    }
    return "?";
}

bool
AuditReport::passed() const
{
    for (auto const& item : items)
    {
        if (!item.pass)
        {
            return false;
        }
    }
    return true;
}

std::vector<AuditItem>
AuditReport::violations() const
{
    std::vector<AuditItem> out;
    for (auto const& item : items)
    {
        if (!item.pass)
        {
            out.push_back(item);
        }
    }
    return out;
}

AuditReport
audit(DispatchProblem const& problem, DispatchSolution const& solution, freq::FrequencyModel const& model,
      nadir::NadirOptions const& options)
{
    AuditReport report;
    auto& items = report.items;
    auto const& devices = problem.devices;

    // Activation consistency first: the physical checks need valid indices.
    bool indices_ok = true;
    std::set<std::size_t> seen;
    for (auto const& a : solution.activations)
    {
        if (a.device_index >= devices.size() || devices[a.device_index].id != a.device_id)
        {
            items.push_back({Constraint::Binary, a.device_id, false, 0.0, "activation refers to an unknown device"});
            indices_ok = false;
            continue;
        }
        if (!seen.insert(a.device_index).second)
        {
            items.push_back({Constraint::Binary, a.device_id, false, 0.0, "device activated more than once"});
            continue;
        }
        bool const positive = a.reserve_pu > 0.0;
        items.push_back({Constraint::Binary, a.device_id, positive, a.reserve_pu,
                         positive ? "active with positive reserve" : "activated with a non-positive reserve"});
    }

    double total = 0.0;
    for (auto const& a : solution.activations)
    {
        total += a.reserve_pu;
        if (a.device_index >= devices.size())
        {
            continue;
        }
        double const excess = a.reserve_pu - devices[a.device_index].r_max_pu;
        items.push_back({Constraint::Capacity, a.device_id, excess <= 0.0, -excess,
                         excess <= 0.0 ? "within capacity" : fmt::format("exceeds R_max by {:.17g} pu", excess)});
    }

    double const ss_margin = total - problem.dP_L_pu;
    items.push_back({Constraint::SteadyState, "", ss_margin >= 0.0, ss_margin,
                     ss_margin >= 0.0 ? "reserves cover the contingency"
                                      : fmt::format("short of the contingency by {:.17g} pu", -ss_margin)});

    std::map<std::string, std::size_t> path_count;
    for (auto const& [device_id, path_id] : solution.path_choices)
    {
        ++path_count[device_id];
    }
    for (auto const& d : devices)
    {
        bool const routed = d.routed() && d.selected_path.has_value();
        if (!routed && !seen.count(static_cast<std::size_t>(&d - devices.data())))
        {
            continue;
        }
        bool known = false;
        if (d.selected_path)
        {
            for (auto const& p : d.paths.paths)
            {
                known = known || p.path_id == *d.selected_path;
            }
        }
        std::size_t const chosen = path_count.count(d.id) ? path_count[d.id] : 0;
        bool const ok = routed && known && chosen == 1;
        items.push_back({Constraint::SinglePath, d.id, ok, ok ? 0.0 : -1.0,
                         ok ? "one path selected"
                            : fmt::format("{} path selections, selected path {}", chosen,
                                          known ? "listed" : "not among the device's paths")});
    }

    if (indices_ok)
    {
        try
        {
            auto const nad = nadir::find_nadir(solution.portfolio(problem), model, options);
            report.w_nad_pu = nad.w_nad;
            report.t_nad_s = nad.t_nad;
            double const margin = nad.w_nad + problem.dw_max_pu;
            items.push_back({Constraint::Nadir, "", margin >= 0.0, margin,
                             fmt::format("nadir {:.9g} pu at t = {:.6g} s", nad.w_nad, nad.t_nad)});
        }
        catch (std::exception const& e)
        {
            items.push_back({Constraint::Nadir, "", false, 0.0, fmt::format("nadir evaluation failed: {}", e.what())});
        }
    }
    else
    {
        items.push_back({Constraint::Nadir, "", false, 0.0, "not evaluated: invalid activations"});
    }
    return report;
}

AuditReport
audit(DispatchProblem const& problem, DispatchSolution const& solution)
{
    return audit(problem, solution, freq::FrequencyModel(problem.params));
}

void
write_audit(std::ostream& os, AuditReport const& report)
{
    std::map<Constraint, std::pair<std::size_t, std::size_t>> tally;
    for (auto const& item : report.items)
    {
        auto& [pass, fail] = tally[item.constraint];
        ++(item.pass ? pass : fail);
    }
    for (auto const& [c, counts] : tally)
    {
        os << fmt::format("audit {:<12} {} ({} pass, {} fail)\n", to_string(c), counts.second == 0 ? "PASS" : "FAIL",
                          counts.first, counts.second);
    }
    for (auto const& item : report.violations())
    {
        os << fmt::format("  violation {} {}: {} (margin {:.6g})\n", to_string(item.constraint), item.subject,
                          item.detail, item.margin);
    }
}

} // namespace ffr::dispatch
