#include "ffr/dispatch/heuristic.hpp"

#include "ffr/dispatch/bounds.hpp"
#include "ffr/errors.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace ffr::dispatch
{

namespace
{

bool
passes(DispatchProblem const& problem, double reserve_total, double w_nad)
{
    return reserve_total >= problem.dP_L_pu && w_nad >= -problem.dw_max_pu;
}

/// Smallest reserve in [lo, hi] of the last device that passes both checks,
/// given that hi passes.
double
trim_last(
    DispatchProblem const& problem,
    freq::ResponseEvaluator const& others,
    Device const& last,
    nadir::NadirOptions const& opts
)
{
    double lo = std::max(0.0, problem.dP_L_pu - others.reserve_total());
    double hi = last.r_max_pu;
    auto ok = [&](double r) {
        freq::ResponseEvaluator ev = others;
        ev.add(last.as_source(r));
        return passes(problem, ev.reserve_total(), nadir::find_nadir(ev, opts).w_nad);
    };
    if (ok(lo))
    {
        return lo;
    }
    for (int i = 0; i < 64 && lo < hi; ++i)
    {
        double const mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
        {
            break;
        }
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

} // namespace

DispatchSolution
heuristic_allocate(DispatchProblem const& problem, freq::FrequencyModel const& model, HeuristicOptions const& options)
{
    problem.validate();
    if (!(model.params() == problem.params))
    {
        throw DomainError("heuristic_allocate: model parameters differ from the problem's");
    }
    auto const& devices = problem.devices;
    SortedSequence const seq = build_sorted_sequence(devices);

    DispatchSolution sol;
    sol.path_choices = collect_path_choices(devices);

    bool const coverable = problem.capacity_total() >= problem.dP_L_pu;
    std::size_t prefix = 0;
    if (options.warm_start && coverable)
    {
        prefix = warm_start(seq, devices, problem.dP_L_pu);
    }

    std::optional<nadir::Bracket> bracket;
    if (options.nadir_bracket && coverable)
    {
        auto const b = nadir_bounds(problem, seq, model, options.nadir);
        sol.bracket = b.bracket;
        bracket = nadir::Bracket{std::max(0.0, b.bracket.t_min - options.bracket_pad_s),
                                 std::min(options.nadir.horizon_s, b.bracket.t_max + options.bracket_pad_s)};
    }

    freq::ResponseEvaluator ev(model, problem.dP_L_pu);
    std::size_t active = 0;
    auto activate_next = [&] {
        auto const& d = devices[seq[active].device_index];
        ev.add(d.as_source(d.r_max_pu));
        ++active;
    };
    while (active < prefix)
    {
        activate_next();
    }

    bool have_best = false;
    bool feasible = false;
    while (true)
    {
        if (active == 0 && !seq.empty())
        {
            activate_next();
        }
        ++sol.iterations;
        bool const covered = ev.reserve_total() >= problem.dP_L_pu;
        nadir::NadirResult nad;
        bool used_bracket = false;
        if (bracket && covered)
        {
            nad = nadir::find_nadir(ev, options.nadir, bracket);
            used_bracket = true;
            if (nad.kind == nadir::NadirKind::Boundary)
            {
                ++sol.bracket_misses;
                nad = nadir::find_nadir(ev, options.nadir);
                used_bracket = false;
            }
        }
        else
        {
            nad = nadir::find_nadir(ev, options.nadir);
        }
        if (options.record_trace)
        {
            sol.trace.push_back({active, ev.reserve_total(), nad.t_nad, nad.w_nad, nad.kind, used_bracket});
        }
        if (!have_best || nad.w_nad > sol.w_nad_pu)
        {
            sol.t_nad_s = nad.t_nad;
            sol.w_nad_pu = nad.w_nad;
            sol.nadir_kind = nad.kind;
            have_best = true;
        }
        if (passes(problem, ev.reserve_total(), nad.w_nad))
        {
            sol.t_nad_s = nad.t_nad;
            sol.w_nad_pu = nad.w_nad;
            sol.nadir_kind = nad.kind;
            feasible = true;
            break;
        }
        if (active >= seq.size())
        {
            break;
        }
        activate_next();
    }

    for (std::size_t k = 0; k < active; ++k)
    {
        auto const idx = seq[k].device_index;
        sol.activations.push_back(make_activation(devices, idx, devices[idx].r_max_pu));
    }

    if (!feasible)
    {
        sol.status = SolutionStatus::Infeasible;
        sol.message = coverable
            ? fmt::format("nadir limit {:.6g} pu not met with every device active; best nadir {:.6g} pu",
                          problem.dw_max_pu, sol.w_nad_pu)
            : fmt::format("total capacity {:.6g} pu is below the contingency {:.6g} pu", problem.capacity_total(),
                          problem.dP_L_pu);
        sol.cost_usd = cost(sol, problem.c_rr);
        return sol;
    }

    sol.status = SolutionStatus::Feasible;
    if (options.post_trim && active > 0)
    {
        freq::ResponseEvaluator others(model, problem.dP_L_pu);
        for (std::size_t k = 0; k + 1 < active; ++k)
        {
            auto const& d = devices[seq[k].device_index];
            others.add(d.as_source(d.r_max_pu));
        }
        auto const last_idx = seq[active - 1].device_index;
        double const r = trim_last(problem, others, devices[last_idx], options.nadir);
        if (r > 0.0)
        {
            sol.activations.back().reserve_pu = r;
            others.add(devices[last_idx].as_source(r));
        }
        else
        {
            sol.activations.pop_back();
        }
        auto const nad = nadir::find_nadir(others, options.nadir);
        sol.t_nad_s = nad.t_nad;
        sol.w_nad_pu = nad.w_nad;
        sol.nadir_kind = nad.kind;
    }
    sol.cost_usd = cost(sol, problem.c_rr);
    return sol;
}

DispatchSolution
heuristic_allocate(DispatchProblem const& problem, HeuristicOptions const& options)
{
    return heuristic_allocate(problem, freq::FrequencyModel(problem.params), options);
}

} // namespace ffr::dispatch
