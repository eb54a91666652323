#include "ffr/dispatch/baseline.hpp"

#include "ffr/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ffr::dispatch
{

namespace
{

struct Candidate
{
    double cost_bound;
    std::uint32_t mask;
};

} // namespace

DispatchSolution
exact_baseline(DispatchProblem const& problem, freq::FrequencyModel const& model, BaselineOptions const& options)
{
    problem.validate();
    auto const& devices = problem.devices;
    std::size_t const n = devices.size();
    std::size_t const limit = std::min(options.max_devices, kBaselineDeviceLimit);
    if (n > limit)
    {
        throw DomainError(fmt::format(
            "exact baseline enumerates 2^n subsets and is limited to {} devices (got {}); use the heuristic",
            limit, n));
    }
    if (!(model.params() == problem.params))
    {
        throw DomainError("exact_baseline: model parameters differ from the problem's");
    }

    SortedSequence const seq = build_sorted_sequence(devices);
    std::vector<std::size_t> rank(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        rank[seq[k].device_index] = k;
    }

    std::vector<Candidate> candidates;
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask)
    {
        double cap = 0.0;
        double marginal_cap = 0.0;
        std::size_t marginal_rank = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (mask & (std::uint32_t{1} << i))
            {
                cap += devices[i].r_max_pu;
                if (rank[i] >= marginal_rank)
                {
                    marginal_rank = rank[i];
                    marginal_cap = devices[i].r_max_pu;
                }
            }
        }
        if (cap < problem.dP_L_pu)
        {
            continue;
        }
        candidates.push_back({problem.c_rr * std::max(problem.dP_L_pu, cap - marginal_cap), mask});
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](Candidate const& a, Candidate const& b) {
        return a.cost_bound < b.cost_bound;
    });

    DispatchSolution best;
    best.path_choices = collect_path_choices(devices);
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t solves = 0;

    auto passes = [&](freq::ResponseEvaluator const& ev) {
        ++solves;
        return ev.reserve_total() >= problem.dP_L_pu
            && nadir::find_nadir(ev, options.nadir).w_nad >= -problem.dw_max_pu;
    };

    for (auto const& cand : candidates)
    {
        if (options.prune && cand.cost_bound >= best_cost)
        {
            break;
        }
        std::vector<std::size_t> members;
        for (std::size_t k = 0; k < n; ++k)
        {
            if (cand.mask & (std::uint32_t{1} << seq[k].device_index))
            {
                members.push_back(seq[k].device_index);
            }
        }
        Device const& marginal = devices[members.back()];
        freq::ResponseEvaluator others(model, problem.dP_L_pu);
        for (std::size_t j = 0; j + 1 < members.size(); ++j)
        {
            others.add(devices[members[j]].as_source(devices[members[j]].r_max_pu));
        }
        auto with_marginal = [&](double r) {
            freq::ResponseEvaluator ev = others;
            ev.add(marginal.as_source(r));
            return ev;
        };

        if (!passes(with_marginal(marginal.r_max_pu)))
        {
            continue;
        }
        double lo = std::max(0.0, problem.dP_L_pu - others.reserve_total());
        double hi = marginal.r_max_pu;
        if (lo == 0.0 ? passes(others) : passes(with_marginal(lo)))
        {
            if (lo == 0.0)
            {
                // The subset without its marginal device is also a candidate.
                continue;
            }
            hi = lo;
        }
        else
        {
            for (int it = 0; it < options.bisection_iters; ++it)
            {
                double const mid = 0.5 * (lo + hi);
                if (!(mid > lo && mid < hi))
                {
                    break;
                }
                (passes(with_marginal(mid)) ? hi : lo) = mid;
            }
        }
        double const c = problem.c_rr * (others.reserve_total() + hi);
        if (c < best_cost)
        {
            best_cost = c;
            best.activations.clear();
            for (std::size_t j = 0; j + 1 < members.size(); ++j)
            {
                best.activations.push_back(make_activation(devices, members[j], devices[members[j]].r_max_pu));
            }
            best.activations.push_back(make_activation(devices, members.back(), hi));
        }
    }

    best.iterations = solves;
    if (best.activations.empty())
    {
        best.status = SolutionStatus::Infeasible;
        best.message = "no activation subset meets the nadir limit and the contingency";
        return best;
    }
    best.status = SolutionStatus::Feasible;
    auto const nad = nadir::find_nadir(best.portfolio(problem), model, options.nadir);
    best.t_nad_s = nad.t_nad;
    best.w_nad_pu = nad.w_nad;
    best.nadir_kind = nad.kind;
    best.cost_usd = cost(best, problem.c_rr);
    return best;
}

GridResult
grid_search(DispatchProblem const& problem, freq::FrequencyModel const& model, int steps,
            nadir::NadirOptions const& options)
{
    problem.validate();
    auto const& devices = problem.devices;
    std::size_t const n = devices.size();
    if (n == 0 || n > 3)
    {
        throw DomainError("grid_search: supports one to three devices");
    }
    if (steps < 1)
    {
        throw DomainError("grid_search: steps must be >= 1");
    }

    std::vector<double> step(n);
    GridResult out;
    for (std::size_t i = 0; i < n; ++i)
    {
        step[i] = devices[i].r_max_pu / steps;
        out.max_step_pu = std::max(out.max_step_pu, step[i]);
    }

    auto feasible = [&](std::vector<int> const& j) {
        ++out.evaluations;
        freq::ResponseEvaluator ev(model, problem.dP_L_pu);
        for (std::size_t i = 0; i < n; ++i)
        {
            if (j[i] > 0)
            {
                ev.add(devices[i].as_source(j[i] * step[i]));
            }
        }
        return ev.reserve_total() >= problem.dP_L_pu
            && nadir::find_nadir(ev, options).w_nad >= -problem.dw_max_pu;
    };

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> j(n, 0);
    std::size_t const last = n - 1;
    while (true)
    {
        double head = 0.0;
        for (std::size_t i = 0; i < last; ++i)
        {
            head += j[i] * step[i];
        }
        // Smallest index of the last device that can balance the contingency.
        int lo = static_cast<int>(std::ceil(std::max(0.0, problem.dP_L_pu - head) / step[last] - 1e-9));
        while (lo <= steps && head + lo * step[last] < problem.dP_L_pu)
        {
            ++lo;
        }
        if (lo <= steps && problem.c_rr * (head + lo * step[last]) < best)
        {
            j[last] = steps;
            if (feasible(j))
            {
                int hi = steps;
                j[last] = lo;
                if (feasible(j))
                {
                    hi = lo;
                }
                else
                {
                    while (hi - lo > 1)
                    {
                        int const mid = (lo + hi) / 2;
                        j[last] = mid;
                        (feasible(j) ? hi : lo) = mid;
                    }
                }
                double const c = problem.c_rr * (head + hi * step[last]);
                if (c < best)
                {
                    best = c;
                    out.feasible = true;
                    out.cost_usd = c;
                    out.reserves_pu.assign(n, 0.0);
                    for (std::size_t i = 0; i < last; ++i)
                    {
                        out.reserves_pu[i] = j[i] * step[i];
                    }
                    out.reserves_pu[last] = hi * step[last];
                }
            }
        }
        std::size_t i = 0;
        while (i < last && ++j[i] > steps)
        {
            j[i] = 0;
            ++i;
        }
        if (i == last)
        {
            break;
        }
    }
    return out;
}

} // namespace ffr::dispatch
