#include "ffr/cli/bench.hpp"

#include "ffr/dispatch/baseline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>

namespace ffr::cli
{

Scenario
bench_scenario(std::size_t size, std::uint64_t seed, double fraction)
{
    Scenario sc;
    sc.seed = seed;
    sc.fleet.ders = size - size / 5;
    sc.fleet.cls = size / 5;
    double const mean_capacity = static_cast<double>(sc.fleet.ders) * 12.5e-6 + static_cast<double>(sc.fleet.cls) * 3e-6;
    sc.dispatch.dP_L_pu = fraction * mean_capacity;
    return sc;
}

double
loglog_slope(std::vector<double> const& x, std::vector<double> const& y)
{
    std::size_t const n = std::min(x.size(), y.size());
    if (n < 2)
    {
        return 0.0;
    }
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    double const mx = sx / static_cast<double>(n);
    double const my = sy / static_cast<double>(n);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double const dx = std::log(x[i]) - mx;
        num += dx * (std::log(y[i]) - my);
        den += dx * dx;
    }
    return den > 0.0 ? num / den : 0.0;
}

namespace
{

using Clock = std::chrono::steady_clock;

double
seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double
median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    std::size_t const m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

BenchResult
run_bench(BenchConfig const& cfg)
{
    for (auto n : cfg.baseline_sizes)
    {
        if (n > dispatch::kBaselineDeviceLimit)
        {
            throw ConfigError(fmt::format(
                "baseline size {} refused: subset enumeration grows as 2^n and is limited to {} devices; "
                "time the heuristic for larger fleets",
                n, dispatch::kBaselineDeviceLimit));
        }
    }

    struct OptionSet
    {
        char const* name;
        bool warm;
        bool bracket;
    };
    OptionSet const sets[] = {
        {"warm+bracket", true, true},
        {"warm", true, false},
        {"bracket", false, true},
        {"plain", false, false},
    };

    BenchResult result;
    std::vector<double> xs;
    std::vector<double> ys;
    for (auto size : cfg.sizes)
    {
        auto const problem = generate_problem(bench_scenario(size, cfg.seed, cfg.contingency_fraction));
        freq::FrequencyModel const model(problem.params);
        for (auto const& set : sets)
        {
            if (!set.warm && size > cfg.max_plain_size)
            {
                continue;
            }
            dispatch::HeuristicOptions opts;
            opts.warm_start = set.warm;
            opts.nadir_bracket = set.bracket;
            opts.record_trace = false;
            std::vector<double> times;
            for (std::size_t r = 0; r < cfg.repeats; ++r)
            {
                auto const start = Clock::now();
                auto const sol = dispatch::heuristic_allocate(problem, model, opts);
                double const s = seconds_since(start);
                times.push_back(s);
                result.rows.push_back({"heuristic", set.name, size, r, s, sol.iterations, sol.activations.size()});
            }
            if (set.warm && set.bracket)
            {
                xs.push_back(static_cast<double>(size));
                ys.push_back(median(times));
            }
        }
    }
    result.heuristic_slope = loglog_slope(xs, ys);

    for (auto size : cfg.baseline_sizes)
    {
        auto const problem = generate_problem(bench_scenario(size, cfg.seed, cfg.contingency_fraction));
        freq::FrequencyModel const model(problem.params);
        dispatch::BaselineOptions opts;
        opts.prune = cfg.baseline_prune;
        auto const start = Clock::now();
        auto const sol = dispatch::exact_baseline(problem, model, opts);
        result.rows.push_back({"baseline", cfg.baseline_prune ? "pruned" : "exhaustive", size, 0, seconds_since(start),
                               sol.iterations, sol.activations.size()});
    }
    return result;
}

void
write_bench_table(std::ostream& os, BenchResult const& result)
{
    std::map<std::tuple<std::string, std::string, std::size_t>, std::vector<BenchRow const*>> groups;
    for (auto const& row : result.rows)
    {
        groups[{row.solver, row.option_set, row.size}].push_back(&row);
    }
    os << fmt::format("{:<10} {:<13} {:>8} {:>12} {:>10} {:>10}\n", "solver", "options", "size", "median_ms",
                      "iterations", "activated");
    for (auto const& [key, rows] : groups)
    {
        std::vector<double> t;
        for (auto const* r : rows)
        {
            t.push_back(r->seconds);
        }
        auto const& [solver, set, size] = key;
        os << fmt::format("{:<10} {:<13} {:>8} {:>12.3f} {:>10} {:>10}\n", solver, set, size, 1e3 * median(t),
                          rows.front()->iterations, rows.front()->activated);
    }
    os << fmt::format("heuristic log-log slope (warm+bracket): {:.3f}\n", result.heuristic_slope);
}

void
write_bench_csv(std::ostream& os, BenchResult const& result)
{
    os << "solver,options,size,repeat,seconds,iterations,activated\n";
    for (auto const& r : result.rows)
    {
        os << fmt::format("{},{},{},{},{:.9f},{},{}\n", r.solver, r.option_set, r.size, r.repeat, r.seconds,
                          r.iterations, r.activated);
    }
}

} // namespace ffr::cli
