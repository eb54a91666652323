#include "ffr/cli/app.hpp"

#include "ffr/cli/bench.hpp"
#include "ffr/cli/scenario.hpp"
#include "ffr/dispatch/audit.hpp"
#include "ffr/dispatch/baseline.hpp"
#include "ffr/errors.hpp"
#include "ffr/simkit/simulate.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace ffr::cli
{

namespace
{

namespace fs = std::filesystem;

Scenario
scenario_from(std::string const& config)
{
    return config.empty() ? Scenario{} : load_scenario(config);
}

std::ofstream
open_out(fs::path const& path)
{
    if (path.has_parent_path())
    {
        fs::create_directories(path.parent_path());
    }
    std::ofstream f(path);
    if (!f)
    {
        throw ConfigError(fmt::format("cannot write {}", path.string()));
    }
    return f;
}

struct DecomposeArgs
{
    std::string config;
    std::optional<double> der_td;
    std::string out;
};

int
cmd_decompose(DecomposeArgs const& a, std::ostream& out)
{
    Scenario const sc = scenario_from(a.config);
    double const td = a.der_td.value_or(sc.fleet.der_time_constant_s);
    freq::FrequencyModel const model(sc.params);
    auto const& base = model.pole_set();
    auto const& der = model.der_pole_set(td);

    std::ofstream file;
    std::ostream& os = a.out.empty() ? out : (file = open_out(a.out), file);
    os << "# closed loop\n";
    freq::write_pole_set(os, base);
    os << fmt::format("# closed loop with DER lag, T_d = {} s\n", td);
    freq::write_pole_set(os, der);
    os << fmt::format("# stable: {}\n", base.is_stable() && der.is_stable() ? "yes" : "no");
    return kOk;
}

struct SimulateArgs
{
    std::string config;
    double t_end = 30.0;
    double dt = 1e-3;
    std::string out;
};

int
cmd_simulate(SimulateArgs const& a, std::ostream& out)
{
    Scenario const sc = scenario_from(a.config);
    auto const problem = generate_problem(sc);
    freq::Portfolio pf;
    pf.params = problem.params;
    pf.loss = freq::DelayedStepSource::loss(problem.dP_L_pu);
    for (auto const& d : problem.devices)
    {
        pf.sources.push_back(d.as_source(d.r_max_pu));
    }
    freq::FrequencyModel const model(pf.params);
    freq::ResponseEvaluator const ev(model, pf);

    auto const trace = simkit::simulate(pf, a.t_end, a.dt);
    auto const closed = simkit::sample([&](double t) { return ev.deviation(t); }, trace.t);
    auto const gap = simkit::compare(simkit::dw_series(trace), closed);

    if (!a.out.empty())
    {
        auto f = open_out(a.out);
        f << "t_s,dw_ode_pu,dw_closed_form_pu,abs_gap_pu\n";
        for (std::size_t i = 0; i < trace.size(); ++i)
        {
            f << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", trace.t[i], trace.dw[i], closed.v[i],
                             std::abs(trace.dw[i] - closed.v[i]));
        }
    }
    out << fmt::format("sources            {}\n", pf.sources.size());
    out << fmt::format("steps              {}\n", trace.size() - 1);
    out << fmt::format("max_abs_gap_pu     {:.3e}\n", gap.max_abs);
    out << fmt::format("rmse_pu            {:.3e}\n", gap.rmse);
    out << fmt::format("argmax_t_s         {:.6g}\n", gap.argmax_t);
    out << fmt::format("within_1e-5        {}\n", gap.max_abs <= 1e-5 ? "yes" : "no");
    return kOk;
}

struct DispatchArgs
{
    std::string config;
    bool baseline = false;
    bool no_warm_start = false;
    bool no_bracket = false;
    bool post_trim = false;
    std::string out;
};

int
cmd_dispatch(DispatchArgs const& a, std::ostream& out)
{
    Scenario const sc = scenario_from(a.config);
    auto const problem = generate_problem(sc);
    if (a.baseline && problem.devices.size() > dispatch::kBaselineDeviceLimit)
    {
        throw ConfigError(fmt::format(
            "--baseline enumerates every activation subset and is limited to {} devices; this scenario has {}. "
            "Reduce fleet.ders/fleet.cls or drop --baseline.",
            dispatch::kBaselineDeviceLimit, problem.devices.size()));
    }
    auto opts = sc.heuristic_options();
    opts.warm_start = opts.warm_start && !a.no_warm_start;
    opts.nadir_bracket = opts.nadir_bracket && !a.no_bracket;
    opts.post_trim = opts.post_trim || a.post_trim;

    freq::FrequencyModel const model(problem.params);
    auto const sol = dispatch::heuristic_allocate(problem, model, opts);
    auto const report = dispatch::audit(problem, sol, model, opts.nadir);

    out << fmt::format("status             {}\n", dispatch::to_string(sol.status));
    if (!sol.message.empty())
    {
        out << fmt::format("message            {}\n", sol.message);
    }
    out << fmt::format("devices            {}\n", problem.devices.size());
    out << fmt::format("activated          {}\n", sol.activations.size());
    out << fmt::format("reserve_pu         {:.9g}\n", sol.reserve_total());
    out << fmt::format("iterations         {}\n", sol.iterations);
    out << fmt::format("t_nad_s            {:.6g}\n", sol.t_nad_s);
    out << fmt::format("w_nad_pu           {:.9g}\n", sol.w_nad_pu);
    out << fmt::format("nadir_hz           {:.6f}\n", problem.params.to_hz(sol.w_nad_pu));
    out << fmt::format("cost_usd           {:.6f}\n", sol.cost_usd);
    dispatch::write_audit(out, report);

    if (a.baseline)
    {
        auto const base = dispatch::exact_baseline(problem, model, {.nadir = opts.nadir});
        out << fmt::format("baseline_status    {}\n", dispatch::to_string(base.status));
        if (base.feasible() && sol.feasible())
        {
            double max_r = 0.0;
            for (auto const& act : sol.activations)
            {
                max_r = std::max(max_r, problem.devices[act.device_index].r_max_pu);
            }
            double const gap = sol.cost_usd - base.cost_usd;
            double const bound = problem.c_rr * max_r;
            out << fmt::format("baseline_cost_usd  {:.6f}\n", base.cost_usd);
            out << fmt::format("gap_usd            {:.6f}\n", gap);
            out << fmt::format("gap_bound_usd      {:.6f}\n", bound);
            out << fmt::format("gap_within_bound   {}\n", gap >= -1e-9 * bound && gap <= bound ? "yes" : "no");
        }
    }

    if (!a.out.empty())
    {
        fs::create_directories(a.out);
        auto sf = open_out(fs::path(a.out) / "solution.csv");
        dispatch::write_solution_csv(sf, sol);
        auto mf = open_out(fs::path(a.out) / "summary.csv");
        dispatch::write_summary_csv(mf, sol, problem.params);
        auto af = open_out(fs::path(a.out) / "audit.txt");
        dispatch::write_audit(af, report);
    }
    return sol.feasible() ? kOk : kInfeasible;
}

struct StatsArgs
{
    std::vector<std::string> traces;
    std::vector<std::string> profiles;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    double bin_width = 0.01;
    std::string out;
};

int
cmd_latency_stats(StatsArgs const& a, std::ostream& out)
{
    struct Source
    {
        std::string name;
        std::vector<double> values;
    };
    std::vector<Source> sources;
    for (auto const& t : a.traces)
    {
        sources.push_back({fs::path(t).stem().string(), routing::ingest_trace(t).latencies()});
    }
    for (auto const& p : a.profiles)
    {
        sources.push_back({p, routing::synth_latencies(routing::LatencyProfile::by_name(p), a.samples, a.seed)});
    }
    if (sources.empty())
    {
        throw ConfigError("latency-stats needs --traces or --profile");
    }

    out << fmt::format("{:<16} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}\n", "source", "n", "p50_ms", "p90_ms", "p99_ms",
                       "max_ms", "in_100_200");
    std::vector<double> p99;
    for (auto const& s : sources)
    {
        auto const cdf = routing::empirical_cdf(s.values);
        auto const in_band = std::count_if(s.values.begin(), s.values.end(), [](double v) {
            return v >= 0.1 && v < 0.2;
        });
        p99.push_back(routing::percentile(cdf, 0.99));
        out << fmt::format("{:<16} {:>9} {:>9.1f} {:>9.1f} {:>9.1f} {:>9.1f} {:>9.3f}\n", s.name, cdf.size(),
                           1e3 * routing::percentile(cdf, 0.5), 1e3 * routing::percentile(cdf, 0.9), 1e3 * p99.back(),
                           1e3 * cdf.tau_max(), static_cast<double>(in_band) / static_cast<double>(cdf.size()));
        if (!a.out.empty())
        {
            fs::create_directories(a.out);
            auto cf = open_out(fs::path(a.out) / (s.name + "_cdf.csv"));
            routing::write_cdf_csv(cf, cdf);
            auto hf = open_out(fs::path(a.out) / (s.name + "_hist.csv"));
            auto const bins = routing::histogram(cdf, a.bin_width);
            routing::write_histogram_csv(hf, bins);
        }
    }
    if (sources.size() == 2)
    {
        out << fmt::format("p99 gap ({} - {}): {:.1f} ms\n", sources[1].name, sources[0].name,
                           1e3 * (p99[1] - p99[0]));
    }
    return kOk;
}

int
cmd_bench(BenchConfig const& cfg, std::string const& out_path, std::ostream& out)
{
    auto const result = run_bench(cfg);
    write_bench_table(out, result);
    if (!out_path.empty())
    {
        auto f = open_out(out_path);
        write_bench_csv(f, result);
    }
    return kOk;
}

} // namespace

int
run(int argc, char const* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Latency-aware fast frequency reserve dispatch"};
    app.require_subcommand(1);

    DecomposeArgs dec;
    auto* c_dec = app.add_subcommand("decompose", "Print the pole/residue sets of the closed loop");
    c_dec->add_option("--config", dec.config, "Scenario file")->check(CLI::ExistingFile);
    c_dec->add_option("--der-td", dec.der_td, "DER time constant for the augmented set, s");
    c_dec->add_option("--out", dec.out, "Write the listing to a file");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Closed form against the RK4 oracle for the whole fleet");
    c_sim->add_option("--config", sim.config, "Scenario file")->check(CLI::ExistingFile);
    c_sim->add_option("--t-end", sim.t_end, "Simulated horizon, s");
    c_sim->add_option("--dt", sim.dt, "RK4 step, s");
    c_sim->add_option("--out", sim.out, "Trace CSV");

    DispatchArgs dis;
    auto* c_dis = app.add_subcommand("dispatch", "Allocate reserves and audit the result");
    c_dis->add_option("--config", dis.config, "Scenario file")->required()->check(CLI::ExistingFile);
    c_dis->add_flag("--baseline", dis.baseline, "Also run the exact subset baseline (at most 12 devices)");
    c_dis->add_flag("--no-warm-start", dis.no_warm_start, "Start from the first device");
    c_dis->add_flag("--no-bracket", dis.no_bracket, "Search the whole horizon for every nadir");
    c_dis->add_flag("--post-trim", dis.post_trim, "Trim the last activated device");
    c_dis->add_option("--out", dis.out, "Directory for solution.csv, summary.csv and audit.txt");

    StatsArgs st;
    auto* c_st = app.add_subcommand("latency-stats", "CDF, histogram and percentiles of latency samples");
    auto* o_traces = c_st->add_option("--traces", st.traces, "Trace CSV files")->check(CLI::ExistingFile);
    auto* o_prof = c_st->add_option("--profile", st.profiles, "Synthetic profiles (scion, bgp)")->delimiter(',');
    o_traces->excludes(o_prof);
    c_st->add_option("--samples", st.samples, "Draws per synthetic profile");
    c_st->add_option("--seed", st.seed, "Seed for synthetic profiles");
    c_st->add_option("--bin-width", st.bin_width, "Histogram bin width, s");
    c_st->add_option("--out", st.out, "Directory for <name>_cdf.csv and <name>_hist.csv");

    BenchConfig bench;
    std::string bench_out;
    auto* c_bench = app.add_subcommand("bench", "Runtime of the heuristic and the exact baseline");
    c_bench->add_option("--sizes", bench.sizes, "Heuristic fleet sizes")->delimiter(',');
    c_bench->add_option("--repeats", bench.repeats, "Timed runs per point")->check(CLI::PositiveNumber);
    c_bench->add_option("--seed", bench.seed, "Scenario seed");
    c_bench->add_option("--baseline-sizes", bench.baseline_sizes, "Baseline fleet sizes (at most 12)")
        ->delimiter(',');
    c_bench->add_flag("--baseline-prune", bench.baseline_prune, "Use bound pruning in the baseline");
    c_bench->add_option("--max-plain-size", bench.max_plain_size,
                        "Largest size timed without warm start (those runs are quadratic)");
    c_bench->add_option("--out", bench_out, "Runtime CSV");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try
    {
        if (*c_dec)
        {
            return cmd_decompose(dec, out);
        }
        if (*c_sim)
        {
            return cmd_simulate(sim, out);
        }
        if (*c_dis)
        {
            return cmd_dispatch(dis, out);
        }
        if (*c_st)
        {
            return cmd_latency_stats(st, out);
        }
        if (*c_bench)
        {
            return cmd_bench(bench, bench_out, out);
        }
    }
    catch (InfeasibleError const& e)
    {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    }
    catch (NumericalError const& e)
    {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    catch (UnsupportedStructureError const& e)
    {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

} // namespace ffr::cli
