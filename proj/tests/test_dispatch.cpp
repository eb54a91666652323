#include "ffr/dispatch/audit.hpp"
#include "ffr/dispatch/baseline.hpp"
#include "ffr/dispatch/bounds.hpp"
#include "ffr/dispatch/heuristic.hpp"
#include "ffr/errors.hpp"
#include "ffr/simkit/simulate.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace ffr;
using namespace ffr::dispatch;

namespace
{

Device
make_device(std::string id, DeviceKind kind, double r_max, double tau, double t_d = 0.1)
{
    Device d;
    d.id = std::move(id);
    d.kind = kind;
    d.r_max_pu = r_max;
    d.t_d_s = kind == DeviceKind::Der ? t_d : 0.0;
    d.paths = {d.id, {{"p0", routing::LatencyTrace::constant(tau)}, {"p1", routing::LatencyTrace::constant(tau + 0.05)}}};
    return d;
}

DispatchProblem
seeded_problem(std::uint64_t seed, std::size_t n, double dP_L, double dw_max = 0.016)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lat(0.0, 0.5);
    std::uniform_real_distribution<double> frac(0.6, 1.4);
    DispatchProblem pb;
    pb.dP_L_pu = dP_L;
    pb.dw_max_pu = dw_max;
    double const mean_cap = 2.0 * dP_L / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        bool const der = i < n - n / 4;
        pb.devices.push_back(make_device((der ? "der" : "cl") + std::to_string(i), der ? DeviceKind::Der : DeviceKind::Cl,
                                         mean_cap * frac(rng), lat(rng)));
    }
    route_devices(pb.devices, 0.0);
    return pb;
}

std::vector<std::size_t>
activated(DispatchSolution const& s)
{
    std::vector<std::size_t> out;
    for (auto const& a : s.activations)
    {
        out.push_back(a.device_index);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("equivalent latency")
{
    CHECK(equivalent_latency(0.2, 0.1) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(equivalent_latency(0.25, 0.0) == 0.25);
    CHECK_THROWS_AS(equivalent_latency(-0.1, 0.1), DomainError);
}

TEST_CASE("energy balance of the equivalent step by quadrature")
{
    using boost::math::quadrature::exp_sinh;
    using boost::math::quadrature::gauss_kronrod;
    double const R = 1.0;
    double const tau = 0.2;
    double const T_d = 0.1;
    double const te = equivalent_latency(tau, T_d);
    auto lag = [&](double t) { return t > tau ? R * (1.0 - std::exp(-(t - tau) / T_d)) : 0.0; };
    double const before = gauss_kronrod<double, 61>::integrate(lag, tau, te, 15, 1e-15);
    exp_sinh<double> tail;
    double const after = tail.integrate([&](double x) { return R - lag(te + x); }, 1e-15);
    CHECK(std::abs(before - after) <= 1e-9);
    CHECK(before == doctest::Approx(R * T_d / std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("sorted sequence")
{
    std::vector<Device> devs{make_device("d", DeviceKind::Der, 0.01, 0.25), make_device("c", DeviceKind::Cl, 0.01, 0.3)};
    route_devices(devs, 0.0);
    auto const seq = build_sorted_sequence(devs);
    CHECK(devs[seq[0].device_index].id == "c");
    CHECK(seq[1].latency_eff_s == doctest::Approx(0.35));

    std::vector<Device> tie{make_device("c", DeviceKind::Cl, 0.01, equivalent_latency(0.2, 0.1)),
                            make_device("d", DeviceKind::Der, 0.01, 0.2)};
    route_devices(tie, 0.0);
    CHECK(tie[build_sorted_sequence(tie)[0].device_index].id == "d");

    std::vector<Device> unrouted{make_device("x", DeviceKind::Cl, 0.01, 0.3)};
    CHECK_THROWS_AS(build_sorted_sequence(unrouted), StateError);
}

TEST_CASE("sorted sequence of a seeded fleet is a sorted permutation")
{
    auto const pb = seeded_problem(99, 1000, 0.05);
    auto const seq = build_sorted_sequence(pb.devices);
    REQUIRE(seq.size() == 1000);
    std::vector<std::size_t> idx;
    std::vector<double> keys;
    for (auto const& e : seq)
    {
        idx.push_back(e.device_index);
        keys.push_back(e.latency_eff_s);
    }
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    std::vector<double> naive;
    for (auto const& d : pb.devices)
    {
        naive.push_back(d.effective_latency());
    }
    std::sort(naive.begin(), naive.end());
    CHECK(naive == keys);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < idx.size(); ++i)
    {
        REQUIRE(idx[i] == i);
    }
}

TEST_CASE("warm start prefix")
{
    std::vector<Device> devs;
    for (int i = 0; i < 3; ++i)
    {
        devs.push_back(make_device("c" + std::to_string(i), DeviceKind::Cl, 0.05, 0.1 * (i + 1)));
    }
    route_devices(devs, 0.0);
    auto const seq = build_sorted_sequence(devs);
    CHECK(warm_start(seq, devs, 0.08) == 2);
    CHECK(warm_start(seq, devs, 0.0) == 0);
    CHECK_THROWS_AS(warm_start(seq, devs, 0.2), InfeasibleError);
}

TEST_CASE("single device covering the contingency")
{
    DispatchProblem pb;
    pb.dP_L_pu = 0.01;
    pb.dw_max_pu = 0.016;
    pb.devices = {make_device("d0", DeviceKind::Der, 0.01, 0.05)};
    route_devices(pb.devices, 0.0);
    freq::FrequencyModel const model;
    auto const sol = heuristic_allocate(pb, model);
    REQUIRE(sol.feasible());
    CHECK(sol.iterations == 1);
    CHECK(sol.activations.size() == 1);

    auto const trace = simkit::simulate(sol.portfolio(pb), 30.0, 1e-4);
    double const sim_min = *std::min_element(trace.dw.begin(), trace.dw.end());
    CHECK(sim_min == doctest::Approx(sol.w_nad_pu).epsilon(1e-6));
    CHECK(sol.w_nad_pu >= -pb.dw_max_pu);
}

TEST_CASE("non-binding limit returns the warm-start prefix")
{
    auto pb = seeded_problem(5, 20, 0.05, 10.0);
    auto const sol = heuristic_allocate(pb);
    REQUIRE(sol.feasible());
    auto const seq = build_sorted_sequence(pb.devices);
    std::size_t const k = warm_start(seq, pb.devices, pb.dP_L_pu);
    REQUIRE(sol.activations.size() == k);
    for (std::size_t i = 0; i < k; ++i)
    {
        CHECK(sol.activations[i].device_index == seq[i].device_index);
        CHECK(sol.activations[i].reserve_pu == pb.devices[seq[i].device_index].r_max_pu);
    }
    CHECK(sol.iterations == 1);
}

TEST_CASE("accelerations leave the solution unchanged")
{
    for (std::uint64_t seed = 1; seed <= 12; ++seed)
    {
        auto const pb = seeded_problem(seed, 10, 0.06, 0.004);
        freq::FrequencyModel const model;
        std::vector<DispatchSolution> sols;
        for (int mask = 0; mask < 4; ++mask)
        {
            HeuristicOptions o;
            o.warm_start = mask & 1;
            o.nadir_bracket = mask & 2;
            sols.push_back(heuristic_allocate(pb, model, o));
        }
        for (auto const& s : sols)
        {
            CHECK(s.status == sols[0].status);
            CHECK(activated(s) == activated(sols[0]));
            CHECK(s.reserve_total() == sols[0].reserve_total());
            CHECK(s.w_nad_pu == doctest::Approx(sols[0].w_nad_pu).epsilon(1e-9));
        }
        CHECK(sols[3].iterations <= sols[0].iterations);
    }
}

TEST_CASE("binding nadir activates beyond the warm start and stays minimal")
{
    auto pb = seeded_problem(3, 10, 0.06);
    freq::FrequencyModel const model;
    auto const seq = build_sorted_sequence(pb.devices);
    std::size_t const prefix = warm_start(seq, pb.devices, pb.dP_L_pu);

    // Place the limit between what the warm-start prefix and the whole fleet achieve.
    auto const loose = heuristic_allocate(pb, model);
    REQUIRE(loose.activations.size() == prefix);
    freq::Portfolio everything;
    everything.loss = freq::DelayedStepSource::loss(pb.dP_L_pu);
    for (auto const& d : pb.devices)
    {
        everything.sources.push_back(d.as_source(d.r_max_pu));
    }
    double const best = std::abs(nadir::find_nadir(everything, model).w_nad);
    REQUIRE(best < std::abs(loose.w_nad_pu));
    pb.dw_max_pu = 0.5 * (best + std::abs(loose.w_nad_pu));

    auto const sol = heuristic_allocate(pb, model);
    REQUIRE(sol.feasible());
    CHECK(sol.activations.size() > prefix);
    CHECK(audit(pb, sol, model).passed());

    // Dropping the last device fails the nadir check.
    DispatchSolution fewer = sol;
    fewer.activations.pop_back();
    auto const nad = nadir::find_nadir(fewer.portfolio(pb), model);
    CHECK(nad.w_nad < -pb.dw_max_pu);
}

TEST_CASE("nadir progress across iterations")
{
    std::size_t scenarios = 0;
    std::size_t monotone = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed)
    {
        auto const pb = seeded_problem(seed, 12, 0.08, 0.003);
        HeuristicOptions o;
        o.warm_start = false;
        auto const sol = heuristic_allocate(pb, o);
        bool ok = true;
        for (std::size_t i = 1; i < sol.trace.size(); ++i)
        {
            ok = ok && sol.trace[i].w_nad_pu >= sol.trace[i - 1].w_nad_pu - 1e-15;
        }
        ++scenarios;
        monotone += ok;
    }
    CHECK(static_cast<double>(monotone) >= 0.99 * static_cast<double>(scenarios));
}

TEST_CASE("infeasible problems report the best nadir")
{
    auto pb = seeded_problem(2, 6, 0.05, 1e-5);
    auto const sol = heuristic_allocate(pb);
    CHECK(sol.status == SolutionStatus::Infeasible);
    CHECK(sol.activations.size() == pb.devices.size());
    double best = -1.0;
    for (auto const& r : sol.trace)
    {
        best = std::max(best, r.w_nad_pu);
    }
    CHECK(sol.w_nad_pu == best);
    CHECK_FALSE(sol.message.empty());

    pb.dP_L_pu = 10.0;
    pb.dw_max_pu = 0.016;
    auto const short_cap = heuristic_allocate(pb);
    CHECK(short_cap.status == SolutionStatus::Infeasible);
}

TEST_CASE("post-trim keeps feasibility and lowers cost")
{
    auto const pb = seeded_problem(4, 10, 0.06, 0.0035);
    freq::FrequencyModel const model;
    HeuristicOptions o;
    auto const full = heuristic_allocate(pb, model, o);
    o.post_trim = true;
    auto const trimmed = heuristic_allocate(pb, model, o);
    REQUIRE(full.feasible());
    REQUIRE(trimmed.feasible());
    CHECK(trimmed.cost_usd <= full.cost_usd);
    CHECK(audit(pb, trimmed, model).passed());
}

TEST_CASE("nadir bounds bracket the iteration nadirs")
{
    auto const pb = seeded_problem(8, 40, 0.08, 0.003);
    freq::FrequencyModel const model;
    auto const seq = build_sorted_sequence(pb.devices);
    auto const b = nadir_bounds(pb, seq, model);
    CHECK(b.bracket.t_min <= b.bracket.t_max);
    HeuristicOptions o;
    o.nadir_bracket = false;
    auto const sol = heuristic_allocate(pb, model, o);
    for (auto const& r : sol.trace)
    {
        CHECK(r.t_nad_s >= b.bracket.t_min - 1e-3);
        CHECK(r.t_nad_s <= b.bracket.t_max + 1e-3);
    }
}

TEST_CASE("baseline trims the marginal device to the balance when the nadir is slack")
{
    auto const pb = seeded_problem(6, 8, 0.05);
    freq::FrequencyModel const model;
    auto const base = exact_baseline(pb, model);
    REQUIRE(base.feasible());
    CHECK(base.cost_usd == doctest::Approx(pb.c_rr * pb.dP_L_pu).epsilon(1e-12));
    CHECK(audit(pb, base, model).passed());
}

TEST_CASE("baseline with a binding nadir agrees with the grid")
{
    freq::FrequencyModel const model;
    DispatchProblem pb;
    pb.dP_L_pu = 0.01;
    pb.devices = {make_device("d0", DeviceKind::Der, 0.03, 0.3)};
    route_devices(pb.devices, 0.0);
    auto nadir_at = [&](double r) {
        freq::Portfolio pf;
        pf.loss = freq::DelayedStepSource::loss(0.01);
        pf.sources = {pb.devices[0].as_source(r)};
        return std::abs(nadir::find_nadir(pf, model).w_nad);
    };
    pb.dw_max_pu = 0.5 * (nadir_at(0.01) + nadir_at(0.03));

    auto const base = exact_baseline(pb, model);
    REQUIRE(base.feasible());
    double const r = base.activations[0].reserve_pu;
    CHECK(r > 0.01);
    CHECK(base.w_nad_pu == doctest::Approx(-pb.dw_max_pu).epsilon(1e-9));

    auto const grid = grid_search(pb, model);
    REQUIRE(grid.feasible);
    CHECK(grid.reserves_pu[0] >= r - 1e-12);
    CHECK(grid.reserves_pu[0] <= r + grid.max_step_pu + 1e-12);
}

TEST_CASE("two-device grid cross-check")
{
    freq::FrequencyModel const model;
    DispatchProblem pb;
    pb.dP_L_pu = 0.02;
    pb.devices = {make_device("d0", DeviceKind::Der, 0.015, 0.1), make_device("c0", DeviceKind::Cl, 0.02, 0.4)};
    route_devices(pb.devices, 0.0);
    pb.dw_max_pu = 0.003;
    auto const base = exact_baseline(pb, model);
    auto const grid = grid_search(pb, model, 50);
    REQUIRE(base.feasible());
    REQUIRE(grid.feasible);
    // The baseline restricts reserves to subsets with one partial device; the
    // grid is a coarse stand-in for the continuous optimum.
    CHECK(grid.cost_usd <= base.cost_usd + pb.c_rr * 2.0 * grid.max_step_pu);
    CHECK(grid.cost_usd >= pb.c_rr * pb.dP_L_pu - 1e-9);
}

TEST_CASE("heuristic cost is within one device of the baseline")
{
    freq::FrequencyModel const model;
    for (std::uint64_t seed = 1; seed <= 6; ++seed)
    {
        auto const pb = seeded_problem(seed + 40, 10, 0.06, seed % 2 ? 0.016 : 0.0035);
        auto const h = heuristic_allocate(pb, model);
        auto const b = exact_baseline(pb, model);
        REQUIRE(h.feasible());
        REQUIRE(b.feasible());
        double max_r = 0.0;
        for (auto const& a : h.activations)
        {
            max_r = std::max(max_r, pb.devices[a.device_index].r_max_pu);
        }
        double const gap = h.cost_usd - b.cost_usd;
        CHECK(gap >= -1e-9);
        CHECK(gap <= pb.c_rr * max_r + 1e-9);
    }
}

TEST_CASE("baseline refuses large fleets")
{
    auto const pb = seeded_problem(1, 13, 0.05);
    CHECK_THROWS_AS(exact_baseline(pb, freq::FrequencyModel{}), DomainError);
    BaselineOptions o;
    o.max_devices = 4;
    CHECK_THROWS_AS(exact_baseline(seeded_problem(1, 5, 0.05), freq::FrequencyModel{}, o), DomainError);
}

TEST_CASE("pruned and exhaustive baselines agree")
{
    freq::FrequencyModel const model;
    auto const pb = seeded_problem(12, 8, 0.05, 0.004);
    BaselineOptions o;
    auto const pruned = exact_baseline(pb, model, o);
    o.prune = false;
    auto const full = exact_baseline(pb, model, o);
    CHECK(pruned.cost_usd == full.cost_usd);
    CHECK(activated(pruned) == activated(full));
    CHECK(pruned.iterations <= full.iterations);
}

TEST_CASE("audit flags capacity and balance violations")
{
    freq::FrequencyModel const model;
    DispatchProblem pb;
    pb.dP_L_pu = 0.05;
    pb.devices = {make_device("a", DeviceKind::Der, 0.03, 0.1), make_device("b", DeviceKind::Cl, 0.03, 0.2)};
    route_devices(pb.devices, 0.0);

    DispatchSolution over;
    over.path_choices = collect_path_choices(pb.devices);
    over.activations = {make_activation(pb.devices, 0, 0.035), make_activation(pb.devices, 1, 0.03)};
    auto const r1 = audit(pb, over, model);
    CHECK_FALSE(r1.passed());
    auto const v = r1.violations();
    REQUIRE(v.size() == 1);
    CHECK(v[0].constraint == Constraint::Capacity);
    CHECK(v[0].subject == "a");
    CHECK(-v[0].margin == doctest::Approx(0.005).epsilon(1e-12));

    DispatchSolution shortfall;
    shortfall.path_choices = over.path_choices;
    shortfall.activations = {make_activation(pb.devices, 0, 0.03), make_activation(pb.devices, 1, 0.02 - 1e-6)};
    auto const r2 = audit(pb, shortfall, model);
    bool found = false;
    for (auto const& item : r2.items)
    {
        if (item.constraint == Constraint::SteadyState)
        {
            found = true;
            CHECK_FALSE(item.pass);
            CHECK(item.margin == doctest::Approx(-1e-6).epsilon(1e-9));
        }
    }
    CHECK(found);

    DispatchSolution twice = over;
    twice.activations = {make_activation(pb.devices, 0, 0.03), make_activation(pb.devices, 0, 0.03)};
    CHECK_FALSE(audit(pb, twice, model).passed());

    DispatchSolution two_paths = shortfall;
    two_paths.path_choices.push_back({"a", "p1"});
    bool single_path_flagged = false;
    for (auto const& item : audit(pb, two_paths, model).violations())
    {
        single_path_flagged = single_path_flagged || item.constraint == Constraint::SinglePath;
    }
    CHECK(single_path_flagged);
}

TEST_CASE("feasible heuristic output passes the audit")
{
    freq::FrequencyModel const model;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        auto const pb = seeded_problem(seed + 200, 15, 0.07, seed % 2 ? 0.016 : 0.004);
        auto const sol = heuristic_allocate(pb, model);
        if (sol.feasible())
        {
            auto const rep = audit(pb, sol, model);
            CHECK(rep.passed());
            CHECK(rep.w_nad_pu == doctest::Approx(sol.w_nad_pu).epsilon(1e-9));
        }
    }
}

TEST_CASE("cost")
{
    DispatchSolution s;
    CHECK(cost(s, 0.025e6) == 0.0);
    s.activations.push_back({0, "a", DeviceKind::Der, 0.06, 0.1, "p0"});
    s.activations.push_back({1, "b", DeviceKind::Cl, 0.04, 0.1, "p0"});
    CHECK(cost(s, 0.025e6) == doctest::Approx(2500.0));
    DispatchSolution doubled = s;
    for (auto& a : doubled.activations)
    {
        a.reserve_pu *= 2.0;
    }
    CHECK(cost(doubled, 0.025e6) == doctest::Approx(2.0 * cost(s, 0.025e6)));
}

TEST_CASE("solution export and determinism")
{
    auto const pb = seeded_problem(31, 10, 0.05);
    auto const a = heuristic_allocate(pb);
    auto const b = heuristic_allocate(pb);
    std::ostringstream oa;
    std::ostringstream ob;
    write_solution_csv(oa, a);
    write_solution_csv(ob, b);
    CHECK(oa.str() == ob.str());
    CHECK(oa.str().rfind("device_id,kind,reserve_pu,latency_s,path_id\n", 0) == 0);
    CHECK(oa.str().find(",p0\n") != std::string::npos);
    std::ostringstream os;
    write_summary_csv(os, a, pb.params);
    CHECK(os.str().rfind("t_nad_s,w_nad_pu,nadir_hz,cost_usd,iterations\n", 0) == 0);
}

TEST_CASE("problem validation")
{
    auto pb = seeded_problem(1, 3, 0.05);
    pb.dP_L_pu = 0.0;
    CHECK_THROWS_AS(pb.validate(), DomainError);
    pb.dP_L_pu = 0.05;
    pb.devices[0].r_max_pu = 0.0;
    CHECK_THROWS_AS(pb.validate(), DomainError);
}
